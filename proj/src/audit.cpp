#include "ivxv/audit.hpp"

#include "ivxv/error.hpp"
#include "ivxv/shuffle.hpp"

namespace ivxv {

namespace {

AuditVerdict invalid(FailureReason r) { return AuditVerdict{false, r}; }

}  // namespace

AuditVerdict run_audit(const Group& group, const SessionId& sid, std::uint32_t voters, const BulletinBoard& board,
                       const CertRegistry& certs, const std::function<bool()>& decryption_audit,
                       std::size_t complaints) {
  const auto snapshot = board.read(sid, Role::Auditor);
  const auto& priv = *snapshot.priv;

  std::vector<std::optional<Ciphertext>> last(voters);
  bool foreign = false;
  for (const auto& entry : priv) {
    const auto* b = std::get_if<Ballot>(&entry.payload);
    if (b == nullptr) continue;
    if (!certs.verify(sid, b->ssid, ciphertext_bytes(b->c), b->sigma)) return invalid(FailureReason::BadSignature);
    if (b->ssid.voter >= 1 && b->ssid.voter <= voters) {
      last[b->ssid.voter - 1] = b->c;
    } else {
      foreign = true;
    }
  }

  const auto* shuffle = latest<ShufflePost>(priv);
  if (shuffle == nullptr || foreign || shuffle->inputs.size() != voters) {
    return invalid(FailureReason::LastBallotMismatch);
  }
  for (std::uint32_t i = 0; i < voters; ++i) {
    if (!last[i] || *last[i] != shuffle->inputs[i]) return invalid(FailureReason::LastBallotMismatch);
  }

  const auto* pk = latest<PublicKeyPost>(snapshot.pub);
  if (pk == nullptr) return invalid(FailureReason::ShuffleProof);
  std::vector<Ciphertext> inputs;
  for (const auto& c : last) inputs.push_back(*c);
  const ShuffleStatement statement{pk->pk, std::move(inputs), shuffle->outputs};
  if (!verify_shuffle(group, statement, std::span<const std::uint8_t>(shuffle->proof))) {
    return invalid(FailureReason::ShuffleProof);
  }

  if (!decryption_audit()) return invalid(FailureReason::Decryption);
  if (complaints > 0) return invalid(FailureReason::Complaint);
  return AuditVerdict{};
}

ReplayResult replay(const Transcript& transcript) {
  const auto& events = transcript.events();
  if (events.empty() || events.front().kind != "manifest") {
    fail(ErrorCode::Malformed, "transcript does not start with a manifest");
  }
  ElectionConfig config;
  try {
    config = parse_config(events.front().payload.at("config"));
    config.seed = events.front().payload.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    fail(ErrorCode::Malformed, std::string("bad manifest: ") + e.what());
  } catch (const Error& e) {
    fail(ErrorCode::Malformed, std::string("bad manifest: ") + e.what());
  }

  auto group = std::make_shared<const Group>(setup(config.group, config.candidates));
  BulletinBoard board(config.sid);
  CertRegistry certs(config.sid);
  std::vector<std::uint32_t> key_holders;
  std::size_t complaints = 0;
  std::optional<AuditVerdict> recorded;

  try {
    for (const auto& ev : events) {
      if (ev.kind == "bb.pub" || ev.kind == "bb.priv") {
        board.restore(ev.kind == "bb.priv", board_entry_from_json(ev.payload));
      } else if (ev.kind == "cert.issue") {
        CertRegistry::Issued issued;
        issued.ssid = subsession_from_json(ev.payload.at("ssid"));
        const auto digest = from_hex(ev.payload.at("message").get<std::string>());
        if (digest.size() != issued.message.size()) fail(ErrorCode::Malformed, "certified digest has wrong length");
        std::copy(digest.begin(), digest.end(), issued.message.begin());
        issued.sigma = ev.payload.at("sigma").get<std::string>();
        certs.restore(std::move(issued));
      } else if (ev.kind == "key.submitted") {
        key_holders.push_back(ev.payload.at("trustee").get<std::uint32_t>());
      } else if (ev.kind == "complaint.received") {
        ++complaints;
      } else if (ev.kind == "verdict") {
        recorded = AuditVerdict{ev.payload.at("valid").get<bool>(),
                                failure_reason_from_string(ev.payload.at("reason").get<std::string>())};
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::Malformed, std::string("bad transcript event: ") + e.what());
  }
  if (!recorded) fail(ErrorCode::Malformed, "transcript has no verdict");

  // The ideal key material is a function of the seed alone.
  KeyGenFunctionality keygen(config.sid, group, config.threshold, config.trustees, Rng(config.seed).derive("keygen"));
  for (std::uint32_t j = 1; j <= config.trustees; ++j) keygen.ready(config.sid, j);
  const auto pk = keygen.public_key(config.sid);
  DecFunctionality dec(config.sid, group, keygen, board, config.threshold_strict);
  for (auto j : key_holders) dec.submit_key(config.sid, j);
  const auto* posted_pk = latest<PublicKeyPost>(board.read_public(config.sid));
  const bool same_key = posted_pk != nullptr && posted_pk->pk == pk;

  ReplayResult result;
  result.recorded = *recorded;
  result.recomputed = run_audit(*group, config.sid, config.voters, board, certs,
                                [&] { return same_key && dec.audit(config.sid); }, complaints);
  return result;
}

}  // namespace ivxv
