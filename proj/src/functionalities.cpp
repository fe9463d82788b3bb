#include "ivxv/functionalities.hpp"

#include <algorithm>

#include "ivxv/bytes.hpp"
#include "ivxv/error.hpp"

namespace ivxv {

std::string to_string(const SubsessionId& ssid) {
  return std::to_string(ssid.voter) + ":" + std::to_string(ssid.nonce);
}

json to_json(const SubsessionId& ssid) { return json{{"voter", ssid.voter}, {"nonce", ssid.nonce}}; }

SubsessionId subsession_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::Malformed, "expected a subsession id");
  return SubsessionId{j.at("voter").get<std::uint32_t>(), j.at("nonce").get<std::uint32_t>()};
}

namespace {

struct EntryEncoder {
  json& out;
  void operator()(const PublicKeyPost& p) const {
    out["kind"] = "pubkey";
    out["pk"] = to_json(p.pk.h);
  }
  void operator()(const Ballot& b) const {
    out["kind"] = "ballot";
    out["ssid"] = to_json(b.ssid);
    out["c"] = to_json(b.c);
    out["sigma"] = b.sigma;
  }
  void operator()(const ShufflePost& s) const {
    out["kind"] = "shuffle";
    json in = json::array(), outs = json::array();
    for (const auto& c : s.inputs) in.push_back(to_json(c));
    for (const auto& c : s.outputs) outs.push_back(to_json(c));
    out["inputs"] = std::move(in);
    out["outputs"] = std::move(outs);
    out["proof"] = to_hex(s.proof);
  }
  void operator()(const PlaintextsPost& p) const {
    out["kind"] = "plaintexts";
    json arr = json::array();
    for (const auto& m : p.plaintexts) arr.push_back(m ? json(*m) : json(nullptr));
    out["plaintexts"] = std::move(arr);
  }
};

std::vector<Ciphertext> ciphertexts_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorCode::Malformed, "expected a ciphertext list");
  std::vector<Ciphertext> out;
  for (const auto& c : j) out.push_back(ciphertext_from_json(c));
  return out;
}

}  // namespace

json to_json(const BoardEntry& e) {
  json out{{"seq", e.seq}};
  std::visit(EntryEncoder{out}, e.payload);
  return out;
}

BoardEntry board_entry_from_json(const json& j) {
  try {
    BoardEntry e;
    e.seq = j.at("seq").get<std::uint64_t>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "pubkey") {
      e.payload = PublicKeyPost{PublicKey{element_from_json(j.at("pk"))}};
    } else if (kind == "ballot") {
      e.payload = Ballot{subsession_from_json(j.at("ssid")), ciphertext_from_json(j.at("c")),
                         j.at("sigma").get<std::string>()};
    } else if (kind == "shuffle") {
      e.payload = ShufflePost{ciphertexts_from_json(j.at("inputs")), ciphertexts_from_json(j.at("outputs")),
                              from_hex(j.at("proof").get<std::string>())};
    } else if (kind == "plaintexts") {
      PlaintextsPost p;
      for (const auto& m : j.at("plaintexts")) {
        p.plaintexts.push_back(m.is_null() ? std::nullopt : std::optional<std::uint32_t>(m.get<std::uint32_t>()));
      }
      e.payload = std::move(p);
    } else {
      fail(ErrorCode::Malformed, "unknown board entry kind '" + kind + "'");
    }
    return e;
  } catch (const json::exception& ex) {
    fail(ErrorCode::Malformed, std::string("malformed board entry: ") + ex.what());
  }
}

// ---- bulletin board ----

void BulletinBoard::check_sid(const SessionId& sid) const {
  if (sid != sid_) fail(ErrorCode::InvalidSession, "bulletin board bound to session '" + sid_ + "'");
}

std::uint64_t BulletinBoard::append(bool is_private, BoardPayload payload) {
  auto& side = is_private ? priv_ : pub_;
  side.push_back(BoardEntry{next_seq_++, std::move(payload)});
  if (observer_) observer_(is_private, side.back());
  return side.back().seq;
}

std::uint64_t BulletinBoard::pub_post(const SessionId& sid, BoardPayload payload) {
  check_sid(sid);
  return append(false, std::move(payload));
}

std::uint64_t BulletinBoard::priv_post(const SessionId& sid, BoardPayload payload) {
  check_sid(sid);
  return append(true, std::move(payload));
}

BulletinBoard::Snapshot BulletinBoard::read(const SessionId& sid, Role reader) const {
  check_sid(sid);
  Snapshot s{pub_, std::nullopt};
  if (reader == Role::ElectionAuthority || reader == Role::Auditor || reader == Role::Functionality) s.priv = priv_;
  return s;
}

const std::vector<BoardEntry>& BulletinBoard::read_public(const SessionId& sid) const {
  check_sid(sid);
  return pub_;
}

const std::vector<BoardEntry>& BulletinBoard::read_private(const SessionId& sid, Role reader) const {
  check_sid(sid);
  if (reader != Role::ElectionAuthority && reader != Role::Auditor && reader != Role::Functionality) {
    fail(ErrorCode::AccessDenied, "private board is readable by the authority and the auditor only");
  }
  return priv_;
}

Digest BulletinBoard::prefix_digest(bool is_private, std::size_t n) const {
  const auto& side = is_private ? priv_ : pub_;
  if (n > side.size()) fail(ErrorCode::InvalidArgument, "prefix longer than the board");
  Digest acc = sha256(std::string_view(is_private ? "ivxv-sim/bb/priv" : "ivxv-sim/bb/pub"));
  for (std::size_t i = 0; i < n; ++i) {
    Sha256 h;
    h.update(acc);
    h.update(to_json(side[i]).dump());
    acc = h.finish();
  }
  return acc;
}

void BulletinBoard::restore(bool is_private, BoardEntry entry) {
  if (entry.seq < next_seq_) fail(ErrorCode::Malformed, "board sequence numbers must increase");
  next_seq_ = entry.seq + 1;
  (is_private ? priv_ : pub_).push_back(std::move(entry));
}

// ---- certification ----

CertHandle CertRegistry::sign(const SessionId& sid, const SubsessionId& ssid, std::span<const std::uint8_t> message,
                              std::uint32_t signer, Rng& rng) {
  if (sid != sid_) fail(ErrorCode::InvalidSession, "certification bound to session '" + sid_ + "'");
  if (signer != ssid.voter) {
    fail(ErrorCode::Unauthorized, "device of voter " + std::to_string(signer) + " cannot sign for " + to_string(ssid));
  }
  std::uint8_t raw[16];
  rng.fill(raw, sizeof raw);
  Issued issued{ssid, sha256(message), to_hex(raw)};
  index_.emplace(issued.ssid, issued.message, issued.sigma);
  issued_.push_back(issued);
  if (observer_) observer_(issued_.back());
  return issued.sigma;
}

bool CertRegistry::verify(const SessionId& sid, const SubsessionId& ssid, std::span<const std::uint8_t> message,
                          const CertHandle& sigma) const {
  if (sid != sid_) return false;
  return index_.contains(std::make_tuple(ssid, sha256(message), sigma));
}

void CertRegistry::restore(Issued issued) {
  index_.emplace(issued.ssid, issued.message, issued.sigma);
  issued_.push_back(std::move(issued));
}

// ---- key generation ----

KeyGenFunctionality::KeyGenFunctionality(SessionId sid, std::shared_ptr<const Group> group, std::uint32_t t,
                                         std::uint32_t k, Rng rng)
    : sid_(std::move(sid)), group_(std::move(group)), t_(t), k_(k), rng_(std::move(rng)) {
  if (t < 1 || k < 1) fail(ErrorCode::InvalidArgument, "t and k must be positive");
  if (t > k) fail(ErrorCode::ThresholdExceedsShares, "threshold exceeds number of trustees");
}

void KeyGenFunctionality::ready(const SessionId& sid, std::uint32_t trustee) {
  if (sid != sid_) fail(ErrorCode::InvalidSession, "key generation bound to session '" + sid_ + "'");
  if (trustee < 1 || trustee > k_) fail(ErrorCode::InvalidArgument, "unknown trustee " + std::to_string(trustee));
  ready_.insert(trustee);
}

PublicKey KeyGenFunctionality::public_key(const SessionId& sid) {
  if (sid != sid_) fail(ErrorCode::InvalidSession, "key generation bound to session '" + sid_ + "'");
  if (!keys_) {
    if (ready_.size() < k_) {
      fail(ErrorCode::NotReady, std::to_string(ready_.size()) + " of " + std::to_string(k_) + " trustees ready");
    }
    keys_ = keygen(*group_, rng_);
    shares_ = deal(*group_, keys_->sk.sk, t_, k_, rng_);
  }
  return keys_->pk;
}

const SecretShare& KeyGenFunctionality::share(std::uint32_t trustee) const {
  if (!keys_) fail(ErrorCode::NotReady, "key not generated yet");
  if (trustee < 1 || trustee > k_) fail(ErrorCode::InvalidArgument, "unknown trustee " + std::to_string(trustee));
  return shares_[trustee - 1];
}

// ---- decryption ----

DecFunctionality::DecFunctionality(SessionId sid, std::shared_ptr<const Group> group,
                                   const KeyGenFunctionality& keygen, BulletinBoard& board, bool threshold_strict)
    : sid_(std::move(sid)), group_(std::move(group)), keygen_(keygen), board_(board),
      threshold_strict_(threshold_strict) {}

void DecFunctionality::submit_key(const SessionId& sid, std::uint32_t trustee) {
  if (sid != sid_) fail(ErrorCode::InvalidSession, "decryption bound to session '" + sid_ + "'");
  if (trustee < 1 || trustee > keygen_.trustees()) fail(ErrorCode::InvalidArgument, "unknown trustee " + std::to_string(trustee));
  submitted_.insert(trustee);
}

bool DecFunctionality::threshold_met() const {
  const auto t = keygen_.threshold();
  return threshold_strict_ ? submitted_.size() > t : submitted_.size() >= t;
}

SecretKey DecFunctionality::secret_key() const {
  std::vector<SecretShare> shares;
  for (auto trustee : submitted_) shares.push_back(keygen_.share(trustee));
  return reconstruct(*group_, shares, keygen_.threshold());
}

std::vector<std::optional<std::uint32_t>> DecFunctionality::decrypt_all(const ShufflePost& shuffle) const {
  const SecretKey sk = secret_key();
  std::vector<std::optional<std::uint32_t>> out;
  out.reserve(shuffle.outputs.size());
  for (const auto& c : shuffle.outputs) {
    try {
      out.emplace_back(decrypt(*group_, sk, c));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotACandidate && e.code() != ErrorCode::InvalidArgument) throw;
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

std::vector<std::optional<std::uint32_t>> DecFunctionality::decrypt_and_post(const SessionId& sid) {
  if (sid != sid_) fail(ErrorCode::InvalidSession, "decryption bound to session '" + sid_ + "'");
  if (!threshold_met()) {
    fail(ErrorCode::ThresholdNotMet, std::to_string(submitted_.size()) + " trustees submitted, threshold " +
                                         std::to_string(keygen_.threshold()) + (threshold_strict_ ? " (strict)" : ""));
  }
  const auto* shuffle = latest<ShufflePost>(board_.read_private(sid_, Role::Functionality));
  if (shuffle == nullptr) fail(ErrorCode::MissingShuffle, "no shuffled ballot list on the board");
  auto plaintexts = decrypt_all(*shuffle);
  board_.pub_post(sid_, PlaintextsPost{plaintexts});
  return plaintexts;
}

bool DecFunctionality::audit(const SessionId& sid) const {
  if (sid != sid_) return false;
  const auto* shuffle = latest<ShufflePost>(board_.read_private(sid_, Role::Functionality));
  const auto* posted = latest<PlaintextsPost>(board_.read_public(sid_));
  if (shuffle == nullptr || posted == nullptr || !keygen_.complete()) return false;
  if (submitted_.empty() || !threshold_met()) return false;
  return decrypt_all(*shuffle) == posted->plaintexts;
}

// ---- devices ----

VoterDevice::VoterDevice(SessionId sid, std::uint32_t voter, std::shared_ptr<const Group> group, CertRegistry& certs,
                         Rng rng)
    : sid_(std::move(sid)), voter_(voter), group_(std::move(group)), certs_(certs), rng_(std::move(rng)) {}

void VoterDevice::corrupt(ManipulationPolicy policy, std::uint32_t shift) {
  if (group_->candidate_bound() < 2) fail(ErrorCode::Config, "manipulation needs at least two candidates");
  if (shift == 0 || shift >= group_->candidate_bound()) fail(ErrorCode::Config, "adversary shift must lie in [1, C)");
  policy_ = std::move(policy);
  shift_ = shift;
}

CastResult VoterDevice::cast(const SessionId& sid, const PublicKey& pk, std::uint32_t intent,
                             std::string_view history) {
  if (sid != sid_) fail(ErrorCode::InvalidSession, "voting device bound to session '" + sid_ + "'");
  const SubsessionId ssid{voter_, next_nonce_++};
  const bool manipulate = policy_ && policy_->decide(history) == Decision::Manipulate;
  const std::uint32_t encrypted = manipulate ? (intent + shift_) % group_->candidate_bound() : intent;
  const Scalar r = group_->random_scalar(rng_);
  const Ciphertext c = encrypt(*group_, pk, encrypted, r);
  const auto sigma = certs_.sign(sid_, ssid, ciphertext_bytes(c), voter_, rng_);
  return CastResult{Ballot{ssid, c, sigma}, VerificationToken{ssid, r, intent}, manipulate, encrypted};
}

AuditDevice::AuditDevice(SessionId sid, std::shared_ptr<const Group> group, const BulletinBoard& board)
    : sid_(std::move(sid)), group_(std::move(group)), board_(board) {}

CheckResult AuditDevice::check(const SessionId& sid, const PublicKey& pk, const VerificationToken& token) const {
  if (sid != sid_) fail(ErrorCode::InvalidSession, "audit device bound to session '" + sid_ + "'");
  const auto& priv = board_.read_private(sid_, Role::Functionality);
  const Ballot* recorded = nullptr;
  for (auto it = priv.rbegin(); it != priv.rend() && recorded == nullptr; ++it) {
    if (const auto* b = std::get_if<Ballot>(&it->payload); b && b->ssid == token.ssid) recorded = b;
  }
  if (recorded == nullptr) fail(ErrorCode::UnknownSsid, "no recorded ballot for " + to_string(token.ssid));
  try {
    const auto observed = trapdoor_decrypt(*group_, pk, recorded->c, token.r);
    return CheckResult{observed == token.intent, observed};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RandomnessMismatch && e.code() != ErrorCode::NotACandidate) throw;
    return CheckResult{false, std::nullopt};
  }
}

VoterScript VoterEmulator::sample(const SessionId& sid, Rng& rng) const {
  if (sid != sid_) fail(ErrorCode::InvalidSession, "voter emulator bound to session '" + sid_ + "'");
  return dist_.sample(rng);
}

}  // namespace ivxv
