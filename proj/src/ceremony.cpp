#include "ivxv/ceremony.hpp"

#include <deque>
#include <set>

#include "ivxv/audit.hpp"
#include "ivxv/error.hpp"
#include "ivxv/shuffle.hpp"

namespace ivxv {

std::string_view to_string(FailureReason r) {
  switch (r) {
    case FailureReason::None: return "none";
    case FailureReason::BadSignature: return "bad-signature";
    case FailureReason::LastBallotMismatch: return "last-ballot-mismatch";
    case FailureReason::ShuffleProof: return "shuffle-proof";
    case FailureReason::Decryption: return "decryption";
    case FailureReason::Complaint: return "complaint";
  }
  return "unknown";
}

FailureReason failure_reason_from_string(std::string_view s) {
  for (auto r : {FailureReason::None, FailureReason::BadSignature, FailureReason::LastBallotMismatch,
                 FailureReason::ShuffleProof, FailureReason::Decryption, FailureReason::Complaint}) {
    if (to_string(r) == s) return r;
  }
  fail(ErrorCode::Malformed, "unknown failure reason '" + std::string(s) + "'");
}

Tally tally_alg(std::span<const std::optional<std::uint32_t>> plaintexts, std::uint32_t candidate_bound) {
  Tally t;
  for (const auto& m : plaintexts) {
    if (m && *m < candidate_bound) {
      ++t.counts[*m];
    } else {
      ++t.rejected;
    }
  }
  return t;
}

json to_json(const Tally& t) {
  json counts = json::object();
  for (const auto& [candidate, count] : t.counts) counts[std::to_string(candidate)] = count;
  return json{{"counts", std::move(counts)}, {"rejected", t.rejected}};
}

json to_json(const AuditVerdict& v) {
  return json{{"valid", v.valid}, {"reason", std::string(to_string(v.reason))}};
}

namespace {

constexpr std::string_view kPreparation = "preparation";
constexpr std::string_view kVoting = "voting";
constexpr std::string_view kMixing = "mixing";
constexpr std::string_view kTally = "tally";
constexpr std::string_view kAudit = "audit";

std::string party(std::string_view role, std::uint32_t id) { return std::string(role) + ":" + std::to_string(id); }

struct Message {
  enum class Kind { Start, Begin, Vote, Continue, Ballot, Complain, End, Key, Result, Audit };
  Kind kind;
  std::uint32_t party = 0;  // trustee or voter id where relevant
  std::optional<VoterScript> script;
  std::uint32_t intent = 0;
  std::optional<Ballot> ballot;
};

struct VoterState {
  VoterRecord record;
  std::optional<VoterScript> script;
  std::size_t pc = 0;
  std::optional<VerificationToken> latest;
  bool started = false;
  bool halted = false;
};

enum class Stage { Created, Voting, Mixed, Tallied, Audited };

}  // namespace

struct Ceremony::Impl {
  explicit Impl(ElectionConfig cfg)
      : config((cfg.validate(), std::move(cfg))),
        group(std::make_shared<const Group>(setup(config.group, config.candidates))),
        root(config.seed),
        board(config.sid),
        certs(config.sid),
        keygen(config.sid, group, config.threshold, config.trustees, root.derive("keygen")),
        dec(config.sid, group, keygen, board, config.threshold_strict),
        asd(config.sid, group, board),
        vemu(config.sid, config.distribution) {
    if (config.record_transcript) {
      board.set_observer([this](bool is_private, const BoardEntry& e) {
        log("bb", is_private ? "bb.priv" : "bb.pub", to_json(e));
      });
      certs.set_observer([this](const CertRegistry::Issued& i) {
        log("cert", "cert.issue", json{{"ssid", to_json(i.ssid)}, {"message", to_hex(i.message)}, {"sigma", i.sigma}});
      });
      log("environment", "manifest",
          json{{"tool", "ivxv-sim"}, {"version", IVXV_VERSION_STRING}, {"seed", config.seed}, {"config", to_json(config)}});
    }
    const std::set<std::uint32_t> corrupted(config.corrupted.begin(), config.corrupted.end());
    devices.reserve(config.voters);
    voters.resize(config.voters);
    ledger.resize(config.voters);
    accepted.resize(config.voters);
    for (std::uint32_t v = 1; v <= config.voters; ++v) {
      devices.emplace_back(config.sid, v, group, certs, root.derive("vsd", v));
      if (corrupted.contains(v)) devices.back().corrupt(config.policy, config.adversary_shift);
      auto& rec = voters[v - 1].record;
      rec.voter = v;
      rec.corrupted = corrupted.contains(v);
      rec.intent = config.intents.empty() ? static_cast<std::uint32_t>(root.derive("intent", v).uniform(config.candidates))
                                          : config.intents[v - 1];
    }
  }

  void log(std::string_view actor, std::string_view kind, json payload) {
    if (config.record_transcript) transcript.append(phase, actor, kind, std::move(payload));
  }

  void require(Stage want, const char* what) const {
    if (stage != want) fail(ErrorCode::Protocol, std::string(what) + " called out of phase order");
  }

  void drain() {
    while (!queue.empty()) {
      Message m = std::move(queue.front());
      queue.pop_front();
      handle(m);
    }
  }

  void handle(Message& m) {
    switch (m.kind) {
      case Message::Kind::Start:
        keygen.ready(config.sid, m.party);
        log(party("trustee", m.party), "ready", json::object());
        break;
      case Message::Kind::Begin: on_begin(); break;
      case Message::Kind::Vote: on_vote(m); break;
      case Message::Kind::Continue: step(m.party); break;
      case Message::Kind::Ballot: accept_ballot(*m.ballot); break;
      case Message::Kind::Complain:
        ++complaint_count;
        log("auditor", "complaint.received", json{{"voter", m.party}});
        break;
      case Message::Kind::End: on_end(); break;
      case Message::Kind::Key: on_key(m.party); break;
      case Message::Kind::Result: on_result(); break;
      case Message::Kind::Audit: on_audit(); break;
    }
  }

  void on_begin() {
    std::fill(ledger.begin(), ledger.end(), std::nullopt);
    pk = keygen.public_key(config.sid);
    board.pub_post(config.sid, PublicKeyPost{*pk});
    log("ea", "begin", json{{"pk", to_json(pk->h)}});
    stage = Stage::Voting;
  }

  void on_vote(Message& m) {
    auto& st = voters[m.party - 1];
    if (st.started) fail(ErrorCode::Protocol, "voter " + std::to_string(m.party) + " already voted");
    st.started = true;
    if (m.script) {
      st.script = std::move(m.script);
      st.record.intent = m.intent;
    } else if (auto it = config.scripts.find(m.party); it != config.scripts.end()) {
      st.script = VoterScript::parse(it->second);
    } else {
      Rng rng = root.derive("vemu", m.party);
      st.script = vemu.sample(config.sid, rng);
    }
    st.record.script = st.script->pattern();
    log(party("voter", m.party), "emulate", json{{"script", st.record.script}, {"intent", st.record.intent}});
    step(m.party);
  }

  // Runs one action of the voter's script, then yields so that the ballot
  // reaches the EA before any subsequent check.
  void step(std::uint32_t v) {
    auto& st = voters[v - 1];
    auto& rec = st.record;
    if (st.halted || st.pc >= st.script->size()) {
      st.halted = true;
      return;
    }
    const auto history = st.script->pattern().substr(0, st.pc);
    const Action action = (*st.script)[st.pc++];
    rec.executed = st.script->pattern().substr(0, st.pc);
    if (action == Action::Vote) {
      auto cast = devices[v - 1].cast(config.sid, *pk, rec.intent, history);
      log(party("vsd", v), "cast", json{{"ssid", to_json(cast.ballot.ssid)}, {"manipulated", cast.manipulated}});
      rec.events.push_back(VoterEvent{VoterEvent::Kind::Cast, cast.ballot.ssid, cast.manipulated, std::nullopt});
      rec.final_manipulated = cast.manipulated;
      st.latest = cast.token;
      queue.push_back(Message{Message::Kind::Ballot, v, std::nullopt, 0, std::move(cast.ballot)});
      queue.push_back(Message{Message::Kind::Continue, v, std::nullopt, 0, std::nullopt});
      return;
    }
    CheckResult result;
    try {
      result = asd.check(config.sid, *pk, *st.latest);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnknownSsid) throw;
      result = CheckResult{false, std::nullopt};
    }
    log(party("voter", v), "check",
        json{{"ssid", to_json(st.latest->ssid)},
             {"matches", result.matches},
             {"observed", result.observed ? json(*result.observed) : json(nullptr)}});
    rec.events.push_back(VoterEvent{result.matches ? VoterEvent::Kind::CheckPassed : VoterEvent::Kind::CheckFailed,
                                    st.latest->ssid, false, result.observed});
    if (result.matches) {
      queue.push_back(Message{Message::Kind::Continue, v, std::nullopt, 0, std::nullopt});
      return;
    }
    rec.complained = true;
    rec.events.push_back(VoterEvent{VoterEvent::Kind::Complained, st.latest->ssid, false, std::nullopt});
    st.halted = true;
    log(party("voter", v), "complain", json{{"ssid", to_json(st.latest->ssid)}});
    queue.push_back(Message{Message::Kind::Complain, v, std::nullopt, 0, std::nullopt});
  }

  bool accept_ballot(const Ballot& b) {
    if (stage != Stage::Voting) fail(ErrorCode::Protocol, "ballot received outside the voting phase");
    const auto v = b.ssid.voter;
    const bool ok = v >= 1 && v <= config.voters && is_valid_ciphertext(*group, b.c) &&
                    certs.verify(config.sid, b.ssid, ciphertext_bytes(b.c), b.sigma);
    if (!ok) {
      log("ea", "ballot.rejected", json{{"ssid", to_json(b.ssid)}});
      if (v >= 1 && v <= config.voters) {
        voters[v - 1].record.events.push_back(VoterEvent{VoterEvent::Kind::Rejected, b.ssid, false, std::nullopt});
      }
      if (config.ea_strict_halt) fail(ErrorCode::Protocol, "EA halted on a ballot with an invalid signature");
      return false;
    }
    ledger[v - 1] = b.c;
    accepted[v - 1].push_back(b.c);
    board.priv_post(config.sid, b);
    log("ea", "ballot.accepted", json{{"ssid", to_json(b.ssid)}});
    return true;
  }

  void on_end() {
    Rng rng = root.derive("ea-mix");
    Rng adversary = root.derive("fault");
    const auto n = config.voters;

    if (config.faults.forge_signature && ledger[0]) {
      std::uint8_t raw[16];
      adversary.fill(raw, sizeof raw);
      const Ballot forged{SubsessionId{1, 0}, rerandomize(*group, *pk, *ledger[0], group->random_scalar(adversary)),
                          to_hex(raw)};
      board.priv_post(config.sid, forged);
      ledger[0] = forged.c;
      log("adversary", "fault", json{{"name", "forge_signature"}});
    }

    std::vector<Ciphertext> inputs;
    inputs.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!ledger[i]) fail(ErrorCode::Protocol, "voter " + std::to_string(i + 1) + " has no accepted ballot");
      inputs.push_back(*ledger[i]);
    }
    if (config.faults.mix_non_last) {
      // The first re-voter with an earlier ballot that differs from the last.
      bool done = false;
      for (std::uint32_t i = 0; i < n && !done; ++i) {
        for (std::size_t j = accepted[i].size(); j-- > 1 && !done;) {
          if (accepted[i][j - 1] == inputs[i]) continue;
          inputs[i] = accepted[i][j - 1];
          log("adversary", "fault", json{{"name", "mix_non_last"}, {"voter", i + 1}});
          done = true;
        }
      }
    }

    ShuffleWitness witness;
    witness.perm.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) witness.perm[i] = i;
    for (std::uint32_t i = n; i > 1; --i) {
      std::swap(witness.perm[i - 1], witness.perm[rng.uniform(i)]);
    }
    ShuffleStatement statement{*pk, inputs, {}};
    statement.outputs.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      witness.rands.push_back(group->random_scalar(rng));
      statement.outputs.push_back(rerandomize(*group, *pk, inputs[witness.perm[i]], witness.rands[i]));
    }
    const auto proof = prove_shuffle(*group, statement, witness, rng);

    if (config.faults.tamper_shuffle_output) {
      statement.outputs[0].c2 = group->mul(statement.outputs[0].c2, group->generator());
      log("adversary", "fault", json{{"name", "tamper_shuffle_output"}});
    }
    board.priv_post(config.sid, ShufflePost{std::move(statement.inputs), std::move(statement.outputs),
                                            serialize_proof(proof)});
    log("ea", "end", json{{"ballots", n}});
    stage = Stage::Mixed;
  }

  void on_key(std::uint32_t trustee) {
    dec.submit_key(config.sid, trustee);
    log(party("trustee", trustee), "key.submitted", json{{"trustee", trustee}});
    if (plaintexts_posted) return;
    const auto t = keygen.threshold();
    const bool met = config.threshold_strict ? dec.submissions() > t : dec.submissions() >= t;
    if (!met) return;
    auto plaintexts = dec.decrypt_and_post(config.sid);
    plaintexts_posted = true;
    log("fdec", "decrypted", json{{"count", plaintexts.size()}});
    if (config.faults.tamper_plaintext && !plaintexts.empty()) {
      auto& m = plaintexts[0];
      m = (m && config.candidates >= 2) ? std::optional<std::uint32_t>((*m + 1) % config.candidates) : std::nullopt;
      board.pub_post(config.sid, PlaintextsPost{std::move(plaintexts)});
      log("adversary", "fault", json{{"name", "tamper_plaintext"}});
    }
  }

  void on_result() {
    // Surfaces threshold-not-met when too few trustees took part.
    if (!plaintexts_posted) dec.decrypt_and_post(config.sid);
    const auto* posted = latest<PlaintextsPost>(board.read_public(config.sid));
    tally = tally_alg(posted->plaintexts, config.candidates);
    log("environment", "result", to_json(*tally));
    stage = Stage::Tallied;
  }

  void on_audit() {
    verdict = run_audit(*group, config.sid, config.voters, board, certs, [this] { return dec.audit(config.sid); },
                        complaint_count);
    log("auditor", "verdict", to_json(*verdict));
    stage = Stage::Audited;
  }

  ElectionConfig config;
  std::shared_ptr<const Group> group;
  Rng root;
  Transcript transcript;
  std::string_view phase = kPreparation;
  BulletinBoard board;
  CertRegistry certs;
  KeyGenFunctionality keygen;
  DecFunctionality dec;
  AuditDevice asd;
  VoterEmulator vemu;
  std::vector<VoterDevice> devices;
  std::vector<VoterState> voters;
  std::optional<PublicKey> pk;
  std::vector<std::optional<Ciphertext>> ledger;  // B[i], the last accepted ballot
  std::vector<std::vector<Ciphertext>> accepted;
  std::size_t complaint_count = 0;
  std::deque<Message> queue;
  bool prepared = false;
  bool plaintexts_posted = false;
  Stage stage = Stage::Created;
  std::optional<Tally> tally;
  std::optional<AuditVerdict> verdict;
};

Ceremony::Ceremony(ElectionConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
Ceremony::~Ceremony() = default;

void Ceremony::prepare() {
  auto& d = *impl_;
  d.require(Stage::Created, "prepare");
  d.phase = kPreparation;
  for (std::uint32_t j = 1; j <= d.config.trustees; ++j) d.queue.push_back(Message{Message::Kind::Start, j, {}, 0, {}});
  d.queue.push_back(Message{Message::Kind::Begin, 0, {}, 0, {}});
  d.drain();
  d.phase = kVoting;
}

const VoterRecord& Ceremony::vote(std::uint32_t voter) {
  auto& d = *impl_;
  d.require(Stage::Voting, "vote");
  if (voter < 1 || voter > d.config.voters) fail(ErrorCode::InvalidArgument, "unknown voter " + std::to_string(voter));
  d.queue.push_back(Message{Message::Kind::Vote, voter, std::nullopt, 0, {}});
  d.drain();
  return d.voters[voter - 1].record;
}

const VoterRecord& Ceremony::vote(std::uint32_t voter, const VoterScript& script, std::uint32_t intent) {
  auto& d = *impl_;
  d.require(Stage::Voting, "vote");
  if (voter < 1 || voter > d.config.voters) fail(ErrorCode::InvalidArgument, "unknown voter " + std::to_string(voter));
  if (intent >= d.config.candidates) fail(ErrorCode::MessageOutOfRange, "intent is not a candidate");
  d.queue.push_back(Message{Message::Kind::Vote, voter, script, intent, {}});
  d.drain();
  return d.voters[voter - 1].record;
}

bool Ceremony::ea_accept_ballot(const Ballot& ballot) { return impl_->accept_ballot(ballot); }

void Ceremony::close_and_mix() {
  auto& d = *impl_;
  d.require(Stage::Voting, "close_and_mix");
  d.phase = kMixing;
  d.queue.push_back(Message{Message::Kind::End, 0, {}, 0, {}});
  d.drain();
}

Tally Ceremony::tally() {
  auto& d = *impl_;
  d.require(Stage::Mixed, "tally");
  d.phase = kTally;
  if (d.config.tally_trustees.empty()) {
    for (std::uint32_t j = 1; j <= d.config.trustees; ++j) d.queue.push_back(Message{Message::Kind::Key, j, {}, 0, {}});
  } else {
    for (auto j : d.config.tally_trustees) d.queue.push_back(Message{Message::Kind::Key, j, {}, 0, {}});
  }
  d.queue.push_back(Message{Message::Kind::Result, 0, {}, 0, {}});
  d.drain();
  return *d.tally;
}

AuditVerdict Ceremony::audit() {
  auto& d = *impl_;
  d.require(Stage::Tallied, "audit");
  d.phase = kAudit;
  d.queue.push_back(Message{Message::Kind::Audit, 0, {}, 0, {}});
  d.drain();
  return *d.verdict;
}

ElectionResult Ceremony::run() {
  prepare();
  for (std::uint32_t v = 1; v <= impl_->config.voters; ++v) vote(v);
  close_and_mix();
  tally();
  audit();
  ElectionResult r;
  r.transcript = impl_->transcript;
  r.tally = *impl_->tally;
  r.verdict = *impl_->verdict;
  r.pk = *impl_->pk;
  for (const auto& st : impl_->voters) r.voters.push_back(st.record);
  return r;
}

const ElectionConfig& Ceremony::config() const { return impl_->config; }
const Group& Ceremony::group() const { return *impl_->group; }
const PublicKey& Ceremony::public_key() const {
  if (!impl_->pk) fail(ErrorCode::Protocol, "public key not yet published");
  return *impl_->pk;
}
const BulletinBoard& Ceremony::board() const { return impl_->board; }
const CertRegistry& Ceremony::certs() const { return impl_->certs; }
const Transcript& Ceremony::transcript() const { return impl_->transcript; }
const std::optional<Ciphertext>& Ceremony::last_ballot(std::uint32_t voter) const { return impl_->ledger.at(voter - 1); }
std::uint32_t Ceremony::intent_of(std::uint32_t voter) const { return impl_->voters.at(voter - 1).record.intent; }
std::size_t Ceremony::complaints() const { return impl_->complaint_count; }

ElectionResult run_election(const ElectionConfig& config) {
  Ceremony c(config);
  return c.run();
}

}  // namespace ivxv
