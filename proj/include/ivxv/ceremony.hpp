#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ivxv/config.hpp"
#include "ivxv/functionalities.hpp"
#include "ivxv/transcript.hpp"

namespace ivxv {

enum class FailureReason { None, BadSignature, LastBallotMismatch, ShuffleProof, Decryption, Complaint };

std::string_view to_string(FailureReason r);
FailureReason failure_reason_from_string(std::string_view s);  // throws Malformed

struct AuditVerdict {
  bool valid = true;
  FailureReason reason = FailureReason::None;
  friend bool operator==(const AuditVerdict&, const AuditVerdict&) = default;
};

struct Tally {
  std::map<std::uint32_t, std::uint64_t> counts;
  std::uint64_t rejected = 0;  // plaintexts outside [0, C)
  friend bool operator==(const Tally&, const Tally&) = default;
};

Tally tally_alg(std::span<const std::optional<std::uint32_t>> plaintexts, std::uint32_t candidate_bound);

json to_json(const Tally& t);
json to_json(const AuditVerdict& v);

struct VoterEvent {
  enum class Kind { Cast, Rejected, CheckPassed, CheckFailed, Complained };
  Kind kind;
  SubsessionId ssid;
  bool manipulated = false;
  std::optional<std::uint32_t> observed;
};

struct VoterRecord {
  std::uint32_t voter = 0;
  std::uint32_t intent = 0;
  std::string script;
  std::string executed;  // prefix of the script actually run
  bool corrupted = false;
  bool complained = false;
  bool final_manipulated = false;
  std::vector<VoterEvent> events;
};

struct ElectionResult {
  Transcript transcript;
  Tally tally;
  AuditVerdict verdict;
  std::vector<VoterRecord> voters;
  PublicKey pk;
};

// One run of the protocol. Parties (EA, voters, trustees, auditor) exchange
// messages through a single FIFO queue; each environment command below
// enqueues its messages and drains the queue before returning, so calls
// must follow the phase order prepare, vote..., close_and_mix, tally, audit.
class Ceremony {
 public:
  explicit Ceremony(ElectionConfig config);
  ~Ceremony();
  Ceremony(const Ceremony&) = delete;
  Ceremony& operator=(const Ceremony&) = delete;

  // Trustees signal Ready; the EA fetches PK and posts it.
  void prepare();
  // Voter samples a script (or uses the configured override) and runs it.
  const VoterRecord& vote(std::uint32_t voter);
  const VoterRecord& vote(std::uint32_t voter, const VoterScript& script, std::uint32_t intent);
  // The EA's ballot handler; true iff the certification check passed.
  bool ea_accept_ballot(const Ballot& ballot);
  // End of voting: shuffle the last ballots, prove, post.
  void close_and_mix();
  // Trustees submit keys, plaintexts are posted and tallied.
  Tally tally();
  AuditVerdict audit();

  ElectionResult run();

  const ElectionConfig& config() const;
  const Group& group() const;
  const PublicKey& public_key() const;
  const BulletinBoard& board() const;
  const CertRegistry& certs() const;
  const Transcript& transcript() const;
  // B[i] for voter i (1-based).
  const std::optional<Ciphertext>& last_ballot(std::uint32_t voter) const;
  std::uint32_t intent_of(std::uint32_t voter) const;
  std::size_t complaints() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ElectionResult run_election(const ElectionConfig& config);

}  // namespace ivxv
