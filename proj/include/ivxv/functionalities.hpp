#pragma once

// Trusted in-process components of the hybrid-world election: bulletin
// board, certification registry, key generation, threshold decryption, the
// voter and audit supporting devices, and the voter-behaviour emulator.
// Each one is bound to a single session id and rejects calls for others.

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "ivxv/codec.hpp"
#include "ivxv/distribution.hpp"
#include "ivxv/elgamal.hpp"
#include "ivxv/hash.hpp"
#include "ivxv/policy.hpp"
#include "ivxv/rng.hpp"
#include "ivxv/shamir.hpp"

namespace ivxv {

using SessionId = std::string;

// Embeds the voter identity: ssid = (voter, nonce).
struct SubsessionId {
  std::uint32_t voter = 0;
  std::uint32_t nonce = 0;
  auto operator<=>(const SubsessionId&) const = default;
};

std::string to_string(const SubsessionId& ssid);
json to_json(const SubsessionId& ssid);
SubsessionId subsession_from_json(const json& j);

using CertHandle = std::string;

struct Ballot {
  SubsessionId ssid;
  Ciphertext c;
  CertHandle sigma;
};

enum class Role { ElectionAuthority, Auditor, Voter, Trustee, Functionality };

struct PublicKeyPost {
  PublicKey pk;
};

struct ShufflePost {
  std::vector<Ciphertext> inputs;
  std::vector<Ciphertext> outputs;
  std::vector<std::uint8_t> proof;
};

// nullopt marks a ciphertext that decrypted outside the candidate range.
struct PlaintextsPost {
  std::vector<std::optional<std::uint32_t>> plaintexts;
};

using BoardPayload = std::variant<PublicKeyPost, Ballot, ShufflePost, PlaintextsPost>;

struct BoardEntry {
  std::uint64_t seq = 0;
  BoardPayload payload;
};

json to_json(const BoardEntry& e);
BoardEntry board_entry_from_json(const json& j);

// Last entry of type T, or nullptr.
template <typename T>
const T* latest(const std::vector<BoardEntry>& entries) {
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    if (const auto* p = std::get_if<T>(&it->payload)) return p;
  }
  return nullptr;
}

class BulletinBoard {
 public:
  using Observer = std::function<void(bool is_private, const BoardEntry&)>;

  struct Snapshot {
    std::vector<BoardEntry> pub;
    std::optional<std::vector<BoardEntry>> priv;  // nullopt: access denied
  };

  explicit BulletinBoard(SessionId sid) : sid_(std::move(sid)) {}

  std::uint64_t pub_post(const SessionId& sid, BoardPayload payload);
  std::uint64_t priv_post(const SessionId& sid, BoardPayload payload);

  Snapshot read(const SessionId& sid, Role reader) const;
  const std::vector<BoardEntry>& read_public(const SessionId& sid) const;
  // Only the authority, the auditor and other functionalities may read the
  // private part; everyone else gets Error(AccessDenied).
  const std::vector<BoardEntry>& read_private(const SessionId& sid, Role reader) const;

  // Chained digest over the first n entries of one side.
  Digest prefix_digest(bool is_private, std::size_t n) const;

  // Re-inserts a recorded entry during replay; sequence numbers must keep
  // increasing.
  void restore(bool is_private, BoardEntry entry);

  void set_observer(Observer observer) { observer_ = std::move(observer); }
  const SessionId& sid() const { return sid_; }

 private:
  void check_sid(const SessionId& sid) const;
  std::uint64_t append(bool is_private, BoardPayload payload);

  SessionId sid_;
  std::vector<BoardEntry> pub_;
  std::vector<BoardEntry> priv_;
  std::uint64_t next_seq_ = 1;
  Observer observer_;
};

// Ideal certification: a handle verifies iff it was issued for exactly this
// (sid, ssid, message). Messages are held by SHA-256 digest.
class CertRegistry {
 public:
  struct Issued {
    SubsessionId ssid;
    Digest message{};
    CertHandle sigma;
  };
  using Observer = std::function<void(const Issued&)>;

  explicit CertRegistry(SessionId sid) : sid_(std::move(sid)) {}

  // Only the device of ssid.voter may sign (Error(Unauthorized) otherwise).
  CertHandle sign(const SessionId& sid, const SubsessionId& ssid, std::span<const std::uint8_t> message,
                  std::uint32_t signer, Rng& rng);
  bool verify(const SessionId& sid, const SubsessionId& ssid, std::span<const std::uint8_t> message,
              const CertHandle& sigma) const;

  void restore(Issued issued);
  const std::vector<Issued>& issued() const { return issued_; }
  void set_observer(Observer observer) { observer_ = std::move(observer); }

 private:
  SessionId sid_;
  std::vector<Issued> issued_;
  std::set<std::tuple<SubsessionId, Digest, CertHandle>> index_;
  Observer observer_;
};

class KeyGenFunctionality {
 public:
  KeyGenFunctionality(SessionId sid, std::shared_ptr<const Group> group, std::uint32_t t, std::uint32_t k, Rng rng);

  void ready(const SessionId& sid, std::uint32_t trustee);
  // Error(NotReady) until all k trustees signalled; generates and deals the
  // key on first success.
  PublicKey public_key(const SessionId& sid);

  bool complete() const { return keys_.has_value(); }
  std::uint32_t threshold() const { return t_; }
  std::uint32_t trustees() const { return k_; }
  // Share held for trustee i (1-based). Requires complete().
  const SecretShare& share(std::uint32_t trustee) const;

 private:
  SessionId sid_;
  std::shared_ptr<const Group> group_;
  std::uint32_t t_, k_;
  Rng rng_;
  std::set<std::uint32_t> ready_;
  std::optional<KeyPair> keys_;
  std::vector<SecretShare> shares_;
};

class DecFunctionality {
 public:
  // threshold_strict demands more than t submissions instead of at least t.
  DecFunctionality(SessionId sid, std::shared_ptr<const Group> group, const KeyGenFunctionality& keygen,
                   BulletinBoard& board, bool threshold_strict = false);

  void submit_key(const SessionId& sid, std::uint32_t trustee);
  // Decrypts the latest shuffled list on the private board and posts the
  // plaintexts publicly. Error(ThresholdNotMet) or Error(MissingShuffle).
  std::vector<std::optional<std::uint32_t>> decrypt_and_post(const SessionId& sid);
  // True iff the latest posted plaintexts decrypt from the latest shuffle.
  bool audit(const SessionId& sid) const;

  std::size_t submissions() const { return submitted_.size(); }

 private:
  bool threshold_met() const;
  SecretKey secret_key() const;
  std::vector<std::optional<std::uint32_t>> decrypt_all(const ShufflePost& shuffle) const;

  SessionId sid_;
  std::shared_ptr<const Group> group_;
  const KeyGenFunctionality& keygen_;
  BulletinBoard& board_;
  bool threshold_strict_;
  std::set<std::uint32_t> submitted_;
};

// Handed to the voter by the voting device; carries what the audit device
// needs to open the recorded ballot.
struct VerificationToken {
  SubsessionId ssid;
  Scalar r;
  std::uint32_t intent = 0;
};

struct CastResult {
  Ballot ballot;
  VerificationToken token;
  bool manipulated = false;
  std::uint32_t encrypted = 0;  // candidate actually inside the ballot
};

// Voter supporting device of one voter. A corrupted device consults the
// policy before each cast and, on Manipulate, encrypts (intent + shift) mod C
// while still reporting the voter's intent in the token.
class VoterDevice {
 public:
  VoterDevice(SessionId sid, std::uint32_t voter, std::shared_ptr<const Group> group, CertRegistry& certs, Rng rng);

  void corrupt(ManipulationPolicy policy, std::uint32_t shift = 1);
  bool corrupted() const { return policy_.has_value(); }
  std::uint32_t voter() const { return voter_; }

  CastResult cast(const SessionId& sid, const PublicKey& pk, std::uint32_t intent, std::string_view history);

 private:
  SessionId sid_;
  std::uint32_t voter_;
  std::shared_ptr<const Group> group_;
  CertRegistry& certs_;
  Rng rng_;
  std::uint32_t next_nonce_ = 1;
  std::optional<ManipulationPolicy> policy_;
  std::uint32_t shift_ = 1;
};

struct CheckResult {
  bool matches = false;
  std::optional<std::uint32_t> observed;
};

// Audit supporting device: opens the ballot recorded on the private board
// (never the device's copy) with the token randomness.
class AuditDevice {
 public:
  AuditDevice(SessionId sid, std::shared_ptr<const Group> group, const BulletinBoard& board);

  // Error(UnknownSsid) if no ballot with token.ssid was recorded.
  CheckResult check(const SessionId& sid, const PublicKey& pk, const VerificationToken& token) const;

 private:
  SessionId sid_;
  std::shared_ptr<const Group> group_;
  const BulletinBoard& board_;
};

class VoterEmulator {
 public:
  VoterEmulator(SessionId sid, BehaviorDistribution dist) : sid_(std::move(sid)), dist_(std::move(dist)) {}

  VoterScript sample(const SessionId& sid, Rng& rng) const;
  const BehaviorDistribution& distribution() const { return dist_; }

 private:
  SessionId sid_;
  BehaviorDistribution dist_;
};

}  // namespace ivxv
