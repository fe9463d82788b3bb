#pragma once

#include <functional>

#include "ivxv/ceremony.hpp"

namespace ivxv {

// The auditor's checks, in order: every private ballot certified; the
// shuffle inputs are each voter's last ballot; the shuffle proof verifies;
// the decryption functionality vouches for the plaintexts; no complaints.
// The first failing check names the verdict.
AuditVerdict run_audit(const Group& group, const SessionId& sid, std::uint32_t voters, const BulletinBoard& board,
                       const CertRegistry& certs, const std::function<bool()>& decryption_audit,
                       std::size_t complaints);

struct ReplayResult {
  AuditVerdict recomputed;
  AuditVerdict recorded;
  bool matches() const { return recomputed == recorded; }
};

// Rebuilds boards, certification log, complaints and the ideal key material
// (from the manifest seed) and re-runs the auditor. Throws Error(Malformed)
// for transcripts that cannot be replayed.
ReplayResult replay(const Transcript& transcript);

}  // namespace ivxv
