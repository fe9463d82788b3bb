#include "ivxv/shamir.hpp"

#include <set>
#include <string>

#include "ivxv/error.hpp"
#include "ivxv/rng.hpp"

namespace ivxv {

namespace {
void check_dealing(const Group& group, std::uint32_t t, std::uint32_t k) {
  if (t < 1) fail(ErrorCode::InvalidArgument, "threshold must be at least 1");
  if (t > k) fail(ErrorCode::ThresholdExceedsShares, "threshold t=" + std::to_string(t) + " exceeds k=" + std::to_string(k));
  // Evaluation points 1..k must stay distinct and non-zero mod q.
  if (mpz_class(k) >= group.q()) fail(ErrorCode::InvalidArgument, "k must be smaller than the group order");
}
}  // namespace

std::vector<SecretShare> deal(const Group& group, const Scalar& sk, std::uint32_t t, std::uint32_t k, Rng& rng) {
  check_dealing(group, t, k);
  std::vector<Scalar> coefficients;
  coefficients.reserve(t - 1);
  for (std::uint32_t i = 1; i < t; ++i) coefficients.push_back(group.random_scalar(rng));
  return deal_with_coefficients(group, sk, coefficients, k);
}

std::vector<SecretShare> deal_with_coefficients(const Group& group, const Scalar& sk,
                                                std::span<const Scalar> coefficients, std::uint32_t k) {
  const auto t = static_cast<std::uint32_t>(coefficients.size() + 1);
  check_dealing(group, t, k);
  std::vector<SecretShare> shares;
  shares.reserve(k);
  for (std::uint32_t i = 1; i <= k; ++i) {
    // Horner from the top coefficient down to sk.
    Scalar acc{0};
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
      acc = group.add(group.mul(acc, Scalar{i}), *it);
    }
    acc = group.add(group.mul(acc, Scalar{i}), sk);
    shares.push_back(SecretShare{i, acc});
  }
  return shares;
}

SecretKey reconstruct(const Group& group, std::span<const SecretShare> shares, std::uint32_t t) {
  if (t < 1) fail(ErrorCode::InvalidArgument, "threshold must be at least 1");
  if (shares.size() < t) {
    fail(ErrorCode::InsufficientShares,
         "need " + std::to_string(t) + " shares, got " + std::to_string(shares.size()));
  }
  std::set<std::uint32_t> seen;
  for (const auto& s : shares) {
    if (s.index == 0 || mpz_class(s.index) >= group.q()) fail(ErrorCode::InvalidArgument, "share index out of range");
    if (!seen.insert(s.index).second) fail(ErrorCode::DuplicateShare, "duplicate share index " + std::to_string(s.index));
  }
  // Any t of the shares determine the polynomial; use the first t.
  auto used = shares.first(t);
  Scalar secret{0};
  for (const auto& si : used) {
    Scalar num{1}, den{1};
    for (const auto& sj : used) {
      if (sj.index == si.index) continue;
      num = group.mul(num, Scalar{sj.index});
      den = group.mul(den, group.sub(Scalar{sj.index}, Scalar{si.index}));
    }
    secret = group.add(secret, group.mul(si.value, group.mul(num, group.inv(den))));
  }
  return SecretKey{secret};
}

}  // namespace ivxv
