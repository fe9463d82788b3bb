#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace ivxv {

class Rng;

// Largest plaintext space the small-range discrete log will scan.
inline constexpr std::uint32_t kMaxCandidateBound = 1u << 16;

// Schnorr group: the order-q subgroup of Z_p^*, plus the plaintext bound C
// of the exponent message encoding.
struct GroupParams {
  mpz_class p;
  mpz_class q;
  mpz_class g;
  std::uint32_t candidate_bound = 0;
  std::string preset;  // empty for custom parameters

  // Throws Error(InvalidParams) naming the first violated invariant.
  void validate() const;
};

// Named presets: "toy" (p=23, q=11, g=2), "small" (256-bit safe prime, for
// fast statistical tests) and "standard" (RFC 3526 2048-bit MODP group).
GroupParams setup(std::string_view preset, std::uint32_t candidate_bound);

struct Scalar {
  mpz_class value;
  friend bool operator==(const Scalar& a, const Scalar& b) { return a.value == b.value; }
};

struct Element {
  mpz_class value;
  friend bool operator==(const Element& a, const Element& b) { return a.value == b.value; }
};

// Arithmetic over a validated GroupParams. Immutable after construction.
class Group {
 public:
  explicit Group(GroupParams params);

  const GroupParams& params() const { return params_; }
  const mpz_class& p() const { return params_.p; }
  const mpz_class& q() const { return params_.q; }
  std::uint32_t candidate_bound() const { return params_.candidate_bound; }

  Element generator() const { return Element{params_.g}; }
  Element identity() const { return Element{1}; }

  Element mul(const Element& a, const Element& b) const;
  Element div(const Element& a, const Element& b) const;
  Element inv(const Element& a) const;
  Element pow(const Element& base, const Scalar& e) const;
  Element exp(const Scalar& e) const;  // g^e

  bool is_member(const mpz_class& x) const;
  bool is_member(const Element& e) const { return is_member(e.value); }
  bool is_scalar(const mpz_class& x) const { return x >= 0 && x < params_.q; }

  Scalar scalar(const mpz_class& x) const;  // reduced mod q
  Scalar add(const Scalar& a, const Scalar& b) const;
  Scalar sub(const Scalar& a, const Scalar& b) const;
  Scalar mul(const Scalar& a, const Scalar& b) const;
  Scalar neg(const Scalar& a) const;
  Scalar inv(const Scalar& a) const;  // a != 0

  Scalar random_scalar(Rng& rng) const;
  Scalar random_nonzero_scalar(Rng& rng) const;

  // Maps (domain, index) to a subgroup element other than the identity.
  Element hash_to_group(std::string_view domain, std::uint64_t index) const;

  // m in [0, C) with g^m == e, if any.
  std::optional<std::uint32_t> small_dlog(const Element& e) const;

  std::size_t element_bytes() const { return element_bytes_; }

 private:
  GroupParams params_;
  mpz_class cofactor_;
  std::size_t element_bytes_;
};

}  // namespace ivxv
