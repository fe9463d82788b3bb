#pragma once

#include <cstdint>
#include <string_view>

#include <gmpxx.h>

#include "ivxv/hash.hpp"

namespace ivxv {

// Deterministic SHA-256 counter-mode generator. Child streams are derived by
// (label, index) so every component of a run owns an independent,
// reproducible stream rooted at a single 64-bit seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  Rng derive(std::string_view label, std::uint64_t index = 0) const;

  void fill(std::uint8_t* out, std::size_t n);
  std::uint64_t next_u64();
  // Uniform in [0, bound); bound > 0.
  std::uint64_t uniform(std::uint64_t bound);
  // Uniform in [0, 1).
  double uniform_real();
  // Uniform in [0, bound) for big bounds; 64 extra bits make the modulo bias
  // negligible.
  mpz_class uniform_integer(const mpz_class& bound);

  // UniformRandomBitGenerator surface, for <algorithm> and <random>.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  explicit Rng(const Digest& key) : key_(key) {}
  void refill();

  Digest key_{};
  std::uint64_t counter_ = 0;
  Digest block_{};
  std::size_t used_ = block_.size();
};

}  // namespace ivxv
