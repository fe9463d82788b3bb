#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ivxv/elgamal.hpp"

namespace ivxv {

struct SecretShare {
  std::uint32_t index = 0;  // evaluation point, 1-based
  Scalar value;
};

// (t, k) Shamir sharing over Z_q: degree t-1 polynomial with constant term sk.
std::vector<SecretShare> deal(const Group& group, const Scalar& sk, std::uint32_t t,
                              std::uint32_t k, Rng& rng);

// Same dealing with caller-chosen coefficients a_1..a_{t-1}.
std::vector<SecretShare> deal_with_coefficients(const Group& group, const Scalar& sk,
                                                std::span<const Scalar> coefficients,
                                                std::uint32_t k);

// Lagrange interpolation at zero. Needs at least t shares with distinct indices.
SecretKey reconstruct(const Group& group, std::span<const SecretShare> shares, std::uint32_t t);

}  // namespace ivxv
