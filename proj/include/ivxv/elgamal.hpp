#pragma once

#include <cstdint>
#include <utility>

#include "ivxv/group.hpp"

namespace ivxv {

struct PublicKey {
  Element h;
  friend bool operator==(const PublicKey&, const PublicKey&) = default;
};

struct SecretKey {
  Scalar sk;
};

struct Ciphertext {
  Element c1;
  Element c2;
  friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

struct KeyPair {
  PublicKey pk;
  SecretKey sk;
};

KeyPair keygen(const Group& group, Rng& rng);
KeyPair keypair_from_secret(const Group& group, const Scalar& sk);

// Exponent ElGamal: (g^r, g^m h^r). Throws MessageOutOfRange unless m < C.
Ciphertext encrypt(const Group& group, const PublicKey& pk, std::uint32_t m, const Scalar& r);

// Throws NotACandidate when c2 / c1^sk is not g^m for any m < C.
std::uint32_t decrypt(const Group& group, const SecretKey& sk, const Ciphertext& ct);

Ciphertext rerandomize(const Group& group, const PublicKey& pk, const Ciphertext& ct, const Scalar& r);

// Decryption by the encryption randomness. Throws RandomnessMismatch when
// c1 != g^r, NotACandidate as decrypt.
std::uint32_t trapdoor_decrypt(const Group& group, const PublicKey& pk, const Ciphertext& ct,
                               const Scalar& r);

bool is_valid_ciphertext(const Group& group, const Ciphertext& ct);

}  // namespace ivxv
