#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ivxv/elgamal.hpp"

namespace ivxv {

// outputs[i] = rerandomize(pk, inputs[perm[i]], rands[i]) for every i.
struct ShuffleStatement {
  PublicKey pk;
  std::vector<Ciphertext> inputs;
  std::vector<Ciphertext> outputs;
};

struct ShuffleWitness {
  std::vector<std::uint32_t> perm;  // 0-based: output i comes from input perm[i]
  std::vector<Scalar> rands;
};

// Permutation-matrix commitment shuffle argument, Fiat-Shamir transformed.
//
// The prover commits to the permutation column-wise (u), derives a batching
// vector e from the statement and u, and then shows in one sigma protocol:
//   * the committed matrix has unit column sums        (t1, k1)
//   * the permuted batch e' has the same product as e   (chain, t2, t_hat)
//   * u opens to e' under the batch e                   (t3)
//   * outputs^e' equals inputs^e up to re-encryption    (t4)
// sharing the responses k_prime for e' across all parts.
struct ShuffleProof {
  std::vector<Element> u;      // permutation commitments, one per input
  std::vector<Element> chain;  // product-argument commitment chain
  Element t1, t2, t3;
  Ciphertext t4;
  std::vector<Element> t_hat;
  Scalar challenge;  // Fiat-Shamir challenge v
  Scalar k1, k2, k3, k4;
  std::vector<Scalar> k_hat;
  std::vector<Scalar> k_prime;
};

// Fiat-Shamir hash-to-scalar, domain separated.
Scalar fs_challenge(const Group& group, std::span<const std::uint8_t> transcript);

// Canonical encoding of the statement; also the prefix of every challenge
// transcript.
std::vector<std::uint8_t> serialize_statement(const Group& group, const ShuffleStatement& statement);

std::vector<std::uint8_t> serialize_proof(const ShuffleProof& proof);
// Throws Error(Malformed) on truncated or trailing bytes.
ShuffleProof deserialize_proof(std::span<const std::uint8_t> bytes);

// Throws BadWitness unless the witness maps inputs onto outputs.
ShuffleProof prove_shuffle(const Group& group, const ShuffleStatement& statement, const ShuffleWitness& witness,
                           Rng& rng);

bool verify_shuffle(const Group& group, const ShuffleStatement& statement, const ShuffleProof& proof);
// Malformed bytes verify as false.
bool verify_shuffle(const Group& group, const ShuffleStatement& statement, std::span<const std::uint8_t> proof_bytes);

// Commitment generators h_1..h_n, derived by hash-to-group.
std::vector<Element> shuffle_generators(const Group& group, std::size_t n);

}  // namespace ivxv
