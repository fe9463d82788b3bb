#include "ivxv/elgamal.hpp"

#include <string>

#include "ivxv/error.hpp"
#include "ivxv/rng.hpp"

namespace ivxv {

KeyPair keygen(const Group& group, Rng& rng) {
  return keypair_from_secret(group, group.random_nonzero_scalar(rng));
}

KeyPair keypair_from_secret(const Group& group, const Scalar& sk) {
  if (sk.value <= 0 || sk.value >= group.q()) fail(ErrorCode::InvalidArgument, "secret key must lie in [1, q)");
  return KeyPair{PublicKey{group.exp(sk)}, SecretKey{sk}};
}

Ciphertext encrypt(const Group& group, const PublicKey& pk, std::uint32_t m, const Scalar& r) {
  if (m >= group.candidate_bound()) {
    fail(ErrorCode::MessageOutOfRange,
         "message " + std::to_string(m) + " outside [0, " + std::to_string(group.candidate_bound()) + ")");
  }
  return Ciphertext{group.exp(r), group.mul(group.exp(Scalar{m}), group.pow(pk.h, r))};
}

namespace {
std::uint32_t recover(const Group& group, const Element& gm) {
  auto m = group.small_dlog(gm);
  if (!m) fail(ErrorCode::NotACandidate, "plaintext is not a candidate index");
  return *m;
}
}  // namespace

std::uint32_t decrypt(const Group& group, const SecretKey& sk, const Ciphertext& ct) {
  return recover(group, group.div(ct.c2, group.pow(ct.c1, sk.sk)));
}

Ciphertext rerandomize(const Group& group, const PublicKey& pk, const Ciphertext& ct, const Scalar& r) {
  return Ciphertext{group.mul(ct.c1, group.exp(r)), group.mul(ct.c2, group.pow(pk.h, r))};
}

std::uint32_t trapdoor_decrypt(const Group& group, const PublicKey& pk, const Ciphertext& ct,
                               const Scalar& r) {
  if (group.exp(r) != ct.c1) fail(ErrorCode::RandomnessMismatch, "c1 != g^r");
  return recover(group, group.div(ct.c2, group.pow(pk.h, r)));
}

bool is_valid_ciphertext(const Group& group, const Ciphertext& ct) {
  return group.is_member(ct.c1) && group.is_member(ct.c2);
}

}  // namespace ivxv
