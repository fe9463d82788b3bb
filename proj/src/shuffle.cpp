#include "ivxv/shuffle.hpp"

#include <algorithm>

#include "ivxv/bytes.hpp"
#include "ivxv/error.hpp"
#include "ivxv/hash.hpp"
#include "ivxv/rng.hpp"

namespace ivxv {

namespace {

constexpr std::string_view kChallengeDomain = "ivxv-sim/fiat-shamir/v1";
constexpr std::string_view kGeneratorDomain = "ivxv-sim/shuffle/generators/v1";
constexpr std::string_view kBatchTag = "ivxv-sim/shuffle/batch";
constexpr std::string_view kResponseTag = "ivxv-sim/shuffle/response";
constexpr std::uint32_t kProofMagic = 0x49565853;  // "IVXS"
constexpr std::uint32_t kProofVersion = 1;

void put(ByteWriter& w, const Element& e) { w.integer(e.value); }
void put(ByteWriter& w, const Ciphertext& c) {
  put(w, c.c1);
  put(w, c.c2);
}

// Batching vector e, one scalar per input, bound to statement and u.
std::vector<Scalar> batch_vector(const Group& group, std::span<const std::uint8_t> statement_bytes,
                                 std::span<const Element> u) {
  ByteWriter w;
  w.text(kBatchTag);
  w.bytes(statement_bytes);
  w.u32(static_cast<std::uint32_t>(u.size()));
  for (const auto& x : u) put(w, x);
  const Digest seed = sha256(w.data());
  std::vector<Scalar> e;
  e.reserve(u.size());
  for (std::uint32_t j = 0; j < u.size(); ++j) {
    ByteWriter item;
    item.bytes(seed);
    item.u32(j);
    e.push_back(fs_challenge(group, item.data()));
  }
  return e;
}

Scalar response_challenge(const Group& group, std::span<const std::uint8_t> statement_bytes, const ShuffleProof& pf) {
  ByteWriter w;
  w.text(kResponseTag);
  w.bytes(statement_bytes);
  w.u32(static_cast<std::uint32_t>(pf.u.size()));
  for (const auto& x : pf.u) put(w, x);
  for (const auto& x : pf.chain) put(w, x);
  put(w, pf.t1);
  put(w, pf.t2);
  put(w, pf.t3);
  put(w, pf.t4);
  for (const auto& x : pf.t_hat) put(w, x);
  return fs_challenge(group, w.data());
}

// prod base_i^exp_i
Element multi_exp(const Group& group, std::span<const Element> bases, std::span<const Scalar> exps) {
  Element acc = group.identity();
  for (std::size_t i = 0; i < bases.size(); ++i) acc = group.mul(acc, group.pow(bases[i], exps[i]));
  return acc;
}

Ciphertext multi_exp(const Group& group, std::span<const Ciphertext> bases, std::span<const Scalar> exps) {
  Ciphertext acc{group.identity(), group.identity()};
  for (std::size_t i = 0; i < bases.size(); ++i) {
    acc.c1 = group.mul(acc.c1, group.pow(bases[i].c1, exps[i]));
    acc.c2 = group.mul(acc.c2, group.pow(bases[i].c2, exps[i]));
  }
  return acc;
}

Ciphertext pow(const Group& group, const Ciphertext& c, const Scalar& e) {
  return Ciphertext{group.pow(c.c1, e), group.pow(c.c2, e)};
}

Ciphertext mul(const Group& group, const Ciphertext& a, const Ciphertext& b) {
  return Ciphertext{group.mul(a.c1, b.c1), group.mul(a.c2, b.c2)};
}

// Encryption of zero with randomness x: (g^x, h^x).
Ciphertext zero_encryption(const Group& group, const PublicKey& pk, const Scalar& x) {
  return Ciphertext{group.exp(x), group.pow(pk.h, x)};
}

bool statement_well_formed(const Group& group, const ShuffleStatement& st) {
  if (st.inputs.empty() || st.inputs.size() != st.outputs.size()) return false;
  if (!group.is_member(st.pk.h)) return false;
  auto ok = [&](const Ciphertext& c) { return is_valid_ciphertext(group, c); };
  return std::all_of(st.inputs.begin(), st.inputs.end(), ok) && std::all_of(st.outputs.begin(), st.outputs.end(), ok);
}

bool proof_well_formed(const Group& group, const ShuffleProof& pf, std::size_t n) {
  if (pf.u.size() != n || pf.chain.size() != n || pf.t_hat.size() != n || pf.k_hat.size() != n ||
      pf.k_prime.size() != n) {
    return false;
  }
  auto member = [&](const Element& e) { return group.is_member(e); };
  auto scalar = [&](const Scalar& s) { return group.is_scalar(s.value); };
  for (const auto* v : {&pf.u, &pf.chain, &pf.t_hat}) {
    if (!std::all_of(v->begin(), v->end(), member)) return false;
  }
  for (const auto* v : {&pf.k_hat, &pf.k_prime}) {
    if (!std::all_of(v->begin(), v->end(), scalar)) return false;
  }
  return member(pf.t1) && member(pf.t2) && member(pf.t3) && is_valid_ciphertext(group, pf.t4) &&
         scalar(pf.challenge) && scalar(pf.k1) && scalar(pf.k2) && scalar(pf.k3) && scalar(pf.k4);
}

}  // namespace

Scalar fs_challenge(const Group& group, std::span<const std::uint8_t> transcript) {
  const std::size_t want = (mpz_sizeinbase(group.q().get_mpz_t(), 2) + 128 + 7) / 8;
  std::vector<std::uint8_t> wide;
  for (std::uint32_t block = 0; wide.size() < want; ++block) {
    Sha256 h;
    ByteWriter w;
    w.text(kChallengeDomain);
    w.u32(block);
    w.bytes(transcript);
    auto d = h.update(w.data()).finish();
    wide.insert(wide.end(), d.begin(), d.end());
  }
  wide.resize(want);
  return group.scalar(integer_from_bytes(wide));
}

std::vector<Element> shuffle_generators(const Group& group, std::size_t n) {
  std::vector<Element> h;
  h.reserve(n);
  for (std::size_t i = 0; i < n; ++i) h.push_back(group.hash_to_group(kGeneratorDomain, i));
  return h;
}

std::vector<std::uint8_t> serialize_statement(const Group& group, const ShuffleStatement& st) {
  ByteWriter w;
  w.text("ivxv-sim/shuffle/statement/v1");
  w.integer(group.p());
  w.integer(group.q());
  w.integer(group.params().g);
  put(w, st.pk.h);
  w.u32(static_cast<std::uint32_t>(st.inputs.size()));
  for (const auto& c : st.inputs) put(w, c);
  w.u32(static_cast<std::uint32_t>(st.outputs.size()));
  for (const auto& c : st.outputs) put(w, c);
  return w.take();
}

std::vector<std::uint8_t> serialize_proof(const ShuffleProof& pf) {
  ByteWriter w;
  w.u32(kProofMagic);
  w.u32(kProofVersion);
  w.u32(static_cast<std::uint32_t>(pf.u.size()));
  for (const auto& x : pf.u) put(w, x);
  for (const auto& x : pf.chain) put(w, x);
  put(w, pf.t1);
  put(w, pf.t2);
  put(w, pf.t3);
  put(w, pf.t4);
  for (const auto& x : pf.t_hat) put(w, x);
  for (const auto* s : {&pf.challenge, &pf.k1, &pf.k2, &pf.k3, &pf.k4}) w.integer(s->value);
  for (const auto& s : pf.k_hat) w.integer(s.value);
  for (const auto& s : pf.k_prime) w.integer(s.value);
  return w.take();
}

ShuffleProof deserialize_proof(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.u32() != kProofMagic) fail(ErrorCode::Malformed, "not a shuffle proof");
  if (r.u32() != kProofVersion) fail(ErrorCode::Malformed, "unsupported shuffle proof version");
  const std::uint32_t n = r.u32();
  // Each element takes at least a 4-byte length prefix.
  if (static_cast<std::size_t>(n) * 4 * 5 > r.remaining()) fail(ErrorCode::Malformed, "truncated shuffle proof");
  auto elements = [&](std::vector<Element>& out) {
    out.resize(n);
    for (auto& e : out) e.value = r.integer();
  };
  auto scalars = [&](std::vector<Scalar>& out) {
    out.resize(n);
    for (auto& s : out) s.value = r.integer();
  };
  ShuffleProof pf;
  elements(pf.u);
  elements(pf.chain);
  pf.t1.value = r.integer();
  pf.t2.value = r.integer();
  pf.t3.value = r.integer();
  pf.t4.c1.value = r.integer();
  pf.t4.c2.value = r.integer();
  elements(pf.t_hat);
  for (auto* s : {&pf.challenge, &pf.k1, &pf.k2, &pf.k3, &pf.k4}) s->value = r.integer();
  scalars(pf.k_hat);
  scalars(pf.k_prime);
  if (!r.at_end()) fail(ErrorCode::Malformed, "trailing bytes after shuffle proof");
  return pf;
}

ShuffleProof prove_shuffle(const Group& group, const ShuffleStatement& st, const ShuffleWitness& wit, Rng& rng) {
  const std::size_t n = st.inputs.size();
  if (n == 0 || st.outputs.size() != n) fail(ErrorCode::InvalidArgument, "shuffle needs equal, non-empty lists");
  if (wit.perm.size() != n || wit.rands.size() != n) fail(ErrorCode::BadWitness, "witness length mismatch");
  std::vector<std::uint32_t> inverse(n, static_cast<std::uint32_t>(n));
  for (std::uint32_t i = 0; i < n; ++i) {
    if (wit.perm[i] >= n || inverse[wit.perm[i]] != n) fail(ErrorCode::BadWitness, "witness permutation is not a bijection");
    inverse[wit.perm[i]] = i;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (rerandomize(group, st.pk, st.inputs[wit.perm[i]], wit.rands[i]) != st.outputs[i]) {
      fail(ErrorCode::BadWitness, "witness does not reproduce output " + std::to_string(i));
    }
  }

  const auto h = shuffle_generators(group, n);
  const auto statement_bytes = serialize_statement(group, st);
  ShuffleProof pf;

  // Column j of the permutation matrix has its one in row inverse[j].
  std::vector<Scalar> r(n);
  pf.u.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    r[j] = group.random_scalar(rng);
    pf.u[j] = group.mul(group.exp(r[j]), h[inverse[j]]);
  }

  const auto e = batch_vector(group, statement_bytes, pf.u);
  std::vector<Scalar> e_perm(n);
  for (std::size_t i = 0; i < n; ++i) e_perm[i] = e[wit.perm[i]];

  // Chain c_i = g^{r_hat_i} c_{i-1}^{e'_i}, starting from h_1.
  std::vector<Scalar> r_hat(n);
  pf.chain.resize(n);
  Scalar chain_exponent{0};
  for (std::size_t i = 0; i < n; ++i) {
    r_hat[i] = group.random_scalar(rng);
    const Element& prev = i == 0 ? h[0] : pf.chain[i - 1];
    pf.chain[i] = group.mul(group.exp(r_hat[i]), group.pow(prev, e_perm[i]));
    chain_exponent = group.add(r_hat[i], group.mul(e_perm[i], chain_exponent));
  }

  Scalar r_sum{0}, r_batch{0}, s_batch{0};
  for (std::size_t j = 0; j < n; ++j) {
    r_sum = group.add(r_sum, r[j]);
    r_batch = group.add(r_batch, group.mul(r[j], e[j]));
  }
  for (std::size_t i = 0; i < n; ++i) s_batch = group.add(s_batch, group.mul(wit.rands[i], e_perm[i]));

  const Scalar w1 = group.random_scalar(rng);
  const Scalar w2 = group.random_scalar(rng);
  const Scalar w3 = group.random_scalar(rng);
  const Scalar w4 = group.random_scalar(rng);
  std::vector<Scalar> w_hat(n), w_prime(n);
  for (std::size_t i = 0; i < n; ++i) {
    w_hat[i] = group.random_scalar(rng);
    w_prime[i] = group.random_scalar(rng);
  }

  pf.t1 = group.exp(w1);
  pf.t2 = group.exp(w2);
  pf.t3 = group.mul(group.exp(w3), multi_exp(group, h, w_prime));
  pf.t4 = mul(group, zero_encryption(group, st.pk, group.neg(w4)), multi_exp(group, st.outputs, w_prime));
  pf.t_hat.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Element& prev = i == 0 ? h[0] : pf.chain[i - 1];
    pf.t_hat[i] = group.mul(group.exp(w_hat[i]), group.pow(prev, w_prime[i]));
  }

  pf.challenge = response_challenge(group, statement_bytes, pf);
  const Scalar& v = pf.challenge;
  pf.k1 = group.add(w1, group.mul(v, r_sum));
  pf.k2 = group.add(w2, group.mul(v, chain_exponent));
  pf.k3 = group.add(w3, group.mul(v, r_batch));
  pf.k4 = group.add(w4, group.mul(v, s_batch));
  pf.k_hat.resize(n);
  pf.k_prime.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    pf.k_hat[i] = group.add(w_hat[i], group.mul(v, r_hat[i]));
    pf.k_prime[i] = group.add(w_prime[i], group.mul(v, e_perm[i]));
  }
  return pf;
}

bool verify_shuffle(const Group& group, const ShuffleStatement& st, const ShuffleProof& pf) {
  if (!statement_well_formed(group, st)) return false;
  const std::size_t n = st.inputs.size();
  if (!proof_well_formed(group, pf, n)) return false;

  const auto h = shuffle_generators(group, n);
  const auto statement_bytes = serialize_statement(group, st);
  if (response_challenge(group, statement_bytes, pf) != pf.challenge) return false;
  const Scalar& v = pf.challenge;
  const auto e = batch_vector(group, statement_bytes, pf.u);

  // Unit column sums: prod u_j / prod h_i = g^{sum r_j}.
  Element u_prod = group.identity(), h_prod = group.identity();
  for (std::size_t i = 0; i < n; ++i) {
    u_prod = group.mul(u_prod, pf.u[i]);
    h_prod = group.mul(h_prod, h[i]);
  }
  const Element col = group.div(u_prod, h_prod);
  if (group.mul(group.pow(col, v), pf.t1) != group.exp(pf.k1)) return false;

  // Product argument: the chain ends in h_1^{prod e}.
  Scalar e_prod{1};
  for (const auto& x : e) e_prod = group.mul(e_prod, x);
  const Element chain_end = group.div(pf.chain.back(), group.pow(h[0], e_prod));
  if (group.mul(group.pow(chain_end, v), pf.t2) != group.exp(pf.k2)) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Element& prev = i == 0 ? h[0] : pf.chain[i - 1];
    const Element lhs = group.mul(group.pow(pf.chain[i], v), pf.t_hat[i]);
    const Element rhs = group.mul(group.exp(pf.k_hat[i]), group.pow(prev, pf.k_prime[i]));
    if (lhs != rhs) return false;
  }

  // Commitment opening under the batch.
  const Element batched_u = multi_exp(group, pf.u, e);
  if (group.mul(group.pow(batched_u, v), pf.t3) != group.mul(group.exp(pf.k3), multi_exp(group, h, pf.k_prime))) {
    return false;
  }

  // Re-encryption relation between the batched input and output lists.
  const Ciphertext batched_in = multi_exp(group, st.inputs, e);
  const Ciphertext lhs = mul(group, pow(group, batched_in, v), pf.t4);
  const Ciphertext rhs =
      mul(group, zero_encryption(group, st.pk, group.neg(pf.k4)), multi_exp(group, st.outputs, pf.k_prime));
  return lhs == rhs;
}

bool verify_shuffle(const Group& group, const ShuffleStatement& st, std::span<const std::uint8_t> proof_bytes) {
  try {
    return verify_shuffle(group, st, deserialize_proof(proof_bytes));
  } catch (const Error&) {
    return false;
  }
}

}  // namespace ivxv
