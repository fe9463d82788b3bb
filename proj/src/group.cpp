#include "ivxv/group.hpp"

#include <mutex>

#include "ivxv/bytes.hpp"
#include "ivxv/error.hpp"
#include "ivxv/hash.hpp"
#include "ivxv/rng.hpp"

namespace ivxv {

namespace {

constexpr int kPrimalityReps = 40;

// RFC 3526, group 14. p = 2q + 1 and 2 generates the order-q subgroup.
constexpr const char* kStandardP =
    "ffffffffffffffffc90fdaa22168c234c4c6628b80dc1cd129024e088a67cc74"
    "020bbea63b139b22514a08798e3404ddef9519b3cd3a431b302b0a6df25f1437"
    "4fe1356d6d51c245e485b576625e7ec6f44c42e9a637ed6b0bff5cb6f406b7ed"
    "ee386bfb5a899fa5ae9f24117c4b1fe649286651ece45b3dc2007cb8a163bf05"
    "98da48361c55d39a69163fa8fd24cf5f83655d23dca3ad961c62f356208552bb"
    "9ed529077096966d670c354e4abc9804f1746c08ca18217c32905e462e36ce3b"
    "e39e772c180e86039b2783a2ec07a28fb5c55df06f4c52c9de2bcbf695581718"
    "3995497cea956ae515d2261898fa051015728e5a8aacaa68ffffffffffffffff";

// 256-bit safe prime found by scanning upward from SHA-256("ivxv-sim small
// preset"); g = 4 is a square and therefore has order q.
constexpr const char* kSmallP = "9ea370fd41882d963582247006b5be9c581fed4ca1fd15c9df5d29e314342dbb";

struct PresetBase {
  mpz_class p, q, g;
};

PresetBase safe_prime_base(const char* p_hex, unsigned long g) {
  PresetBase b;
  b.p = mpz_class(p_hex, 16);
  b.q = (b.p - 1) / 2;
  b.g = g;
  return b;
}

void validate_structure(const GroupParams& gp) {
  if (gp.p < 5) fail(ErrorCode::InvalidParams, "p too small");
  if (mpz_probab_prime_p(gp.q.get_mpz_t(), kPrimalityReps) == 0) fail(ErrorCode::InvalidParams, "q is not prime");
  if (mpz_probab_prime_p(gp.p.get_mpz_t(), kPrimalityReps) == 0) fail(ErrorCode::InvalidParams, "p is not prime");
  if (mpz_divisible_p(mpz_class(gp.p - 1).get_mpz_t(), gp.q.get_mpz_t()) == 0) {
    fail(ErrorCode::InvalidParams, "q does not divide p-1");
  }
  if (gp.g <= 1 || gp.g >= gp.p) fail(ErrorCode::InvalidParams, "g must lie in (1, p)");
  mpz_class t;
  mpz_powm(t.get_mpz_t(), gp.g.get_mpz_t(), gp.q.get_mpz_t(), gp.p.get_mpz_t());
  if (t != 1) fail(ErrorCode::InvalidParams, "g does not have order q");
}

void validate_bound(const GroupParams& gp) {
  if (gp.candidate_bound == 0) fail(ErrorCode::InvalidParams, "candidateBound must be positive");
  if (gp.candidate_bound > kMaxCandidateBound) fail(ErrorCode::InvalidParams, "candidateBound must satisfy C <= 2^16");
  if (gp.candidate_bound > gp.q) fail(ErrorCode::InvalidParams, "candidateBound must satisfy C <= q");
}

const GroupParams& checked_preset(std::string_view name) {
  static std::once_flag once;
  static GroupParams toy, small, standard;
  std::call_once(once, [] {
    toy = GroupParams{23, 11, 2, 1, "toy"};
    auto s = safe_prime_base(kSmallP, 4);
    small = GroupParams{s.p, s.q, s.g, 1, "small"};
    auto st = safe_prime_base(kStandardP, 2);
    standard = GroupParams{st.p, st.q, st.g, 1, "standard"};
    for (const auto* gp : {&toy, &small, &standard}) validate_structure(*gp);
  });
  if (name == "toy") return toy;
  if (name == "small") return small;
  if (name == "standard") return standard;
  fail(ErrorCode::UnknownPreset, "unknown group preset '" + std::string(name) + "'");
}

}  // namespace

void GroupParams::validate() const {
  validate_structure(*this);
  validate_bound(*this);
}

GroupParams setup(std::string_view preset, std::uint32_t candidate_bound) {
  GroupParams gp = checked_preset(preset);
  gp.candidate_bound = candidate_bound;
  validate_bound(gp);
  return gp;
}

Group::Group(GroupParams params) : params_(std::move(params)) {
  if (params_.preset.empty()) {
    params_.validate();
  } else {
    validate_bound(params_);
  }
  cofactor_ = (params_.p - 1) / params_.q;
  element_bytes_ = (mpz_sizeinbase(params_.p.get_mpz_t(), 2) + 7) / 8;
}

Element Group::mul(const Element& a, const Element& b) const {
  Element r;
  mpz_mul(r.value.get_mpz_t(), a.value.get_mpz_t(), b.value.get_mpz_t());
  mpz_mod(r.value.get_mpz_t(), r.value.get_mpz_t(), params_.p.get_mpz_t());
  return r;
}

Element Group::inv(const Element& a) const {
  Element r;
  if (mpz_invert(r.value.get_mpz_t(), a.value.get_mpz_t(), params_.p.get_mpz_t()) == 0) {
    fail(ErrorCode::InvalidArgument, "element is not invertible");
  }
  return r;
}

Element Group::div(const Element& a, const Element& b) const { return mul(a, inv(b)); }

Element Group::pow(const Element& base, const Scalar& e) const {
  Element r;
  mpz_powm(r.value.get_mpz_t(), base.value.get_mpz_t(), e.value.get_mpz_t(), params_.p.get_mpz_t());
  return r;
}

Element Group::exp(const Scalar& e) const { return pow(generator(), e); }

bool Group::is_member(const mpz_class& x) const {
  if (x < 1 || x >= params_.p) return false;
  mpz_class t;
  mpz_powm(t.get_mpz_t(), x.get_mpz_t(), params_.q.get_mpz_t(), params_.p.get_mpz_t());
  return t == 1;
}

Scalar Group::scalar(const mpz_class& x) const {
  Scalar s;
  mpz_mod(s.value.get_mpz_t(), x.get_mpz_t(), params_.q.get_mpz_t());
  return s;
}

Scalar Group::add(const Scalar& a, const Scalar& b) const { return scalar(a.value + b.value); }
Scalar Group::sub(const Scalar& a, const Scalar& b) const { return scalar(a.value - b.value); }
Scalar Group::mul(const Scalar& a, const Scalar& b) const { return scalar(a.value * b.value); }
Scalar Group::neg(const Scalar& a) const { return scalar(-a.value); }

Scalar Group::inv(const Scalar& a) const {
  Scalar r;
  if (mpz_invert(r.value.get_mpz_t(), a.value.get_mpz_t(), params_.q.get_mpz_t()) == 0) {
    fail(ErrorCode::InvalidArgument, "scalar is not invertible");
  }
  return r;
}

Scalar Group::random_scalar(Rng& rng) const { return Scalar{rng.uniform_integer(params_.q)}; }

Scalar Group::random_nonzero_scalar(Rng& rng) const {
  return Scalar{rng.uniform_integer(params_.q - 1) + 1};
}

Element Group::hash_to_group(std::string_view domain, std::uint64_t index) const {
  const std::size_t want = element_bytes_ + 16;
  for (std::uint32_t attempt = 0;; ++attempt) {
    std::vector<std::uint8_t> wide;
    for (std::uint32_t block = 0; wide.size() < want; ++block) {
      ByteWriter w;
      w.text("ivxv-sim/hash-to-group/v1");
      w.text(domain);
      w.integer(params_.p);
      w.u64(index);
      w.u32(attempt);
      w.u32(block);
      auto d = sha256(w.data());
      wide.insert(wide.end(), d.begin(), d.end());
    }
    wide.resize(want);
    mpz_class x = integer_from_bytes(wide);
    mpz_mod(x.get_mpz_t(), x.get_mpz_t(), params_.p.get_mpz_t());
    mpz_powm(x.get_mpz_t(), x.get_mpz_t(), cofactor_.get_mpz_t(), params_.p.get_mpz_t());
    if (x > 1) return Element{x};
  }
}

std::optional<std::uint32_t> Group::small_dlog(const Element& e) const {
  mpz_class acc = 1;
  for (std::uint32_t m = 0; m < params_.candidate_bound; ++m) {
    if (acc == e.value) return m;
    acc *= params_.g;
    mpz_mod(acc.get_mpz_t(), acc.get_mpz_t(), params_.p.get_mpz_t());
  }
  return std::nullopt;
}

}  // namespace ivxv
