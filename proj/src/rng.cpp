#include "ivxv/rng.hpp"

#include <cstring>

#include "ivxv/bytes.hpp"
#include "ivxv/error.hpp"

namespace ivxv {

namespace {
constexpr std::string_view kRootDomain = "ivxv-sim/rng/root/v1";
constexpr std::string_view kChildDomain = "ivxv-sim/rng/child/v1";
}  // namespace

Rng::Rng(std::uint64_t seed) {
  ByteWriter w;
  w.text(kRootDomain);
  w.u64(seed);
  key_ = sha256(w.data());
}

Rng Rng::derive(std::string_view label, std::uint64_t index) const {
  ByteWriter w;
  w.text(kChildDomain);
  w.bytes(key_);
  w.text(label);
  w.u64(index);
  return Rng(sha256(w.data()));
}

void Rng::refill() {
  ByteWriter w;
  w.bytes(key_);
  w.u64(counter_++);
  block_ = sha256(w.data());
  used_ = 0;
}

void Rng::fill(std::uint8_t* out, std::size_t n) {
  while (n > 0) {
    if (used_ == block_.size()) refill();
    std::size_t chunk = std::min(n, block_.size() - used_);
    std::memcpy(out, block_.data() + used_, chunk);
    used_ += chunk;
    out += chunk;
    n -= chunk;
  }
}

std::uint64_t Rng::next_u64() {
  std::uint8_t buf[8];
  fill(buf, sizeof buf);
  std::uint64_t v = 0;
  for (auto b : buf) v = v << 8 | b;
  return v;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  if (bound == 0) fail(ErrorCode::InvalidArgument, "uniform: bound must be positive");
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t limit = max() - max() % bound;
  for (;;) {
    auto v = next_u64();
    if (v < limit) return v % bound;
  }
}

double Rng::uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

mpz_class Rng::uniform_integer(const mpz_class& bound) {
  if (bound <= 0) fail(ErrorCode::InvalidArgument, "uniform_integer: bound must be positive");
  const std::size_t nbytes = (mpz_sizeinbase(bound.get_mpz_t(), 2) + 64 + 7) / 8;
  std::vector<std::uint8_t> buf(nbytes);
  fill(buf.data(), buf.size());
  mpz_class v = integer_from_bytes(buf);
  mpz_mod(v.get_mpz_t(), v.get_mpz_t(), bound.get_mpz_t());
  return v;
}

}  // namespace ivxv
