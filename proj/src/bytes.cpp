#include "ivxv/bytes.hpp"

#include <limits>

#include "ivxv/error.hpp"

namespace ivxv {

std::vector<std::uint8_t> integer_to_bytes(const mpz_class& v) {
  if (v < 0) fail(ErrorCode::InvalidArgument, "negative integers have no canonical encoding");
  if (v == 0) return {};
  std::vector<std::uint8_t> out((mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8);
  std::size_t count = 0;
  mpz_export(out.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
  out.resize(count);
  return out;
}

mpz_class integer_from_bytes(std::span<const std::uint8_t> data) {
  mpz_class v;
  if (!data.empty()) mpz_import(v.get_mpz_t(), data.size(), 1, 1, 1, 0, data.data());
  return v;
}

void ByteWriter::u8(std::uint8_t v) { buf_.push_back(v); }

void ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void ByteWriter::bytes(std::span<const std::uint8_t> data) {
  if (data.size() > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorCode::InvalidArgument, "item too large to encode");
  }
  u32(static_cast<std::uint32_t>(data.size()));
  buf_.insert(buf_.end(), data.begin(), data.end());
}

void ByteWriter::text(std::string_view s) {
  bytes({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
}

void ByteWriter::integer(const mpz_class& v) { bytes(integer_to_bytes(v)); }

std::span<const std::uint8_t> ByteReader::take(std::size_t n) {
  if (n > remaining()) fail(ErrorCode::Malformed, "truncated input");
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t ByteReader::u8() { return take(1)[0]; }

std::uint32_t ByteReader::u32() {
  std::uint32_t v = 0;
  for (auto b : take(4)) v = v << 8 | b;
  return v;
}

std::uint64_t ByteReader::u64() {
  std::uint64_t v = 0;
  for (auto b : take(8)) v = v << 8 | b;
  return v;
}

std::vector<std::uint8_t> ByteReader::bytes() {
  auto n = u32();
  auto s = take(n);
  return {s.begin(), s.end()};
}

mpz_class ByteReader::integer() {
  auto n = u32();
  auto s = take(n);
  if (!s.empty() && s[0] == 0) fail(ErrorCode::Malformed, "non-minimal integer encoding");
  return integer_from_bytes(s);
}

}  // namespace ivxv
