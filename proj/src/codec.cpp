#include "ivxv/codec.hpp"

#include "ivxv/bytes.hpp"
#include "ivxv/error.hpp"

namespace ivxv {

std::string integer_hex(const mpz_class& v) { return v.get_str(16); }

mpz_class integer_from_hex(const std::string& hex) {
  if (hex.empty() || hex.find_first_not_of("0123456789abcdef") != std::string::npos) {
    fail(ErrorCode::Malformed, "invalid hex integer '" + hex + "'");
  }
  mpz_class v;
  if (v.set_str(hex, 16) != 0) fail(ErrorCode::Malformed, "invalid hex integer '" + hex + "'");
  return v;
}

namespace {
const std::string& as_string(const json& j) {
  if (!j.is_string()) fail(ErrorCode::Malformed, "expected a hex string");
  return j.get_ref<const std::string&>();
}
}  // namespace

json to_json(const Element& e) { return integer_hex(e.value); }
json to_json(const Scalar& s) { return integer_hex(s.value); }
json to_json(const Ciphertext& c) { return json{{"c1", to_json(c.c1)}, {"c2", to_json(c.c2)}}; }

Element element_from_json(const json& j) { return Element{integer_from_hex(as_string(j))}; }
Scalar scalar_from_json(const json& j) { return Scalar{integer_from_hex(as_string(j))}; }

Ciphertext ciphertext_from_json(const json& j) {
  if (!j.is_object() || !j.contains("c1") || !j.contains("c2")) fail(ErrorCode::Malformed, "expected a ciphertext");
  return Ciphertext{element_from_json(j.at("c1")), element_from_json(j.at("c2"))};
}

std::vector<std::uint8_t> ciphertext_bytes(const Ciphertext& c) {
  ByteWriter w;
  w.integer(c.c1.value);
  w.integer(c.c2.value);
  return w.take();
}

}  // namespace ivxv
