#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ivxv/elgamal.hpp"

namespace ivxv {

using json = nlohmann::json;

// Integers travel as lowercase hex without leading zeros.
std::string integer_hex(const mpz_class& v);
mpz_class integer_from_hex(const std::string& hex);  // throws Malformed

json to_json(const Element& e);
json to_json(const Scalar& s);
json to_json(const Ciphertext& c);
Element element_from_json(const json& j);
Scalar scalar_from_json(const json& j);
Ciphertext ciphertext_from_json(const json& j);

// Canonical bytes of a ciphertext; this is what the certification registry
// signs for a ballot.
std::vector<std::uint8_t> ciphertext_bytes(const Ciphertext& c);

}  // namespace ivxv
