#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

#include "ciagrid/rational.hpp"

namespace ciagrid {

/// Parses JSON text keeping every floating-point literal as its original
/// string, so that decimals such as 0.1 can be read back as exact rationals.
nlohmann::json parse_json_exact(std::string_view text);

nlohmann::json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view contents);

/// Accepts integers, strings ("3/5", "0.6") and literals preserved by
/// parse_json_exact. Plain doubles are converted exactly from binary.
Rational rational_from_json(const nlohmann::json& j);

/// Integers become JSON numbers, everything else a canonical string.
nlohmann::json rational_to_json(const Rational& q);

/// 64-bit FNV-1a, hex encoded. Used for provenance tags in manifests.
std::string fnv1a_hex(std::string_view bytes);

} // namespace ciagrid
