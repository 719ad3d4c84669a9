#include "ciagrid/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ciagrid {

namespace {

using json = nlohmann::json;
using DomParser = nlohmann::detail::json_sax_dom_parser<json>;

// Forwards to the DOM builder, except that floats are stored as their
// literal text.
class ExactSax {
public:
    explicit ExactSax(json& result) : dom_(result, true) {}

    bool null() { return dom_.null(); }
    bool boolean(bool v) { return dom_.boolean(v); }
    bool number_integer(json::number_integer_t v) { return dom_.number_integer(v); }
    bool number_unsigned(json::number_unsigned_t v) { return dom_.number_unsigned(v); }
    bool number_float(json::number_float_t, const json::string_t& s) {
        json::string_t copy = s;
        return dom_.string(copy);
    }
    bool string(json::string_t& s) { return dom_.string(s); }
    bool binary(json::binary_t& b) { return dom_.binary(b); }
    bool start_object(std::size_t n) { return dom_.start_object(n); }
    bool key(json::string_t& k) { return dom_.key(k); }
    bool end_object() { return dom_.end_object(); }
    bool start_array(std::size_t n) { return dom_.start_array(n); }
    bool end_array() { return dom_.end_array(); }
    bool parse_error(std::size_t pos, const std::string& tok, const nlohmann::detail::exception& ex) {
        return dom_.parse_error(pos, tok, ex);
    }

private:
    DomParser dom_;
};

} // namespace

json parse_json_exact(std::string_view text) {
    json result;
    ExactSax sax(result);
    try {
        json::sax_parse(text.begin(), text.end(), &sax);
    } catch (const json::exception& ex) {
        throw Error(std::string("JSON parse error: ") + ex.what());
    }
    return result;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path + "'");
    }
    out << contents;
}

json read_json_file(const std::string& path) { return parse_json_exact(read_text_file(path)); }

Rational rational_from_json(const json& j) {
    if (j.is_number_integer()) {
        if (j.is_number_unsigned()) {
            return Rational(mpz_class(std::to_string(j.get<std::uint64_t>())));
        }
        return Rational(mpz_class(std::to_string(j.get<std::int64_t>())));
    }
    if (j.is_string()) {
        return parse_rational(j.get<std::string>());
    }
    if (j.is_number_float()) {
        return Rational(j.get<double>());
    }
    throw Error("expected a number or rational string, got " + j.dump());
}

json rational_to_json(const Rational& q) {
    if (q.get_den() == 1 && q.get_num().fits_slong_p()) {
        return json(static_cast<std::int64_t>(q.get_num().get_si()));
    }
    return json(to_string(q));
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace ciagrid
