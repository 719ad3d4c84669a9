#include "ciagrid/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace ciagrid {

namespace {

bool is_digits(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

mpz_class pow10(unsigned long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
    return r;
}

} // namespace

Rational ratio(std::int64_t p, std::int64_t q) {
    if (q == 0) {
        throw Error("zero denominator");
    }
    Rational r(mpz_class(std::to_string(p)), mpz_class(std::to_string(q)));
    r.canonicalize();
    return r;
}

Rational parse_rational(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    if (s.empty()) {
        throw Error("empty rational literal");
    }

    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        Rational num = parse_rational(s.substr(0, slash));
        Rational den = parse_rational(s.substr(slash + 1));
        if (den == 0) {
            throw Error("zero denominator in '" + std::string(text) + "'");
        }
        Rational q = num / den;
        q.canonicalize();
        return q;
    }

    bool negative = false;
    if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }

    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_part = s.substr(e + 1);
        bool exp_negative = false;
        if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
            exp_negative = exp_part.front() == '-';
            exp_part.remove_prefix(1);
        }
        if (!is_digits(exp_part) || exp_part.size() > 6) {
            throw Error("bad exponent in '" + std::string(text) + "'");
        }
        exponent = std::stol(std::string(exp_part));
        if (exp_negative) {
            exponent = -exponent;
        }
        s = s.substr(0, e);
    }

    std::string digits;
    long fraction_digits = 0;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view int_part = s.substr(0, dot);
        std::string_view frac_part = s.substr(dot + 1);
        if ((!int_part.empty() && !is_digits(int_part)) ||
            (!frac_part.empty() && !is_digits(frac_part)) ||
            (int_part.empty() && frac_part.empty())) {
            throw Error("bad decimal literal '" + std::string(text) + "'");
        }
        digits = std::string(int_part) + std::string(frac_part);
        fraction_digits = static_cast<long>(frac_part.size());
    } else {
        if (!is_digits(s)) {
            throw Error("bad rational literal '" + std::string(text) + "'");
        }
        digits = std::string(s);
    }

    mpz_class mantissa(digits, 10);
    long scale = exponent - fraction_digits;
    Rational q;
    if (scale >= 0) {
        q = Rational(mantissa * pow10(static_cast<unsigned long>(scale)));
    } else {
        q = Rational(mantissa, pow10(static_cast<unsigned long>(-scale)));
    }
    q.canonicalize();
    return negative ? Rational(-q) : q;
}

std::string to_string(const Rational& q) {
    if (q.get_den() == 1) {
        return q.get_num().get_str();
    }
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_decimal_string(const Rational& q) {
    mpz_class den = q.get_den();
    unsigned long twos = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), mpz_class(2).get_mpz_t());
    unsigned long fives = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), mpz_class(5).get_mpz_t());
    if (den != 1) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", q.get_d());
        return buf;
    }
    unsigned long places = std::max(twos, fives);
    mpz_class scaled_num = q.get_num() * pow10(places) / q.get_den();
    bool negative = scaled_num < 0;
    if (negative) {
        scaled_num = -scaled_num;
    }
    std::string s = scaled_num.get_str();
    if (places > 0) {
        if (s.size() <= places) {
            s.insert(0, places - s.size() + 1, '0');
        }
        s.insert(s.size() - places, 1, '.');
    }
    return negative ? "-" + s : s;
}

double to_double(const Rational& q) { return q.get_d(); }

Rational pow2(int exponent) {
    mpz_class p = 1;
    if (exponent >= 0) {
        mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(exponent));
        return Rational(p);
    }
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(-exponent));
    return Rational(mpz_class(1), p);
}

namespace {

std::int64_t to_i64(const mpz_class& z) {
    if (!z.fits_slong_p()) {
        throw Error("integer overflow converting " + z.get_str());
    }
    return static_cast<std::int64_t>(z.get_si());
}

} // namespace

std::int64_t floor_to_i64(const Rational& q) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return to_i64(r);
}

std::int64_t ceil_to_i64(const Rational& q) {
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return to_i64(r);
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw Error("64-bit overflow in exact arithmetic");
    }
    return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) {
        throw Error("64-bit overflow in exact arithmetic");
    }
    return r;
}

std::int64_t lcm_checked(std::int64_t a, std::int64_t b) {
    return checked_mul(a / std::gcd(a, b), b);
}

} // namespace ciagrid
