#include "radsym/rational.hpp"

#include "radsym/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>

namespace radsym {

namespace {

Integer pow10(long long k) {
    Integer r = 1;
    for (long long i = 0; i < k; ++i) r *= 10;
    return r;
}

Rational ipow(const Rational& b, long long e) {
    Rational result = 1;
    Rational base = b;
    long long n = e < 0 ? -e : e;
    while (n > 0) {
        if (n & 1) result *= base;
        base *= base;
        n >>= 1;
    }
    return e < 0 ? Rational(1) / result : result;
}

// Exact q-th root of a non-negative integer, when one exists.
std::optional<Integer> integer_root(const Integer& value, long long q) {
    if (value == 0 || value == 1) return value;
    double approx = std::pow(value.convert_to<double>(), 1.0 / static_cast<double>(q));
    if (!std::isfinite(approx) || approx > 1e15) return std::nullopt;
    Integer guess = static_cast<long long>(std::llround(approx));
    for (int delta = -1; delta <= 1; ++delta) {
        Integer candidate = guess + delta;
        if (candidate < 0) continue;
        Integer p = 1;
        for (long long i = 0; i < q; ++i) p *= candidate;
        if (p == value) return candidate;
    }
    return std::nullopt;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::size_t i = 0;
    auto fail = [&](const char* what) -> Rational { throw ParseError(what, i); };
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
    std::string digits;
    long long scale = 0;
    bool any = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        digits += text[i++];
        any = true;
    }
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            digits += text[i++];
            ++scale;
            any = true;
        }
    }
    if (!any) return fail("expected a number");
    Rational value(Integer(digits), pow10(scale));
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool eneg = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) eneg = text[i++] == '-';
        std::string edigits;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) edigits += text[i++];
        if (edigits.empty() || edigits.size() > 4) return fail("malformed exponent");
        long long e = std::stoll(edigits);
        value = eneg ? value / Rational(pow10(e)) : value * Rational(pow10(e));
    } else if (i < text.size() && text[i] == '/') {
        ++i;
        std::string den;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) den += text[i++];
        if (den.empty()) return fail("expected denominator");
        Integer d(den);
        if (d == 0) return fail("zero denominator");
        value /= Rational(d);
    }
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i != text.size()) return fail("trailing characters in number");
    return negative ? Rational(-value) : value;
}

Rational to_rational(double x) {
    if (!std::isfinite(x)) throw DomainError("cannot convert non-finite value to a rational");
    if (x == 0.0) return 0;
    // Continued-fraction convergents p/q with q below 10^6.
    const double target = x;
    double r = std::fabs(x);
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int iter = 0; iter < 40; ++iter) {
        double a = std::floor(r);
        if (a > 1e15) break;
        long long ai = static_cast<long long>(a);
        long long p2 = ai * p1 + p0;
        long long q2 = ai * q1 + q0;
        if (q2 > 1000000) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double approx = static_cast<double>(p1) / static_cast<double>(q1);
        if (std::fabs(approx - std::fabs(target)) <= 1e-13 * std::fabs(target)) {
            Rational result(p1, q1);
            return x < 0 ? Rational(-result) : result;
        }
        double frac = r - a;
        if (frac < 1e-300) break;
        r = 1.0 / frac;
    }
    int exponent = 0;
    double mantissa = std::frexp(x, &exponent);
    auto m = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
    exponent -= 53;
    Rational result(m);
    Integer two = 2;
    Integer scale = 1;
    for (int k = 0; k < std::abs(exponent); ++k) scale *= two;
    return exponent >= 0 ? Rational(result * Rational(scale)) : Rational(result / Rational(scale));
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r) {
    if (is_integer(r)) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

bool is_integer(const Rational& r) { return denominator(r) == 1; }

std::optional<Rational> exact_power(const Rational& base, const Rational& exponent) {
    const Integer& p = numerator(exponent);
    const Integer& q = denominator(exponent);
    if (abs(p) > 4096 || q > 64) return std::nullopt;
    long long pi = p.convert_to<long long>();
    long long qi = q.convert_to<long long>();
    if (base == 0) {
        if (pi <= 0) return std::nullopt;
        return Rational(0);
    }
    bool negative = base < 0;
    if (negative && qi % 2 == 0) return std::nullopt;
    Rational magnitude = negative ? Rational(-base) : base;
    auto num_root = integer_root(numerator(magnitude), qi);
    auto den_root = integer_root(denominator(magnitude), qi);
    if (!num_root || !den_root) return std::nullopt;
    Rational root(*num_root, *den_root);
    if (negative) root = -root;
    return ipow(root, pi);
}

}  // namespace radsym
