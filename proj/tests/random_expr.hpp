#pragma once

// Seeded generator of well-defined expressions in z, t, u for property tests.
// Every generated expression is finite for z, t, u in [0.5, 2].

#include "radsym/expr.hpp"

#include <random>

namespace radsym::testing {

class RandomExpr {
public:
    explicit RandomExpr(std::uint64_t seed) : rng_(seed) {}

    Expr any(int depth) {
        if (depth <= 0) return leaf();
        switch (pick(7)) {
            case 0:
                return any(depth - 1) + any(depth - 1);
            case 1:
                return any(depth - 1) - any(depth - 1);
            case 2:
                return any(depth - 1) * any(depth - 1);
            case 3:
                return any(depth - 1) / positive(depth - 1);
            case 4:
                return pow(positive(depth - 1), small_exponent());
            case 5:
                return exp(bounded(depth - 1));
            default:
                return ln(positive(depth - 1));
        }
    }

    Expr positive(int depth) {
        if (depth <= 0) return positive_leaf();
        switch (pick(5)) {
            case 0:
                return positive(depth - 1) + positive(depth - 1);
            case 1:
                return positive(depth - 1) * positive(depth - 1);
            case 2:
                return pow(positive(depth - 1), small_exponent());
            case 3:
                return exp(bounded(depth - 1));
            default:
                return positive(depth - 1) / positive(depth - 1);
        }
    }

    Bindings point() {
        std::uniform_real_distribution<double> d(0.5, 2.0);
        return {{"z", d(rng_)}, {"t", d(rng_)}, {"u", d(rng_)}};
    }

    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

    Expr leaf() {
        static const char* names[] = {"z", "t", "u"};
        if (pick(4) == 0) return Expr(Rational(pick(9) - 4, pick(3) + 1));
        return var(names[pick(3)]);
    }

    Expr positive_leaf() {
        static const char* names[] = {"z", "t", "u"};
        if (pick(4) == 0) return Expr(Rational(pick(5) + 1, pick(3) + 1));
        return var(names[pick(3)]);
    }

    // Small-magnitude expression for exp arguments.
    Expr bounded(int depth) {
        Expr inner = depth > 0 ? positive(depth - 1) : positive_leaf();
        return Expr(Rational(1, pick(3) + 2)) * ln(inner) - Expr(Rational(pick(3), 4)) * var("z");
    }

    Rational small_exponent() {
        static const Rational choices[] = {Rational(2), Rational(3), Rational(-1), Rational(1, 2), Rational(-3, 2),
                                           Rational(1, 3), Rational(-2)};
        return choices[pick(7)];
    }
};

}  // namespace radsym::testing
