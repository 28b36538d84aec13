#include "doctest.h"
#include "random_expr.hpp"
#include "radsym/errors.hpp"
#include "radsym/expr.hpp"

#include <cmath>

using namespace radsym;

namespace {

SymbolTable table_with_k_and_j() {
    SymbolTable st;
    FunctionSymbol k;
    k.derivative = [](const Expr& a) { return Expr(2) * a; };
    k.evaluate = [](double x) { return x * x; };
    st.define_function("K", k);
    st.define_antiderivative("J", "K", [](double x) { return x * x * x / 3.0; });
    return st;
}

bool close_rel(double a, double b, double tol) { return std::fabs(a - b) <= tol * (1.0 + std::fabs(b)); }

}  // namespace

TEST_SUITE("expr") {
    TEST_CASE("parser builds the documented tree") {
        CHECK(tree_string(parse("z^2 + 2*z")) == "Sum(Pow(z,2),Prod(2,z))");
        CHECK(tree_string(parse("-z^2")) == "Prod(-1,Pow(z,2))");
        CHECK(tree_string(parse("z^-1")) == "Pow(z,-1)");
        CHECK(tree_string(parse("2^3^2")) == "512");
        CHECK(parse("0.1").value() == Rational(1, 10));
        CHECK(parse("3/4").value() == Rational(3, 4));
    }

    TEST_CASE("syntax errors carry the byte offset") {
        try {
            parse("z +");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.offset() == 3);
        }
        CHECK_THROWS_AS(parse("(z"), ParseError);
        CHECK_THROWS_AS(parse("z $ 2"), ParseError);
        CHECK_THROWS_AS(parse("K"), ParseError);
    }

    TEST_CASE("unknown identifiers are named") {
        SymbolTable st;
        st.set_parameter("beta", 1.0);
        CHECK_NOTHROW(parse("exp(-(beta*z^2)/(4*t))", &st));
        try {
            parse("foo*z", &st);
            FAIL("expected unknown symbol");
        } catch (const UnknownSymbolError& e) {
            CHECK(e.token() == "foo");
            CHECK(e.offset() == 0);
        }
        CHECK_THROWS_AS(parse("sinh(z)"), UnknownSymbolError);
    }

    TEST_CASE("registered derivative rules") {
        SymbolTable st = table_with_k_and_j();
        CHECK(diff(parse("J(u)"), "u", st) == parse("K(u)"));
        CHECK(diff(parse("J(u^2)"), "u", st) == simplify(parse("2*u*K(u^2)")));
        CHECK_THROWS_AS(diff(parse("F(u)"), "u", st), UnregisteredSymbolError);
        CHECK(diff(parse("z^2"), "z", st) == simplify(parse("2*z")));
    }

    TEST_CASE("normal form examples") {
        CHECK(simplify(parse("z*z^(-1)")).is_const(1));
        CHECK(simplify(parse("2*z + 3*z - 5*z")).is_const(0));
        CHECK(simplify(parse("exp(2*ln(z))")) == parse("z^2"));
        CHECK(simplify(parse("ln(z^3*t)")) == simplify(parse("3*ln(z) + ln(t)")));
        CHECK(simplify(parse("exp(z)*exp(-z)")).is_const(1));
        CHECK(simplify(parse("(z+1)^2 - z^2 - 2*z - 1")).is_const(0));
        CHECK(simplify(parse("4^(1/2)")).is_const(2));
        // (u^2)^(1/2) is |u|, so it must not collapse to u.
        CHECK(simplify(parse("(u^2)^(1/2)")) != parse("u"));
        CHECK(simplify(parse("(z^2)^(1/2)")) == parse("z"));
    }

    TEST_CASE("evaluation errors instead of NaN") {
        SymbolTable st;
        CHECK_THROWS_AS(eval(parse("ln(z)"), {{"z", -1.0}}, st), DomainError);
        CHECK_THROWS_AS(eval(parse("z^(1/2)"), {{"z", -1.0}}, st), DomainError);
        CHECK_THROWS_AS(eval(parse("1/z"), {{"z", 0.0}}, st), DomainError);
        CHECK_THROWS_AS(eval(parse("z + t"), {{"z", 1.0}}, st), UnboundVariableError);
        CHECK_THROWS_AS(eval(parse("K(z)"), {{"z", 1.0}}, st), UnregisteredSymbolError);
        st.set_parameter("beta", 2.0);
        CHECK(eval(parse("beta*z"), {{"z", 3.0}}, st) == doctest::Approx(6.0));
    }

    TEST_CASE("zero recognition reports its path") {
        SymbolTable st;
        PointSampler sampler = [](std::mt19937_64& rng) {
            std::uniform_real_distribution<double> d(0.5, 2.0);
            return Bindings{{"z", d(rng)}, {"u", d(rng)}};
        };
        auto nf = recognize_zero(parse("z - z"), st, sampler, 1);
        CHECK(nf.zero);
        CHECK(nf.path == ZeroPath::NormalForm);
        // Rational-function identity that the normal form does not cancel.
        auto sampled = recognize_zero(parse("(2 + 4*u)/(1 + 2*u) - 2"), st, sampler, 1);
        CHECK(sampled.zero);
        CHECK(sampled.path == ZeroPath::Sampling);
        auto nonzero = recognize_zero(parse("z - u"), st, sampler, 1);
        CHECK_FALSE(nonzero.zero);
        CHECK(nonzero.path == ZeroPath::NotZero);
    }

    TEST_CASE("property: unparse/parse round trip at 100 points") {
        testing::RandomExpr gen(20240501);
        SymbolTable st;
        for (int i = 0; i < 100; ++i) {
            Expr e = gen.any(3);
            Expr back = parse(unparse(e));
            Bindings p = gen.point();
            double a = eval(e, p, st);
            double b = eval(back, p, st);
            INFO(unparse(e));
            CHECK(close_rel(b, a, 1e-12));
        }
    }

    TEST_CASE("property: differentiation is linear") {
        testing::RandomExpr gen(77);
        SymbolTable st;
        PointSampler sampler = [&](std::mt19937_64&) { return gen.point(); };
        for (int i = 0; i < 30; ++i) {
            Expr f = gen.any(2);
            Expr g = gen.any(2);
            Expr lhs = diff(Expr(Rational(3, 2)) * f - Expr(5) * g, "z", st);
            Expr rhs = Expr(Rational(3, 2)) * diff(f, "z", st) - Expr(5) * diff(g, "z", st);
            INFO(unparse(f), " | ", unparse(g));
            CHECK(recognize_zero(lhs - rhs, st, sampler, 9).zero);
        }
    }

    TEST_CASE("property: derivative agrees with central differences") {
        testing::RandomExpr gen(4242);
        SymbolTable st;
        const double h = 1e-5;
        int checked = 0;
        while (checked < 50) {
            Expr e = gen.any(3);
            Expr d = diff(e, "z", st);
            Bindings p = gen.point();
            Bindings plus = p;
            Bindings minus = p;
            plus["z"] += h;
            minus["z"] -= h;
            double fd = (eval(e, plus, st) - eval(e, minus, st)) / (2 * h);
            double exact = eval(d, p, st);
            if (std::fabs(exact) > 1e4) continue;  // FD error scales with higher derivatives
            INFO(unparse(e));
            CHECK(std::fabs(exact - fd) / (1.0 + std::fabs(exact)) < 1e-6);
            ++checked;
        }
    }

    TEST_CASE("property: simplify is idempotent and value preserving") {
        testing::RandomExpr gen(99);
        SymbolTable st;
        for (int i = 0; i < 100; ++i) {
            Expr e = gen.any(3);
            Expr s = simplify(e);
            INFO(unparse(e), " -> ", unparse(s));
            CHECK(simplify(s) == s);
            for (int k = 0; k < 5; ++k) {
                Bindings p = gen.point();
                CHECK(close_rel(eval(s, p, st), eval(e, p, st), 1e-12));
            }
        }
    }
}
