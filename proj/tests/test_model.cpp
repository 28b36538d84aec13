#include "doctest.h"
#include "radsym/errors.hpp"
#include "radsym/model.hpp"

#include <cmath>
#include <random>

using namespace radsym;

namespace {

CoefficientModel power(Rational k0, Rational m, Rational c0, Rational n, Rational nu = 1) {
    return CoefficientModel::build(PowerLaw{k0, m, c0, n}, nu);
}

CoefficientModel expo(Rational k0, Rational lam, Rational c0, Rational mu, Rational nu = 1) {
    return CoefficientModel::build(Exponential{k0, lam, c0, mu}, nu);
}

std::vector<CoefficientModel> assorted_models() {
    SymbolTable only_u;
    return {
        power(2, 1, 1, 3),
        power(1, -1, 2, 1),
        power(3, Rational(-5, 2), 1, 0),
        expo(1, 2, 1, -1),
        expo(2, 0, 1, 1),
        expo(1, -1, 3, -1),
        CoefficientModel::build(Linear{1, 1, -1, 1, 1, 1}, 2),
        CoefficientModel::build(Linear{2, 1, 0, 1, 2, 3}, 1),
        CoefficientModel::build(Custom{parse("1 + u^2", &only_u), parse("exp(u)", &only_u), Interval{-2.0, 3.0}}, 1),
    };
}

}  // namespace

TEST_SUITE("model") {
    TEST_CASE("domains and validation") {
        CHECK(power(1, 2, 3, 2).u_domain().lo == 0.0);
        CHECK(std::isinf(power(1, 2, 3, 2).u_domain().hi));
        auto lin = CoefficientModel::build(Linear{1, 1, -1, 1, 1, 1}, 2);
        CHECK(lin.u_domain().lo == doctest::Approx(-1.0));
        CHECK(lin.u_domain().hi == doctest::Approx(1.0));
        CHECK_THROWS_AS(power(1, 1, 1, 1, 0), ModelError);
        CHECK_THROWS_AS(power(-1, 1, 1, 1), ModelError);
        CHECK_THROWS_AS(expo(1, 1, 0, 1), ModelError);
        CHECK_THROWS_AS(CoefficientModel::build(Linear{1, 1, 1, 1, -1, -1}, 1), ModelError);
        SymbolTable only_u;
        CHECK_THROWS_AS(CoefficientModel::build(Custom{parse("u", &only_u), parse("1", &only_u), Interval{-1.0, 1.0}}, 1),
                        ModelError);
    }

    TEST_CASE("ratio classification") {
        auto p = power(1, 2, 3, 2);
        CHECK(p.ratio_class().constant);
        CHECK(*p.ratio_class().beta_exact == 3);
        CHECK(p.ratio_class().decided_by == "normal-form");
        auto e = expo(2, Rational(3, 2), 5, Rational(3, 2));
        CHECK(e.ratio_class().constant);
        CHECK(*e.ratio_class().beta_exact == Rational(5, 2));
        // c*b = a*d makes the linear ratio constant without a symbolic cancellation.
        auto lin = CoefficientModel::build(Linear{3, 1, 2, 7, 2, 4}, 1);
        CHECK(lin.ratio_class().constant);
        CHECK(lin.ratio_class().decided_by == "sampling");
        CHECK(*lin.ratio_class().beta_exact == Rational(2 * 7, 3));
        CHECK_FALSE(power(1, 1, 1, 2).ratio_class().constant);
        CHECK_FALSE(CoefficientModel::build(Linear{1, 1, -1, 1, 1, 1}, 2).ratio_class().constant);
    }

    TEST_CASE("J closed forms") {
        CHECK(power(2, 1, 1, 1).J(3.0) == doctest::Approx(9.0));
        CHECK(expo(1, 2, 1, 1).J(0.0) == doctest::Approx(0.5));
        CHECK(power(1, -1, 1, 1).J(1.0) == 0.0);
        CHECK(power(1, 1, 1, 1).J_inverse(2.0) == doctest::Approx(2.0));
        CHECK(expo(1, 1, 1, 1).J_inverse(1.0) == doctest::Approx(0.0));
        CHECK(expo(2, 0, 1, 1).J(1.5) == doctest::Approx(3.0));
        CHECK_THROWS_AS(power(1, 1, 1, 1).J_inverse(-1.0), DomainError);
        CHECK_THROWS_AS(power(1, 1, 1, 1).J(-1.0), DomainError);
    }

    TEST_CASE("F values and singularity") {
        auto p = power(1, 1, 1, 3);
        CHECK(p.F(2.0) == doctest::Approx(1.0));
        CHECK(simplify(p.F_expr() - parse("u/2")).is_const(0));
        auto e = expo(1, 1, 1, 3);
        CHECK(e.F(-4.0) == doctest::Approx(0.5));
        CHECK(e.F_expr().is_const(Rational(1, 2)));
        CHECK_THROWS_AS(power(1, 2, 1, 2).F(1.0), SingularityError);
        CHECK_THROWS_AS(power(1, 2, 1, 2).F_expr(), SingularityError);
    }

    TEST_CASE("property: J' = K, J increasing, inverse identity") {
        std::mt19937_64 rng(5);
        for (const auto& model : assorted_models()) {
            INFO(model.describe());
            const SymbolTable& st = model.symbols();
            Expr dJ = diff(model.J_expr(), "u", st);
            auto samples = numerics::sample_interval(model.u_domain(), 50);
            double prev_u = 0, prev_j = 0;
            bool first = true;
            for (double u : samples) {
                if (std::fabs(u) > 10) continue;
                double k = model.K(u);
                CHECK(std::fabs(eval(dJ, {{"u", u}}, st) - k) <= 1e-10 * (1 + std::fabs(k)));
                double j = model.J(u);
                if (!first) CHECK(j > prev_j);
                CHECK(prev_u <= u + (first ? 1e300 : 0));
                prev_u = u;
                prev_j = j;
                first = false;
                double back = model.J_inverse(j);
                CHECK(std::fabs(model.J(back) - j) < 1e-12 * (1 + std::fabs(j)));
                CHECK(back == doctest::Approx(u).epsilon(1e-9));
            }
        }
    }

    TEST_CASE("property: F satisfies its defining relation") {
        for (const auto& model : assorted_models()) {
            if (model.ratio_class().constant) continue;
            INFO(model.describe());
            for (double u : numerics::sample_interval(model.u_domain(), 20)) {
                double q = model.dC(u) / model.C(u) - model.dK(u) / model.K(u);
                if (std::fabs(q) < 1e-8) continue;
                CHECK(q * model.F(u) == doctest::Approx(1.0).epsilon(1e-12));
                double fe = eval(model.F_expr(), {{"u", u}}, model.symbols());
                CHECK(fe == doctest::Approx(model.F(u)).epsilon(1e-10));
            }
        }
    }

    TEST_CASE("Jinv expression matches the numeric inverse") {
        for (const auto& model : assorted_models()) {
            if (model.family() == Family::Custom) continue;
            INFO(model.describe());
            Expr inv = model.Jinv_expr(var("v"));
            for (double u : numerics::sample_interval(model.u_domain(), 10)) {
                if (std::fabs(u) > 10) continue;
                double v = model.J(u);
                CHECK(eval(inv, {{"v", v}}, model.symbols()) == doctest::Approx(u).epsilon(1e-10));
            }
        }
    }

    TEST_CASE("model spec file") {
        auto m = read_model_spec("# heat model\nfamily = power\nk0 = 1\nm = 2\nc0 = 3\nn = 2\nnu = 1\n");
        CHECK(m.family() == Family::PowerLaw);
        CHECK(m.ratio_class().constant);
        auto c = read_model_spec("family = custom\nK = \"1 + u^2\"\nC = \"2*(1 + u^2)\"\nu_min = -1\nu_max = 1\nnu = 0.5\n");
        CHECK(c.ratio_class().constant);
        CHECK(c.ratio_class().beta == doctest::Approx(2.0));
        CHECK(c.nu() == Rational(1, 2));
        CHECK_THROWS_AS(read_model_spec("family = power\nk0 = 1\nm = 2\nc0 = 3\nn = 2\n"), ModelError);
        CHECK_THROWS_AS(read_model_spec("family = power\nbogus = 1\n"), ModelError);
    }
}
