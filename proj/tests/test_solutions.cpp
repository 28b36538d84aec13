#include "doctest.h"
#include "radsym/errors.hpp"
#include "radsym/solutions.hpp"

#include <boost/math/special_functions/expint.hpp>

#include <cmath>
#include <random>
#include <sstream>

using namespace radsym;

namespace {

CoefficientModel power(Rational k0, Rational m, Rational c0, Rational n, Rational nu) {
    return CoefficientModel::build(PowerLaw{k0, m, c0, n}, nu);
}

CoefficientModel expo(Rational k0, Rational lam, Rational c0, Rational mu, Rational nu) {
    return CoefficientModel::build(Exponential{k0, lam, c0, mu}, nu);
}

/// Relative PDE residual by Richardson-extrapolated central differences.
double fd_residual(const CoefficientModel& model, const FieldFunction& u, double z, double t) {
    auto derivs = [&](double h) {
        double u0 = u(z, t);
        double uzp = u(z + h, t), uzm = u(z - h, t);
        double ut = (u(z, t + h) - u(z, t - h)) / (2 * h);
        return std::array<double, 3>{ut, (uzp - uzm) / (2 * h), (uzp - 2 * u0 + uzm) / (h * h)};
    };
    auto a = derivs(1e-3);
    auto b = derivs(5e-4);
    double ut = (4 * b[0] - a[0]) / 3, uz = (4 * b[1] - a[1]) / 3, uzz = (4 * b[2] - a[2]) / 3;
    double v = u(z, t);
    double k = model.K(v);
    double lhs = model.C(v) * ut;
    double rhs = model.dK(v) * uz * uz + k * uzz + model.nu_value() / z * k * uz;
    return std::fabs(lhs - rhs) / std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
}

double max_fd_residual(const CoefficientModel& model, const InvariantSolution& s) {
    auto grid = default_grid(s, 5, 5);
    double worst = 0.0;
    for (double z : grid.z_nodes())
        for (double t : grid.t_nodes()) worst = std::max(worst, fd_residual(model, s.u, z, t));
    return worst;
}

}  // namespace

TEST_SUITE("solutions") {
    TEST_CASE("quadrature examples") {
        CHECK(quadrature(exp(-pow(var("x"), Rational(2)) / Expr(4)), "x", 0, INFINITY) ==
              doctest::Approx(std::sqrt(M_PI)).epsilon(1e-10));
        CHECK(quadrature(Expr(1) / var("x"), "x", 1, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(quadrature(pow(var("x"), Rational(-1, 2)), "x", 0, 1) == doctest::Approx(2.0).epsilon(1e-9));
    }

    TEST_CASE("Chebyshev interpolant, derivative and integral") {
        auto f = numerics::Chebyshev::fit([](double x) { return std::sin(x); }, 0.0, 2.0, 32);
        for (double x : {0.0, 0.3, 1.1, 2.0}) {
            CHECK(f(x) == doctest::Approx(std::sin(x)).epsilon(1e-13));
            CHECK(f.derivative()(x) == doctest::Approx(std::cos(x)).epsilon(1e-11));
            CHECK(f.integral()(x) == doctest::Approx(1.0 - std::cos(x)).epsilon(1e-12));
        }
    }

    TEST_CASE("logarithmic integral against the exponential integral") {
        for (double x : {1.5, 2.0, 3.0, 10.0, 50.0}) {
            CHECK(numerics::li(x) == doctest::Approx(boost::math::expint(std::log(x))).epsilon(1e-12));
            CHECK(numerics::li_inverse(numerics::li(x)) == doctest::Approx(x).epsilon(1e-11));
        }
        CHECK_THROWS_AS(numerics::li(1.0), DomainError);
    }

    TEST_CASE("steady state") {
        // J = u^2/2; C1 = 2, C2 = 2, nu = 3: u = sqrt(2 (2 - z^-2)).
        auto model = power(1, 1, 1, 3, 3);
        auto s = steady_state(model, 2, 2);
        CHECK(s.id == "eq78");
        CHECK(s.u(1.0, 1.0) == doctest::Approx(std::sqrt(2.0)));
        CHECK(s.u(2.0, 5.0) == doctest::Approx(std::sqrt(2.0 * (2.0 - 0.25))));
        CHECK(s.validity.z_min == doctest::Approx(std::sqrt(0.5)).epsilon(1e-4));
        CHECK(max_fd_residual(model, s) < 1e-6);
        // C2 = 0 leaves J negative everywhere.
        CHECK_THROWS_AS(steady_state(model, 2, 0), ValidityError);

        auto e = expo(1, 1, 1, 2, 1);
        auto s169 = build_solution("eq169", e, {{"C1", 1}, {"C2", 2}});
        CHECK(s169.u(3.0, 1.0) == doctest::Approx(std::log(std::log(3.0) + 2.0)));
        CHECK(max_fd_residual(e, s169) < 1e-6);

        auto flat = steady_state(model, 0, 3);
        CHECK(flat.u(0.4, 0.2) == doctest::Approx(flat.u(7.0, 9.0)));
        CHECK_THROWS_AS(build_solution("eq79", model), CatalogError);
    }

    TEST_CASE("scaling solution with a Gaussian tail") {
        // nu = 1: the tail integral is E1(eta^2/4)/2.
        auto m1 = power(1, 2, 1, 2, 1);
        auto s = similarity_scaling(m1, 1, 0);
        CHECK(s.id == "eq124");
        CHECK(s.form == SolutionForm::Quadrature);
        for (double eta : {0.5, 1.0, 2.5})
            CHECK(s.profile(eta) == doctest::Approx(0.5 * boost::math::expint(1, eta * eta / 4)).epsilon(1e-10));
        CHECK(s.u(1.0, 1.0) == doctest::Approx(std::cbrt(3.0 * s.v(1.0, 1.0))));
        // nu = 2: exp(-eta^2/4)/eta - (sqrt(pi)/2) erfc(eta/2).
        auto m2 = power(1, 2, 1, 2, 2);
        auto s2b = similarity_scaling(m2, 1, 0);
        for (double eta : {0.5, 1.0, 2.5})
            CHECK(s2b.v(2.0 * eta, 4.0) ==
                  doctest::Approx(std::exp(-eta * eta / 4) / eta - 0.5 * std::sqrt(M_PI) * std::erfc(eta / 2)).epsilon(1e-10));

        auto sph = power(1, 0, 1, 0, 2);
        auto s2 = similarity_scaling(sph, 1, 0);
        auto ode = reduced_ode("eq121", sph);
        CHECK(reduced_ode_residual(ode, s2.profile, {0.5, 1.0, 1.7, 3.0}) < 1e-7);
        auto constant = [](double) { return 2.0; };
        CHECK(reduced_ode_residual(ode, constant, {0.5, 1.0}) == 0.0);
        auto zero = similarity_scaling(sph, 0, 3);
        CHECK(zero.u(0.7, 1.3) == doctest::Approx(3.0));
    }

    TEST_CASE("projective solution") {
        auto model = power(1, 0, 2, 0, Rational(1, 2));  // beta = 2
        auto s = projective_solution(model, 1, 0);
        double z = 0.8, t = 1.5;
        CHECK(s.v(z, t) == doctest::Approx(std::pow(t, -0.75) * std::exp(-2 * z * z / (4 * t))));
        REQUIRE(s.u_expr);
        CHECK(max_fd_residual(model, s) < 1e-6);
        auto nu1 = power(1, 0, 1, 0, 1);
        auto s1 = projective_solution(nu1, 2, 1);
        CHECK(s1.v(z, t) == doctest::Approx(std::exp(-z * z / (4 * t)) / t * (2 + std::log(z / t))));
        CHECK(reduced_ode_residual(reduced_ode("eq116", nu1), s1.profile, {0.5, 1.0, 2.0}) < 1e-8);
        CHECK(reduced_ode_residual(reduced_ode("eq116", model), s.profile, {0.5, 1.0, 2.0}) < 1e-8);
        CHECK_THROWS_AS(projective_solution(power(1, 1, 1, 3, 1), 1, 0), CatalogError);
    }

    TEST_CASE("Y3 solutions") {
        // k0 = 1, m = 1, n = 3: A = 1, D = 2 c0.
        auto model = power(1, 1, 1, 3, 1);
        auto s = build_solution("eq160", model);
        CHECK(s.parameters.at("D") == doctest::Approx(2.0));
        CHECK(s.u(1.0, 1.0) == doctest::Approx(std::sqrt(6.0)));
        CHECK(s.u(2.0, 0.0 + 1e-12) == doctest::Approx(std::sqrt(2.0 / 4.0)).epsilon(1e-9));
        CHECK(max_fd_residual(model, s) < 1e-6);
        auto g = y3_solution(model, 1);
        CHECK(g.id == "eq90");
        CHECK(g.u(1.3, 0.7) == doctest::Approx(s.u(1.3, 0.7)));
        // A different D no longer solves the model's equation.
        auto wrong = y3_solution(model, 1, 1.0);
        CHECK(max_fd_residual(model, wrong) > 1e-3);

        // n < m flips the sign of A J + B.
        auto neg = power(1, 2, 1, 1, 2);
        auto sn = build_solution("eq160", neg, {{"Q", 50}});
        CHECK(sn.parameters.at("s") == -1);
        CHECK(max_fd_residual(neg, sn) < 1e-6);

        auto m1 = power(2, -1, 1, 3, Rational(1, 2));
        auto s100 = build_solution("eq100", m1);
        CHECK(max_fd_residual(m1, s100) < 1e-6);
        CHECK_THROWS_AS(build_solution("eq90", m1), CatalogError);

        auto e = expo(1, 1, 1, 2, 1);
        auto s170 = build_solution("eq170", e);
        CHECK(max_fd_residual(e, s170) < 1e-6);
        auto s90 = build_solution("eq90", e);
        CHECK(s90.u(1.1, 0.9) == doctest::Approx(s170.u(1.1, 0.9)));
    }

    TEST_CASE("spherical specials") {
        auto model = expo(1, 1, 3, 1, 2);  // beta = 3
        auto list = spherical_specials(model, 2, 5);
        REQUIRE(list.size() == 2);
        double z = 1.2, t = 0.9;
        CHECK(list[0].v(z, t) == doctest::Approx(2 * std::exp(-3 * z * z / (4 * t)) / (z * std::sqrt(t))));
        CHECK(list[1].v(z, t) == doctest::Approx(5 / z));
        CHECK(max_fd_residual(model, list[0]) < 1e-6);
        CHECK(max_fd_residual(model, list[1]) < 1e-6);
        CHECK(reduced_ode_residual(reduced_ode("eq135", model), list[0].profile, {0.5, 1.0, 2.0}) < 1e-9);
        CHECK_THROWS_AS(spherical_specials(expo(1, 1, 3, 1, 1), 1, 1), CatalogError);
        CHECK(build_solution("eq143", model).id == "eq142");
    }

    TEST_CASE("similarity profile by Picard iteration") {
        auto model = power(1, 1, 1, 3, 1);
        auto s = build_solution("eq69", model);
        CHECK(s.form == SolutionForm::FixedPoint);
        CHECK(s.profile(0.5) == doctest::Approx(1.0).epsilon(1e-12));
        auto ode = reduced_ode("eq70", model);
        CHECK(reduced_ode_residual(ode, s.profile, {0.7, 1.0, 1.5, 2.2, 2.8}) < 1e-6);
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> k(0.9, 1.1);
        for (int i = 0; i < 10; ++i) {
            double kk = k(rng);
            CHECK(std::fabs(s.u(1.5, 1.2) - s.u(kk * 1.5, kk * kk * 1.2)) < 1e-10);
        }
        CHECK(max_fd_residual(model, s) < 1e-5);
        CHECK(build_solution("eq73", model).id == "eq69");
        CHECK(build_solution("eq153", model).form == SolutionForm::FixedPoint);
        CHECK_THROWS_AS(s.profile(3.5), DomainError);
    }

    TEST_CASE("power and exponential catalog entries") {
        auto pm = power(2, 1, 6, 1, Rational(3, 2));  // m = n = 1, beta = 3
        for (const char* id : {"eq148", "eq151"}) {
            auto s = build_solution(id, pm, {{"c1", 1}, {"C0", 2}});
            INFO(id);
            CHECK(max_fd_residual(pm, s) < 1e-6);
        }
        auto s150 = build_solution("eq150", pm);
        CHECK(max_fd_residual(pm, s150) < 1e-5);
        CHECK_THROWS_AS(build_solution("eq149", pm), CatalogError);

        auto pl = power(1, -1, 1, -1, 1);
        auto s149 = build_solution("eq149", pl, {{"c1", 1}, {"c2", 1}});
        CHECK(max_fd_residual(pl, s149) < 1e-6);
        CHECK(max_fd_residual(pl, build_solution("eq152", pl)) < 1e-6);

        auto pn = power(1, 1, 1, 3, 2);
        CHECK(max_fd_residual(pn, build_solution("eq156", pn, {{"C1", 1}, {"C2", 2}})) < 1e-6);
        auto pk = power(1, -1, 1, 2, 1);
        CHECK(max_fd_residual(pk, build_solution("eq157", pk, {{"C1", 1}, {"C2", 2}})) < 1e-6);

        auto el = expo(1, 1, 2, 1, 1);
        CHECK(max_fd_residual(el, build_solution("eq165", el)) < 1e-6);
        CHECK(max_fd_residual(el, build_solution("eq166", el)) < 1e-5);
        CHECK(max_fd_residual(el, build_solution("eq167", el, {{"C0", 1}})) < 1e-6);
        auto e0 = expo(2, 0, 2, 0, 2);
        CHECK(max_fd_residual(e0, build_solution("eq167", e0)) < 1e-6);
        CHECK_THROWS_AS(build_solution("eq169", expo(1, 0, 1, 1, 1)), CatalogError);
        CHECK_THROWS_AS(build_solution("eq999", el), CatalogError);
    }

    TEST_CASE("linear family entries") {
        auto lin = CoefficientModel::build(Linear{1, 1, 2, 1, 1, 3}, Rational(1, 2));
        auto s = build_solution("eq175", lin, {{"C1", 1}, {"C2", 2}});
        CHECK(s.form == SolutionForm::Implicit);
        double u = s.u(1.2, 1.0);
        CHECK(u + u * u == doctest::Approx(std::pow(1.2, 0.5) / 0.5 + 2));
        CHECK(max_fd_residual(lin, s) < 1e-6);
        auto lin2 = CoefficientModel::build(Linear{1, 1, 1, 1, 1, 3}, 2);
        auto imp = build_solution("eq177", lin2);
        CHECK(imp.suspect);
        CHECK(std::isfinite(imp.u(1.0, 1.0)));
        CHECK(max_fd_residual(lin2, imp) > 1e-4);
    }

    TEST_CASE("constant Y4 solution") {
        auto model = power(1, 1, 1, -1, 3);
        auto s = build_solution("eq106", model, {{"M", -1}});
        CHECK(s.u(0.5, 0.5) == doctest::Approx(2.0));
        CHECK(s.u(3.0, 7.0) == doctest::Approx(2.0));
        CHECK_THROWS_AS(build_solution("eq106", power(1, 1, 1, 3, 1)), CatalogError);
    }

    TEST_CASE("reduced ODEs with exact profiles") {
        auto model = power(1, 0, 1, 0, 3);
        auto ode = reduced_ode("eq127", model);
        auto phi7 = [](double z) { return 1.0 + 2.0 * std::pow(z, -2.0) / -2.0; };
        CHECK(reduced_ode_residual(ode, phi7, {0.5, 1.0, 2.0}) < 1e-8);
        CHECK_THROWS_AS(reduced_ode("eq999", model), CatalogError);
    }

    TEST_CASE("validity rectangle and CSV") {
        // sqrt(t - 1) is defined for t >= 1.
        FieldFunction u = [](double, double t) {
            if (t < 1.0) throw DomainError("t < 1");
            return std::sqrt(t - 1.0);
        };
        Rect r = compute_validity(u);
        CHECK(r.t_min == doctest::Approx(1.0).epsilon(1e-5));
        CHECK(r.t_max == doctest::Approx(10.0));
        CHECK(r.z_min == doctest::Approx(0.1));
        auto model = power(1, 1, 1, 3, 3);
        auto s = steady_state(model, 2, 2);
        std::ostringstream os;
        write_csv(os, s, Grid{{1, 2, 1, 2}, 2, 2});
        std::string text = os.str();
        CHECK(text.rfind("z,t,u\n", 0) == 0);
        CHECK(text.find("1,1,1.4142135623730951") != std::string::npos);
        auto v = similarity_scaling(power(1, 2, 1, 2, 1), 1, 1);
        std::ostringstream ov;
        write_csv(ov, v, default_grid(v, 3, 3));
        CHECK(ov.str().rfind("z,t,u,v\n", 0) == 0);
    }
}
