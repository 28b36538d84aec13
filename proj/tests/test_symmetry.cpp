#include "doctest.h"
#include "radsym/errors.hpp"
#include "radsym/symmetry.hpp"

#include <random>

using namespace radsym;

namespace {

CoefficientModel power(Rational k0, Rational m, Rational c0, Rational n, Rational nu) {
    return CoefficientModel::build(PowerLaw{k0, m, c0, n}, nu);
}

CoefficientModel expo(Rational k0, Rational lam, Rational c0, Rational mu, Rational nu) {
    return CoefficientModel::build(Exponential{k0, lam, c0, mu}, nu);
}

std::vector<std::string> labels(const Classification& c) {
    std::vector<std::string> out;
    for (const auto& g : c.generators) out.push_back(g.label);
    return out;
}

StructureConstants constants(const CommutatorTable& t) { return t.c; }

}  // namespace

TEST_SUITE("symmetry") {
    TEST_CASE("classification examples") {
        auto p = classify(power(1, 1, 1, 3, 1));
        CHECK(labels(p) == std::vector<std::string>{"Y1", "Y2", "Y3"});
        REQUIRE(p.y3);
        CHECK(p.y3->A == 1);
        CHECK(p.y3->B == 0);
        auto p2 = classify(power(2, Rational(1, 2), 1, 4, Rational(3, 2)));
        CHECK(p2.y3->A == Rational(3, 7));

        auto sph = classify(expo(1, 2, 3, 2, 2));
        CHECK(sph.case_tag == CaseTag::ConstantSpherical);
        CHECK(sph.generators.size() == 6);
        auto cst = classify(power(1, 2, 1, 2, 1));
        CHECK(cst.case_tag == CaseTag::ConstantGeneric);
        CHECK(labels(cst) == std::vector<std::string>{"Yt1", "Yt2", "Yt3", "Yt4"});
        CHECK(cst.generators[0].display_label() == "\xE1\xBB\xB8" "1");
    }

    TEST_CASE("Y3 constants for the special branches") {
        auto m1 = find_y3_constants(power(2, -1, 1, 3, 1));
        REQUIRE(m1);
        CHECK(m1->A == 0);
        CHECK(m1->B == Rational(2, 4));
        auto e = find_y3_constants(expo(1, 2, 1, 3, 1));
        REQUIRE(e);
        CHECK(e->A == 2);
        CHECK(e->B == 0);
        auto e0 = find_y3_constants(expo(3, 0, 1, 2, 1));
        REQUIRE(e0);
        CHECK(e0->A == 0);
        CHECK(e0->B == Rational(3, 2));
        // Linear with d = 0: F = -(a + b u)/b, A = -2, B = -k0 a^2 / b.
        auto l = find_y3_constants(CoefficientModel::build(Linear{1, 2, 1, 1, 1, 0}, 1));
        REQUIRE(l);
        CHECK(l->A == -2);
        CHECK(l->B == -4);
    }

    TEST_CASE("Y4 admitted when A matches (nu - 1) / (2 (2 - nu))") {
        // nu = 3 requires A = -1: power law with (m+1)/(n-m) = -1, i.e. n = -1.
        auto c = classify(power(1, 1, 1, -1, 3));
        CHECK(labels(c) == std::vector<std::string>{"Y1", "Y2", "Y3", "Y4"});
        CHECK(c.case_tag == CaseTag::NonConstantExtended);
        // nu = 1 requires A = 0: the m = -1 power law.
        auto c1 = classify(power(1, -1, 1, 2, 1));
        CHECK(c1.generators.size() == 4);
        CHECK(*c1.y4_M == Rational(1, 3));
        CHECK(classify(power(1, 1, 1, 3, 2)).generators.size() == 3);
        CHECK_THROWS_AS(y4_required_A(2), ModelError);
    }

    TEST_CASE("determining equations: classified generators pass") {
        std::vector<CoefficientModel> models = {
            power(1, 1, 1, 3, 1),        power(2, Rational(1, 2), 1, 4, Rational(3, 2)),
            power(1, -1, 1, 2, 1),       power(1, 1, 1, -1, 3),
            power(1, 2, 3, 2, 1),        power(1, 2, 3, 2, 2),
            expo(1, 2, 1, 3, 1),         expo(1, 1, 2, 1, Rational(1, 2)),
            expo(1, 1, 2, 1, 2),         expo(3, 0, 1, 2, 2),
            CoefficientModel::build(Linear{1, 2, 1, 1, 1, 0}, 1),
            CoefficientModel::build(Linear{1, 1, 0, 1, 2, 3}, 2),
            CoefficientModel::build(Linear{3, 1, 2, 7, 2, 4}, 2),
        };
        for (const auto& model : models) {
            auto c = classify(model);
            for (const auto& g : c.generators) {
                INFO(model.describe() << " " << g.label);
                auto r = check_determining(model, g);
                CHECK(r.pass);
                CHECK(r.failing_index == 0);
            }
        }
    }

    TEST_CASE("determining equations: d/dz is rejected") {
        auto model = power(1, 1, 1, 3, 1);
        auto r = check_determining(model, make_z_translation());
        CHECK_FALSE(r.pass);
        CHECK(r.failing_index == 17);
        auto cst = power(1, 2, 3, 2, 1);
        auto rc = check_determining(cst, make_z_translation());
        CHECK_FALSE(rc.pass);
        CHECK(rc.failing_index == 49);
    }

    TEST_CASE("printed variants that fail the determining equations") {
        // Printed nu = 2 generator -ln z d/dz.
        auto m2 = power(1, 1, 1, 3, 2);
        CHECK_FALSE(check_determining(m2, make_Y4_printed_nu2()).pass);
        // The printed (xi_z/z - xi/z) term rejects Yh4, which has xi = t.
        auto sph = expo(1, 1, 2, 1, 2);
        auto basis = constant_ratio_basis(2, 2);
        CHECK(check_determining(sph, basis[3]).pass);
        DeterminingOptions printed;
        printed.printed_constant_z_term = true;
        CHECK_FALSE(check_determining(sph, basis[4], printed).pass);
    }

    TEST_CASE("lie bracket basics") {
        auto model = power(1, 1, 1, 3, 1);
        const auto& st = model.symbols();
        auto b = lie_bracket(make_Y1(), make_Y2(), st);
        CHECK(b.xi.is_const(0));
        CHECK(b.tau.is_const(-1));
        CHECK(b.eta.is_const(0));
        auto y3 = make_Y3_formal();
        auto self = lie_bracket(y3, y3, st);
        CHECK(self.xi.is_const(0));
        CHECK(self.eta.is_const(0));
    }

    TEST_CASE("non-constant table matches the printed one") {
        for (Rational nu : {Rational(1, 2), Rational(1), Rational(3, 2), Rational(3)}) {
            INFO("nu = " << to_string(nu));
            auto model = power(1, 1, 1, 3, nu);
            std::vector<Generator> basis = {make_Y1(), make_Y2(), make_Y3_formal(), make_Y4_formal(nu)};
            auto table = commutator_table(basis, model);
            CHECK(table.degenerate_basis == (nu == 1));
            auto cmp = compare_tables(table, printed_table_nonconstant(nu), basis, model);
            CHECK(cmp.match);
            auto alg = check_algebra(constants(table));
            CHECK(alg.antisymmetric);
            CHECK(alg.jacobi);
        }
    }

    TEST_CASE("constant tables") {
        for (Rational nu : {Rational(1, 2), Rational(1), Rational(3, 2), Rational(3)}) {
            auto model = power(1, 2, 3, 2, nu);
            auto basis = constant_ratio_basis(nu, 3);
            auto table = commutator_table(basis, model);
            auto cmp = compare_tables(table, printed_table_constant(nu), basis, model);
            CHECK(cmp.match);
            std::string h = nu == 1 ? "" : to_string((1 + nu) / 2) + "*";
            CHECK(format_combination(table.c[0][2], table.labels) == "-2*Yt2 - " + h + "Yt4");
        }
        auto model = power(1, 2, 3, 2, 2);
        auto basis = constant_ratio_basis(2, 3);
        auto table = commutator_table(basis, model);
        CHECK(format_combination(table.c[3][4], table.labels) == "-3/2*Yh6");
        for (std::size_t j = 0; j < 6; ++j) CHECK(format_combination(table.c[5][j], table.labels) == "0");
        // Only the [Yh2, Yh4] entry disagrees with the printed table.
        auto cmp = compare_tables(table, printed_table_spherical(3), basis, model);
        REQUIRE(cmp.mismatches.size() == 1);
        CHECK(cmp.mismatches[0].i == 1);
        CHECK(cmp.mismatches[0].j == 3);
        CHECK(cmp.mismatches[0].computed == "1/2*Yh4");
        CHECK_FALSE(check_algebra(printed_table_spherical(3)).antisymmetric);
        auto alg = check_algebra(table.c);
        CHECK(alg.antisymmetric);
        CHECK(alg.jacobi);
    }

    TEST_CASE("property: bracket bilinearity under random scalars") {
        std::mt19937_64 rng(31);
        std::uniform_int_distribution<int> num(-9, 9);
        std::uniform_int_distribution<int> den(1, 5);
        auto model = expo(1, 1, 2, 1, 2);
        auto basis = constant_ratio_basis(2, 2);
        auto table = commutator_table(basis, model);
        for (int trial = 0; trial < 5; ++trial) {
            Rational s(num(rng), den(rng));
            if (s == 0) s = 1;
            std::size_t i = static_cast<std::size_t>(trial) % 6;
            std::vector<Generator> scaled = basis;
            scaled[i] = scale(basis[i], s);
            auto t2 = commutator_table(scaled, model);
            for (std::size_t j = 0; j < 6; ++j) {
                for (std::size_t k = 0; k < 6; ++k) {
                    // Scaling Y_i scales row i by s and the k = i output coordinate by 1/s.
                    Rational expected = table.c[i][j][k] * s;
                    if (j == i) expected *= s;
                    if (k == i) expected /= s;
                    CHECK(t2.c[i][j][k] == expected);
                }
            }
        }
    }

    TEST_CASE("bracket outside the span is reported") {
        auto model = power(1, 1, 1, 3, 1);
        Generator galilean = make_Y2();
        galilean.label = "tdz";
        galilean.xi = var("t");
        galilean.tau = Expr(0);
        std::vector<Generator> basis = {make_Y2(), galilean};
        CHECK_THROWS_AS(commutator_table(basis, model), BracketClosureError);
    }

    TEST_CASE("compatibility relations") {
        const SymbolTable& st = power(1, 1, 1, 3, 1).symbols();
        Expr u = var("u");
        Expr K = Expr(2) * u;
        Expr J = pow(u, Rational(2));
        // A = (m+1)/(n-m) = 2/2 with m = 1, n = 3 gives C proportional to u^3.
        Expr C = compatibility_C_from_K(K, J, 1, 0);
        CHECK(recognize_zero(simplify(C - Expr(2) * pow(u, Rational(3))), st, nullptr, 1).zero);
        Expr Ke = exp(Expr(2) * u);
        Expr Je = Rational(1, 2) * exp(Expr(2) * u);
        Expr Ce = compatibility_C_from_K(Ke, Je, 2, 0);  // lam = 2, mu = 3
        CHECK(eval(Ce, {{"u", 0.7}}, st) == doctest::Approx(std::exp(3 * 0.7)));
        Expr C0 = compatibility_C_from_K(Expr(3), Expr(3) * u, 0, Rational(3, 2));
        CHECK(eval(C0, {{"u", 0.4}}, st) == doctest::Approx(3.0 * std::exp(0.8)));
        CHECK_THROWS_AS(compatibility_C_for_Y4(K, J, 1, 1, 2), ModelError);

        auto model = power(2, 1, 5, 3, 1);
        auto link = compatibility_link(model, *find_y3_constants(model));
        REQUIRE(link);
        // D = c0 / (k0 (k0/(n-m))^((n-m)/(m+1))) = 5 / (2 * 1) for this model.
        CHECK(link->D == doctest::Approx(2.5));
        CHECK(link->sign == 1);
    }

    TEST_CASE("snap_rational") {
        CHECK(*snap_rational(0.75) == Rational(3, 4));
        CHECK(*snap_rational(-1.0 / 3.0) == Rational(-1, 3));
        CHECK_FALSE(snap_rational(3.14159265358979, 1e-12, 1000));
    }
}
