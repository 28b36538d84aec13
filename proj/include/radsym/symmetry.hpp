#pragma once

#include "radsym/expr.hpp"
#include "radsym/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace radsym {

enum class CaseTag { NonConstantGeneric, NonConstantExtended, ConstantGeneric, ConstantSpherical };
std::string to_string(CaseTag tag);

struct GeneratorParameter {
    std::string name;
    Rational value;
};

/// Infinitesimal generator xi d/dz + tau d/dt + eta d/du.
///
/// Labels are ASCII: Y1..Y4 for the non-constant ratio, Yt1..Yt4 for the
/// constant ratio with nu != 2 and Yh1..Yh6 for nu = 2. Components may use
/// the model's function symbols K(u), J(u), F(u).
struct Generator {
    std::string label;
    Expr xi;
    Expr tau;
    /// The generator's u-component (not the similarity variable eta).
    Expr eta;
    CaseTag case_tag = CaseTag::NonConstantGeneric;
    std::vector<GeneratorParameter> parameters;

    /// Label with the tilde/hat accents used in printed tables.
    std::string display_label() const;
};

Generator scale(const Generator& g, const Rational& factor);
Generator operator+(const Generator& a, const Generator& b);

/// Constants of the Y3 compatibility relation (F K)' = A K, F K = A J + B.
struct Compatibility {
    Rational A;
    Rational B;
    std::string decided_by;
};

struct Classification {
    RatioClass ratio;
    CaseTag case_tag = CaseTag::NonConstantGeneric;
    std::string description;
    std::vector<Generator> generators;
    std::optional<Compatibility> y3;
    /// Y4 constant M (equal to B) when Y4 is admitted.
    std::optional<Rational> y4_M;
    std::vector<std::string> notes;
};

/// Searches for constants A, B with (F K)' = A K and F K - A J = B.
std::optional<Compatibility> find_y3_constants(const CoefficientModel& model);

/// Slope A that the Y4 generator requires: (nu - 1) / (2 (2 - nu)).
Rational y4_required_A(const Rational& nu);

Classification classify(const CoefficientModel& model);

// Individual generators (each free parameter set to 1, the others 0).
Generator make_Y1();
Generator make_Y2();
Generator make_Y3(const Compatibility& c);
/// Admitted Y4 for nu != 2 (generic form, or the z ln z - z form at nu = 1).
Generator make_Y4(const Rational& nu, const Rational& M);
/// Y3 and Y4 with eta written through F(u), for any non-constant model.
Generator make_Y3_formal();
Generator make_Y4_formal(const Rational& nu);
/// Y4 as printed for general nu, with the printed M-dependent u-component.
Generator make_Y4_printed(const Rational& nu, const Rational& M);
/// Y4 as printed for nu = 1 and nu = 2.
Generator make_Y4_printed_nu1(const Rational& M);
Generator make_Y4_printed_nu2();
/// Constant ratio basis Yt1..Yt4 (nu != 2) or Yh1..Yh6 (nu = 2).
std::vector<Generator> constant_ratio_basis(const Rational& nu, const Rational& beta);
/// The z-translation d/dz, which is not admitted for nu > 0.
Generator make_z_translation();

struct EquationResidual {
    /// Equation number in the classification: 16..19 or 48..51.
    int index = 0;
    std::string description;
    Expr residual;
    ZeroCheck check;
};

struct DeterminingReport {
    std::string generator;
    bool constant_branch = false;
    std::vector<EquationResidual> equations;
    bool pass = false;
    /// First failing equation index, 0 when all pass.
    int failing_index = 0;
};

struct DeterminingOptions {
    std::uint64_t seed = 7;
    int samples = 30;
    double threshold = 1e-10;
    /// Use the constant-ratio equations with the printed nu (xi_z/z - xi/z)
    /// term instead of nu (xi_z/z - xi/z^2).
    bool printed_constant_z_term = false;
};

/// Substitutes g into the determining equations of the model's branch.
DeterminingReport check_determining(const CoefficientModel& model, const Generator& g,
                                    const DeterminingOptions& options = {});

/// Component-wise commutator [g1, g2] = g1 g2 - g2 g1.
Generator lie_bracket(const Generator& g1, const Generator& g2, const SymbolTable& symbols);

/// Structure constants c[i][j][k]: [Y_i, Y_j] = sum_k c[i][j][k] Y_k.
struct CommutatorTable {
    std::vector<std::string> labels;
    std::vector<std::vector<std::vector<Rational>>> c;
    /// Largest sampled remainder |[Y_i,Y_j] - sum c Y_k| over all pairs.
    double max_remainder = 0.0;
    /// True when the sampled basis matrix was rank deficient.
    bool degenerate_basis = false;
};

struct TableOptions {
    std::uint64_t seed = 11;
    int samples = 12;
};

/// Decomposes every bracket over the basis. Throws BracketClosureError when a
/// bracket is not in the span.
CommutatorTable commutator_table(const std::vector<Generator>& basis, const CoefficientModel& model,
                                 const TableOptions& options = {});

/// Entry-wise comparison of a computed table with an expected one. Two
/// entries agree when their generators sum_k c Y_k coincide as functions.
struct TableMismatch {
    int i = 0;
    int j = 0;
    std::string computed;
    std::string expected;
};

struct TableComparison {
    bool match = true;
    std::vector<TableMismatch> mismatches;
};

using StructureConstants = std::vector<std::vector<std::vector<Rational>>>;

TableComparison compare_tables(const CommutatorTable& computed, const StructureConstants& expected,
                               const std::vector<Generator>& basis, const CoefficientModel& model,
                               std::uint64_t seed = 13);

/// The tables exactly as printed (Y1..Y4; Yt1..Yt4; Yh1..Yh6).
StructureConstants printed_table_nonconstant(const Rational& nu);
StructureConstants printed_table_constant(const Rational& nu);
StructureConstants printed_table_spherical(const Rational& beta);

/// Renders sum_k c_k Y_k, e.g. "-2Y2 - 3/2Y6", or "0".
std::string format_combination(const std::vector<Rational>& coefficients, const std::vector<std::string>& labels);

/// Antisymmetry and Jacobi identity of a structure-constant array.
struct AlgebraCheck {
    bool antisymmetric = true;
    bool jacobi = true;
    std::string detail;
};
AlgebraCheck check_algebra(const StructureConstants& c);

/// C(u) = D K (A J + B)^(1/A) for A != 0, D K exp(J / B) for A = 0.
Expr compatibility_C_from_K(const Expr& K, const Expr& J, const Rational& A, const Rational& B, const Rational& D = 1);
/// C(u) admitting Y4: N K (a J + M)^(1/a) with a = (nu-1)/(2(2-nu)), or
/// N K exp(J / M) at nu = 1. Throws ModelError at nu = 2.
Expr compatibility_C_for_Y4(const Expr& K, const Expr& J, const Rational& M, const Rational& N, const Rational& nu);

/// D and the sign s with C = D K (s (A J + B))^(1/A) (or C = D K e^(J/B)),
/// found by sampling; nullopt when the ratio is not constant.
struct CompatibilityLink {
    double D = 0.0;
    int sign = 1;
};
std::optional<CompatibilityLink> compatibility_link(const CoefficientModel& model, const Compatibility& c);

/// Rational with denominator <= max_den within tol of x, else nullopt.
std::optional<Rational> snap_rational(double x, double tol = 1e-9, long max_den = 100000);

}  // namespace radsym
