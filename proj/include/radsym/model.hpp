#pragma once

#include "radsym/expr.hpp"
#include "radsym/numerics.hpp"
#include "radsym/rational.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>

namespace radsym {

/// K = k0 u^m, C = c0 u^n on u > 0.
struct PowerLaw {
    Rational k0, m, c0, n;
};

/// K = k0 e^(lam u), C = c0 e^(mu u) on the whole line.
struct Exponential {
    Rational k0, lam, c0, mu;
};

/// K = k0 (a + b u), C = c0 (c + d u) where both brackets are positive.
struct Linear {
    Rational k0, a, b, c0, c, d;
};

/// Caller-supplied K(u), C(u) as expressions in u on an explicit interval.
struct Custom {
    Expr K, C;
    Interval u_domain;
};

using FamilyParams = std::variant<PowerLaw, Exponential, Linear, Custom>;

enum class Family { PowerLaw, Exponential, Linear, Custom };
std::string to_string(Family family);

/// Result of comparing C(u)/K(u) against a constant.
struct RatioClass {
    bool constant = false;
    /// beta = C/K when constant.
    double beta = 0.0;
    /// Exact beta when it is known as a rational.
    std::optional<Rational> beta_exact;
    /// C/K as an expression in u.
    Expr ratio;
    /// "normal-form" or "sampling".
    std::string decided_by;
};

/// Constitutive pair (C(u), K(u)) with geometry exponent nu.
///
/// Immutable value type. Every function symbol K, C, J, Jinv (and F for a
/// non-constant ratio) is registered in `symbols()`, so expressions that
/// mention them can be differentiated and evaluated.
class CoefficientModel {
public:
    /// Validates positivity of k0, c0, nu and of K, C on the inferred domain.
    static CoefficientModel build(const FamilyParams& params, const Rational& nu);

    Family family() const;
    const FamilyParams& params() const;
    const Rational& nu() const { return nu_; }
    double nu_value() const { return to_double(nu_); }
    const Interval& u_domain() const;
    /// Open interval of values taken by J on u_domain.
    const Interval& j_range() const;
    const RatioClass& ratio_class() const { return ratio_; }
    const SymbolTable& symbols() const { return symbols_; }
    std::string describe() const;

    double K(double u) const;
    double C(double u) const;
    double dK(double u) const;
    double dC(double u) const;
    /// Antiderivative of K without additive constant; Custom anchors J(u_ref) = 0.
    double J(double u) const;
    double J_inverse(double v) const;
    /// Antiderivative of C with the same convention (conserved density).
    double E(double u) const;
    /// F = (C'/C - K'/K)^(-1). Throws SingularityError where undefined.
    double F(double u) const;
    /// Anchor of J for Custom models (midpoint of a finite domain).
    double u_ref() const;

    /// Expressions in the variable u.
    const Expr& K_expr() const;
    const Expr& C_expr() const;
    const Expr& dK_expr() const;
    const Expr& dC_expr() const;
    /// Closed-form J, or the symbol J(u) for Custom.
    const Expr& J_expr() const;
    /// F as an expression; throws SingularityError for a constant ratio.
    Expr F_expr() const;
    /// J^(-1)(v) in closed form, or the symbol Jinv(v).
    Expr Jinv_expr(const Expr& v) const;
    /// Replaces K, C, J, Jinv symbols by explicit forms where they exist.
    Expr explicit_form(const Expr& e) const;

private:
    struct Core;
    std::shared_ptr<const Core> core_;
    Rational nu_;
    RatioClass ratio_;
    SymbolTable symbols_;
};

/// Reads `key = value` lines (`#` comments): family = power|exp|linear|custom,
/// nu, k0, m, c0, n, lam, mu, a, b, c, d, K = "<expr>", C = "<expr>",
/// u_min, u_max. Throws ModelError for unknown keys or missing parameters.
CoefficientModel read_model_spec(const std::string& text);
CoefficientModel read_model_file(const std::string& path);

/// Builds a model from named string values, as read from a spec file or CLI flags.
CoefficientModel model_from_values(const std::map<std::string, std::string>& values);

}  // namespace radsym
