#pragma once

#include "radsym/expr.hpp"
#include "radsym/model.hpp"
#include "radsym/numerics.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace radsym {

enum class SolutionForm { Closed, VForm, Quadrature, Implicit, FixedPoint };
std::string to_string(SolutionForm form);

/// Axis-aligned rectangle in (z, t).
struct Rect {
    double z_min = 0.0;
    double z_max = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;

    bool contains(double z, double t) const { return z >= z_min && z <= z_max && t >= t_min && t <= t_max; }
    bool empty() const { return !(z_min < z_max) || !(t_min < t_max); }
};

using SolutionParams = std::map<std::string, double>;
using FieldFunction = std::function<double(double z, double t)>;

/// An invariant or similarity solution u(z, t) of the model.
///
/// `u` always evaluates the solution and throws DomainError outside its
/// domain. `u_expr` is present when the solution has a closed form in z and t;
/// `v` / `v_expr` hold J(u) when the solution was built in the linear variable.
struct InvariantSolution {
    std::string id;
    std::string generator;
    std::string description;
    SolutionForm form = SolutionForm::Closed;
    SolutionParams parameters;
    std::optional<Expr> u_expr;
    std::optional<Expr> v_expr;
    FieldFunction u;
    FieldFunction v;
    /// One-variable profile for similarity solutions (variable named in profile_variable).
    std::function<double(double)> profile;
    std::string profile_variable;
    Rect validity;
    bool suspect = false;
    std::string provenance = "catalog";
    std::vector<std::string> notes;
};

struct CatalogEntry {
    std::string id;
    std::string generator;
    std::string summary;
};

/// Every catalog id with its generator and a one-line summary.
const std::vector<CatalogEntry>& solution_catalog();

/// Builds a catalog entry for the model. Unspecified constants default to
/// C1 = 1, C2 = 0 (and c1 = 1, c2 = 0, C0 = 1, Q = 1); fixed-point profiles
/// default to C1 = 0.5, C2 = 1 on eta in [0.5, 3]. Throws CatalogError for
/// unknown ids or models the entry does not apply to, ValidityError when the
/// solution is undefined on the whole search window.
InvariantSolution build_solution(const std::string& id, const CoefficientModel& model, const SolutionParams& params = {});

struct PicardOptions {
    double eta_min = 0.5;
    double eta_max = 3.0;
    int nodes = 64;
    double tolerance = 1e-9;
    int max_iterations = 400;
};

/// Stationary solution J^-1(C1 z^(1-nu)/(1-nu) + C2), or J^-1(C1 ln z + C2) at nu = 1.
InvariantSolution steady_state(const CoefficientModel& model, double C1, double C2);

/// u = phi(z / sqrt(t)). Non-constant ratio: the profile solves the integral
/// relation by damped Picard iteration with phi(eta_min) = C2 and
/// K(phi) phi' eta^nu = C1 at eta_min. Constant ratio: v = c2 + c1 times the
/// integral of s^-nu exp(-beta s^2 / 4) from z / sqrt(t) to infinity.
InvariantSolution similarity_scaling(const CoefficientModel& model, double C1, double C2, const PicardOptions& options = {});

/// v = t^(-(1+nu)/2) exp(-beta z^2 / 4t) phi5(z/t), constant ratio only.
InvariantSolution projective_solution(const CoefficientModel& model, double c1, double c2);

/// Y3-invariant solution. D defaults to the value linking the compatibility
/// relation to the model's C(u).
InvariantSolution y3_solution(const CoefficientModel& model, double Q, std::optional<double> D = std::nullopt);

/// nu = 2, constant ratio: v = C0 exp(-beta z^2 / 4t) / (z sqrt(t)) and v = C1 / z.
std::vector<InvariantSolution> spherical_specials(const CoefficientModel& model, double C0, double C1);

/// Linear family: the implicit Y3 relation with u-dependent A(u), solved by
/// bracketed root finding. Flagged suspect.
InvariantSolution implicit_linear_solution(const CoefficientModel& model, double Q, double D);

/// Integral of f (an expression in `variable`) over [a, b]; b may be infinite.
double quadrature(const Expr& f, const std::string& variable, double a, double b);

/// Ordinary differential equation left-hand side in x, phi, phi', phi''.
struct ReducedODE {
    std::string id;
    std::string variable;
    int order = 2;
    std::string text;
    std::function<double(double x, double phi, double dphi, double ddphi)> lhs;
};

/// Reduced ODEs by id: eq70 and its divergence form eq71 (Y1 profile), eq116, eq121, eq127, eq135.
ReducedODE reduced_ode(const std::string& id, const CoefficientModel& model);

/// Max |lhs| over the points with central-difference derivatives of step h.
double reduced_ode_residual(const ReducedODE& ode, const std::function<double(double)>& profile,
                            const std::vector<double>& points, double h = 1e-3);

/// Largest rectangle inside `cap`, grown from a valid seed, on which u is
/// finite at every node of a 9 x 9 test grid. Empty when no seed is valid.
Rect compute_validity(const FieldFunction& u, const Rect& cap = {0.1, 10.0, 0.1, 10.0});

struct Grid {
    Rect region;
    int nz = 20;
    int nt = 20;

    std::vector<double> z_nodes() const;
    std::vector<double> t_nodes() const;
};

/// Default residual grid: the validity rectangle clipped to the working
/// window [0.5, 2] x [0.5, 2] when they overlap, shrunk by 5 % per side.
Grid default_grid(const InvariantSolution& s, int nz = 20, int nt = 20);

/// CSV with header z,t,u (plus v when available), 17 significant digits.
void write_csv(std::ostream& os, const InvariantSolution& s, const Grid& grid);

}  // namespace radsym
