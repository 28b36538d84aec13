#pragma once

#include "radsym/model.hpp"
#include "radsym/solutions.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace radsym {

struct WorstPoint {
    double z = 0.0;
    double t = 0.0;
    double residual = 0.0;
};

struct ResidualReport {
    std::string solution_id;
    /// "symbolic" or "numeric-fd h=<step>".
    std::string method;
    Grid grid;
    double max_residual = 0.0;
    double mean_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    WorstPoint worst_point;
};

struct ResidualOptions {
    /// Finite-difference step of the numeric path (Richardson with h and h/2).
    double h = 1e-4;
    /// Overrides the default tolerance (1e-9 symbolic, 1e-5 numeric).
    std::optional<double> tolerance;
    /// Skip the symbolic path even when a closed form exists.
    bool force_numeric = false;
};

constexpr double kSymbolicTolerance = 1e-9;
constexpr double kNumericTolerance = 1e-5;

/// Max and mean of |C(u) u_t - K'(u) u_z^2 - K(u) u_zz - (nu/z) K(u) u_z| over
/// the grid nodes. Throws DomainError naming the node where u is undefined.
ResidualReport residual_pde(const InvariantSolution& s, const CoefficientModel& model, const Grid& grid,
                            const ResidualOptions& options = {});

/// |beta v_t - v_zz - (nu/z) v_z| over the grid; symbolic when v_expr is given.
ResidualReport residual_linear(const std::string& id, const FieldFunction& v, const std::optional<Expr>& v_expr,
                               double beta, double nu, const Grid& grid, const ResidualOptions& options = {});

/// JSON document with the fields solution_id, method, grid, max_residual,
/// mean_residual, tolerance, pass, worst_point.
std::string to_json(const ResidualReport& report);

/// Negative control: u + eps z^power, keeping a closed form when there is one.
/// Solutions proportional to z need power != 1, since eps z only rescales them.
InvariantSolution perturbed(const InvariantSolution& s, double eps = 0.01, int power = 1);

struct FDProblem {
    double z0 = 0.5;
    double z1 = 2.5;
    double t0 = 1.0;
    double t1 = 1.25;
    /// Number of intervals in z and steps in t.
    int nz = 32;
    int nt = 64;
    FieldFunction initial;
    /// Boundary values u(z0, t), u(z1, t); zero-flux boundaries when empty.
    FieldFunction dirichlet;
};

struct GridSolution {
    std::vector<double> z;
    std::vector<double> t;
    /// u[n][i] at t[n], z[i].
    std::vector<std::vector<double>> u;
    double dz = 0.0;
    double dt = 0.0;
    int newton_iterations = 0;
    int max_step_iterations = 0;
};

/// Backward Euler in time with the conservative centered discretisation
/// V_i (E(u_i^{n+1}) - E(u_i^n)) / dt = F_{i+1/2} - F_{i-1/2},
/// F_{i+1/2} = z_{i+1/2}^nu K((u_i + u_{i+1})/2) (u_{i+1} - u_i) / dz,
/// solved by Newton's method (tolerance 1e-12, at most 50 iterations).
/// Throws ConvergenceError on Newton failure and DomainError when u leaves
/// the model domain.
GridSolution fd_solve(const CoefficientModel& model, const FDProblem& problem);

/// Trapezoid rule for the integral of E(u) z^nu over the grid at time level n.
double conserved_integral(const CoefficientModel& model, const GridSolution& g, std::size_t n);

struct ConvergenceRow {
    int nz = 0;
    int nt = 0;
    double h = 0.0;
    double error = 0.0;
    /// log2 of the error ratio to the previous row; NaN for the first row or
    /// when either error is at rounding level.
    double order = 0.0;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    /// Order from the two finest grids, NaN when undefined.
    double observed_order = 0.0;
    /// Richardson estimate of the finest-grid error, e_N / (2^p - 1).
    double richardson_error = 0.0;
    bool monotone = true;
};

/// Runs fd_solve with initial and Dirichlet data from the reference solution
/// on each (nz, nt) and measures the max-norm error at the final time.
ConvergenceStudy convergence_study(const CoefficientModel& model, const InvariantSolution& reference, const Rect& region,
                                   const std::vector<std::pair<int, int>>& refinements);

}  // namespace radsym
