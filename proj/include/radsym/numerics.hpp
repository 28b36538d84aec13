#pragma once

#include <functional>
#include <limits>
#include <vector>

namespace radsym {

/// Open interval (lo, hi); either end may be infinite.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return x > lo && x < hi; }
    bool finite() const;
    bool empty() const { return !(lo < hi); }
};

namespace numerics {

using Function = std::function<double(double)>;

/// Definite integral over [a, b] (b may be +inf, a may be -inf). The interval
/// is split at an interior point so each piece has at most one singular
/// endpoint, and each piece uses double-exponential quadrature. Throws
/// ConvergenceError when the error estimate exceeds `abs_tol`.
double integrate(const Function& f, double a, double b, double abs_tol = 1e-10);

/// Root of f in [lo, hi] by TOMS 748; requires a sign change.
double find_root(const Function& f, double lo, double hi, double rel_tol = 1e-15);

/// Solves g(x) = target for increasing g on `domain`, expanding a bracket
/// outward from `anchor`. Throws DomainError when target is out of range.
double invert_increasing(const Function& g, double target, const Interval& domain, double anchor);

/// n interior sample points: uniform on finite intervals, log-spaced offsets
/// from a finite end otherwise, uniform on [-20, 20] for the whole line.
std::vector<double> sample_interval(const Interval& domain, int n);

/// Logarithmic integral li(x) = li(2) + integral of 1/ln s from 2 to x, for x > 1.
double li(double x);
/// Inverse of li on (1, inf).
double li_inverse(double y);

/// Truncated Chebyshev series sum c_k T_k on [a, b].
class Chebyshev {
public:
    Chebyshev(double a, double b, std::vector<double> coefficients);

    /// The n + 1 Chebyshev-Lobatto nodes of [a, b] in increasing order.
    static std::vector<double> nodes(double a, double b, int n);
    /// Interpolant through values at nodes(a, b, values.size() - 1).
    static Chebyshev from_values(double a, double b, const std::vector<double>& values);
    static Chebyshev fit(const Function& f, double a, double b, int n);

    double operator()(double x) const;
    Chebyshev derivative() const;
    /// Antiderivative that vanishes at a.
    Chebyshev integral() const;
    std::vector<double> values_at_nodes() const;

    double a() const { return a_; }
    double b() const { return b_; }
    const std::vector<double>& coefficients() const { return c_; }

private:
    double a_;
    double b_;
    std::vector<double> c_;
};

}  // namespace numerics
}  // namespace radsym
