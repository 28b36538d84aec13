#include "radsym/numerics.hpp"

#include "radsym/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <sstream>

namespace radsym {

bool Interval::finite() const { return std::isfinite(lo) && std::isfinite(hi); }

namespace numerics {

namespace {

void check_error(double error, double l1, double abs_tol, double a, double b) {
    if (!(error <= abs_tol) && !(error <= 1e-13 * l1)) {
        std::ostringstream os;
        os << "quadrature on [" << a << ", " << b << "] did not converge (error estimate " << error << ")";
        throw ConvergenceError(os.str());
    }
}

double finite_piece(const Function& f, double a, double b, double abs_tol) {
    if (a == b) return 0.0;
    static thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
    double error = 0.0;
    double l1 = 0.0;
    double value = integrator.integrate([&f](double x) { return f(x); }, a, b, 1e-14, &error, &l1);
    check_error(error, l1, abs_tol, a, b);
    return value;
}

double upper_tail(const Function& f, double a, double abs_tol) {
    static thread_local boost::math::quadrature::exp_sinh<double> integrator(12);
    double error = 0.0;
    double l1 = 0.0;
    double value = integrator.integrate([&f](double x) { return f(x); }, a, std::numeric_limits<double>::infinity(), 1e-14, &error, &l1);
    check_error(error, l1, abs_tol, a, std::numeric_limits<double>::infinity());
    return value;
}

}  // namespace

double integrate(const Function& f, double a, double b, double abs_tol) {
    if (std::isnan(a) || std::isnan(b)) throw DomainError("integration limit is NaN");
    if (a == b) return 0.0;
    if (a > b) return -integrate(f, b, a, abs_tol);
    const double inf = std::numeric_limits<double>::infinity();
    if (a == -inf && b == inf) {
        static thread_local boost::math::quadrature::sinh_sinh<double> integrator(12);
        double error = 0.0;
        double l1 = 0.0;
        double value = integrator.integrate([&f](double x) { return f(x); }, 1e-14, &error, &l1);
        check_error(error, l1, abs_tol, a, b);
        return value;
    }
    if (b == inf) {
        // Finite head [a, a+1] isolates an endpoint singularity at a.
        return finite_piece(f, a, a + 1.0, abs_tol / 2) + upper_tail(f, a + 1.0, abs_tol / 2);
    }
    if (a == -inf) {
        Function g = [&f](double x) { return f(-x); };
        return integrate(g, -b, inf, abs_tol);
    }
    double mid = 0.5 * (a + b);
    return finite_piece(f, a, mid, abs_tol / 2) + finite_piece(f, mid, b, abs_tol / 2);
}

double find_root(const Function& f, double lo, double hi, double rel_tol) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0) == (fhi < 0)) {
        std::ostringstream os;
        os << "no sign change on [" << lo << ", " << hi << "]";
        throw DomainError(os.str());
    }
    std::uintmax_t max_iter = 200;
    int bits = std::max(8, static_cast<int>(-std::log2(std::max(rel_tol, 1e-16))));
    auto tol = boost::math::tools::eps_tolerance<double>(std::min(bits, 52));
    auto [x0, x1] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
    double x = 0.5 * (x0 + x1);
    // Pick the endpoint with smaller residual when the bracket is one ulp wide.
    double best = x;
    double fbest = std::fabs(f(x));
    for (double c : {x0, x1}) {
        double fc = std::fabs(f(c));
        if (fc < fbest) {
            best = c;
            fbest = fc;
        }
    }
    return best;
}

double invert_increasing(const Function& g, double target, const Interval& domain, double anchor) {
    auto h = [&](double x) { return g(x) - target; };
    double h_anchor = h(anchor);
    if (h_anchor == 0.0) return anchor;
    // Walk from the anchor towards the side where the root lies.
    bool up = h_anchor < 0.0;
    double limit = up ? domain.hi : domain.lo;
    double prev = anchor;
    double step = 1.0;
    for (int iter = 0; iter < 400; ++iter) {
        double next;
        if (std::isfinite(limit)) {
            next = prev + 0.5 * (limit - prev);
            if (next == prev || next == limit) break;
        } else {
            next = up ? prev + step : prev - step;
            step *= 2.0;
        }
        double hn;
        try {
            hn = h(next);
        } catch (const DomainError&) {
            break;
        }
        if ((hn >= 0.0) == up) return up ? find_root(h, prev, next) : find_root(h, next, prev);
        prev = next;
    }
    std::ostringstream os;
    os << "value " << target << " is outside the range of the monotone map";
    throw DomainError(os.str());
}

std::vector<double> sample_interval(const Interval& domain, int n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    if (domain.empty()) return out;
    bool lo_finite = std::isfinite(domain.lo);
    bool hi_finite = std::isfinite(domain.hi);
    for (int i = 0; i < n; ++i) {
        double s = n == 1 ? 0.5 : static_cast<double>(i) / (n - 1);
        double x;
        if (lo_finite && hi_finite) {
            x = domain.lo + (i + 0.5) / n * (domain.hi - domain.lo);
        } else if (lo_finite) {
            x = domain.lo + std::pow(10.0, -3.0 + 6.0 * s);
        } else if (hi_finite) {
            x = domain.hi - std::pow(10.0, -3.0 + 6.0 * s);
        } else {
            x = -20.0 + 40.0 * s;
        }
        out.push_back(x);
    }
    return out;
}

namespace {

constexpr double kLi2 = 1.045163780117492784844588889194613136522615578151;

}  // namespace

double li(double x) {
    if (!(x > 1.0)) throw DomainError("li is evaluated on x > 1 only");
    if (x == 2.0) return kLi2;
    return kLi2 + integrate([](double s) { return 1.0 / std::log(s); }, 2.0, x, 1e-13);
}

double li_inverse(double y) {
    if (!std::isfinite(y)) throw DomainError("li_inverse of a non-finite value");
    return invert_increasing([](double x) { return li(x); }, y, Interval{1.0, std::numeric_limits<double>::infinity()}, 2.0);
}

Chebyshev::Chebyshev(double a, double b, std::vector<double> coefficients) : a_(a), b_(b), c_(std::move(coefficients)) {
    if (!(a < b)) throw DomainError("Chebyshev interval must satisfy a < b");
    if (c_.empty()) c_.push_back(0.0);
}

std::vector<double> Chebyshev::nodes(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
        double x = -std::cos(M_PI * j / n);
        out[static_cast<std::size_t>(j)] = 0.5 * (a + b) + 0.5 * (b - a) * x;
    }
    return out;
}

Chebyshev Chebyshev::from_values(double a, double b, const std::vector<double>& values) {
    const int n = static_cast<int>(values.size()) - 1;
    if (n < 1) throw DomainError("Chebyshev interpolation needs at least two nodes");
    // values[j] sits at x = -cos(pi j / n) = cos(pi (n - j) / n).
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
        double s = 0.0;
        for (int i = 0; i <= n; ++i) {
            double f = values[static_cast<std::size_t>(n - i)];
            double w = (i == 0 || i == n) ? 0.5 : 1.0;
            s += w * f * std::cos(M_PI * i * k / n);
        }
        c[static_cast<std::size_t>(k)] = 2.0 * s / n;
    }
    c.front() *= 0.5;
    c.back() *= 0.5;
    return Chebyshev(a, b, std::move(c));
}

Chebyshev Chebyshev::fit(const Function& f, double a, double b, int n) {
    std::vector<double> values;
    for (double x : nodes(a, b, n)) values.push_back(f(x));
    return from_values(a, b, values);
}

double Chebyshev::operator()(double x) const {
    double y = (2.0 * x - a_ - b_) / (b_ - a_);
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c_.size(); k-- > 1;) {
        double tmp = 2.0 * y * b1 - b2 + c_[k];
        b2 = b1;
        b1 = tmp;
    }
    return y * b1 - b2 + c_[0];
}

Chebyshev Chebyshev::derivative() const {
    const std::size_t n = c_.size() - 1;
    if (n == 0) return Chebyshev(a_, b_, {0.0});
    std::vector<double> d(n + 1, 0.0);
    for (std::size_t k = n; k >= 1; --k) {
        d[k - 1] = (k + 1 <= n ? d[k + 1] : 0.0) + 2.0 * static_cast<double>(k) * c_[k];
    }
    d[0] *= 0.5;
    d.pop_back();
    double scale = 2.0 / (b_ - a_);
    for (double& v : d) v *= scale;
    return Chebyshev(a_, b_, std::move(d));
}

Chebyshev Chebyshev::integral() const {
    const std::size_t n = c_.size() - 1;
    std::vector<double> c = c_;
    c.resize(n + 3, 0.0);
    std::vector<double> out(n + 2, 0.0);
    out[1] = c[0] - 0.5 * c[2];
    for (std::size_t k = 2; k <= n + 1; ++k) out[k] = (c[k - 1] - c[k + 1]) / (2.0 * static_cast<double>(k));
    double scale = 0.5 * (b_ - a_);
    double at_a = 0.0;
    for (std::size_t k = 1; k < out.size(); ++k) {
        out[k] *= scale;
        at_a += (k % 2 == 0 ? 1.0 : -1.0) * out[k];
    }
    out[0] = -at_a;
    return Chebyshev(a_, b_, std::move(out));
}

std::vector<double> Chebyshev::values_at_nodes() const {
    std::vector<double> out;
    for (double x : nodes(a_, b_, static_cast<int>(c_.size()) - 1)) out.push_back((*this)(x));
    return out;
}

}  // namespace numerics
}  // namespace radsym
