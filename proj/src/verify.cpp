#include "radsym/verify.hpp"

#include "radsym/errors.hpp"

#include "json.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace radsym {

namespace {

struct Derivatives {
    double f = 0.0;
    double ft = 0.0;
    double fz = 0.0;
    double fzz = 0.0;
};

using DerivativeFn = std::function<Derivatives(double z, double t)>;

/// Exact derivatives from a closed form, or nullopt when it cannot be differentiated.
std::optional<DerivativeFn> symbolic_derivatives(const Expr& e, const SymbolTable& symbols) {
    try {
        Expr ez = simplify(diff(e, "z", symbols));
        Expr et = simplify(diff(e, "t", symbols));
        Expr ezz = simplify(diff(ez, "z", symbols));
        return DerivativeFn([=, &symbols](double z, double t) {
            Bindings b{{"z", z}, {"t", t}};
            return Derivatives{eval(e, b, symbols), eval(et, b, symbols), eval(ez, b, symbols), eval(ezz, b, symbols)};
        });
    } catch (const Error&) {
        return std::nullopt;
    }
}

DerivativeFn numeric_derivatives(const FieldFunction& f, double h) {
    return [f, h](double z, double t) {
        double f0 = f(z, t);
        auto at = [&](double step) {
            double zp = f(z + step, t), zm = f(z - step, t);
            double tp = f(z, t + step), tm = f(z, t - step);
            return std::array<double, 3>{(tp - tm) / (2 * step), (zp - zm) / (2 * step), (zp - 2 * f0 + zm) / (step * step)};
        };
        auto a = at(h);
        auto b = at(0.5 * h);
        auto rich = [](double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; };
        return Derivatives{f0, rich(a[0], b[0]), rich(a[1], b[1]), rich(a[2], b[2])};
    };
}

std::string fd_method(double h) {
    std::ostringstream os;
    os << "numeric-fd h=" << h;
    return os.str();
}

template <class Residual>
ResidualReport sweep(const std::string& id, const Grid& grid, const DerivativeFn& d, Residual residual) {
    ResidualReport r;
    r.solution_id = id;
    r.grid = grid;
    double sum = 0.0;
    int count = 0;
    for (double t : grid.t_nodes()) {
        for (double z : grid.z_nodes()) {
            Derivatives v;
            double res;
            try {
                v = d(z, t);
                res = std::fabs(residual(z, v));
            } catch (const DomainError& e) {
                std::ostringstream os;
                os << "residual evaluation failed at node (z=" << z << ", t=" << t << "): " << e.what();
                throw DomainError(os.str());
            }
            if (!std::isfinite(res)) {
                std::ostringstream os;
                os << "residual is not finite at node (z=" << z << ", t=" << t << ")";
                throw DomainError(os.str());
            }
            sum += res;
            ++count;
            if (res >= r.worst_point.residual) r.worst_point = {z, t, res};
        }
    }
    r.max_residual = r.worst_point.residual;
    r.mean_residual = count ? sum / count : 0.0;
    return r;
}

void finish(ResidualReport& r, bool symbolic, const ResidualOptions& o) {
    r.method = symbolic ? "symbolic" : fd_method(o.h);
    r.tolerance = o.tolerance ? *o.tolerance : (symbolic ? kSymbolicTolerance : kNumericTolerance);
    r.pass = r.max_residual < r.tolerance;
}

/// Solves a tridiagonal system in place; a is the sub-, b the main and c the
/// super-diagonal. Returns the solution in d.
void thomas(std::vector<double> a, std::vector<double> b, std::vector<double> c, std::vector<double>& d) {
    const std::size_t n = b.size();
    for (std::size_t i = 1; i < n; ++i) {
        double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    d[n - 1] /= b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

}  // namespace

ResidualReport residual_pde(const InvariantSolution& s, const CoefficientModel& model, const Grid& grid,
                            const ResidualOptions& options) {
    std::optional<DerivativeFn> d;
    if (s.u_expr && !options.force_numeric) d = symbolic_derivatives(*s.u_expr, model.symbols());
    const bool symbolic = d.has_value();
    if (!d) d = numeric_derivatives(s.u, options.h);
    const double nu = model.nu_value();
    auto r = sweep(s.id, grid, *d, [&](double z, const Derivatives& v) {
        double k = model.K(v.f);
        return model.C(v.f) * v.ft - model.dK(v.f) * v.fz * v.fz - k * v.fzz - nu / z * k * v.fz;
    });
    finish(r, symbolic, options);
    return r;
}

ResidualReport residual_linear(const std::string& id, const FieldFunction& v, const std::optional<Expr>& v_expr,
                               double beta, double nu, const Grid& grid, const ResidualOptions& options) {
    static const SymbolTable no_symbols;
    std::optional<DerivativeFn> d;
    if (v_expr && !options.force_numeric) d = symbolic_derivatives(*v_expr, no_symbols);
    const bool symbolic = d.has_value();
    if (!d) d = numeric_derivatives(v, options.h);
    auto r = sweep(id, grid, *d, [&](double z, const Derivatives& w) { return beta * w.ft - w.fzz - nu / z * w.fz; });
    finish(r, symbolic, options);
    return r;
}

std::string to_json(const ResidualReport& r) {
    nlohmann::ordered_json j;
    j["solution_id"] = r.solution_id;
    j["method"] = r.method;
    j["grid"] = {{"z_min", r.grid.region.z_min}, {"z_max", r.grid.region.z_max}, {"t_min", r.grid.region.t_min},
                 {"t_max", r.grid.region.t_max}, {"nz", r.grid.nz},           {"nt", r.grid.nt}};
    j["max_residual"] = r.max_residual;
    j["mean_residual"] = r.mean_residual;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["worst_point"] = {{"z", r.worst_point.z}, {"t", r.worst_point.t}, {"residual", r.worst_point.residual}};
    return j.dump(2);
}

InvariantSolution perturbed(const InvariantSolution& s, double eps, int power) {
    InvariantSolution p = s;
    p.id = s.id + "+perturbed";
    p.description = s.description + " plus " + std::to_string(eps) + " z^" + std::to_string(power);
    p.u = [u = s.u, eps, power](double z, double t) { return u(z, t) + eps * std::pow(z, power); };
    if (s.u_expr) p.u_expr = simplify(*s.u_expr + Expr(to_rational(eps)) * pow(var("z"), Rational(power)));
    p.v = nullptr;
    p.v_expr.reset();
    return p;
}

GridSolution fd_solve(const CoefficientModel& model, const FDProblem& pb) {
    if (!(pb.z0 > 0.0) || !(pb.z1 > pb.z0) || !(pb.t1 > pb.t0)) throw DomainError("fd_solve needs 0 < z0 < z1 and t0 < t1");
    if (pb.nz < 8 || pb.nt < 8) throw DomainError("fd_solve needs at least 8 intervals in z and t");
    if (!pb.initial) throw DomainError("fd_solve needs initial data");
    const int N = pb.nz;
    const double nu = model.nu_value();
    const bool dirichlet = static_cast<bool>(pb.dirichlet);
    const Interval domain = model.u_domain();

    GridSolution g;
    g.dz = (pb.z1 - pb.z0) / N;
    g.dt = (pb.t1 - pb.t0) / pb.nt;
    for (int i = 0; i <= N; ++i) g.z.push_back(pb.z0 + g.dz * i);
    for (int n = 0; n <= pb.nt; ++n) g.t.push_back(pb.t0 + g.dt * n);

    std::vector<double> volume(N + 1), face(N);
    for (int i = 0; i <= N; ++i) volume[i] = std::pow(g.z[i], nu) * g.dz * ((i == 0 || i == N) ? 0.5 : 1.0);
    for (int i = 0; i < N; ++i) face[i] = std::pow(g.z[i] + 0.5 * g.dz, nu) / g.dz;

    std::vector<double> u(N + 1);
    for (int i = 0; i <= N; ++i) u[i] = pb.initial(g.z[i], pb.t0);
    g.u.push_back(u);

    for (int n = 1; n <= pb.nt; ++n) {
        const double tn = g.t[n];
        std::vector<double> old_E(N + 1);
        for (int i = 0; i <= N; ++i) old_E[i] = model.E(g.u[n - 1][i]);
        if (dirichlet) {
            u[0] = pb.dirichlet(g.z[0], tn);
            u[N] = pb.dirichlet(g.z[N], tn);
        }
        int it = 0;
        double last = std::numeric_limits<double>::infinity();
        for (;;) {
            if (++it > 50) {
                std::ostringstream os;
                os << "Newton did not converge at step " << n << " (last update " << last << ")";
                throw ConvergenceError(os.str());
            }
            // Face fluxes and their partial derivatives.
            std::vector<double> F(N), dFl(N), dFr(N);
            for (int i = 0; i < N; ++i) {
                double m = 0.5 * (u[i] + u[i + 1]);
                double k = model.K(m), dk = model.dK(m);
                double jump = u[i + 1] - u[i];
                F[i] = face[i] * k * jump;
                dFl[i] = face[i] * (0.5 * dk * jump - k);
                dFr[i] = face[i] * (0.5 * dk * jump + k);
            }
            std::vector<double> a(N + 1, 0.0), b(N + 1, 0.0), c(N + 1, 0.0), r(N + 1, 0.0);
            for (int i = 0; i <= N; ++i) {
                if (dirichlet && (i == 0 || i == N)) {
                    b[i] = 1.0;
                    continue;
                }
                double out = i < N ? F[i] : 0.0;
                double in = i > 0 ? F[i - 1] : 0.0;
                r[i] = volume[i] * (model.E(u[i]) - old_E[i]) / g.dt - (out - in);
                b[i] = volume[i] * model.C(u[i]) / g.dt;
                if (i < N) {
                    b[i] -= dFl[i];
                    c[i] = -dFr[i];
                }
                if (i > 0) {
                    b[i] += dFr[i - 1];
                    a[i] = dFl[i - 1];
                }
            }
            for (double& x : r) x = -x;
            thomas(a, b, c, r);
            last = 0.0;
            for (int i = 0; i <= N; ++i) {
                u[i] += r[i];
                last = std::max(last, std::fabs(r[i]) / std::max(1.0, std::fabs(u[i])));
                if (!std::isfinite(u[i]) || !(u[i] > domain.lo && u[i] < domain.hi)) {
                    std::ostringstream os;
                    os << "u left the model domain at step " << n << ", z=" << g.z[i];
                    throw DomainError(os.str());
                }
            }
            if (last < 1e-12) break;
        }
        g.newton_iterations += it;
        g.max_step_iterations = std::max(g.max_step_iterations, it);
        g.u.push_back(u);
    }
    return g;
}

double conserved_integral(const CoefficientModel& model, const GridSolution& g, std::size_t n) {
    const double nu = model.nu_value();
    const std::size_t N = g.z.size() - 1;
    double sum = 0.0;
    for (std::size_t i = 0; i <= N; ++i) {
        double w = (i == 0 || i == N) ? 0.5 : 1.0;
        sum += w * g.dz * std::pow(g.z[i], nu) * model.E(g.u[n][i]);
    }
    return sum;
}

ConvergenceStudy convergence_study(const CoefficientModel& model, const InvariantSolution& reference, const Rect& region,
                                   const std::vector<std::pair<int, int>>& refinements) {
    ConvergenceStudy study;
    const double rounding = 1e-13;
    for (const auto& [nz, nt] : refinements) {
        FDProblem pb{region.z_min, region.z_max, region.t_min, region.t_max, nz, nt, reference.u, reference.u};
        GridSolution g = fd_solve(model, pb);
        double err = 0.0;
        for (std::size_t i = 0; i < g.z.size(); ++i) {
            err = std::max(err, std::fabs(g.u.back()[i] - reference.u(g.z[i], g.t.back())));
        }
        ConvergenceRow row{nz, nt, g.dz, err, std::numeric_limits<double>::quiet_NaN()};
        if (!study.rows.empty()) {
            const ConvergenceRow& prev = study.rows.back();
            if (err > prev.error) study.monotone = false;
            if (err > rounding && prev.error > rounding) row.order = std::log(prev.error / err) / std::log(prev.h / row.h);
        }
        study.rows.push_back(row);
    }
    study.observed_order = study.rows.empty() ? std::numeric_limits<double>::quiet_NaN() : study.rows.back().order;
    double p = study.observed_order;
    study.richardson_error = std::isfinite(p) && p > 0 ? study.rows.back().error / (std::pow(2.0, p) - 1.0)
                                                       : std::numeric_limits<double>::quiet_NaN();
    return study;
}

}  // namespace radsym
