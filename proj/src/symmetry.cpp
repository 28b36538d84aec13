#include "radsym/symmetry.hpp"

#include "radsym/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

namespace radsym {

namespace {

const Expr kZ = var("z");
const Expr kT = var("t");
const Expr kU = var("u");

Expr Kf() { return Expr::function("K", kU); }
Expr Jf() { return Expr::function("J", kU); }
Expr Ff() { return Expr::function("F", kU); }
Expr R(const Rational& r) { return Expr(r); }

Generator make(std::string label, Expr xi, Expr tau, Expr eta, CaseTag tag,
               std::vector<GeneratorParameter> params = {}) {
    Generator g;
    g.label = std::move(label);
    g.xi = simplify(xi);
    g.tau = simplify(tau);
    g.eta = simplify(eta);
    g.case_tag = tag;
    g.parameters = std::move(params);
    return g;
}

/// Random (z, t, u) points with u inside the model domain.
PointSampler model_sampler(const CoefficientModel& model) {
    Interval d = model.u_domain();
    return [d](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> zt(0.3, 3.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double u;
        if (d.finite()) {
            u = d.lo + (d.hi - d.lo) * (0.05 + 0.9 * unit(rng));
        } else if (std::isfinite(d.lo)) {
            u = d.lo + std::pow(10.0, -1.0 + 1.7 * unit(rng));
        } else if (std::isfinite(d.hi)) {
            u = d.hi - std::pow(10.0, -1.0 + 1.7 * unit(rng));
        } else {
            u = -2.0 + 4.0 * unit(rng);
        }
        double z = zt(rng);
        double t = zt(rng);
        return Bindings{{"z", z}, {"t", t}, {"u", u}};
    };
}

struct Components {
    Expr xi, tau, eta;
};

Components explicit_components(const CoefficientModel& model, const Generator& g) {
    return {model.explicit_form(g.xi), model.explicit_form(g.tau), model.explicit_form(g.eta)};
}

/// Values of (xi, tau, eta) at a point; throws DomainError where undefined.
std::array<double, 3> evaluate(const Components& c, const Bindings& p, const SymbolTable& st) {
    return {eval(c.xi, p, st), eval(c.tau, p, st), eval(c.eta, p, st)};
}

Rational snap_or_exact(double x) {
    if (std::fabs(x) < 1e-10) return 0;
    if (auto r = snap_rational(x, 1e-8 * std::max(1.0, std::fabs(x)))) return *r;
    return to_rational(x);
}

}  // namespace

std::string to_string(CaseTag tag) {
    switch (tag) {
        case CaseTag::NonConstantGeneric: return "NonConstantGeneric";
        case CaseTag::NonConstantExtended: return "NonConstantExtended";
        case CaseTag::ConstantGeneric: return "ConstantGeneric";
        case CaseTag::ConstantSpherical: return "ConstantSpherical";
    }
    return "?";
}

std::string Generator::display_label() const {
    if (label.rfind("Yt", 0) == 0) return "\xE1\xBB\xB8" + label.substr(2);  // Ỹ
    if (label.rfind("Yh", 0) == 0) return "\xC5\xB6" + label.substr(2);      // Ŷ
    return label;
}

Generator scale(const Generator& g, const Rational& factor) {
    Generator out = g;
    out.xi = simplify(R(factor) * g.xi);
    out.tau = simplify(R(factor) * g.tau);
    out.eta = simplify(R(factor) * g.eta);
    out.label = to_string(factor) + "*" + g.label;
    return out;
}

Generator operator+(const Generator& a, const Generator& b) {
    Generator out = a;
    out.xi = simplify(a.xi + b.xi);
    out.tau = simplify(a.tau + b.tau);
    out.eta = simplify(a.eta + b.eta);
    out.label = a.label + "+" + b.label;
    return out;
}

std::optional<Rational> snap_rational(double x, double tol, long max_den) {
    if (!std::isfinite(x)) return std::nullopt;
    double r = std::fabs(x);
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int iter = 0; iter < 64; ++iter) {
        double a = std::floor(r);
        if (a > 1e15) break;
        long long ai = static_cast<long long>(a);
        long long p2 = ai * p1 + p0;
        long long q2 = ai * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        if (std::fabs(static_cast<double>(p1) / static_cast<double>(q1) - std::fabs(x)) <= tol) {
            Rational out(p1, q1);
            return x < 0 ? Rational(-out) : out;
        }
        double frac = r - a;
        if (frac < 1e-300) break;
        r = 1.0 / frac;
    }
    return std::nullopt;
}

Rational y4_required_A(const Rational& nu) {
    if (nu == 2) throw ModelError("Y4 does not exist for nu = 2");
    return (nu - 1) / (2 * (2 - nu));
}

Generator make_Y1() {
    return make("Y1", Rational(1, 2) * kZ, kT, 0, CaseTag::NonConstantGeneric, {{"sigma", 1}});
}

Generator make_Y2() { return make("Y2", 0, 1, 0, CaseTag::NonConstantGeneric, {{"delta", 1}}); }

Generator make_Y3(const Compatibility& c) {
    Expr eta = Expr(-2) * (R(c.A) * Jf() + R(c.B)) / Kf();
    return make("Y3", kZ, 0, eta, CaseTag::NonConstantExtended, {{"alpha", 1}, {"A", c.A}, {"B", c.B}});
}

Generator make_Y4(const Rational& nu, const Rational& M) {
    if (nu == 2) throw ModelError("Y4 is not admitted for nu = 2");
    if (nu == 1) {
        Expr eta = Expr(-2) * ln(kZ) * R(M) / Kf();
        return make("Y4", kZ * ln(kZ) - kZ, 0, eta, CaseTag::NonConstantExtended, {{"rho", 1}, {"M", M}});
    }
    Rational a = y4_required_A(nu);
    Expr eta = R(-2 * (2 - nu)) * pow(kZ, Rational(1 - nu)) * (R(a) * Jf() + R(M)) / Kf();
    return make("Y4", pow(kZ, Rational(2 - nu)), 0, eta, CaseTag::NonConstantExtended, {{"rho", 1}, {"M", M}});
}

Generator make_Y3_formal() {
    return make("Y3", kZ, 0, Expr(-2) * Ff(), CaseTag::NonConstantExtended, {{"alpha", 1}});
}

Generator make_Y4_formal(const Rational& nu) {
    Expr eta = R(-2 * (2 - nu)) * pow(kZ, Rational(1 - nu)) * Ff();
    return make("Y4", pow(kZ, Rational(2 - nu)), 0, eta, CaseTag::NonConstantExtended, {{"rho", 1}});
}

Generator make_Y4_printed(const Rational& nu, const Rational& M) {
    Expr eta = -(R(2 * (2 - nu) * M) - Jf()) / Kf() * pow(kZ, Rational(1 - nu));
    return make("Y4", pow(kZ, Rational(2 - nu)), 0, eta, CaseTag::NonConstantExtended, {{"rho", 1}, {"M", M}});
}

Generator make_Y4_printed_nu1(const Rational& M) {
    Expr eta = -ln(kZ) * (R(2 * M) - Jf()) / Kf();
    return make("Y4", kZ * ln(kZ) - kZ, 0, eta, CaseTag::NonConstantExtended, {{"rho", 1}, {"M", M}});
}

Generator make_Y4_printed_nu2() {
    return make("Y4", -ln(kZ), 0, 0, CaseTag::NonConstantExtended, {{"rho", 1}});
}

Generator make_z_translation() { return make("dz", 1, 0, 0, CaseTag::NonConstantGeneric); }

std::vector<Generator> constant_ratio_basis(const Rational& nu, const Rational& beta) {
    Expr b = R(beta);
    Expr jk = Jf() / Kf();
    if (nu != 2) {
        CaseTag tag = CaseTag::ConstantGeneric;
        return {
            make("Yt1", kT * kZ, pow(kT, Rational(2)),
                 -(b / Expr(4) * pow(kZ, Rational(2)) + R((1 + nu) / 2) * kT) * jk, tag, {{"mu", 1}, {"beta", beta}}),
            make("Yt2", Rational(1, 2) * kZ, kT, 0, tag, {{"gamma", 1}}),
            make("Yt3", 0, 1, 0, tag, {{"m", 1}}),
            make("Yt4", 0, 0, -jk, tag, {{"k", 1}}),
        };
    }
    CaseTag tag = CaseTag::ConstantSpherical;
    return {
        make("Yh1", kT * kZ, pow(kT, Rational(2)), -(b / Expr(4) * pow(kZ, Rational(2)) + R(Rational(3, 2)) * kT) * jk,
             tag, {{"mu", 1}, {"beta", beta}}),
        make("Yh2", Rational(1, 2) * kZ, kT, 0, tag, {{"gamma", 1}}),
        make("Yh3", 0, 1, 0, tag, {{"m", 1}}),
        make("Yh4", kT, 0, -(b / Expr(2) * kZ + kT / kZ) * jk, tag, {{"h", 1}, {"beta", beta}}),
        make("Yh5", 1, 0, -(Expr(1) / kZ) * jk, tag, {{"omega", 1}}),
        make("Yh6", 0, 0, -jk, tag, {{"k", 1}}),
    };
}

std::optional<Compatibility> find_y3_constants(const CoefficientModel& model) {
    if (model.ratio_class().constant) return std::nullopt;
    const SymbolTable& st = model.symbols();
    Expr FK = simplify(model.F_expr() * model.K_expr());
    Expr A_expr = simplify(diff(FK, "u", st) / model.K_expr());
    Compatibility out;
    std::vector<double> samples;
    for (double u : numerics::sample_interval(model.u_domain(), 50)) {
        if (std::fabs(u) <= 20.0) samples.push_back(u);
    }
    if (A_expr.is_const()) {
        out.A = A_expr.value();
        out.decided_by = "normal-form";
    } else {
        std::vector<double> values;
        for (double u : samples) {
            try {
                values.push_back(eval(A_expr, {{"u", u}}, st));
            } catch (const DomainError&) {
            }
        }
        if (values.size() < 10) return std::nullopt;
        double ref = values.front();
        for (double v : values) {
            if (std::fabs(v - ref) > 1e-9 * (1.0 + std::fabs(ref))) return std::nullopt;
        }
        out.A = snap_or_exact(ref);
        out.decided_by = "sampling";
    }
    Expr B_expr = simplify(FK - R(out.A) * model.J_expr());
    if (B_expr.is_const()) {
        out.B = B_expr.value();
        return out;
    }
    std::vector<double> values;
    for (double u : samples) {
        try {
            values.push_back(model.F(u) * model.K(u) - to_double(out.A) * model.J(u));
        } catch (const DomainError&) {
        }
    }
    if (values.size() < 10) return std::nullopt;
    double ref = values.front();
    double scale = 0.0;
    for (double u : samples) scale = std::max(scale, std::fabs(model.J(u)) * std::fabs(to_double(out.A)));
    for (double v : values) {
        if (std::fabs(v - ref) > 1e-9 * (1.0 + std::fabs(ref) + scale)) return std::nullopt;
    }
    out.B = snap_or_exact(ref);
    out.decided_by = "sampling";
    return out;
}

Classification classify(const CoefficientModel& model) {
    Classification out;
    out.ratio = model.ratio_class();
    const Rational& nu = model.nu();
    if (out.ratio.constant) {
        Rational beta = out.ratio.beta_exact ? *out.ratio.beta_exact : to_rational(out.ratio.beta);
        out.generators = constant_ratio_basis(nu, beta);
        if (nu == 2) {
            out.case_tag = CaseTag::ConstantSpherical;
            out.description = "constant ratio C/K = " + to_string(beta) + ", nu = 2: six-parameter algebra";
        } else {
            out.case_tag = CaseTag::ConstantGeneric;
            out.description = "constant ratio C/K = " + to_string(beta) + ", nu != 2: four-parameter algebra";
        }
        return out;
    }
    out.generators = {make_Y1(), make_Y2()};
    out.y3 = find_y3_constants(model);
    if (out.y3) {
        out.generators.push_back(make_Y3(*out.y3));
        if (nu != 2 && out.y3->A == y4_required_A(nu)) {
            out.y4_M = out.y3->B;
            out.generators.push_back(make_Y4(nu, out.y3->B));
        } else if (nu != 2) {
            out.notes.push_back("Y4 needs (F K)' = " + to_string(y4_required_A(nu)) + " K; this model has A = " +
                                to_string(out.y3->A));
        }
    } else {
        out.notes.push_back("no constants A, B with (F K)' = A K and F K = A J + B: Y3 and Y4 are absent");
    }
    if (nu == 2) {
        out.notes.push_back("nu = 2: the z-generator -ln(z) d/dz leaves 2 K ln(z)/z^2 in the u_z coefficient "
                            "equation and is not admitted");
    }
    out.case_tag = out.generators.size() > 2 ? CaseTag::NonConstantExtended : CaseTag::NonConstantGeneric;
    out.description = "non-constant ratio C/K: " + std::to_string(out.generators.size()) + " generators";
    return out;
}

DeterminingReport check_determining(const CoefficientModel& model, const Generator& g, const DeterminingOptions& options) {
    const SymbolTable& st = model.symbols();
    Components c = explicit_components(model, g);
    auto d = [&](const Expr& e, const char* v) { return diff(e, v, st); };
    const Expr& xi = c.xi;
    const Expr& tau = c.tau;
    const Expr& eta = c.eta;
    Expr K = model.K_expr();
    Expr C = model.C_expr();
    Expr Kp = model.dK_expr();
    Expr Cp = model.dC_expr();
    Expr Kpp = d(Kp, "u");
    Expr nu = R(model.nu());
    Expr eta_z = d(eta, "z");
    Expr eta_zz = d(eta_z, "z");
    Expr eta_t = d(eta, "t");
    Expr eta_u = d(eta, "u");
    Expr eta_uu = d(eta_u, "u");
    Expr eta_zu = d(eta_z, "u");
    Expr xi_z = d(xi, "z");
    Expr xi_zz = d(xi_z, "z");
    Expr xi_t = d(xi, "t");
    Expr tau_t = d(tau, "t");

    DeterminingReport report;
    report.generator = g.label;
    report.constant_branch = model.ratio_class().constant;
    std::vector<std::tuple<int, std::string, Expr>> eqs;
    if (!report.constant_branch) {
        eqs.emplace_back(16, "C eta_t - K eta_zz - (nu/z) K eta_z", C * eta_t - K * eta_zz - nu / kZ * K * eta_z);
        eqs.emplace_back(17, "2K' eta_z + C xi_t + K(2 eta_zu - xi_zz) + nu K (xi_z/z - xi/z^2)",
                         Expr(2) * Kp * eta_z + C * xi_t + K * (Expr(2) * eta_zu - xi_zz) +
                             nu * K * (xi_z / kZ - xi / pow(kZ, Rational(2))));
        eqs.emplace_back(18, "eta(C'K'/C - K'') + K'(2 xi_z - eta_u - tau') - K eta_uu",
                         eta * (Cp * Kp / C - Kpp) + Kp * (Expr(2) * xi_z - eta_u - tau_t) - K * eta_uu);
        eqs.emplace_back(19, "eta(C'K/C - K') + K(2 xi_z - tau')",
                         eta * (Cp * K / C - Kp) + K * (Expr(2) * xi_z - tau_t));
    } else {
        const RatioClass& rc = model.ratio_class();
        Expr beta = R(rc.beta_exact ? *rc.beta_exact : to_rational(rc.beta));
        Expr z_term = options.printed_constant_z_term ? xi_z / kZ - xi / kZ : xi_z / kZ - xi / pow(kZ, Rational(2));
        eqs.emplace_back(48, "beta eta_t - eta_zz - (nu/z) eta_z", beta * eta_t - eta_zz - nu / kZ * eta_z);
        eqs.emplace_back(49,
                         options.printed_constant_z_term
                             ? "2(K'/K) eta_z + beta xi_t + 2 eta_zu - xi_zz + nu (xi_z/z - xi/z)"
                             : "2(K'/K) eta_z + beta xi_t + 2 eta_zu - xi_zz + nu (xi_z/z - xi/z^2)",
                         Expr(2) * Kp / K * eta_z + beta * xi_t + Expr(2) * eta_zu - xi_zz + nu * z_term);
        eqs.emplace_back(50, "eta((K'/K)^2 - K''/K) + (K'/K)(2 xi_z - eta_u - tau') - eta_uu",
                         eta * (pow(Kp / K, Rational(2)) - Kpp / K) + Kp / K * (Expr(2) * xi_z - eta_u - tau_t) - eta_uu);
        eqs.emplace_back(51, "2 xi_z - tau'", Expr(2) * xi_z - tau_t);
    }
    PointSampler sampler = model_sampler(model);
    report.pass = true;
    for (auto& [index, text, expr] : eqs) {
        EquationResidual r;
        r.index = index;
        r.description = text;
        r.residual = simplify(expr);
        r.check = recognize_zero(r.residual, st, sampler, options.seed + static_cast<std::uint64_t>(index),
                                 options.samples, options.threshold);
        if (!r.check.zero && report.pass) {
            report.pass = false;
            report.failing_index = index;
        }
        report.equations.push_back(std::move(r));
    }
    return report;
}

Generator lie_bracket(const Generator& g1, const Generator& g2, const SymbolTable& symbols) {
    auto apply = [&](const Generator& g, const Expr& f) {
        return g.xi * diff(f, "z", symbols) + g.tau * diff(f, "t", symbols) + g.eta * diff(f, "u", symbols);
    };
    Generator out;
    out.label = "[" + g1.label + "," + g2.label + "]";
    out.case_tag = g1.case_tag;
    out.xi = simplify(apply(g1, g2.xi) - apply(g2, g1.xi));
    out.tau = simplify(apply(g1, g2.tau) - apply(g2, g1.tau));
    out.eta = simplify(apply(g1, g2.eta) - apply(g2, g1.eta));
    return out;
}

namespace {

struct SampledBasis {
    std::vector<Bindings> points;
    Eigen::MatrixXd matrix;  // 3 rows per point, one column per basis element
};

SampledBasis sample_basis(const std::vector<Components>& basis, const CoefficientModel& model, int count,
                          std::uint64_t seed) {
    SampledBasis out;
    PointSampler sampler = model_sampler(model);
    std::mt19937_64 rng(seed);
    const SymbolTable& st = model.symbols();
    std::vector<std::vector<std::array<double, 3>>> rows;
    int attempts = 0;
    while (static_cast<int>(out.points.size()) < count) {
        if (++attempts > count * 50) throw DomainError("could not sample the generator basis");
        Bindings p = sampler(rng);
        std::vector<std::array<double, 3>> values;
        try {
            for (const auto& c : basis) values.push_back(evaluate(c, p, st));
        } catch (const DomainError&) {
            continue;
        }
        out.points.push_back(p);
        rows.push_back(values);
    }
    out.matrix.resize(3 * count, static_cast<Eigen::Index>(basis.size()));
    for (int i = 0; i < count; ++i) {
        for (std::size_t k = 0; k < basis.size(); ++k) {
            for (int comp = 0; comp < 3; ++comp) out.matrix(3 * i + comp, static_cast<Eigen::Index>(k)) = rows[i][k][comp];
        }
    }
    return out;
}

/// Max |remainder| relative to the component magnitudes at the points.
double remainder_size(const Components& target, const std::vector<Components>& basis, const std::vector<Rational>& coef,
                      const std::vector<Bindings>& points, const SymbolTable& st) {
    double worst = 0.0;
    for (const auto& p : points) {
        auto t = evaluate(target, p, st);
        std::array<double, 3> sum{0, 0, 0};
        std::array<double, 3> mag{std::fabs(t[0]), std::fabs(t[1]), std::fabs(t[2])};
        for (std::size_t k = 0; k < basis.size(); ++k) {
            if (coef[k] == 0) continue;
            auto b = evaluate(basis[k], p, st);
            double ck = to_double(coef[k]);
            for (int comp = 0; comp < 3; ++comp) {
                sum[comp] += ck * b[comp];
                mag[comp] += std::fabs(ck * b[comp]);
            }
        }
        for (int comp = 0; comp < 3; ++comp) {
            worst = std::max(worst, std::fabs(t[comp] - sum[comp]) / (1.0 + mag[comp]));
        }
    }
    return worst;
}

}  // namespace

CommutatorTable commutator_table(const std::vector<Generator>& basis, const CoefficientModel& model,
                                 const TableOptions& options) {
    const SymbolTable& st = model.symbols();
    const std::size_t n = basis.size();
    std::vector<Components> explicit_basis;
    for (const auto& g : basis) explicit_basis.push_back(explicit_components(model, g));
    int count = std::max(options.samples, static_cast<int>(n) + 4);
    SampledBasis fit = sample_basis(explicit_basis, model, count, options.seed);
    SampledBasis verify = sample_basis(explicit_basis, model, count, options.seed + 1000);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(fit.matrix);
    cod.setThreshold(1e-10);

    CommutatorTable table;
    for (const auto& g : basis) table.labels.push_back(g.label);
    table.degenerate_basis = static_cast<std::size_t>(cod.rank()) < n;
    table.c.assign(n, std::vector<std::vector<Rational>>(n, std::vector<Rational>(n, Rational(0))));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Generator b = lie_bracket(basis[i], basis[j], st);
            Components bc = explicit_components(model, b);
            Eigen::VectorXd rhs(3 * count);
            for (int p = 0; p < count; ++p) {
                auto v = evaluate(bc, fit.points[static_cast<std::size_t>(p)], st);
                for (int comp = 0; comp < 3; ++comp) rhs(3 * p + comp) = v[comp];
            }
            Eigen::VectorXd x = cod.solve(rhs);
            std::vector<Rational> coef(n);
            for (std::size_t k = 0; k < n; ++k) coef[k] = snap_or_exact(x(static_cast<Eigen::Index>(k)));
            double rem = remainder_size(bc, explicit_basis, coef, verify.points, st);
            table.max_remainder = std::max(table.max_remainder, rem);
            if (rem > 1e-8) {
                std::ostringstream os;
                os << "xi: " << unparse(b.xi) << ", tau: " << unparse(b.tau) << ", eta: " << unparse(b.eta);
                throw BracketClosureError("[" + basis[i].label + ", " + basis[j].label + "] is outside the span", os.str());
            }
            table.c[i][j] = coef;
        }
    }
    return table;
}

TableComparison compare_tables(const CommutatorTable& computed, const StructureConstants& expected,
                               const std::vector<Generator>& basis, const CoefficientModel& model, std::uint64_t seed) {
    const SymbolTable& st = model.symbols();
    const std::size_t n = basis.size();
    std::vector<Components> explicit_basis;
    for (const auto& g : basis) explicit_basis.push_back(explicit_components(model, g));
    SampledBasis probe = sample_basis(explicit_basis, model, static_cast<int>(n) + 6, seed);
    TableComparison out;
    Components zero{Expr(0), Expr(0), Expr(0)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<Rational> diff_coef(n);
            bool identical = true;
            for (std::size_t k = 0; k < n; ++k) {
                diff_coef[k] = computed.c[i][j][k] - expected[i][j][k];
                if (diff_coef[k] != 0) identical = false;
            }
            if (identical) continue;
            // Coefficients differ; the generators may still agree on a degenerate basis.
            if (remainder_size(zero, explicit_basis, diff_coef, probe.points, st) <= 1e-9) continue;
            out.match = false;
            out.mismatches.push_back({static_cast<int>(i), static_cast<int>(j),
                                      format_combination(computed.c[i][j], computed.labels),
                                      format_combination(expected[i][j], computed.labels)});
        }
    }
    return out;
}

namespace {

StructureConstants zeros(std::size_t n) {
    return StructureConstants(n, std::vector<std::vector<Rational>>(n, std::vector<Rational>(n, Rational(0))));
}

}  // namespace

StructureConstants printed_table_nonconstant(const Rational& nu) {
    auto c = zeros(4);
    Rational h = (1 - nu) / 2;
    c[0][1][1] = -1;
    c[0][3][3] = h;
    c[1][0][1] = 1;
    c[2][3][3] = 1 - nu;
    c[3][0][3] = -h;
    c[3][2][3] = -(1 - nu);
    return c;
}

StructureConstants printed_table_constant(const Rational& nu) {
    auto c = zeros(4);
    Rational h = (1 + nu) / 2;
    c[0][1][0] = -1;
    c[0][2][1] = -2;
    c[0][2][3] = -h;
    c[1][0][0] = 1;
    c[1][2][2] = -1;
    c[2][0][1] = 2;
    c[2][0][3] = h;
    c[2][1][2] = 1;
    return c;
}

StructureConstants printed_table_spherical(const Rational& beta) {
    auto c = zeros(6);
    // Row Yh1
    c[0][1][0] = -1;
    c[0][2][1] = -2;
    c[0][2][5] = Rational(-3, 2);
    c[0][4][3] = -1;
    // Row Yh2
    c[1][0][0] = 1;
    c[1][2][2] = -1;
    c[1][3][3] = Rational(-1, 4);
    c[1][4][4] = Rational(-1, 2);
    // Row Yh3
    c[2][0][1] = 2;
    c[2][0][5] = Rational(3, 2);
    c[2][1][2] = 1;
    c[2][3][4] = 1;
    // Row Yh4
    c[3][1][3] = Rational(-1, 2);
    c[3][2][4] = -1;
    c[3][4][5] = -beta / 2;
    // Row Yh5
    c[4][0][3] = 1;
    c[4][1][4] = Rational(1, 2);
    c[4][3][5] = beta / 2;
    return c;
}

std::string format_combination(const std::vector<Rational>& coefficients, const std::vector<std::string>& labels) {
    std::string out;
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
        const Rational& c = coefficients[k];
        if (c == 0) continue;
        Rational mag = c < 0 ? Rational(-c) : c;
        if (out.empty()) {
            if (c < 0) out += "-";
        } else {
            out += c < 0 ? " - " : " + ";
        }
        if (mag != 1) out += to_string(mag) + "*";
        out += labels[k];
    }
    return out.empty() ? "0" : out;
}

AlgebraCheck check_algebra(const StructureConstants& c) {
    AlgebraCheck out;
    const std::size_t n = c.size();
    std::ostringstream detail;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                if (c[i][j][k] != -c[j][i][k]) {
                    if (out.antisymmetric) detail << "antisymmetry fails at (" << i + 1 << "," << j + 1 << "); ";
                    out.antisymmetric = false;
                }
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t l = 0; l < n; ++l) {
                for (std::size_t m = 0; m < n; ++m) {
                    Rational s = 0;
                    for (std::size_t k = 0; k < n; ++k) {
                        s += c[j][l][k] * c[i][k][m] + c[l][i][k] * c[j][k][m] + c[i][j][k] * c[l][k][m];
                    }
                    if (s != 0) {
                        if (out.jacobi) detail << "Jacobi fails for (" << i + 1 << "," << j + 1 << "," << l + 1 << "); ";
                        out.jacobi = false;
                    }
                }
            }
        }
    }
    out.detail = detail.str();
    return out;
}

Expr compatibility_C_from_K(const Expr& K, const Expr& J, const Rational& A, const Rational& B, const Rational& D) {
    if (A == 0) {
        if (B == 0) throw ModelError("A = 0 requires B != 0");
        return simplify(R(D) * K * exp(J / R(B)));
    }
    return simplify(R(D) * K * pow(R(A) * J + R(B), Rational(1 / A)));
}

Expr compatibility_C_for_Y4(const Expr& K, const Expr& J, const Rational& M, const Rational& N, const Rational& nu) {
    if (nu == 2) throw ModelError("the Y4 compatibility relation is singular at nu = 2");
    Rational a = y4_required_A(nu);
    return compatibility_C_from_K(K, J, a, M, N);
}

std::optional<CompatibilityLink> compatibility_link(const CoefficientModel& model, const Compatibility& c) {
    double A = to_double(c.A);
    double B = to_double(c.B);
    std::vector<double> values;
    int sign = 0;
    for (double u : numerics::sample_interval(model.u_domain(), 30)) {
        if (std::fabs(u) > 20.0) continue;
        double w = A * model.J(u) + B;
        double D;
        if (A == 0.0) {
            D = model.C(u) / (model.K(u) * std::exp(model.J(u) / B));
        } else {
            int s = w >= 0 ? 1 : -1;
            if (sign == 0) sign = s;
            if (s != sign) return std::nullopt;
            D = model.C(u) / (model.K(u) * std::pow(s * w, 1.0 / A));
        }
        if (std::isfinite(D)) values.push_back(D);
    }
    if (values.empty()) return std::nullopt;
    double ref = values.front();
    for (double v : values) {
        if (std::fabs(v - ref) > 1e-8 * std::fabs(ref)) return std::nullopt;
    }
    return CompatibilityLink{ref, sign == 0 ? 1 : sign};
}

}  // namespace radsym
