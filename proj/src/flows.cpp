#include "radsym/flows.hpp"

#include "radsym/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <random>
#include <sstream>

namespace radsym {

std::string to_string(FlowVariant variant) { return variant == FlowVariant::Printed ? "printed" : "corrected"; }

namespace {

const Expr kZ = var("z");
const Expr kT = var("t");
const Expr kV = var("v");
const Expr kLam = var("lam");

Expr R(const Rational& r) { return Expr(r); }

bool starts_with(const std::string& s, const char* prefix) { return s.rfind(prefix, 0) == 0; }

bool is_constant_label(const std::string& label) { return starts_with(label, "L"); }

void require_constant(const FlowContext& ctx, const std::string& label) {
    if (!ctx.model.ratio_class().constant) throw CatalogError(label + " needs a constant ratio C/K");
}

void require_nu(const FlowContext& ctx, const std::string& label, const Rational& nu) {
    if (ctx.model.nu() != nu) throw CatalogError(label + " needs nu = " + to_string(nu));
}

Rational beta_rational(const FlowContext& ctx) {
    const RatioClass& rc = ctx.model.ratio_class();
    return rc.beta_exact ? *rc.beta_exact : to_rational(rc.beta);
}

/// z^(nu-1) + (nu-1) lam raised to 1/(nu-1): flow of z^(2-nu) d/dz.
Expr power_zbar(const Rational& nu) { return pow(pow(kZ, Rational(nu - 1)) + R(nu - 1) * kLam, Rational(1 / (nu - 1))); }

/// exp(1 + (ln z - 1) e^lam): flow of (z ln z - z) d/dz.
Expr log_zbar() { return exp(Expr(1) + (ln(kZ) - Expr(1)) * exp(kLam)); }

Expr projective_j(const Rational& half_power, const Rational& beta) {
    Expr s = Expr(1) - kLam * kT;
    return kV * pow(s, half_power) * exp(-R(beta) * kLam * pow(kZ, Rational(2)) / (Expr(4) * s));
}

const SymbolTable& no_symbols() {
    static const SymbolTable table;
    return table;
}

bool in_domain(const Interval& d, double u) { return std::isfinite(u) && u > d.lo && u < d.hi; }

std::pair<double, double> evaluate_space(const ClosedFlow& c, double z, double t, double lam) {
    if (!(z > 0.0)) throw DomainError("z must be positive");
    Bindings b{{"z", z}, {"t", t}, {"lam", lam}};
    double zb;
    if (c.zbar) {
        zb = eval(*c.zbar, b, no_symbols());
    } else {
        // li(zbar) = li(z) - lam on z > 1.
        if (!(z > 1.0)) throw DomainError("the logarithmic-integral flow is restricted to z > 1");
        zb = numerics::li_inverse(numerics::li(z) - lam);
    }
    double tb = eval(c.tbar, b, no_symbols());
    if (!std::isfinite(zb) || !(zb > 0.0) || !std::isfinite(tb)) throw DomainError("image point is undefined");
    return {zb, tb};
}

FlowPoint evaluate(const ClosedFlow& c, const FlowContext& ctx, const FlowPoint& p, double lam) {
    auto [zb, tb] = evaluate_space(c, p.z, p.t, lam);
    FlowPoint out{zb, tb, p.u};
    Bindings b{{"z", p.z}, {"t", p.t}, {"lam", lam}};
    if (c.jbar) {
        b["v"] = ctx.model.J(p.u);
        double jb = eval(*c.jbar, b, no_symbols());
        if (!std::isfinite(jb)) throw DomainError("J(ubar) is not finite");
        out.u = ctx.model.J_inverse(jb);
    }
    if (!in_domain(ctx.model.u_domain(), out.u)) throw DomainError("ubar leaves the model domain");
    return out;
}

bool evaluates(const ClosedFlow& c, const FlowContext& ctx, const FlowPoint& p, double lam) {
    try {
        evaluate(c, ctx, p, lam);
        return true;
    } catch (const Error&) {
        return false;
    }
}

double window_edge(const ClosedFlow& c, const FlowContext& ctx, const FlowPoint& p, double limit) {
    const int n = 200;
    double good = 0.0;
    for (int i = 1; i <= n; ++i) {
        double lam = limit * i / n;
        if (!evaluates(c, ctx, p, lam)) {
            double bad = lam;
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (good + bad);
                (evaluates(c, ctx, p, mid) ? good : bad) = mid;
            }
            return good;
        }
        good = lam;
    }
    return limit;
}

double max_coordinate_error(const FlowPoint& a, const FlowPoint& b) {
    return std::max({std::fabs(a.z - b.z), std::fabs(a.t - b.t), std::fabs(a.u - b.u)});
}

double scaled_error(const FlowPoint& closed, const FlowPoint& reference) {
    auto rel = [](double x, double y) { return std::fabs(x - y) / std::max(1.0, std::fabs(y)); };
    return std::max({rel(closed.z, reference.z), rel(closed.t, reference.t), rel(closed.u, reference.u)});
}

}  // namespace

FlowContext make_flow_context(const CoefficientModel& model, std::optional<Rational> M) {
    FlowContext ctx{model, std::nullopt, 0, 0.0};
    if (model.ratio_class().constant) {
        ctx.beta = model.ratio_class().beta;
    } else {
        auto c = classify(model);
        ctx.y3 = c.y3;
        if (c.y4_M) {
            ctx.M = *c.y4_M;
        } else if (c.y3) {
            ctx.M = c.y3->B;
        }
    }
    if (M) ctx.M = *M;
    return ctx;
}

const std::vector<FlowLabel>& flow_labels() {
    static const std::vector<FlowLabel> labels = {
        {"G1", "Y1", false, "scaling z e^(lam/2), t e^lam"},
        {"G2", "Y2", false, "time translation"},
        {"G3", "Y3", false, "z e^lam with J(u) relaxing to -B/A"},
        {"G4", "Y4 (printed)", true, "flow of z^(2-nu) d/dz with the printed u-component, nu != 1, 2"},
        {"G4_nu1", "Y4 (printed, nu = 1)", true, "flow of (z ln z - z) d/dz, nu = 1"},
        {"G4_nu2", "Y4 (printed, nu = 2)", false, "li(zbar) = li(z) - lam on z > 1"},
        {"G4adm", "Y4 (admitted)", false, "flow of the admitted Y4, nu != 2"},
        {"L1", "Yt1", false, "projective group, constant ratio"},
        {"L2", "Yt2", true, "scaling, constant ratio"},
        {"L3", "Yt3", false, "time translation, constant ratio"},
        {"L4", "Yt4", false, "J(u) e^-lam, constant ratio"},
        {"Lt1", "Yh1", false, "projective group, nu = 2"},
        {"Lt2", "Yh2", false, "scaling, nu = 2"},
        {"Lt3", "Yh3", false, "time translation, nu = 2"},
        {"Lt4", "Yh4", false, "Galilean-type boost z + lam t, nu = 2"},
        {"Lt5", "Yh5", false, "z translation, nu = 2"},
        {"Lt6", "Yh6", false, "J(u) e^-lam, nu = 2"},
    };
    return labels;
}

ClosedFlow closed_flow(const std::string& label, const FlowContext& ctx, FlowVariant variant) {
    const Rational& nu = ctx.model.nu();
    const Rational P = 2 * (2 - nu) * ctx.M;
    ClosedFlow c;
    c.label = label;
    c.variant = variant;
    c.tbar = kT;
    if (label == "G1" || label == "Lt2" || label == "L2") {
        if (label != "G1") {
            require_constant(ctx, label);
            if (label == "Lt2") require_nu(ctx, label, 2);
        }
        c.zbar = kZ * exp(kLam / Expr(2));
        bool printed_l2 = label == "L2" && variant == FlowVariant::Printed;
        c.tbar = printed_l2 ? kT * exp(kLam * kT) : kT * exp(kLam);
        c.text = printed_l2 ? "zbar = z e^(lam/2), tbar = t e^(lam t), ubar = u"
                            : "zbar = z e^(lam/2), tbar = t e^lam, ubar = u";
    } else if (label == "G2" || label == "L3" || label == "Lt3") {
        if (label != "G2") require_constant(ctx, label);
        if (label == "Lt3") require_nu(ctx, label, 2);
        c.zbar = kZ;
        c.tbar = kT + kLam;
        c.text = "zbar = z, tbar = t + lam, ubar = u";
    } else if (label == "G3") {
        if (!ctx.y3) throw CatalogError("G3 needs a model that admits Y3");
        const Rational& A = ctx.y3->A;
        const Rational& B = ctx.y3->B;
        c.zbar = kZ * exp(kLam);
        if (A != 0) {
            c.jbar = (kV + R(B / A)) * exp(R(-2 * A) * kLam) - R(B / A);
            c.text = "zbar = z e^lam, tbar = t, J(ubar) = (J(u) + B/A) e^(-2 A lam) - B/A";
        } else {
            c.jbar = kV - R(2 * B) * kLam;
            c.text = "zbar = z e^lam, tbar = t, J(ubar) = J(u) - 2 B lam";
        }
    } else if (label == "G4") {
        if (nu == 1 || nu == 2) throw CatalogError("G4 needs nu != 1, 2 (use G4_nu1 or G4_nu2)");
        if (variant == FlowVariant::Printed) {
            c.zbar = pow(pow(kZ, Rational(1 - nu)) + R(nu - 1) * kLam, Rational(1 / (nu - 1)));
            c.jbar = R(P) + (kV - R(P)) * exp(pow(kZ, Rational(1 - nu)) * kLam);
            c.text = "zbar = (z^(1-nu) + (nu-1) lam)^(1/(nu-1)), J(ubar) = P + (J(u) - P) e^(z^(1-nu) lam)";
        } else {
            c.zbar = power_zbar(nu);
            c.jbar = R(P) + (kV - R(P)) * *c.zbar / kZ;
            c.text = "zbar = (z^(nu-1) + (nu-1) lam)^(1/(nu-1)), J(ubar) = P + (J(u) - P) zbar/z";
        }
    } else if (label == "G4_nu1") {
        require_nu(ctx, label, 1);
        c.zbar = log_zbar();
        Expr twoM = R(2 * ctx.M);
        if (variant == FlowVariant::Printed) {
            c.jbar = twoM + (kV - twoM) * exp(-kLam * ln(kZ));
            c.text = "zbar = exp(1 + (ln z - 1) e^lam), J(ubar) = 2M + (J(u) - 2M) e^(-lam ln z)";
        } else {
            c.jbar = twoM + (kV - twoM) * exp(kLam + (ln(kZ) - Expr(1)) * (exp(kLam) - Expr(1)));
            c.text = "zbar = exp(1 + (ln z - 1) e^lam), J(ubar) = 2M + (J(u) - 2M) exp(lam + (ln z - 1)(e^lam - 1))";
        }
    } else if (label == "G4_nu2") {
        require_nu(ctx, label, 2);
        c.text = "zbar = li^-1(li(z) - lam), tbar = t, ubar = u (z > 1)";
    } else if (label == "G4adm") {
        if (nu == 2) throw CatalogError("G4adm needs nu != 2");
        if (nu == 1) {
            c.zbar = log_zbar();
            c.jbar = kV - R(2 * ctx.M) * (kLam + (ln(kZ) - Expr(1)) * (exp(kLam) - Expr(1)));
            c.text = "zbar = exp(1 + (ln z - 1) e^lam), J(ubar) = J(u) - 2M (lam + (ln z - 1)(e^lam - 1))";
        } else {
            Expr zn = pow(kZ, Rational(nu - 1));
            c.zbar = power_zbar(nu);
            Expr W = R(nu - 1) * kV + R(P);
            c.jbar = (W * zn / (zn + R(nu - 1) * kLam) - R(P)) / R(nu - 1);
            c.text = "zbar = (z^(nu-1) + (nu-1) lam)^(1/(nu-1)), (nu-1) J(ubar) + P = ((nu-1) J(u) + P) (z/zbar)^(nu-1)";
        }
    } else if (label == "L1" || label == "Lt1") {
        require_constant(ctx, label);
        if (label == "Lt1") require_nu(ctx, label, 2);
        Expr s = Expr(1) - kLam * kT;
        c.zbar = kZ / s;
        c.tbar = kT / s;
        c.jbar = projective_j((1 + nu) / 2, beta_rational(ctx));
        c.text = "zbar = z/(1 - lam t), tbar = t/(1 - lam t), J(ubar) = J(u) (1 - lam t)^((1+nu)/2) exp(-beta lam z^2 / 4(1 - lam t))";
    } else if (label == "L4" || label == "Lt6") {
        require_constant(ctx, label);
        if (label == "Lt6") require_nu(ctx, label, 2);
        c.zbar = kZ;
        c.jbar = kV * exp(-kLam);
        c.text = "zbar = z, tbar = t, J(ubar) = J(u) e^-lam";
    } else if (label == "Lt4") {
        require_constant(ctx, label);
        require_nu(ctx, label, 2);
        Rational beta = beta_rational(ctx);
        c.zbar = kZ + kLam * kT;
        c.jbar = kV * kZ / (kZ + kLam * kT) *
                 exp(-R(beta / 2) * kLam * kZ - R(beta / 4) * pow(kLam, Rational(2)) * kT);
        c.text = "zbar = z + lam t, tbar = t, J(ubar) = J(u) z/(z + lam t) exp(-beta lam z/2 - beta lam^2 t/4)";
    } else if (label == "Lt5") {
        require_constant(ctx, label);
        require_nu(ctx, label, 2);
        c.zbar = kZ + kLam;
        c.jbar = kV * kZ / (kZ + kLam);
        c.text = "zbar = z + lam, tbar = t, J(ubar) = J(u) z/(z + lam)";
    } else {
        throw CatalogError("unknown flow label: " + label);
    }
    return c;
}

Generator flow_generator(const std::string& label, const FlowContext& ctx) {
    const Rational& nu = ctx.model.nu();
    closed_flow(label, ctx);  // applicability checks
    if (label == "G1") return make_Y1();
    if (label == "G2") return make_Y2();
    if (label == "G3") return make_Y3(*ctx.y3);
    if (label == "G4") return make_Y4_printed(nu, ctx.M);
    if (label == "G4_nu1") return make_Y4_printed_nu1(ctx.M);
    if (label == "G4_nu2") return make_Y4_printed_nu2();
    if (label == "G4adm") return make_Y4(nu, ctx.M);
    auto basis = constant_ratio_basis(nu, beta_rational(ctx));
    if (starts_with(label, "Lt")) return basis.at(static_cast<std::size_t>(label[2] - '1'));
    int index = label[1] - '1';
    if (nu == 2 && index == 3) return basis[5];
    return basis.at(static_cast<std::size_t>(index));
}

std::pair<double, double> validity_window(const std::string& label, const FlowContext& ctx, const FlowPoint& p,
                                          FlowVariant variant, double limit) {
    ClosedFlow c = closed_flow(label, ctx, variant);
    if (!evaluates(c, ctx, p, 0.0)) return {0.0, 0.0};
    return {window_edge(c, ctx, p, -limit), window_edge(c, ctx, p, limit)};
}

FlowPoint flow_closed(const std::string& label, const FlowContext& ctx, const FlowPoint& p, double lam,
                      FlowVariant variant) {
    ClosedFlow c = closed_flow(label, ctx, variant);
    try {
        return evaluate(c, ctx, p, lam);
    } catch (const DomainError& e) {
        auto [lo, hi] = validity_window(label, ctx, p, variant);
        std::ostringstream os;
        os << label << " is undefined at lam=" << lam << " for (z,t,u)=(" << p.z << "," << p.t << "," << p.u
           << "): " << e.what() << "; valid lambda window [" << lo << ", " << hi << "]";
        throw ValidityError(os.str());
    }
}

FlowPoint flow_numeric(const Generator& g, const CoefficientModel& model, const FlowPoint& p, double lam,
                       const FlowOptions& options) {
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, 3>;
    const Expr xi = model.explicit_form(g.xi);
    const Expr tau = model.explicit_form(g.tau);
    const Expr eta = model.explicit_form(g.eta);
    const SymbolTable& symbols = model.symbols();
    const Interval domain = model.u_domain();
    const double sign = lam < 0.0 ? -1.0 : 1.0;

    auto check = [&](const State& x) {
        if (!(x[0] > 0.0) || !std::isfinite(x[1]) || !in_domain(domain, x[2])) {
            throw DomainError("trajectory left z > 0 or the u-domain");
        }
    };
    auto rhs = [&](const State& x, State& dxdt, double) {
        check(x);
        Bindings b{{"z", x[0]}, {"t", x[1]}, {"u", x[2]}};
        dxdt = {sign * eval(xi, b, symbols), sign * eval(tau, b, symbols), sign * eval(eta, b, symbols)};
        for (double d : dxdt) {
            if (!std::isfinite(d)) throw DomainError("generator is singular on the trajectory");
        }
    };

    State x{p.z, p.t, p.u};
    check(x);
    const double S = std::fabs(lam);
    auto stepper = odeint::make_controlled(options.abs_tol, options.rel_tol, odeint::runge_kutta_dopri5<State>());
    double s = 0.0;
    double dt = std::min(0.01, S);
    const double dt_min = 1e-13 * std::max(1.0, S);
    long steps = 0;
    while (s < S) {
        if (++steps > 2000000) throw DomainExitError("numeric flow did not reach lambda", sign * s);
        dt = std::min(dt, S - s);
        State saved = x;
        double s_saved = s;
        try {
            stepper.try_step(rhs, x, s, dt);
        } catch (const DomainError&) {
            x = saved;
            s = s_saved;
            dt *= 0.5;
        }
        if (dt < dt_min && s < S) throw DomainExitError("numeric flow left the admissible region", sign * s);
    }
    check(x);
    return {x[0], x[1], x[2]};
}

FlowComparison compare_flow(const std::string& label, const FlowContext& ctx, FlowVariant variant, std::uint64_t seed,
                            int pairs) {
    FlowComparison out;
    out.label = label;
    out.variant = variant;
    Generator g = flow_generator(label, ctx);
    std::mt19937_64 rng(seed);
    const bool li_flow = label == "G4_nu2";
    std::uniform_real_distribution<double> zdist(li_flow ? 1.2 : 0.5, li_flow ? 3.0 : 2.0);
    std::uniform_real_distribution<double> tdist(0.5, 2.0);
    std::uniform_real_distribution<double> ldist(-0.5, 0.5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Interval d = ctx.model.u_domain();
    auto sample_u = [&]() {
        double U = unit(rng);
        if (std::isfinite(d.lo) && std::isfinite(d.hi)) return d.lo + (d.hi - d.lo) * (0.2 + 0.6 * U);
        if (std::isfinite(d.lo)) return d.lo + 0.5 + U;
        if (std::isfinite(d.hi)) return d.hi - 0.5 - U;
        return -1.0 + 2.0 * U;
    };
    for (int attempt = 0; attempt < 20 * pairs && out.tested < pairs; ++attempt) {
        FlowPoint p{zdist(rng), tdist(rng), sample_u()};
        double lam = ldist(rng);
        FlowPoint closed, numeric;
        try {
            closed = flow_closed(label, ctx, p, lam, variant);
            numeric = flow_numeric(g, ctx.model, p, lam);
        } catch (const Error&) {
            ++out.skipped;
            continue;
        }
        ++out.tested;
        double err = scaled_error(closed, numeric);
        if (err >= out.max_discrepancy) {
            out.max_discrepancy = err;
            out.worst_point = p;
            out.worst_lambda = lam;
        }
    }
    out.agree = out.tested > 0 && out.max_discrepancy <= out.tolerance;
    return out;
}

AxiomReport check_group_axioms(const Generator& g, const CoefficientModel& model, const std::vector<FlowPoint>& points,
                               double lam1, double lam2) {
    AxiomReport r;
    for (const auto& p : points) {
        FlowPoint two = flow_numeric(g, model, flow_numeric(g, model, p, lam1), lam2);
        r.additivity_error = std::max(r.additivity_error, max_coordinate_error(two, flow_numeric(g, model, p, lam1 + lam2)));
        FlowPoint back = flow_numeric(g, model, flow_numeric(g, model, p, lam1), -lam1);
        r.inverse_error = std::max(r.inverse_error, max_coordinate_error(back, p));
    }
    r.pass = r.additivity_error <= r.tolerance && r.inverse_error <= r.tolerance;
    return r;
}

AxiomReport check_group_axioms(const std::string& label, const FlowContext& ctx, const std::vector<FlowPoint>& points,
                               double lam1, double lam2, FlowVariant variant) {
    AxiomReport r;
    for (const auto& p : points) {
        FlowPoint two = flow_closed(label, ctx, flow_closed(label, ctx, p, lam1, variant), lam2, variant);
        r.additivity_error =
            std::max(r.additivity_error, max_coordinate_error(two, flow_closed(label, ctx, p, lam1 + lam2, variant)));
        FlowPoint back = flow_closed(label, ctx, flow_closed(label, ctx, p, lam1, variant), -lam1, variant);
        r.inverse_error = std::max(r.inverse_error, max_coordinate_error(back, p));
    }
    r.pass = r.additivity_error <= r.tolerance && r.inverse_error <= r.tolerance;
    return r;
}

InvariantSolution map_solution(const std::string& label, const FlowContext& ctx, double lam, const InvariantSolution& s,
                               FlowVariant variant) {
    ClosedFlow c = closed_flow(label, ctx, variant);
    const CoefficientModel& model = ctx.model;
    InvariantSolution out;
    out.id = s.id + "/" + label;
    out.generator = s.generator;
    std::ostringstream desc;
    desc << "image of " << s.id << " under " << label << " with lam = " << lam;
    out.description = desc.str();
    out.form = s.form;
    out.parameters = s.parameters;
    out.parameters["lambda"] = lam;
    out.provenance = "derived-by-flow";
    out.suspect = s.suspect;
    out.notes = s.notes;
    out.notes.push_back("flow: " + c.text);

    FieldFunction source = s.u;
    out.u = [c, ctx, source, lam](double z, double t) {
        // Preimage of (z, t) under the space part, then the u-part forward.
        auto [z0, t0] = evaluate_space(c, z, t, -lam);
        return evaluate(c, ctx, {z0, t0, source(z0, t0)}, lam).u;
    };

    if (c.zbar && s.u_expr && model.family() != Family::Custom) {
        const Expr zz = var("zz_");
        const Expr tt = var("tt_");
        auto at_preimage = [&](const Expr& e) {
            Expr r = substitute(substitute(e, "z", zz), "t", tt);
            Expr zinv = substitute(*c.zbar, "lam", Expr(to_rational(-lam)));
            Expr tinv = substitute(c.tbar, "lam", Expr(to_rational(-lam)));
            return substitute(substitute(r, "zz_", zinv), "tt_", tinv);
        };
        Expr u_new = *s.u_expr;
        if (c.jbar) {
            Expr v0 = substitute(model.J_expr(), "u", *s.u_expr);
            Expr jb = substitute(substitute(*c.jbar, "v", v0), "lam", Expr(to_rational(lam)));
            u_new = model.Jinv_expr(jb);
        }
        out.u_expr = simplify(at_preimage(u_new));
        out.form = SolutionForm::Closed;
    }
    if (model.ratio_class().constant) {
        out.v = [u = out.u, model](double z, double t) { return model.J(u(z, t)); };
    }
    out.validity = compute_validity(out.u);
    if (out.validity.empty()) throw ValidityError("mapped solution " + out.id + " is undefined on the search window");
    return out;
}

CoefficientModel default_flow_model(const std::string& label, std::optional<Rational> nu_in) {
    Rational nu;
    if (nu_in) {
        nu = *nu_in;
    } else if (starts_with(label, "Lt") || label == "G4_nu2") {
        nu = 2;
    } else if (label == "G4" || label == "G4adm") {
        nu = 3;
    } else {
        nu = 1;
    }
    if (is_constant_label(label)) return CoefficientModel::build(PowerLaw{1, 1, 1, 1}, nu);
    if (label == "G4adm") {
        // Power law whose Y3 slope (m+1)/(n-m) equals the slope Y4 requires.
        Rational a = y4_required_A(nu);
        if (a == 0) return CoefficientModel::build(PowerLaw{1, -1, 1, 2}, nu);
        return CoefficientModel::build(PowerLaw{1, 1, 1, 1 + 2 / a}, nu);
    }
    return CoefficientModel::build(PowerLaw{1, 1, 1, 3}, nu);
}

}  // namespace radsym
