#include "radsym/solutions.hpp"

#include "radsym/errors.hpp"
#include "radsym/symmetry.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace radsym {

std::string to_string(SolutionForm form) {
    switch (form) {
        case SolutionForm::Closed: return "closed";
        case SolutionForm::VForm: return "v-form";
        case SolutionForm::Quadrature: return "quadrature";
        case SolutionForm::Implicit: return "implicit";
        case SolutionForm::FixedPoint: return "fixed-point";
    }
    return "?";
}

namespace {

const Expr kZ = var("z");
const Expr kT = var("t");

Expr num(double x) { return Expr(to_rational(x)); }
Expr rat(const Rational& r) { return Expr(r); }

double get(const SolutionParams& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

Rational beta_of(const CoefficientModel& model) {
    const RatioClass& rc = model.ratio_class();
    if (!rc.constant) throw CatalogError("entry needs a constant ratio C/K");
    return rc.beta_exact ? *rc.beta_exact : to_rational(rc.beta);
}

FieldFunction expr_field(const Expr& e, const CoefficientModel& model) {
    return [e, model](double z, double t) {
        double value = eval(e, {{"z", z}, {"t", t}}, model.symbols());
        if (!std::isfinite(value)) throw DomainError("solution is not finite here");
        return value;
    };
}

void finish(InvariantSolution& s) {
    s.validity = compute_validity(s.u);
    if (s.validity.empty()) throw ValidityError("solution " + s.id + " is undefined on the whole search window");
}

/// Solution given through v = J(u) as an expression in z, t.
InvariantSolution through_J(const CoefficientModel& model, const std::string& id, const std::string& generator,
                            const std::string& description, const Expr& j_value, const SolutionParams& params) {
    InvariantSolution s;
    s.id = id;
    s.generator = generator;
    s.description = description;
    s.parameters = params;
    Expr jv = simplify(j_value);
    FieldFunction jf = expr_field(jv, model);
    s.u = [jf, model](double z, double t) { return model.J_inverse(jf(z, t)); };
    if (model.ratio_class().constant) {
        s.form = SolutionForm::VForm;
        s.v_expr = jv;
        s.v = jf;
    } else {
        s.form = SolutionForm::Closed;
    }
    if (model.family() != Family::Custom) s.u_expr = simplify(model.Jinv_expr(jv));
    finish(s);
    return s;
}

InvariantSolution closed(const CoefficientModel& model, const std::string& id, const std::string& generator,
                         const std::string& description, const Expr& u_expr, const SolutionParams& params) {
    InvariantSolution s;
    s.id = id;
    s.generator = generator;
    s.description = description;
    s.parameters = params;
    s.form = SolutionForm::Closed;
    s.u_expr = simplify(u_expr);
    s.u = expr_field(*s.u_expr, model);
    if (model.ratio_class().constant) {
        s.v = [u = s.u, model](double z, double t) { return model.J(u(z, t)); };
    }
    finish(s);
    return s;
}

/// Steady profile C0 + C1 z^(1-nu)/(1-nu), or C0 + C1 ln z at nu = 1.
Expr radial_steady(const Rational& nu, double C1, double C0) {
    if (nu == 1) return num(C0) + num(C1) * ln(kZ);
    return num(C0) + num(C1) * pow(kZ, Rational(1 - nu)) / rat(1 - nu);
}

/// Projective profile v of the Yt1 reduction.
Expr projective_v(const Rational& nu, const Rational& beta, double c1, double c2) {
    Expr gauss = exp(-rat(beta) * pow(kZ, Rational(2)) / (Expr(4) * kT));
    Expr eta = kZ / kT;
    Expr phi = nu == 1 ? num(c1) + num(c2) * ln(eta) : num(c1) + num(c2) * pow(eta, Rational(1 - nu)) / rat(1 - nu);
    return pow(kT, Rational(-(1 + nu) / 2)) * gauss * phi;
}

/// Integral of s^-nu exp(-beta s^2 / 4) from eta to infinity.
///
/// The tail beyond eta = 1 is integrated once adaptively; the part between
/// eta and 1 uses a fixed composite Gauss rule in ln s, so the result is a
/// smooth function of eta and finite differences of it stay clean.
class GaussianTail {
public:
    GaussianTail(double nu, double beta) : nu_(nu), beta_(beta) {
        tail_ = numerics::integrate([this](double s) { return integrand(s); }, 1.0,
                                    std::numeric_limits<double>::infinity(), 1e-14);
    }

    double operator()(double eta) const {
        if (!(eta > 0.0)) throw DomainError("similarity variable must be positive");
        const double w0 = std::log(eta);
        const int panels = 24;
        double sum = 0.0;
        for (int k = 0; k < panels; ++k) {
            double a = w0 * k / panels;
            double b = w0 * (k + 1) / panels;
            sum += boost::math::quadrature::gauss<double, 30>::integrate(
                [this](double w) { return integrand(std::exp(w)) * std::exp(w); }, a, b);
        }
        // sum is the integral from eta to 1 in signed form (w0 < 0 when eta < 1).
        return tail_ - sum;
    }

private:
    double integrand(double s) const { return std::pow(s, -nu_) * std::exp(-0.25 * beta_ * s * s); }

    double nu_;
    double beta_;
    double tail_ = 0.0;
};

struct PicardResult {
    numerics::Chebyshev profile;
    int iterations;
    double last_change;
};

PicardResult picard_profile(const CoefficientModel& model, double C1, double C2, const PicardOptions& o) {
    const double a = o.eta_min;
    const double b = o.eta_max;
    if (!(a > 0.0 && a < b)) throw DomainError("Picard interval needs 0 < eta_min < eta_max");
    const double nu = model.nu_value();
    auto x = numerics::Chebyshev::nodes(a, b, o.nodes);
    std::vector<double> phi(x.size(), C2);
    double omega = 1.0;
    double prev_change = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= o.max_iterations; ++iter) {
        std::vector<double> drift(x.size());
        std::vector<double> weight(x.size());
        try {
            for (std::size_t j = 0; j < x.size(); ++j) drift[j] = x[j] * model.C(phi[j]) / model.K(phi[j]);
            auto G = numerics::Chebyshev::from_values(a, b, drift).integral();
            for (std::size_t j = 0; j < x.size(); ++j)
                weight[j] = std::pow(x[j], -nu) / model.K(phi[j]) * std::exp(-0.5 * G(x[j]));
        } catch (const DomainError& e) {
            throw ConvergenceError(std::string("Picard iterate left the model domain: ") + e.what());
        }
        auto H = numerics::Chebyshev::from_values(a, b, weight).integral();
        double change = 0.0;
        std::vector<double> next(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) {
            next[j] = C2 + C1 * H(x[j]);
            if (!std::isfinite(next[j])) throw ConvergenceError("Picard iterate is not finite");
            change = std::max(change, std::fabs(next[j] - phi[j]));
        }
        if (change < o.tolerance) {
            return {numerics::Chebyshev::from_values(a, b, next), iter, change};
        }
        if (change > prev_change && iter > 2) omega = std::max(0.05, 0.5 * omega);
        prev_change = change;
        for (std::size_t j = 0; j < x.size(); ++j) phi[j] = (1.0 - omega) * phi[j] + omega * next[j];
    }
    std::ostringstream os;
    os << "Picard iteration did not converge in " << o.max_iterations << " iterations (last change " << prev_change << ")";
    throw ConvergenceError(os.str());
}

InvariantSolution fixed_point_solution(const CoefficientModel& model, const std::string& id, double C1, double C2,
                                       const PicardOptions& o) {
    PicardResult r = picard_profile(model, C1, C2, o);
    InvariantSolution s;
    s.id = id;
    s.generator = "Y1";
    s.description = "similarity profile u = phi(z/sqrt(t)) from the integral relation, Picard fixed point";
    s.form = SolutionForm::FixedPoint;
    s.parameters = {{"C1", C1}, {"C2", C2}, {"eta_min", o.eta_min}, {"eta_max", o.eta_max}};
    auto cheb = std::make_shared<numerics::Chebyshev>(r.profile);
    double a = o.eta_min, b = o.eta_max;
    s.profile = [cheb, a, b](double eta) {
        if (eta < a || eta > b) throw DomainError("similarity variable outside the profile interval");
        return (*cheb)(eta);
    };
    s.profile_variable = "eta";
    s.u = [p = s.profile](double z, double t) {
        if (!(t > 0.0)) throw DomainError("t must be positive");
        return p(z / std::sqrt(t));
    };
    std::ostringstream note;
    note << "Picard converged in " << r.iterations << " iterations, last change " << r.last_change;
    s.notes.push_back(note.str());
    finish(s);
    return s;
}

InvariantSolution gaussian_tail_solution(const CoefficientModel& model, const std::string& id, double c1, double c2,
                                         std::function<double(double)> to_u, const std::string& route) {
    const double nu = model.nu_value();
    const double beta = to_double(beta_of(model));
    InvariantSolution s;
    s.id = id;
    s.generator = "Yt2";
    s.description = "scaling solution v = c2 + c1 * integral_{z/sqrt(t)}^inf s^-nu exp(-beta s^2/4) ds" + route;
    s.form = SolutionForm::Quadrature;
    s.parameters = {{"c1", c1}, {"c2", c2}};
    auto tail = std::make_shared<GaussianTail>(nu, beta);
    s.profile = [tail, c1, c2](double eta) { return c2 + c1 * (*tail)(eta); };
    s.profile_variable = "eta";
    s.v = [p = s.profile](double z, double t) {
        if (!(t > 0.0)) throw DomainError("t must be positive");
        return p(z / std::sqrt(t));
    };
    s.u = [v = s.v, to_u](double z, double t) {
        double u = to_u(v(z, t));
        if (!std::isfinite(u)) throw DomainError("solution is not finite here");
        return u;
    };
    finish(s);
    return s;
}

const PowerLaw& require_power(const CoefficientModel& model, const std::string& id) {
    if (model.family() != Family::PowerLaw) throw CatalogError(id + " applies to the power family only");
    return std::get<PowerLaw>(model.params());
}

const Exponential& require_exp(const CoefficientModel& model, const std::string& id) {
    if (model.family() != Family::Exponential) throw CatalogError(id + " applies to the exp family only");
    return std::get<Exponential>(model.params());
}

const Linear& require_linear(const CoefficientModel& model, const std::string& id) {
    if (model.family() != Family::Linear) throw CatalogError(id + " applies to the linear family only");
    return std::get<Linear>(model.params());
}

void require_nonconstant(const CoefficientModel& model, const std::string& id) {
    if (model.ratio_class().constant) throw CatalogError(id + " needs a non-constant ratio C/K");
}

void require_nu(const CoefficientModel& model, const std::string& id, bool one) {
    if ((model.nu() == 1) != one) throw CatalogError(id + (one ? " is the nu = 1 branch" : " is the nu != 1 branch"));
}

/// Y3 data: constants, sign s and link constant D.
struct Y3Data {
    Compatibility c;
    int sign = 1;
    double D = 1.0;
};

Y3Data y3_data(const CoefficientModel& model, std::optional<double> D) {
    auto c = find_y3_constants(model);
    if (!c) throw CatalogError("model does not admit Y3");
    auto link = compatibility_link(model, *c);
    if (!link) throw CatalogError("no constant D links the compatibility relation to this model");
    return {*c, link->sign, D ? *D : link->D};
}

/// z^(-2A) (Q + 2(2A+1-nu) t / D)^A.
Expr y3_power(const Rational& A, const Rational& nu, double Q, double D) {
    return pow(kZ, Rational(-2 * A)) * pow(num(Q) + rat(2 * (2 * A + 1 - nu)) / num(D) * kT, A);
}

}  // namespace

const std::vector<CatalogEntry>& solution_catalog() {
    static const std::vector<CatalogEntry> catalog = {
        {"eq69", "Y1", "similarity profile phi(z/sqrt(t)) by Picard iteration (alias eq73)"},
        {"eq78", "Y2", "steady state J^-1(C1 z^(1-nu)/(1-nu) + C2), nu != 1"},
        {"eq79", "Y2", "steady state J^-1(C1 ln z + C2), nu = 1"},
        {"eq90", "Y3", "Y3-invariant solution, A != 0"},
        {"eq100", "Y3", "Y3-invariant solution, A = 0"},
        {"eq106", "Y4", "constant solution J^-1(2(2-nu)M), nu != 1, 2"},
        {"eq118", "Yt1", "projective solution, constant ratio"},
        {"eq124", "Yt2", "scaling solution with a Gaussian tail integral, constant ratio"},
        {"eq129", "Yt3", "steady state in v, constant ratio"},
        {"eq137", "Yh4", "Gaussian solution C0 exp(-beta z^2/4t)/(z sqrt(t)), nu = 2"},
        {"eq142", "Yh5", "v = C1/z, nu = 2 (alias eq143)"},
        {"eq148", "Yt1", "power law m = n != -1, projective solution"},
        {"eq149", "Yt1", "power law m = n = -1, projective solution"},
        {"eq150", "Yt2", "power law m = n, scaling solution"},
        {"eq151", "Yt3", "power law m = n != -1, steady state"},
        {"eq152", "Yt3", "power law m = n = -1, steady state"},
        {"eq153", "Y1", "power law n != m, similarity profile"},
        {"eq156", "Y2", "power law m != -1, steady state"},
        {"eq157", "Y2", "power law m = -1, steady state"},
        {"eq160", "Y3", "power law n != m, Y3-invariant solution"},
        {"eq165", "Yt1", "exp mu = lam != 0, projective solution"},
        {"eq166", "Yt2", "exp mu = lam, scaling solution"},
        {"eq167", "Yt3", "exp mu = lam, steady state"},
        {"eq168", "Y1", "exp mu != lam, similarity profile"},
        {"eq169", "Y2", "exp mu != lam, steady state"},
        {"eq170", "Y3", "exp mu != lam, Y3-invariant solution"},
        {"eq174", "Y1", "linear, similarity profile"},
        {"eq175", "Y2", "linear, implicit steady state, nu != 1"},
        {"eq176", "Y2", "linear, implicit steady state, nu = 1"},
        {"eq177", "Y3", "linear, implicit relation with u-dependent A(u) (suspect)"},
    };
    return catalog;
}

InvariantSolution steady_state(const CoefficientModel& model, double C1, double C2) {
    const Rational& nu = model.nu();
    std::string id = nu == 1 ? "eq79" : "eq78";
    return through_J(model, id, "Y2", "stationary solution H = J, H(u) = C1 z^(1-nu)/(1-nu) + C2 (C1 ln z + C2 at nu = 1)",
                     radial_steady(nu, C1, C2), {{"C1", C1}, {"C2", C2}});
}

InvariantSolution similarity_scaling(const CoefficientModel& model, double C1, double C2, const PicardOptions& options) {
    if (model.ratio_class().constant) {
        return gaussian_tail_solution(model, "eq124", C1, C2, [model](double v) { return model.J_inverse(v); }, "");
    }
    return fixed_point_solution(model, "eq69", C1, C2, options);
}

InvariantSolution projective_solution(const CoefficientModel& model, double c1, double c2) {
    Rational beta = beta_of(model);
    auto s = through_J(model, "eq118", "Yt1", "projective solution v = t^(-(1+nu)/2) exp(-beta z^2/4t) phi5(z/t)",
                       projective_v(model.nu(), beta, c1, c2), {{"c1", c1}, {"c2", c2}});
    const Rational nu = model.nu();
    s.profile = [nu, c1, c2](double eta) {
        if (nu == 1) return c1 + c2 * std::log(eta);
        double p = to_double(1 - nu);
        return c1 + c2 * std::pow(eta, p) / p;
    };
    s.profile_variable = "eta";
    return s;
}

InvariantSolution y3_solution(const CoefficientModel& model, double Q, std::optional<double> D) {
    Y3Data y = y3_data(model, D);
    const Rational& A = y.c.A;
    const Rational& B = y.c.B;
    const Rational& nu = model.nu();
    SolutionParams params{{"Q", Q}, {"D", y.D}, {"A", to_double(A)}, {"B", to_double(B)}, {"s", y.sign}};
    InvariantSolution s;
    if (A != 0) {
        Expr jv = (Expr(y.sign) * y3_power(A, nu, Q, y.D) - rat(B)) / rat(A);
        s = through_J(model, "eq90", "Y3", "Y3-invariant solution A J(u) + B = s z^(-2A) (Q + 2(2A+1-nu) t/D)^A", jv,
                      params);
        if (y.sign < 0) s.notes.push_back("sign s = -1: A J + B is negative on this model");
    } else {
        Expr jv = rat(-2 * B) * ln(kZ) + rat(B) * ln(num(Q) + rat(2 * (1 - nu)) / num(y.D) * kT);
        s = through_J(model, "eq100", "Y3", "Y3-invariant solution J(u) = -2B ln z + B ln(Q + 2(1-nu) t/D)", jv, params);
    }
    return s;
}

std::vector<InvariantSolution> spherical_specials(const CoefficientModel& model, double C0, double C1) {
    if (model.nu() != 2) throw CatalogError("spherical solutions need nu = 2");
    Rational beta = beta_of(model);
    Expr gauss = num(C0) / (kZ * pow(kT, Rational(1, 2))) * exp(-rat(beta) * pow(kZ, Rational(2)) / (Expr(4) * kT));
    auto a = through_J(model, "eq137", "Yh4", "v = C0 exp(-beta z^2/4t) / (z sqrt(t))", gauss, {{"C0", C0}});
    a.profile = [C0](double t) { return C0 / std::sqrt(t); };
    a.profile_variable = "t";
    auto b = through_J(model, "eq142", "Yh5", "v = C1 / z", num(C1) / kZ, {{"C1", C1}});
    return {a, b};
}

InvariantSolution implicit_linear_solution(const CoefficientModel& model, double Q, double D) {
    const Linear& p = require_linear(model, "eq177");
    if (p.b == 0) throw CatalogError("eq177 needs b != 0");
    const double k0 = to_double(p.k0), a = to_double(p.a), b = to_double(p.b);
    const double c = to_double(p.c), d = to_double(p.d), nu = model.nu_value();
    auto residual = [=](double u, double z, double t) {
        double w = a * u + 0.5 * b * u * u;
        double A = d * (a + b * u) / (w * (c + d * u)) - b / w;
        return w - std::pow(z, -2.0 * A) * std::pow(Q + 2.0 * (2.0 * A + 1.0 - nu) / D * t, A) / (k0 * A);
    };
    Interval dom = model.u_domain();
    auto grid = numerics::sample_interval(dom, 4000);
    InvariantSolution s;
    s.id = "eq177";
    s.generator = "Y3";
    s.description = "implicit relation a u + b u^2/2 = z^(-2A(u)) (Q + 2(2A(u)+1-nu) t/D)^A(u) / (k0 A(u))";
    s.form = SolutionForm::Implicit;
    s.parameters = {{"Q", Q}, {"D", D}};
    s.suspect = true;
    s.notes.push_back("A(u) varies with u although the reduction assumes a constant A; kept as printed");
    s.notes.push_back("several roots can occur; the largest root with a vanishing residual is taken");
    s.u = [residual, grid](double z, double t) {
        // Scan downwards so the branch away from the w -> 0 singularity is chosen.
        double prev_u = 0.0, prev_r = std::numeric_limits<double>::quiet_NaN();
        for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
            double u = *it;
            double r = residual(u, z, t);
            if (std::isfinite(r) && std::isfinite(prev_r) && (r < 0.0) != (prev_r < 0.0)) {
                double root = numerics::find_root([&](double x) { return residual(x, z, t); }, u, prev_u);
                double w = std::fabs(root) * (1.0 + std::fabs(root));
                if (std::fabs(residual(root, z, t)) <= 1e-8 * std::max(1.0, w)) return root;
            }
            prev_u = u;
            prev_r = r;
        }
        throw DomainError("implicit relation has no root in the model domain");
    };
    finish(s);
    return s;
}

InvariantSolution build_solution(const std::string& id_in, const CoefficientModel& model, const SolutionParams& params) {
    std::string id = id_in;
    if (id == "eq73") id = "eq69";
    if (id == "eq143") id = "eq142";
    const Rational& nu = model.nu();
    const double C1 = get(params, "C1", 1.0);
    const double C2 = get(params, "C2", 0.0);
    const double C0 = get(params, "C0", 1.0);
    const double c1 = get(params, "c1", 1.0);
    const double c2 = get(params, "c2", 0.0);
    const double Q = get(params, "Q", 1.0);
    std::optional<double> D;
    if (params.count("D")) D = params.at("D");
    PicardOptions picard;
    picard.eta_min = get(params, "eta_min", picard.eta_min);
    picard.eta_max = get(params, "eta_max", picard.eta_max);
    const double P1 = get(params, "C1", 0.5);
    const double P2 = get(params, "C2", 1.0);

    if (id == "eq69") return fixed_point_solution(model, id, P1, P2, picard);
    if (id == "eq78" || id == "eq79") {
        require_nu(model, id, id == "eq79");
        return steady_state(model, C1, C2);
    }
    if (id == "eq90" || id == "eq100") {
        require_nonconstant(model, id);
        auto s = y3_solution(model, Q, D);
        if (s.id != id) throw CatalogError(id + " does not match this model's Y3 branch (use " + s.id + ")");
        return s;
    }
    if (id == "eq106") {
        if (nu == 1 || nu == 2) throw CatalogError("eq106 needs nu != 1, 2");
        double M = get(params, "M", 1.0);
        double value = model.J_inverse(2.0 * to_double(2 - nu) * M);
        InvariantSolution s;
        s.id = id;
        s.generator = "Y4";
        s.description = "constant solution u = J^-1(2(2-nu)M)";
        s.form = SolutionForm::Closed;
        s.parameters = {{"M", M}};
        s.u_expr = num(value);
        s.u = [value](double, double) { return value; };
        finish(s);
        return s;
    }
    if (id == "eq118") return projective_solution(model, c1, c2);
    if (id == "eq124") {
        beta_of(model);
        return similarity_scaling(model, c1, c2);
    }
    if (id == "eq129") {
        beta_of(model);
        auto s = through_J(model, id, "Yt3", "steady state v = C0 + C1 z^(1-nu)/(1-nu) (C0 + C1 ln z at nu = 1)",
                           radial_steady(nu, C1, C0), {{"C0", C0}, {"C1", C1}});
        return s;
    }
    if (id == "eq137") return spherical_specials(model, C0, C1)[0];
    if (id == "eq142") return spherical_specials(model, C0, C1)[1];

    if (id == "eq148" || id == "eq149" || id == "eq150" || id == "eq151" || id == "eq152") {
        const PowerLaw& p = require_power(model, id);
        if (p.m != p.n) throw CatalogError(id + " needs m = n");
        bool minus_one = p.m == -1;
        if ((id == "eq149" || id == "eq152") != minus_one && id != "eq150")
            throw CatalogError(id + (minus_one ? " needs m != -1" : " needs m = -1"));
        Rational beta = beta_of(model);
        auto compose = [&](const Expr& v) {
            if (minus_one) return exp(v / rat(p.k0));
            return pow(rat((p.m + 1) / p.k0) * v, Rational(1 / (p.m + 1)));
        };
        if (id == "eq148" || id == "eq149") {
            auto s = closed(model, id, "Yt1", "power law projective solution", compose(projective_v(nu, beta, c1, c2)),
                            {{"c1", c1}, {"c2", c2}});
            if (id == "eq149" && nu == 1) s.notes.push_back("nu = 1 branch carries the 1/k0 factor of the m = -1 inverse");
            return s;
        }
        if (id == "eq150") {
            double k0 = to_double(p.k0), m = to_double(p.m);
            std::function<double(double)> to_u;
            if (minus_one) {
                to_u = [k0](double v) { return std::exp(v / k0); };
            } else {
                to_u = [k0, m](double v) {
                    double base = (m + 1) / k0 * v;
                    if (!(base > 0.0)) throw DomainError("power-law inverse needs a positive argument");
                    return std::pow(base, 1.0 / (m + 1));
                };
            }
            return gaussian_tail_solution(model, id, c1, c2, to_u, ", power-law inverse");
        }
        double c0v = get(params, "C0", 0.0);
        return closed(model, id, "Yt3", "power law steady state", compose(radial_steady(nu, C1, c0v)),
                      {{"C0", c0v}, {"C1", C1}});
    }
    if (id == "eq153") {
        require_power(model, id);
        require_nonconstant(model, id);
        return fixed_point_solution(model, id, P1, P2, picard);
    }
    if (id == "eq156" || id == "eq157") {
        const PowerLaw& p = require_power(model, id);
        bool minus_one = p.m == -1;
        if ((id == "eq157") != minus_one) throw CatalogError(id + (minus_one ? " needs m != -1" : " needs m = -1"));
        Expr base = nu == 1 ? num(C2) + num(C1) * ln(kZ) : num(C2) + num(C1) * pow(kZ, Rational(1 - nu));
        Expr u;
        if (!minus_one) {
            u = pow(base, Rational(1 / (p.m + 1)));
        } else if (nu == 1) {
            u = num(C2) * pow(kZ, to_rational(C1));
        } else {
            u = exp(base);
        }
        return closed(model, id, "Y2", "power law steady state", u, {{"C1", C1}, {"C2", C2}});
    }
    if (id == "eq160") {
        const PowerLaw& p = require_power(model, id);
        require_nonconstant(model, id);
        if (p.m == -1) throw CatalogError("eq160 needs m != -1 (use eq100)");
        Y3Data y = y3_data(model, D);
        Rational A = (p.m + 1) / (p.n - p.m);
        Expr u = pow(Expr(y.sign) * rat((p.n - p.m) / p.k0) * y3_power(A, nu, Q, y.D), Rational(1 / (p.m + 1)));
        auto s = closed(model, id, "Y3", "power law Y3 solution [(n-m)/k0 z^(-2A) (Q + 2(2A+1-nu)t/D)^A]^(1/(m+1))", u,
                        {{"Q", Q}, {"D", y.D}, {"s", y.sign}});
        if (y.sign < 0) s.notes.push_back("n < m: the bracket carries the sign s = -1");
        return s;
    }
    if (id == "eq165" || id == "eq166" || id == "eq167") {
        const Exponential& p = require_exp(model, id);
        if (p.lam != p.mu) throw CatalogError(id + " needs mu = lam");
        Rational beta = beta_of(model);
        auto compose = [&](const Expr& v) {
            if (p.lam == 0) return v / rat(p.k0);
            return ln(rat(p.lam / p.k0) * v) / rat(p.lam);
        };
        if (id == "eq165") {
            if (p.lam == 0) throw CatalogError("eq165 needs lam != 0");
            return closed(model, id, "Yt1", "exponential projective solution", compose(projective_v(nu, beta, c1, c2)),
                          {{"c1", c1}, {"c2", c2}});
        }
        if (id == "eq166") {
            double k0 = to_double(p.k0), lam = to_double(p.lam);
            std::function<double(double)> to_u;
            if (lam == 0.0) {
                to_u = [k0](double v) { return v / k0; };
            } else {
                to_u = [k0, lam](double v) {
                    double arg = lam / k0 * v;
                    if (!(arg > 0.0)) throw DomainError("logarithm needs a positive argument");
                    return std::log(arg) / lam;
                };
            }
            return gaussian_tail_solution(model, id, c1, c2, to_u, ", exponential inverse");
        }
        double c0v = get(params, "C0", 0.0);
        auto s = closed(model, id, "Yt3", "exponential steady state", compose(radial_steady(nu, C1, c0v)),
                        {{"C0", c0v}, {"C1", C1}});
        if (p.lam == 0) s.notes.push_back("lam = 0 branch follows from the linear inverse v/k0");
        return s;
    }
    if (id == "eq168") {
        require_exp(model, id);
        require_nonconstant(model, id);
        return fixed_point_solution(model, id, P1, P2, picard);
    }
    if (id == "eq169" || id == "eq170") {
        const Exponential& p = require_exp(model, id);
        require_nonconstant(model, id);
        if (p.lam == 0) throw CatalogError(id + ": no catalog entry for lam = 0");
        if (id == "eq169") {
            Expr arg = nu == 1 ? rat(p.lam / p.k0) * num(C1) * ln(kZ) + num(C2)
                               : rat(p.lam / (p.k0 * (1 - nu))) * num(C1) * pow(kZ, Rational(1 - nu)) + num(C2);
            return closed(model, id, "Y2", "exponential steady state (1/lam) ln(...)", ln(arg) / rat(p.lam),
                          {{"C1", C1}, {"C2", C2}});
        }
        Y3Data y = y3_data(model, D);
        Rational A = p.lam / (p.mu - p.lam);
        Expr u = ln(Expr(y.sign) * rat((p.mu - p.lam) / p.k0) * y3_power(A, nu, Q, y.D)) / rat(p.lam);
        return closed(model, id, "Y3", "exponential Y3 solution (1/lam) ln[(mu-lam)/k0 z^(-2A) (Q + ...)^A]", u,
                      {{"Q", Q}, {"D", y.D}, {"s", y.sign}});
    }
    if (id == "eq174") {
        require_linear(model, id);
        require_nonconstant(model, id);
        return fixed_point_solution(model, id, P1, P2, picard);
    }
    if (id == "eq175" || id == "eq176") {
        const Linear& p = require_linear(model, id);
        require_nu(model, id, id == "eq176");
        // a u + b u^2/2 = rhs, i.e. J(u) = k0 rhs.
        Expr rhs = nu == 1 ? num(C1) / rat(p.k0) * ln(kZ) + num(C2)
                           : num(C1) / rat(p.k0 * (1 - nu)) * pow(kZ, Rational(1 - nu)) + num(C2);
        auto s = through_J(model, id, "Y2", "linear steady state from a u + b u^2/2 = rhs(z)", rat(p.k0) * rhs,
                           {{"C1", C1}, {"C2", C2}});
        s.form = SolutionForm::Implicit;
        s.notes.push_back("quadratic relation solved with the stable root of the linear-family J^-1");
        return s;
    }
    if (id == "eq177") return implicit_linear_solution(model, Q, D ? *D : 1.0);
    throw CatalogError("unknown catalog id: " + id_in);
}

double quadrature(const Expr& f, const std::string& variable, double a, double b) {
    SymbolTable table;
    return numerics::integrate([&](double x) { return eval(f, {{variable, x}}, table); }, a, b);
}

ReducedODE reduced_ode(const std::string& id, const CoefficientModel& model) {
    const double nu = model.nu_value();
    ReducedODE ode;
    ode.id = id;
    if (id == "eq70") {
        ode.variable = "eta";
        ode.text = "K(phi) phi'' + K'(phi) phi'^2 + (nu/eta) K(phi) phi' + (eta/2) C(phi) phi' = 0";
        ode.lhs = [model, nu](double x, double p, double dp, double ddp) {
            double k = model.K(p);
            return k * ddp + model.dK(p) * dp * dp + nu / x * k * dp + 0.5 * x * model.C(p) * dp;
        };
    } else if (id == "eq71") {
        ode.variable = "eta";
        ode.text = "(K(phi) phi')' + (nu/eta + (eta/2) C(phi)/K(phi)) K(phi) phi' = 0";
        ode.lhs = [model, nu](double x, double p, double dp, double ddp) {
            double k = model.K(p);
            double flux = k * dp;
            double flux_prime = model.dK(p) * dp * dp + k * ddp;
            return flux_prime + (nu / x + 0.5 * x * model.C(p) / k) * flux;
        };
    } else if (id == "eq116") {
        ode.variable = "eta";
        ode.text = "eta phi'' + nu phi' = 0";
        ode.lhs = [nu](double x, double, double dp, double ddp) { return x * ddp + nu * dp; };
    } else if (id == "eq121") {
        double beta = to_double(beta_of(model));
        ode.variable = "eta";
        ode.text = "phi'' + (nu/eta + beta eta/2) phi' = 0";
        ode.lhs = [nu, beta](double x, double, double dp, double ddp) { return ddp + (nu / x + 0.5 * beta * x) * dp; };
    } else if (id == "eq127") {
        ode.variable = "z";
        ode.text = "phi'' + (nu/z) phi' = 0";
        ode.lhs = [nu](double x, double, double dp, double ddp) { return ddp + nu / x * dp; };
    } else if (id == "eq135") {
        ode.variable = "t";
        ode.order = 1;
        ode.text = "phi' + phi/(2t) = 0";
        ode.lhs = [](double x, double p, double dp, double) { return dp + p / (2.0 * x); };
    } else {
        throw CatalogError("unknown reduced ODE: " + id);
    }
    return ode;
}

double reduced_ode_residual(const ReducedODE& ode, const std::function<double(double)>& profile,
                            const std::vector<double>& points, double h) {
    double worst = 0.0;
    for (double x : points) {
        double f0 = profile(x);
        auto derivs = [&](double step) {
            double fp = profile(x + step);
            double fm = profile(x - step);
            return std::pair<double, double>{(fp - fm) / (2.0 * step), (fp - 2.0 * f0 + fm) / (step * step)};
        };
        auto [d1h, d2h] = derivs(h);
        auto [d1q, d2q] = derivs(0.5 * h);
        double d1 = (4.0 * d1q - d1h) / 3.0;
        double d2 = (4.0 * d2q - d2h) / 3.0;
        worst = std::max(worst, std::fabs(ode.lhs(x, f0, d1, d2)));
    }
    return worst;
}

namespace {

bool rect_valid(const FieldFunction& u, const Rect& r) {
    if (r.empty()) return false;
    const int n = 9;
    for (int i = 0; i < n; ++i) {
        double z = r.z_min + (r.z_max - r.z_min) * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            double t = r.t_min + (r.t_max - r.t_min) * j / (n - 1);
            try {
                if (!std::isfinite(u(z, t))) return false;
            } catch (const Error&) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

Rect compute_validity(const FieldFunction& u, const Rect& cap) {
    // Seeds on a log grid, ordered by distance from (1, 1).
    std::vector<std::pair<double, double>> seeds;
    const int n = 13;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double z = cap.z_min * std::pow(cap.z_max / cap.z_min, (i + 0.5) / n);
            double t = cap.t_min * std::pow(cap.t_max / cap.t_min, (j + 0.5) / n);
            seeds.emplace_back(z, t);
        }
    }
    std::sort(seeds.begin(), seeds.end(), [](const auto& a, const auto& b) {
        return std::hypot(std::log(a.first), std::log(a.second)) < std::hypot(std::log(b.first), std::log(b.second));
    });
    for (const auto& [z, t] : seeds) {
        Rect r{z / 1.02, z * 1.02, t / 1.02, t * 1.02};
        if (!rect_valid(u, r)) continue;
        // Grow each side by bisection in log scale towards the cap.
        for (int side = 0; side < 4; ++side) {
            double* edge = side == 0 ? &r.z_max : side == 1 ? &r.z_min : side == 2 ? &r.t_max : &r.t_min;
            double limit = side == 0 ? cap.z_max : side == 1 ? cap.z_min : side == 2 ? cap.t_max : cap.t_min;
            double good = *edge;
            Rect trial = r;
            double* trial_edge = side == 0 ? &trial.z_max : side == 1 ? &trial.z_min : side == 2 ? &trial.t_max : &trial.t_min;
            *trial_edge = limit;
            if (rect_valid(u, trial)) {
                *edge = limit;
                continue;
            }
            double bad = limit;
            for (int it = 0; it < 24; ++it) {
                double mid = std::sqrt(good * bad);
                *trial_edge = mid;
                if (rect_valid(u, trial)) {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            *edge = good;
        }
        return r;
    }
    return Rect{};
}

std::vector<double> Grid::z_nodes() const {
    std::vector<double> out;
    for (int i = 0; i < nz; ++i) out.push_back(nz == 1 ? region.z_min : region.z_min + (region.z_max - region.z_min) * i / (nz - 1));
    return out;
}

std::vector<double> Grid::t_nodes() const {
    std::vector<double> out;
    for (int j = 0; j < nt; ++j) out.push_back(nt == 1 ? region.t_min : region.t_min + (region.t_max - region.t_min) * j / (nt - 1));
    return out;
}

Grid default_grid(const InvariantSolution& s, int nz, int nt) {
    Rect r = s.validity;
    Rect w{std::max(r.z_min, 0.5), std::min(r.z_max, 2.0), std::max(r.t_min, 0.5), std::min(r.t_max, 2.0)};
    if (!w.empty()) r = w;
    double dz = 0.05 * (r.z_max - r.z_min);
    double dt = 0.05 * (r.t_max - r.t_min);
    return Grid{{r.z_min + dz, r.z_max - dz, r.t_min + dt, r.t_max - dt}, nz, nt};
}

void write_csv(std::ostream& os, const InvariantSolution& s, const Grid& grid) {
    const bool with_v = static_cast<bool>(s.v);
    os << (with_v ? "z,t,u,v\n" : "z,t,u\n");
    os << std::setprecision(17);
    for (double t : grid.t_nodes()) {
        for (double z : grid.z_nodes()) {
            double u = std::numeric_limits<double>::quiet_NaN();
            double v = u;
            try {
                u = s.u(z, t);
                if (with_v) v = s.v(z, t);
            } catch (const Error&) {
            }
            os << z << ',' << t << ',' << u;
            if (with_v) os << ',' << v;
            os << '\n';
        }
    }
}

}  // namespace radsym
