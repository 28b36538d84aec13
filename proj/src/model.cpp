#include "radsym/model.hpp"

#include "radsym/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace radsym {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

Interval positive_side(const Rational& a, const Rational& b) {
    // {u : a + b u > 0}
    if (b == 0) return a > 0 ? Interval{} : Interval{0.0, 0.0};
    double root = to_double(Rational(-a / b));
    return b > 0 ? Interval{root, kInf} : Interval{-kInf, root};
}

Interval intersect(const Interval& x, const Interval& y) {
    return {std::max(x.lo, y.lo), std::min(x.hi, y.hi)};
}

std::string fmt(const Rational& r) { return to_string(r); }

Expr jinv_closed_form(const FamilyParams& params, const Expr& v) {
    Expr out;
    if (const auto* p = std::get_if<PowerLaw>(&params)) {
        if (p->m == -1) {
            out = exp(v / Expr(p->k0));
        } else {
            out = pow(Expr(Rational((p->m + 1) / p->k0)) * v, Rational(1 / (p->m + 1)));
        }
    } else if (const auto* p = std::get_if<Exponential>(&params)) {
        if (p->lam == 0) {
            out = v / Expr(p->k0);
        } else {
            out = ln(Expr(Rational(p->lam / p->k0)) * v) / Expr(p->lam);
        }
    } else if (const auto* p = std::get_if<Linear>(&params)) {
        if (p->b == 0) {
            out = v / Expr(Rational(p->k0 * p->a));
        } else {
            Expr disc = Expr(Rational(p->a * p->a)) + Expr(Rational(2 * p->b / p->k0)) * v;
            out = (Expr(Rational(-p->a)) + pow(disc, Rational(1, 2))) / Expr(p->b);
        }
    } else {
        return Expr::function("Jinv", v);
    }
    return simplify(out);
}


}  // namespace

struct CoefficientModel::Core {
    FamilyParams params;
    Family family{};
    Interval domain;
    Interval j_range;
    double u_ref = 0.0;
    Expr K_expr, C_expr, dK_expr, dC_expr, J_expr, E_expr;
    std::optional<Expr> F_expr;
    SymbolTable base;  // for Custom expressions (no function symbols)
    // Double copies of the family constants.
    double k0 = 0, c0 = 0, p1 = 0, p2 = 0, p3 = 0, p4 = 0;

    void require(double u) const {
        if (!domain.contains(u)) {
            std::ostringstream os;
            os << "u=" << u << " outside u_domain (" << domain.lo << ", " << domain.hi << ")";
            throw DomainError(os.str());
        }
    }

    double eval_u(const Expr& e, double u) const { return eval(e, Bindings{{"u", u}}, base); }

    double K(double u) const {
        require(u);
        switch (family) {
            case Family::PowerLaw: return k0 * std::pow(u, p1);
            case Family::Exponential: return k0 * std::exp(p1 * u);
            case Family::Linear: return k0 * (p1 + p2 * u);
            case Family::Custom: return eval_u(K_expr, u);
        }
        return 0;
    }

    double C(double u) const {
        require(u);
        switch (family) {
            case Family::PowerLaw: return c0 * std::pow(u, p2);
            case Family::Exponential: return c0 * std::exp(p2 * u);
            case Family::Linear: return c0 * (p3 + p4 * u);
            case Family::Custom: return eval_u(C_expr, u);
        }
        return 0;
    }

    double dK(double u) const {
        require(u);
        switch (family) {
            case Family::PowerLaw: return k0 * p1 * std::pow(u, p1 - 1);
            case Family::Exponential: return k0 * p1 * std::exp(p1 * u);
            case Family::Linear: return k0 * p2;
            case Family::Custom: return eval_u(dK_expr, u);
        }
        return 0;
    }

    double dC(double u) const {
        require(u);
        switch (family) {
            case Family::PowerLaw: return c0 * p2 * std::pow(u, p2 - 1);
            case Family::Exponential: return c0 * p2 * std::exp(p2 * u);
            case Family::Linear: return c0 * p4;
            case Family::Custom: return eval_u(dC_expr, u);
        }
        return 0;
    }

    double J(double u) const {
        require(u);
        switch (family) {
            case Family::PowerLaw:
                return p1 == -1.0 ? k0 * std::log(u) : k0 * std::pow(u, p1 + 1) / (p1 + 1);
            case Family::Exponential:
                return p1 == 0.0 ? k0 * u : k0 * std::exp(p1 * u) / p1;
            case Family::Linear:
                return k0 * (p1 * u + 0.5 * p2 * u * u);
            case Family::Custom:
                return numerics::integrate([this](double s) { return eval_u(K_expr, s); }, u_ref, u, 1e-13);
        }
        return 0;
    }

    double E(double u) const {
        require(u);
        switch (family) {
            case Family::PowerLaw:
                return p2 == -1.0 ? c0 * std::log(u) : c0 * std::pow(u, p2 + 1) / (p2 + 1);
            case Family::Exponential:
                return p2 == 0.0 ? c0 * u : c0 * std::exp(p2 * u) / p2;
            case Family::Linear:
                return c0 * (p3 * u + 0.5 * p4 * u * u);
            case Family::Custom:
                return numerics::integrate([this](double s) { return eval_u(C_expr, s); }, u_ref, u, 1e-13);
        }
        return 0;
    }

    double J_inverse(double v) const {
        if (!j_range.contains(v)) {
            std::ostringstream os;
            os << "v=" << v << " outside the range (" << j_range.lo << ", " << j_range.hi << ") of J";
            throw DomainError(os.str());
        }
        double u = 0.0;
        switch (family) {
            case Family::PowerLaw:
                u = p1 == -1.0 ? std::exp(v / k0) : std::pow((p1 + 1) * v / k0, 1.0 / (p1 + 1));
                break;
            case Family::Exponential:
                u = p1 == 0.0 ? v / k0 : std::log(p1 * v / k0) / p1;
                break;
            case Family::Linear:
                if (p2 == 0.0) {
                    u = v / (k0 * p1);
                } else {
                    double disc = p1 * p1 + 2.0 * p2 * v / k0;
                    if (disc < 0) throw DomainError("v outside the range of J");
                    // Stable form of (-a + sqrt(a^2 + 2 b v / k0)) / b.
                    double root = std::sqrt(disc);
                    u = (2.0 * v / k0) / (p1 + root);
                }
                break;
            case Family::Custom:
                return numerics::invert_increasing([this](double s) { return J(s); }, v, domain, u_ref);
        }
        if (!domain.contains(u)) throw DomainError("J inverse leaves u_domain");
        return u;
    }
};

std::string to_string(Family family) {
    switch (family) {
        case Family::PowerLaw: return "power";
        case Family::Exponential: return "exp";
        case Family::Linear: return "linear";
        case Family::Custom: return "custom";
    }
    return "?";
}

CoefficientModel CoefficientModel::build(const FamilyParams& params, const Rational& nu) {
    if (nu <= 0) throw ModelError("nu must be positive, got " + fmt(nu));
    auto core = std::make_shared<Core>();
    core->params = params;
    const Expr u = var("u");
    const Assumptions assume;

    if (const auto* p = std::get_if<PowerLaw>(&params)) {
        if (p->k0 <= 0 || p->c0 <= 0) throw ModelError("k0 and c0 must be positive");
        core->family = Family::PowerLaw;
        core->domain = {0.0, kInf};
        core->K_expr = Expr(p->k0) * pow(u, p->m);
        core->C_expr = Expr(p->c0) * pow(u, p->n);
        core->J_expr = p->m == -1 ? Expr(p->k0) * ln(u) : Expr(Rational(p->k0 / (p->m + 1))) * pow(u, Rational(p->m + 1));
        core->E_expr = p->n == -1 ? Expr(p->c0) * ln(u) : Expr(Rational(p->c0 / (p->n + 1))) * pow(u, Rational(p->n + 1));
        if (p->m == -1) {
            core->j_range = {-kInf, kInf};
        } else if (p->m + 1 > 0) {
            core->j_range = {0.0, kInf};
        } else {
            core->j_range = {-kInf, 0.0};
        }
        core->k0 = to_double(p->k0);
        core->c0 = to_double(p->c0);
        core->p1 = to_double(p->m);
        core->p2 = to_double(p->n);
    } else if (const auto* p = std::get_if<Exponential>(&params)) {
        if (p->k0 <= 0 || p->c0 <= 0) throw ModelError("k0 and c0 must be positive");
        core->family = Family::Exponential;
        core->domain = {-kInf, kInf};
        core->K_expr = Expr(p->k0) * exp(Expr(p->lam) * u);
        core->C_expr = Expr(p->c0) * exp(Expr(p->mu) * u);
        core->J_expr = p->lam == 0 ? Expr(p->k0) * u : Expr(Rational(p->k0 / p->lam)) * exp(Expr(p->lam) * u);
        core->E_expr = p->mu == 0 ? Expr(p->c0) * u : Expr(Rational(p->c0 / p->mu)) * exp(Expr(p->mu) * u);
        if (p->lam == 0) {
            core->j_range = {-kInf, kInf};
        } else if (p->lam > 0) {
            core->j_range = {0.0, kInf};
        } else {
            core->j_range = {-kInf, 0.0};
        }
        core->k0 = to_double(p->k0);
        core->c0 = to_double(p->c0);
        core->p1 = to_double(p->lam);
        core->p2 = to_double(p->mu);
    } else if (const auto* p = std::get_if<Linear>(&params)) {
        if (p->k0 <= 0 || p->c0 <= 0) throw ModelError("k0 and c0 must be positive");
        core->family = Family::Linear;
        core->domain = intersect(positive_side(p->a, p->b), positive_side(p->c, p->d));
        core->K_expr = Expr(p->k0) * (Expr(p->a) + Expr(p->b) * u);
        core->C_expr = Expr(p->c0) * (Expr(p->c) + Expr(p->d) * u);
        core->J_expr = Expr(p->k0) * (Expr(p->a) * u + Expr(Rational(p->b / 2)) * pow(u, Rational(2)));
        core->E_expr = Expr(p->c0) * (Expr(p->c) * u + Expr(Rational(p->d / 2)) * pow(u, Rational(2)));
        core->k0 = to_double(p->k0);
        core->c0 = to_double(p->c0);
        core->p1 = to_double(p->a);
        core->p2 = to_double(p->b);
        core->p3 = to_double(p->c);
        core->p4 = to_double(p->d);
    } else {
        const auto& custom = std::get<Custom>(params);
        core->family = Family::Custom;
        core->domain = custom.u_domain;
        for (const Expr* e : {&custom.K, &custom.C}) {
            for (const auto& name : free_variables(*e)) {
                if (name != "u") throw ModelError("custom coefficient depends on '" + name + "'; only u is allowed");
            }
        }
        core->K_expr = custom.K;
        core->C_expr = custom.C;
        core->J_expr = Expr::function("J", u);
        core->E_expr = Expr::function("E", u);
        const Interval& d = core->domain;
        if (d.finite()) {
            core->u_ref = 0.5 * (d.lo + d.hi);
        } else if (std::isfinite(d.lo)) {
            core->u_ref = d.lo + 1.0;
        } else if (std::isfinite(d.hi)) {
            core->u_ref = d.hi - 1.0;
        }
    }
    if (core->domain.empty()) throw ModelError("u_domain is empty");

    core->K_expr = simplify(core->K_expr, assume);
    core->C_expr = simplify(core->C_expr, assume);
    core->J_expr = simplify(core->J_expr, assume);
    core->dK_expr = diff(core->K_expr, "u", core->base);
    core->dC_expr = diff(core->C_expr, "u", core->base);

    // Positivity of K and C at 50 sampled points.
    for (double x : numerics::sample_interval(core->domain, 50)) {
        double k = core->K(x);
        double c = core->C(x);
        if (!(k > 0) || !(c > 0)) {
            std::ostringstream os;
            os << "K and C must be positive on u_domain; at u=" << x << " K=" << k << ", C=" << c;
            throw ModelError(os.str());
        }
    }

    if (core->family == Family::Custom) {
        auto end_value = [&](double end) {
            if (!std::isfinite(end)) return end;
            try {
                return numerics::integrate([&](double s) { return core->eval_u(core->K_expr, s); }, core->u_ref, end, 1e-10);
            } catch (const Error&) {
                return end < core->u_ref ? -kInf : kInf;
            }
        };
        core->j_range = {end_value(core->domain.lo), end_value(core->domain.hi)};
    } else if (core->family == Family::Linear) {
        auto end_value = [&](double end, double inf) {
            if (!std::isfinite(end)) return inf;
            return core->k0 * (core->p1 * end + 0.5 * core->p2 * end * end);
        };
        core->j_range = {end_value(core->domain.lo, -kInf), end_value(core->domain.hi, kInf)};
    }

    CoefficientModel model;
    model.nu_ = nu;

    // Ratio classification: normal form first, then 50 samples at 1e-12.
    RatioClass rc;
    rc.ratio = simplify(core->C_expr / core->K_expr, assume);
    if (rc.ratio.is_const()) {
        rc.constant = true;
        rc.beta_exact = rc.ratio.value();
        rc.beta = to_double(rc.ratio.value());
        rc.decided_by = "normal-form";
    } else {
        std::vector<double> values;
        for (double x : numerics::sample_interval(core->domain, 50)) values.push_back(core->C(x) / core->K(x));
        double ref = values.front();
        bool constant = true;
        for (double v : values) {
            if (std::fabs(v - ref) > 1e-12 * std::fabs(ref)) constant = false;
        }
        rc.decided_by = "sampling";
        if (constant) {
            rc.constant = true;
            rc.beta = ref;
            if (const auto* p = std::get_if<Linear>(&params)) {
                rc.beta_exact = p->b != 0 ? Rational(p->c0 * p->d / (p->k0 * p->b)) : Rational(p->c0 * p->c / (p->k0 * p->a));
            } else {
                rc.beta_exact = to_rational(ref);
            }
        }
    }
    if (!rc.constant) {
        Expr denom = simplify(core->dC_expr / core->C_expr - core->dK_expr / core->K_expr, assume);
        core->F_expr = simplify(pow(denom, Rational(-1)), assume);
    }
    model.ratio_ = rc;

    // Function symbols shared by every module.
    std::shared_ptr<const Core> c = core;
    SymbolTable& st = model.symbols_;
    FunctionSymbol K;
    K.derivative = [c](const Expr& a) { return substitute(c->dK_expr, "u", a); };
    K.evaluate = [c](double x) { return c->K(x); };
    K.closed_form = [c](const Expr& a) -> std::optional<Expr> { return substitute(c->K_expr, "u", a); };
    st.define_function("K", K);
    FunctionSymbol C;
    C.derivative = [c](const Expr& a) { return substitute(c->dC_expr, "u", a); };
    C.evaluate = [c](double x) { return c->C(x); };
    C.closed_form = [c](const Expr& a) -> std::optional<Expr> { return substitute(c->C_expr, "u", a); };
    st.define_function("C", C);
    bool custom = core->family == Family::Custom;
    st.define_antiderivative("J", "K", [c](double x) { return c->J(x); },
                             [c, custom](const Expr& a) -> std::optional<Expr> {
                                 if (custom) return std::nullopt;
                                 return substitute(c->J_expr, "u", a);
                             });
    st.define_antiderivative("E", "C", [c](double x) { return c->E(x); },
                             [c, custom](const Expr& a) -> std::optional<Expr> {
                                 if (custom) return std::nullopt;
                                 return substitute(c->E_expr, "u", a);
                             });
    model.core_ = core;
    FunctionSymbol Jinv;
    Jinv.derivative = [](const Expr& a) { return pow(Expr::function("K", Expr::function("Jinv", a)), Rational(-1)); };
    Jinv.evaluate = [c](double v) { return c->J_inverse(v); };
    Jinv.closed_form = [c, custom](const Expr& a) -> std::optional<Expr> {
        if (custom) return std::nullopt;
        return jinv_closed_form(c->params, a);
    };
    st.define_function("Jinv", Jinv);
    if (core->F_expr) {
        Expr dF = diff(*core->F_expr, "u", core->base);
        FunctionSymbol F;
        F.derivative = [dF](const Expr& a) { return substitute(dF, "u", a); };
        F.evaluate = [c](double x) {
            double num = c->dC(x) / c->C(x) - c->dK(x) / c->K(x);
            if (num == 0.0) throw SingularityError("F is singular where C'/C = K'/K");
            return 1.0 / num;
        };
        F.closed_form = [c](const Expr& a) -> std::optional<Expr> { return substitute(*c->F_expr, "u", a); };
        st.define_function("F", F);
    }
    return model;
}

Family CoefficientModel::family() const { return core_->family; }
const FamilyParams& CoefficientModel::params() const { return core_->params; }
const Interval& CoefficientModel::u_domain() const { return core_->domain; }
const Interval& CoefficientModel::j_range() const { return core_->j_range; }
double CoefficientModel::u_ref() const { return core_->u_ref; }
const Expr& CoefficientModel::K_expr() const { return core_->K_expr; }
const Expr& CoefficientModel::C_expr() const { return core_->C_expr; }
const Expr& CoefficientModel::dK_expr() const { return core_->dK_expr; }
const Expr& CoefficientModel::dC_expr() const { return core_->dC_expr; }
const Expr& CoefficientModel::J_expr() const { return core_->J_expr; }

double CoefficientModel::K(double u) const { return core_->K(u); }
double CoefficientModel::C(double u) const { return core_->C(u); }
double CoefficientModel::dK(double u) const { return core_->dK(u); }
double CoefficientModel::dC(double u) const { return core_->dC(u); }
double CoefficientModel::J(double u) const { return core_->J(u); }
double CoefficientModel::J_inverse(double v) const { return core_->J_inverse(v); }
double CoefficientModel::E(double u) const { return core_->E(u); }

double CoefficientModel::F(double u) const {
    if (ratio_.constant) throw SingularityError("F is undefined for a constant ratio C/K");
    return symbols_.find_function("F")->evaluate(u);
}

Expr CoefficientModel::F_expr() const {
    if (!core_->F_expr) throw SingularityError("F is undefined for a constant ratio C/K");
    return *core_->F_expr;
}

Expr CoefficientModel::Jinv_expr(const Expr& v) const { return jinv_closed_form(core_->params, v); }

Expr CoefficientModel::explicit_form(const Expr& e) const { return simplify(inline_functions(e, symbols_)); }

std::string CoefficientModel::describe() const {
    std::ostringstream os;
    if (const auto* p = std::get_if<PowerLaw>(&core_->params)) {
        os << "power{k0=" << fmt(p->k0) << ", m=" << fmt(p->m) << ", c0=" << fmt(p->c0) << ", n=" << fmt(p->n) << "}";
    } else if (const auto* p = std::get_if<Exponential>(&core_->params)) {
        os << "exp{k0=" << fmt(p->k0) << ", lam=" << fmt(p->lam) << ", c0=" << fmt(p->c0) << ", mu=" << fmt(p->mu) << "}";
    } else if (const auto* p = std::get_if<Linear>(&core_->params)) {
        os << "linear{k0=" << fmt(p->k0) << ", a=" << fmt(p->a) << ", b=" << fmt(p->b) << ", c0=" << fmt(p->c0)
           << ", c=" << fmt(p->c) << ", d=" << fmt(p->d) << "}";
    } else {
        os << "custom{K=" << unparse(core_->K_expr) << ", C=" << unparse(core_->C_expr) << "}";
    }
    os << ", nu=" << fmt(nu_);
    return os.str();
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_bound(const std::string& text) {
    if (text == "inf" || text == "+inf") return kInf;
    if (text == "-inf") return -kInf;
    return to_double(parse_rational(text));
}

}  // namespace

CoefficientModel model_from_values(const std::map<std::string, std::string>& values) {
    static const std::set<std::string> known{"family", "nu", "k0", "m", "c0", "n", "lam", "mu", "a", "b",
                                             "c", "d", "K", "C", "u_min", "u_max"};
    for (const auto& [key, value] : values) {
        if (!known.count(key)) throw ModelError("unknown model key '" + key + "'");
    }
    auto get = [&](const std::string& key) -> Rational {
        auto it = values.find(key);
        if (it == values.end()) throw ModelError("missing model parameter '" + key + "'");
        try {
            return parse_rational(it->second);
        } catch (const ParseError&) {
            throw ModelError("model parameter '" + key + "' is not a number: " + it->second);
        }
    };
    auto family_it = values.find("family");
    if (family_it == values.end()) throw ModelError("missing model parameter 'family'");
    const std::string& family = family_it->second;
    Rational nu = get("nu");
    if (family == "power") return CoefficientModel::build(PowerLaw{get("k0"), get("m"), get("c0"), get("n")}, nu);
    if (family == "exp") return CoefficientModel::build(Exponential{get("k0"), get("lam"), get("c0"), get("mu")}, nu);
    if (family == "linear") {
        return CoefficientModel::build(Linear{get("k0"), get("a"), get("b"), get("c0"), get("c"), get("d")}, nu);
    }
    if (family == "custom") {
        auto k = values.find("K");
        auto c = values.find("C");
        if (k == values.end() || c == values.end()) throw ModelError("custom family requires K and C");
        Interval domain;
        if (auto it = values.find("u_min"); it != values.end()) domain.lo = parse_bound(it->second);
        if (auto it = values.find("u_max"); it != values.end()) domain.hi = parse_bound(it->second);
        SymbolTable only_u;
        return CoefficientModel::build(Custom{parse(k->second, &only_u), parse(c->second, &only_u), domain}, nu);
    }
    throw ModelError("unknown family '" + family + "' (expected power, exp, linear or custom)");
}

CoefficientModel read_model_spec(const std::string& text) {
    std::map<std::string, std::string> values;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ModelError("line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (values.count(key)) throw ModelError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        values[key] = value;
    }
    return model_from_values(values);
}

CoefficientModel read_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return read_model_spec(buffer.str());
}

}  // namespace radsym
