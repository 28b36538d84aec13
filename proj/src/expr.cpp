#include "radsym/expr.hpp"

#include "radsym/errors.hpp"

#include <cmath>

namespace radsym {

struct Expr::Node {
    ExprKind kind;
    Rational value;  // Const value or Pow exponent
    std::string name;
    std::vector<Expr> ops;
    std::size_t hash;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_rational(const Rational& r) {
    return mix(std::hash<double>{}(to_double(r)), static_cast<std::size_t>(numerator(r).convert_to<long long>() & 0xffff));
}

const std::set<std::string, std::less<>>& reserved_variables() {
    static const std::set<std::string, std::less<>> names{"z", "t", "u", "eta", "lam"};
    return names;
}

const std::set<std::string, std::less<>>& reserved_functions() {
    static const std::set<std::string, std::less<>> names{"exp", "ln", "K", "C", "J", "Jinv", "F"};
    return names;
}

double checked(double value, const char* what) {
    if (!std::isfinite(value)) throw DomainError(std::string("non-finite result in ") + what);
    return value;
}

}  // namespace

Expr::Expr() : Expr(Rational(0)) {}
Expr::Expr(int value) : Expr(Rational(value)) {}
Expr::Expr(Rational value) {
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Const;
    n->hash = mix(1, hash_rational(value));
    n->value = std::move(value);
    node_ = std::move(n);
}
Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(Rational value) { return Expr(std::move(value)); }

Expr Expr::variable(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Var;
    n->hash = mix(2, std::hash<std::string>{}(name));
    n->name = std::move(name);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::function(std::string name, Expr arg) {
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Func;
    n->hash = mix(mix(3, std::hash<std::string>{}(name)), arg.hash());
    n->name = std::move(name);
    n->ops.push_back(std::move(arg));
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::exp(Expr arg) {
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Exp;
    n->hash = mix(4, arg.hash());
    n->ops.push_back(std::move(arg));
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::ln(Expr arg) {
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Ln;
    n->hash = mix(5, arg.hash());
    n->ops.push_back(std::move(arg));
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::power(Expr base, Rational exponent) {
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Pow;
    n->hash = mix(mix(6, base.hash()), hash_rational(exponent));
    n->value = std::move(exponent);
    n->ops.push_back(std::move(base));
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::sum(std::vector<Expr> terms) {
    if (terms.empty()) return Expr(0);
    if (terms.size() == 1) return terms.front();
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Sum;
    std::size_t h = 7;
    for (const auto& t : terms) h = mix(h, t.hash());
    n->hash = h;
    n->ops = std::move(terms);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::product(std::vector<Expr> factors) {
    if (factors.empty()) return Expr(1);
    if (factors.size() == 1) return factors.front();
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Prod;
    std::size_t h = 8;
    for (const auto& f : factors) h = mix(h, f.hash());
    n->hash = h;
    n->ops = std::move(factors);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

ExprKind Expr::kind() const { return node_->kind; }
const Rational& Expr::value() const { return node_->value; }
const Rational& Expr::exponent() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
const std::vector<Expr>& Expr::operands() const { return node_->ops; }
const Expr& Expr::arg() const { return node_->ops.front(); }
bool Expr::is_const(const Rational& v) const { return kind() == ExprKind::Const && value() == v; }
std::size_t Expr::hash() const { return node_->hash; }

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash()) return false;
    return compare(a, b) == 0;
}

int compare(const Expr& a, const Expr& b) {
    if (a.kind() != b.kind()) return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
    switch (a.kind()) {
        case ExprKind::Const:
            return a.value() < b.value() ? -1 : (a.value() > b.value() ? 1 : 0);
        case ExprKind::Var:
            return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
        case ExprKind::Func: {
            int c = a.name().compare(b.name());
            if (c != 0) return c < 0 ? -1 : 1;
            return compare(a.arg(), b.arg());
        }
        case ExprKind::Ln:
        case ExprKind::Exp:
            return compare(a.arg(), b.arg());
        case ExprKind::Pow: {
            int c = compare(a.arg(), b.arg());
            if (c != 0) return c;
            return a.exponent() < b.exponent() ? -1 : (a.exponent() > b.exponent() ? 1 : 0);
        }
        case ExprKind::Prod:
        case ExprKind::Sum: {
            const auto& x = a.operands();
            const auto& y = b.operands();
            std::size_t n = std::min(x.size(), y.size());
            for (std::size_t i = 0; i < n; ++i) {
                int c = compare(x[i], y[i]);
                if (c != 0) return c;
            }
            if (x.size() == y.size()) return 0;
            return x.size() < y.size() ? -1 : 1;
        }
    }
    return 0;
}

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_const(0)) return b;
    if (b.is_const(0)) return a;
    if (a.is_const() && b.is_const()) return Expr(a.value() + b.value());
    std::vector<Expr> terms;
    for (const Expr* e : {&a, &b}) {
        if (e->kind() == ExprKind::Sum) {
            terms.insert(terms.end(), e->operands().begin(), e->operands().end());
        } else {
            terms.push_back(*e);
        }
    }
    return Expr::sum(std::move(terms));
}

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_const(0) || b.is_const(0)) return Expr(0);
    if (a.is_const(1)) return b;
    if (b.is_const(1)) return a;
    if (a.is_const() && b.is_const()) return Expr(a.value() * b.value());
    std::vector<Expr> factors;
    for (const Expr* e : {&a, &b}) {
        if (e->kind() == ExprKind::Prod) {
            factors.insert(factors.end(), e->operands().begin(), e->operands().end());
        } else {
            factors.push_back(*e);
        }
    }
    return Expr::product(std::move(factors));
}

Expr operator-(const Expr& a) {
    if (a.is_const()) return Expr(Rational(-a.value()));
    return Expr(-1) * a;
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_const() && b.value() != 0) return a * Expr(Rational(1) / b.value());
    return a * pow(b, Rational(-1));
}

Expr pow(const Expr& base, const Rational& exponent) {
    if (exponent == 0) return Expr(1);
    if (exponent == 1) return base;
    if (base.is_const()) {
        if (auto exact = exact_power(base.value(), exponent)) return Expr(*exact);
    }
    return Expr::power(base, exponent);
}

Expr pow(const Expr& base, const Expr& exponent) {
    if (exponent.is_const()) return pow(base, exponent.value());
    return Expr::exp(exponent * Expr::ln(base));
}

Expr exp(const Expr& arg) { return Expr::exp(arg); }
Expr ln(const Expr& arg) { return Expr::ln(arg); }
Expr var(std::string_view name) { return Expr::variable(std::string(name)); }
Expr call(std::string_view name, const Expr& arg) {
    if (name == "exp") return Expr::exp(arg);
    if (name == "ln") return Expr::ln(arg);
    return Expr::function(std::string(name), arg);
}

bool is_reserved_variable(std::string_view name) { return reserved_variables().count(name) > 0; }
bool is_reserved_function(std::string_view name) { return reserved_functions().count(name) > 0; }

void SymbolTable::define_function(const std::string& name, FunctionSymbol symbol) {
    functions_[name] = std::move(symbol);
}

void SymbolTable::define_antiderivative(const std::string& name, const std::string& integrand,
                                        std::function<double(double)> evaluate,
                                        std::function<std::optional<Expr>(const Expr&)> closed_form) {
    if (!find_function(integrand)) throw UnregisteredSymbolError(integrand);
    FunctionSymbol symbol;
    symbol.derivative = [integrand](const Expr& arg) { return Expr::function(integrand, arg); };
    symbol.evaluate = std::move(evaluate);
    symbol.closed_form = std::move(closed_form);
    functions_[name] = std::move(symbol);
}

void SymbolTable::set_parameter(const std::string& name, double value) { parameters_[name] = value; }
void SymbolTable::declare_variable(const std::string& name) { variables_.insert(name); }

const FunctionSymbol* SymbolTable::find_function(std::string_view name) const {
    auto it = functions_.find(name);
    return it == functions_.end() ? nullptr : &it->second;
}

std::optional<double> SymbolTable::parameter(std::string_view name) const {
    auto it = parameters_.find(name);
    if (it == parameters_.end()) return std::nullopt;
    return it->second;
}

bool SymbolTable::knows_identifier(std::string_view name) const {
    return parameters_.count(name) > 0 || variables_.count(name) > 0 || functions_.count(name) > 0;
}

double eval(const Expr& e, const Bindings& bindings, const SymbolTable& symbols) {
    switch (e.kind()) {
        case ExprKind::Const:
            return to_double(e.value());
        case ExprKind::Var: {
            auto it = bindings.find(e.name());
            if (it != bindings.end()) return it->second;
            if (auto p = symbols.parameter(e.name())) return *p;
            throw UnboundVariableError(e.name());
        }
        case ExprKind::Sum: {
            double s = 0.0;
            for (const auto& t : e.operands()) s += eval(t, bindings, symbols);
            return checked(s, "sum");
        }
        case ExprKind::Prod: {
            double p = 1.0;
            for (const auto& f : e.operands()) p *= eval(f, bindings, symbols);
            return checked(p, "product");
        }
        case ExprKind::Pow: {
            double x = eval(e.arg(), bindings, symbols);
            const Rational& r = e.exponent();
            if (x == 0.0 && r < 0) throw DomainError("division by zero in " + unparse(e));
            if (is_integer(r)) return checked(std::pow(x, to_double(r)), "power");
            if (x < 0.0) throw DomainError("non-integer power of negative base in " + unparse(e));
            if (r == Rational(1, 2)) return std::sqrt(x);
            return checked(std::pow(x, to_double(r)), "power");
        }
        case ExprKind::Exp:
            return checked(std::exp(eval(e.arg(), bindings, symbols)), "exp");
        case ExprKind::Ln: {
            double x = eval(e.arg(), bindings, symbols);
            if (!(x > 0.0)) throw DomainError("ln of non-positive argument in " + unparse(e));
            return std::log(x);
        }
        case ExprKind::Func: {
            const FunctionSymbol* f = symbols.find_function(e.name());
            if (!f || !f->evaluate) throw UnregisteredSymbolError(e.name());
            return checked(f->evaluate(eval(e.arg(), bindings, symbols)), e.name().c_str());
        }
    }
    throw DomainError("invalid expression node");
}

namespace {

template <typename Fn>
Expr rebuild(const Expr& e, Fn&& fn) {
    switch (e.kind()) {
        case ExprKind::Const:
        case ExprKind::Var:
            return e;
        case ExprKind::Func:
            return Expr::function(e.name(), fn(e.arg()));
        case ExprKind::Exp:
            return Expr::exp(fn(e.arg()));
        case ExprKind::Ln:
            return Expr::ln(fn(e.arg()));
        case ExprKind::Pow:
            return Expr::power(fn(e.arg()), e.exponent());
        case ExprKind::Sum:
        case ExprKind::Prod: {
            std::vector<Expr> ops;
            ops.reserve(e.operands().size());
            for (const auto& o : e.operands()) ops.push_back(fn(o));
            return e.kind() == ExprKind::Sum ? Expr::sum(std::move(ops)) : Expr::product(std::move(ops));
        }
    }
    return e;
}

void collect_variables(const Expr& e, std::set<std::string>& out) {
    if (e.kind() == ExprKind::Var) {
        out.insert(e.name());
        return;
    }
    for (const auto& o : e.operands()) collect_variables(o, out);
}

}  // namespace

Expr substitute(const Expr& e, std::string_view variable, const Expr& replacement) {
    if (e.kind() == ExprKind::Var) return e.name() == variable ? replacement : e;
    return rebuild(e, [&](const Expr& c) { return substitute(c, variable, replacement); });
}

Expr inline_functions(const Expr& e, const SymbolTable& symbols) {
    Expr rebuilt = rebuild(e, [&](const Expr& c) { return inline_functions(c, symbols); });
    if (rebuilt.kind() == ExprKind::Func) {
        const FunctionSymbol* f = symbols.find_function(rebuilt.name());
        if (f && f->closed_form) {
            if (auto form = f->closed_form(rebuilt.arg())) return *form;
        }
    }
    return rebuilt;
}

std::set<std::string> free_variables(const Expr& e) {
    std::set<std::string> out;
    collect_variables(e, out);
    return out;
}

bool depends_on(const Expr& e, std::string_view variable) {
    if (e.kind() == ExprKind::Var) return e.name() == variable;
    for (const auto& o : e.operands()) {
        if (depends_on(o, variable)) return true;
    }
    return false;
}

}  // namespace radsym
