#pragma once

#include "radsym/rational.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace radsym {

enum class ExprKind : std::uint8_t { Const, Var, Func, Ln, Exp, Pow, Prod, Sum };

/// Immutable expression tree with shared subtrees.
///
/// Negation is a product with -1 and division a power with exponent -1, so
/// the node set stays small: exact rational constants, variables, sums,
/// products, rational powers, exp, ln and named unary function symbols.
class Expr {
public:
    Expr();
    Expr(int value);  // NOLINT(google-explicit-constructor)
    Expr(Rational value);  // NOLINT(google-explicit-constructor)

    static Expr constant(Rational value);
    static Expr variable(std::string name);
    static Expr function(std::string name, Expr arg);
    static Expr exp(Expr arg);
    static Expr ln(Expr arg);
    static Expr power(Expr base, Rational exponent);
    static Expr sum(std::vector<Expr> terms);
    static Expr product(std::vector<Expr> factors);

    ExprKind kind() const;
    /// Constant value; only for Const nodes.
    const Rational& value() const;
    /// Exponent; only for Pow nodes.
    const Rational& exponent() const;
    /// Variable or function name.
    const std::string& name() const;
    /// Children: terms, factors, or the single argument/base.
    const std::vector<Expr>& operands() const;
    const Expr& arg() const;

    bool is_const() const { return kind() == ExprKind::Const; }
    bool is_const(const Rational& v) const;
    std::size_t hash() const;

    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

/// Total order used for canonical operand ordering.
int compare(const Expr& a, const Expr& b);

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Rational& exponent);
/// Rational exponents give a Pow node; anything else becomes exp(e*ln(b)).
Expr pow(const Expr& base, const Expr& exponent);
Expr exp(const Expr& arg);
Expr ln(const Expr& arg);
Expr var(std::string_view name);
Expr call(std::string_view name, const Expr& arg);

/// Names that are always accepted by the parser.
bool is_reserved_variable(std::string_view name);
bool is_reserved_function(std::string_view name);

using Bindings = std::map<std::string, double, std::less<>>;

/// One registered unary function symbol.
struct FunctionSymbol {
    /// d/dx f(x), as an expression in the argument.
    std::function<Expr(const Expr& arg)> derivative;
    /// Numeric value; throws DomainError outside the symbol's domain.
    std::function<double(double)> evaluate;
    /// Optional explicit form used by inline_functions.
    std::function<std::optional<Expr>(const Expr& arg)> closed_form;
};

/// Function symbols with derivative rules and evaluators, plus numeric
/// parameter values and extra declared variables.
class SymbolTable {
public:
    void define_function(const std::string& name, FunctionSymbol symbol);
    /// Registers `name` with derivative `integrand(arg)`; the integrand must
    /// already be registered, so J' = K holds whenever J exists.
    void define_antiderivative(const std::string& name, const std::string& integrand,
                               std::function<double(double)> evaluate,
                               std::function<std::optional<Expr>(const Expr&)> closed_form = {});
    void set_parameter(const std::string& name, double value);
    void declare_variable(const std::string& name);

    const FunctionSymbol* find_function(std::string_view name) const;
    std::optional<double> parameter(std::string_view name) const;
    bool knows_identifier(std::string_view name) const;

private:
    std::map<std::string, FunctionSymbol, std::less<>> functions_;
    std::map<std::string, double, std::less<>> parameters_;
    std::set<std::string, std::less<>> variables_;
};

/// Symbols assumed strictly positive by simplify (enables ln and power rules).
struct Assumptions {
    std::set<std::string, std::less<>> positive{"z", "t", "eta"};
};

/// Parses infix text. Without a table any identifier is an opaque parameter;
/// with a table, identifiers must be reserved or declared there.
Expr parse(std::string_view text, const SymbolTable* symbols = nullptr);
/// Parseable infix rendering; parse(unparse(e)) evaluates identically to e.
std::string unparse(const Expr& e);
/// Structural rendering such as Sum(Pow(z,2),Prod(2,z)).
std::string tree_string(const Expr& e);

/// Normal form: flattened, like terms and powers collected, constants
/// folded, products over sums distributed (bounded), exp/ln merged.
Expr simplify(const Expr& e, const Assumptions& assumptions = {});
/// Exact partial derivative, simplified. Function symbols use the table's rules.
Expr diff(const Expr& e, std::string_view variable, const SymbolTable& symbols);
/// Numeric value. Throws UnboundVariableError, UnregisteredSymbolError or
/// DomainError; never returns NaN.
double eval(const Expr& e, const Bindings& bindings, const SymbolTable& symbols);
Expr substitute(const Expr& e, std::string_view variable, const Expr& replacement);
/// Replaces registered function symbols that have closed forms.
Expr inline_functions(const Expr& e, const SymbolTable& symbols);
std::set<std::string> free_variables(const Expr& e);
bool depends_on(const Expr& e, std::string_view variable);

enum class ZeroPath { NormalForm, Sampling, NotZero };
std::string to_string(ZeroPath path);

struct ZeroCheck {
    bool zero = false;
    ZeroPath path = ZeroPath::NotZero;
    /// Largest |value| seen when sampling (0 when the normal form decided).
    double max_abs = 0.0;
    /// Largest |value| relative to the magnitude of the additive terms.
    double max_relative = 0.0;
    Bindings worst_point;
};

/// Draws one sample point for zero recognition.
using PointSampler = std::function<Bindings(std::mt19937_64&)>;

/// Normal form first, then `samples` random points: zero when every point
/// satisfies |e| <= threshold * (1 + sum of |additive terms|). Points whose
/// evaluation raises a DomainError are redrawn.
ZeroCheck recognize_zero(const Expr& e, const SymbolTable& symbols, const PointSampler& sampler,
                         std::uint64_t seed, int samples = 20, double threshold = 1e-10,
                         const Assumptions& assumptions = {});

}  // namespace radsym
