#include "radsym/errors.hpp"
#include "radsym/expr.hpp"

#include <cmath>

namespace radsym {

namespace {

Expr raw_diff(const Expr& e, std::string_view v, const SymbolTable& symbols) {
    switch (e.kind()) {
        case ExprKind::Const:
            return Expr(0);
        case ExprKind::Var:
            return Expr(e.name() == v ? 1 : 0);
        case ExprKind::Sum: {
            Expr out(0);
            for (const auto& t : e.operands()) out = out + raw_diff(t, v, symbols);
            return out;
        }
        case ExprKind::Prod: {
            const auto& f = e.operands();
            Expr out(0);
            for (std::size_t i = 0; i < f.size(); ++i) {
                Expr d = raw_diff(f[i], v, symbols);
                if (d.is_const(0)) continue;
                Expr term = d;
                for (std::size_t j = 0; j < f.size(); ++j) {
                    if (j != i) term = term * f[j];
                }
                out = out + term;
            }
            return out;
        }
        case ExprKind::Pow: {
            Expr d = raw_diff(e.arg(), v, symbols);
            if (d.is_const(0)) return Expr(0);
            const Rational& r = e.exponent();
            return Expr(r) * pow(e.arg(), Rational(r - 1)) * d;
        }
        case ExprKind::Exp: {
            Expr d = raw_diff(e.arg(), v, symbols);
            if (d.is_const(0)) return Expr(0);
            return e * d;
        }
        case ExprKind::Ln: {
            Expr d = raw_diff(e.arg(), v, symbols);
            if (d.is_const(0)) return Expr(0);
            return d * pow(e.arg(), Rational(-1));
        }
        case ExprKind::Func: {
            Expr d = raw_diff(e.arg(), v, symbols);
            if (d.is_const(0)) return Expr(0);
            const FunctionSymbol* f = symbols.find_function(e.name());
            if (!f || !f->derivative) throw UnregisteredSymbolError(e.name());
            return f->derivative(e.arg()) * d;
        }
    }
    return Expr(0);
}

}  // namespace

Expr diff(const Expr& e, std::string_view variable, const SymbolTable& symbols) {
    return simplify(raw_diff(e, variable, symbols));
}

std::string to_string(ZeroPath path) {
    switch (path) {
        case ZeroPath::NormalForm:
            return "normal-form";
        case ZeroPath::Sampling:
            return "sampling";
        case ZeroPath::NotZero:
            return "not-zero";
    }
    return "unknown";
}

ZeroCheck recognize_zero(const Expr& e, const SymbolTable& symbols, const PointSampler& sampler,
                         std::uint64_t seed, int samples, double threshold, const Assumptions& assumptions) {
    ZeroCheck result;
    Expr normal = simplify(e, assumptions);
    if (normal.is_const(0)) {
        result.zero = true;
        result.path = ZeroPath::NormalForm;
        return result;
    }
    std::vector<Expr> terms = normal.kind() == ExprKind::Sum ? normal.operands() : std::vector<Expr>{normal};
    std::mt19937_64 rng(seed);
    int accepted = 0;
    int attempts = 0;
    bool all_small = true;
    while (accepted < samples) {
        if (++attempts > samples * 50) throw DomainError("could not find admissible sample points for " + unparse(normal));
        Bindings point = sampler(rng);
        double total = 0.0;
        double scale = 0.0;
        try {
            for (const auto& t : terms) {
                double value = eval(t, point, symbols);
                total += value;
                scale += std::fabs(value);
            }
        } catch (const DomainError&) {
            continue;
        }
        ++accepted;
        double relative = std::fabs(total) / (1.0 + scale);
        if (std::fabs(total) > result.max_abs) {
            result.max_abs = std::fabs(total);
            result.worst_point = point;
        }
        result.max_relative = std::max(result.max_relative, relative);
        if (relative > threshold) all_small = false;
    }
    result.zero = all_small;
    result.path = all_small ? ZeroPath::Sampling : ZeroPath::NotZero;
    return result;
}

}  // namespace radsym
