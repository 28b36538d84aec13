#include "radsym/expr.hpp"

#include <algorithm>
#include <map>

namespace radsym {

namespace {

constexpr std::size_t kExpansionLimit = 256;
constexpr int kMaxPasses = 12;

class Simplifier {
public:
    explicit Simplifier(const Assumptions& assumptions) : assume_(assumptions) {}

    Expr run(const Expr& e) {
        switch (e.kind()) {
            case ExprKind::Const:
            case ExprKind::Var:
                return e;
            case ExprKind::Func:
                return Expr::function(e.name(), run(e.arg()));
            case ExprKind::Exp:
                return exponential(run(e.arg()));
            case ExprKind::Ln:
                return logarithm(run(e.arg()));
            case ExprKind::Pow:
                return power(run(e.arg()), e.exponent());
            case ExprKind::Sum: {
                std::vector<Expr> terms;
                for (const auto& t : e.operands()) terms.push_back(run(t));
                return sum(std::move(terms));
            }
            case ExprKind::Prod: {
                std::vector<Expr> factors;
                for (const auto& f : e.operands()) factors.push_back(run(f));
                return product(std::move(factors));
            }
        }
        return e;
    }

    bool positive(const Expr& e) const {
        switch (e.kind()) {
            case ExprKind::Const:
                return e.value() > 0;
            case ExprKind::Var:
                return assume_.positive.count(e.name()) > 0;
            case ExprKind::Exp:
                return true;
            case ExprKind::Pow:
                return positive(e.arg());
            case ExprKind::Prod:
            case ExprKind::Sum:
                return std::all_of(e.operands().begin(), e.operands().end(),
                                   [&](const Expr& o) { return positive(o); });
            default:
                return false;
        }
    }

    // Inputs are normal forms.
    Expr sum(std::vector<Expr> input) {
        std::vector<Expr> terms;
        for (auto& t : input) {
            if (t.kind() == ExprKind::Sum) {
                terms.insert(terms.end(), t.operands().begin(), t.operands().end());
            } else {
                terms.push_back(std::move(t));
            }
        }
        Rational constant = 0;
        std::map<Expr, Rational, ExprLess> collected;
        for (const auto& t : terms) {
            if (t.is_const()) {
                constant += t.value();
                continue;
            }
            auto [coef, key] = split_coefficient(t);
            collected[key] += coef;
        }
        std::vector<Expr> out;
        if (constant != 0) out.emplace_back(constant);
        for (const auto& [key, coef] : collected) {
            if (coef == 0) continue;
            out.push_back(with_coefficient(coef, key));
        }
        std::sort(out.begin(), out.end(), ExprLess{});
        if (out.empty()) return Expr(0);
        if (out.size() == 1) return out.front();
        return Expr::sum(std::move(out));
    }

    Expr product(std::vector<Expr> input) {
        std::vector<Expr> factors;
        for (auto& f : input) {
            if (f.kind() == ExprKind::Prod) {
                factors.insert(factors.end(), f.operands().begin(), f.operands().end());
            } else {
                factors.push_back(std::move(f));
            }
        }
        // Merge exp factors first; pulled-out ln terms come back as powers.
        std::vector<Expr> exp_args;
        std::vector<Expr> rest;
        for (auto& f : factors) {
            if (f.is_const(0)) return Expr(0);
            if (f.kind() == ExprKind::Exp) {
                exp_args.push_back(f.arg());
            } else {
                rest.push_back(std::move(f));
            }
        }
        if (!exp_args.empty()) {
            Expr merged = exp_args.size() == 1 ? exponential(exp_args.front()) : exponential(sum(exp_args));
            if (merged.kind() == ExprKind::Prod) {
                rest.insert(rest.end(), merged.operands().begin(), merged.operands().end());
            } else if (!merged.is_const(1)) {
                rest.push_back(merged);
            }
        }
        Rational coef = 1;
        std::map<Expr, Rational, ExprLess> powers;
        std::vector<Expr> others;
        for (const auto& f : rest) {
            if (f.is_const()) {
                coef *= f.value();
            } else if (f.kind() == ExprKind::Pow) {
                powers[f.arg()] += f.exponent();
            } else if (f.kind() == ExprKind::Exp) {
                others.push_back(f);
            } else {
                powers[f] += 1;
            }
        }
        if (coef == 0) return Expr(0);
        std::vector<Expr> out = others;
        for (const auto& [base, r] : powers) {
            if (r == 0) continue;
            Expr p = power(base, r);
            if (p.is_const()) {
                coef *= p.value();
            } else if (p.kind() == ExprKind::Prod) {
                for (const auto& q : p.operands()) {
                    if (q.is_const()) {
                        coef *= q.value();
                    } else {
                        out.push_back(q);
                    }
                }
            } else {
                out.push_back(p);
            }
        }
        if (coef == 0) return Expr(0);
        // Distribute over sums when the expansion stays small.
        std::size_t combos = 1;
        bool has_sum = false;
        for (const auto& f : out) {
            if (f.kind() == ExprKind::Sum) {
                has_sum = true;
                combos *= f.operands().size();
            }
        }
        if (has_sum && combos <= kExpansionLimit) {
            std::vector<std::vector<Expr>> partial{{Expr(coef)}};
            for (const auto& f : out) {
                std::vector<std::vector<Expr>> next;
                if (f.kind() == ExprKind::Sum) {
                    for (const auto& p : partial) {
                        for (const auto& t : f.operands()) {
                            auto q = p;
                            q.push_back(t);
                            next.push_back(std::move(q));
                        }
                    }
                } else {
                    for (auto p : partial) {
                        p.push_back(f);
                        next.push_back(std::move(p));
                    }
                }
                partial = std::move(next);
            }
            std::vector<Expr> terms;
            for (auto& p : partial) terms.push_back(product(std::move(p)));
            return sum(std::move(terms));
        }
        std::sort(out.begin(), out.end(), ExprLess{});
        if (out.empty()) return Expr(coef);
        if (coef == 1 && out.size() == 1) return out.front();
        if (coef != 1) out.insert(out.begin(), Expr(coef));
        return Expr::product(std::move(out));
    }

    Expr power(const Expr& base, const Rational& r) {
        if (r == 0) return Expr(1);
        if (r == 1) return base;
        switch (base.kind()) {
            case ExprKind::Const: {
                if (base.value() == 1) return Expr(1);
                if (auto exact = exact_power(base.value(), r)) return Expr(*exact);
                // Split off the integer part of the exponent: 2^(3/2) = 2*2^(1/2).
                Rational whole = Rational(numerator(r) / denominator(r));
                Rational frac = r - whole;
                if (frac < 0) {
                    frac += 1;
                    whole -= 1;
                }
                if (whole != 0 && base.value() != 0) {
                    if (auto w = exact_power(base.value(), whole)) {
                        return Expr::product({Expr(*w), Expr::power(base, frac)});
                    }
                }
                return Expr::power(base, r);
            }
            case ExprKind::Pow: {
                if (is_integer(r) || positive(base.arg())) return power(base.arg(), base.exponent() * r);
                return Expr::power(base, r);
            }
            case ExprKind::Prod: {
                bool all_positive = true;
                for (const auto& f : base.operands()) {
                    if (!positive(f)) all_positive = false;
                }
                if (!is_integer(r) && !all_positive) {
                    // Positive factors can still be pulled out.
                    std::vector<Expr> pulled;
                    std::vector<Expr> kept;
                    for (const auto& f : base.operands()) {
                        if (positive(f)) {
                            pulled.push_back(power(f, r));
                        } else {
                            kept.push_back(f);
                        }
                    }
                    if (pulled.empty()) return Expr::power(base, r);
                    Expr kept_base = kept.size() == 1 ? kept.front() : Expr::product(kept);
                    pulled.push_back(Expr::power(kept_base, r));
                    return product(std::move(pulled));
                }
                std::vector<Expr> factors;
                for (const auto& f : base.operands()) factors.push_back(power(f, r));
                return product(std::move(factors));
            }
            case ExprKind::Exp:
                return exponential(product({Expr(r), base.arg()}));
            case ExprKind::Sum: {
                if (is_integer(r) && r > 1 && r <= 8) {
                    long long n = numerator(r).convert_to<long long>();
                    std::size_t terms = base.operands().size();
                    std::size_t total = 1;
                    for (long long i = 0; i < n; ++i) total *= terms;
                    if (total <= kExpansionLimit) {
                        Expr result = base;
                        for (long long i = 1; i < n; ++i) {
                            std::vector<Expr> terms;
                            const auto& left = result.kind() == ExprKind::Sum ? result.operands()
                                                                               : std::vector<Expr>{result};
                            for (const auto& a : left) {
                                for (const auto& b : base.operands()) terms.push_back(product({a, b}));
                            }
                            result = sum(std::move(terms));
                        }
                        return result;
                    }
                }
                return Expr::power(base, r);
            }
            default:
                return Expr::power(base, r);
        }
    }

    Expr exponential(const Expr& a) {
        if (a.is_const(0)) return Expr(1);
        if (a.kind() == ExprKind::Ln) return a.arg();
        std::vector<Expr> terms = a.kind() == ExprKind::Sum ? a.operands() : std::vector<Expr>{a};
        std::vector<Expr> pulled;
        std::vector<Expr> remaining;
        for (const auto& t : terms) {
            if (t.kind() == ExprKind::Ln) {
                pulled.push_back(t.arg());
            } else if (t.kind() == ExprKind::Prod && t.operands().size() == 2 && t.operands()[0].is_const() &&
                       t.operands()[1].kind() == ExprKind::Ln) {
                pulled.push_back(power(t.operands()[1].arg(), t.operands()[0].value()));
            } else {
                remaining.push_back(t);
            }
        }
        if (pulled.empty()) return Expr::exp(a);
        if (!remaining.empty()) {
            Expr rest = remaining.size() == 1 ? remaining.front() : Expr::sum(remaining);
            pulled.push_back(Expr::exp(rest));
        }
        return product(std::move(pulled));
    }

    Expr logarithm(const Expr& x) {
        if (x.is_const(1)) return Expr(0);
        if (x.kind() == ExprKind::Exp) return x.arg();
        if (x.kind() == ExprKind::Pow && positive(x.arg())) {
            return product({Expr(x.exponent()), logarithm(x.arg())});
        }
        if (x.kind() == ExprKind::Prod && positive(x)) {
            std::vector<Expr> terms;
            for (const auto& f : x.operands()) terms.push_back(logarithm(f));
            return sum(std::move(terms));
        }
        return Expr::ln(x);
    }

private:
    const Assumptions& assume_;

    static std::pair<Rational, Expr> split_coefficient(const Expr& t) {
        if (t.kind() == ExprKind::Prod && t.operands().front().is_const()) {
            std::vector<Expr> rest(t.operands().begin() + 1, t.operands().end());
            Expr key = rest.size() == 1 ? rest.front() : Expr::product(std::move(rest));
            return {t.operands().front().value(), key};
        }
        return {Rational(1), t};
    }

    static Expr with_coefficient(const Rational& coef, const Expr& key) {
        if (coef == 1) return key;
        std::vector<Expr> factors{Expr(coef)};
        if (key.kind() == ExprKind::Prod) {
            factors.insert(factors.end(), key.operands().begin(), key.operands().end());
        } else {
            factors.push_back(key);
        }
        return Expr::product(std::move(factors));
    }
};

}  // namespace

Expr simplify(const Expr& e, const Assumptions& assumptions) {
    Simplifier s(assumptions);
    Expr current = s.run(e);
    for (int pass = 1; pass < kMaxPasses; ++pass) {
        Expr next = s.run(current);
        if (next == current) return current;
        current = next;
    }
    return current;
}

}  // namespace radsym
