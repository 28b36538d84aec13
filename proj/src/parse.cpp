#include "radsym/errors.hpp"
#include "radsym/expr.hpp"

#include <cctype>

namespace radsym {

namespace {

class Parser {
public:
    Parser(std::string_view text, const SymbolTable* symbols) : text_(text), symbols_(symbols) {}

    Expr run() {
        Expr e = expression();
        skip_space();
        if (pos_ != text_.size()) throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
        return e;
    }

private:
    std::string_view text_;
    const SymbolTable* symbols_;
    std::size_t pos_ = 0;

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    // expression := term (('+' | '-') term)*
    Expr expression() {
        Expr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = lhs + term();
            } else if (accept('-')) {
                lhs = lhs - term();
            } else {
                return lhs;
            }
        }
    }

    // term := unary (('*' | '/') unary)*
    Expr term() {
        Expr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = lhs * unary();
            } else if (accept('/')) {
                Expr rhs = unary();
                if (rhs.is_const(0)) throw ParseError("division by literal zero", pos_);
                lhs = lhs / rhs;
            } else {
                return lhs;
            }
        }
    }

    // unary := '-' unary | power
    Expr unary() {
        if (accept('-')) return -unary();
        return power();
    }

    // power := primary ('^' unary)?   (right associative through unary)
    Expr power() {
        Expr base = primary();
        if (accept('^')) {
            std::size_t at = pos_;
            Expr exponent = unary();
            if (exponent.is_const() && base.is_const(0) && exponent.value() < 0) {
                throw ParseError("zero raised to a negative power", at);
            }
            return pow(base, exponent);
        }
        return base;
    }

    Expr primary() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (c == '(') {
            ++pos_;
            Expr inner = expression();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return inner;
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    Expr number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            std::size_t frac = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (frac == pos_ && frac - 1 == start) throw ParseError("malformed number", start);
        }
        return Expr(parse_rational(text_.substr(start, pos_ - start)));
    }

    Expr identifier() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        std::string name(text_.substr(start, pos_ - start));
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            bool known = is_reserved_function(name) || (symbols_ && symbols_->find_function(name));
            if (!known) throw UnknownSymbolError(name, start);
            ++pos_;
            Expr arg = expression();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return call(name, arg);
        }
        if (is_reserved_function(name)) throw ParseError("function '" + name + "' requires an argument", pos_);
        if (symbols_ && !is_reserved_variable(name) && !symbols_->knows_identifier(name)) {
            throw UnknownSymbolError(name, start);
        }
        return Expr::variable(name);
    }
};

enum Level { kSum = 1, kProd = 2, kUnary = 3, kPow = 4, kAtom = 5 };

struct Rendered {
    std::string text;
    int level;
};

Rendered render(const Expr& e);

std::string at_least(const Expr& e, int level) {
    Rendered r = render(e);
    if (r.level < level) return "(" + r.text + ")";
    return r.text;
}

Rendered render_const(const Rational& v) {
    if (is_integer(v)) return {to_string(v), v < 0 ? kUnary : kAtom};
    return {to_string(v), kProd};
}

bool negative_coefficient(const Expr& e) {
    if (e.is_const()) return e.value() < 0;
    if (e.kind() == ExprKind::Prod && e.operands().front().is_const()) return e.operands().front().value() < 0;
    return false;
}

Rendered render_product(const Expr& e) {
    Rational coef = 1;
    std::vector<Expr> numer;
    std::vector<Expr> denom;
    for (const auto& f : e.operands()) {
        if (f.is_const()) {
            coef *= f.value();
        } else if (f.kind() == ExprKind::Pow && f.exponent() < 0) {
            denom.push_back(pow(f.arg(), Rational(-f.exponent())));
        } else {
            numer.push_back(f);
        }
    }
    bool negative = coef < 0;
    if (negative) coef = -coef;
    std::string text;
    auto join = [](const std::vector<Expr>& items) {
        std::string s;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) s += "*";
            s += at_least(items[i], kUnary + 1);
        }
        return s;
    };
    Integer num = numerator(coef);
    Integer den = denominator(coef);
    if (num != 1 || numer.empty()) {
        text = num.str();
        if (!numer.empty()) text += "*" + join(numer);
    } else {
        text = join(numer);
    }
    if (den != 1) denom.insert(denom.begin(), Expr(Rational(den)));
    if (!denom.empty()) {
        if (denom.size() == 1) {
            text += "/" + at_least(denom.front(), kUnary + 1);
        } else {
            text += "/(" + join(denom) + ")";
        }
    }
    if (negative) return {"-" + text, kUnary};
    return {text, denom.empty() && numer.size() + (num != 1 ? 1 : 0) <= 1 ? kPow : kProd};
}

Rendered render(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Const:
            return render_const(e.value());
        case ExprKind::Var:
            return {e.name(), kAtom};
        case ExprKind::Func:
            return {e.name() + "(" + render(e.arg()).text + ")", kAtom};
        case ExprKind::Exp:
            return {"exp(" + render(e.arg()).text + ")", kAtom};
        case ExprKind::Ln:
            return {"ln(" + render(e.arg()).text + ")", kAtom};
        case ExprKind::Pow: {
            std::string base = at_least(e.arg(), kAtom);
            const Rational& r = e.exponent();
            std::string ex = (is_integer(r) && r >= 0) ? to_string(r) : "(" + to_string(r) + ")";
            return {base + "^" + ex, kPow};
        }
        case ExprKind::Prod:
            return render_product(e);
        case ExprKind::Sum: {
            std::string text;
            bool first = true;
            for (const auto& term : e.operands()) {
                if (first) {
                    text = at_least(term, kSum);
                    first = false;
                } else if (negative_coefficient(term)) {
                    text += " - " + at_least(-term, kProd);
                } else {
                    text += " + " + at_least(term, kProd);
                }
            }
            return {text, kSum};
        }
    }
    return {"?", kAtom};
}

}  // namespace

Expr parse(std::string_view text, const SymbolTable* symbols) { return Parser(text, symbols).run(); }

std::string unparse(const Expr& e) { return render(e).text; }

std::string tree_string(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Const:
            return to_string(e.value());
        case ExprKind::Var:
            return e.name();
        case ExprKind::Func:
            return e.name() + "(" + tree_string(e.arg()) + ")";
        case ExprKind::Exp:
            return "Exp(" + tree_string(e.arg()) + ")";
        case ExprKind::Ln:
            return "Ln(" + tree_string(e.arg()) + ")";
        case ExprKind::Pow:
            return "Pow(" + tree_string(e.arg()) + "," + to_string(e.exponent()) + ")";
        case ExprKind::Sum:
        case ExprKind::Prod: {
            std::string s = e.kind() == ExprKind::Sum ? "Sum(" : "Prod(";
            for (std::size_t i = 0; i < e.operands().size(); ++i) {
                if (i) s += ",";
                s += tree_string(e.operands()[i]);
            }
            return s + ")";
        }
    }
    return "?";
}

}  // namespace radsym
