#include "hess2/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include "hess2/errors.hpp"

namespace hess2 {
namespace {

using Kind = ExprNode::Kind;
using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_const(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Const;
    n->value = v;
    return n;
}

NodePtr make_var(Var v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Variable;
    n->var = v;
    return n;
}

NodePtr make_unary(Kind k, NodePtr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(a);
    return n;
}

NodePtr make_binary(Kind k, NodePtr a, NodePtr b) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

NodePtr make_pow(NodePtr a, int exponent) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Pow;
    n->lhs = std::move(a);
    n->exponent = exponent;
    return n;
}

NodePtr make_call(Func f, NodePtr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Call;
    n->func = f;
    n->lhs = std::move(a);
    return n;
}

std::string_view func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Exp: return "exp";
        case Func::Log: return "log";
        case Func::Sqrt: return "sqrt";
    }
    return "?";
}

bool is_const(const NodePtr& n, double v) { return n->kind == Kind::Const && n->value == v; }

// ---------------------------------------------------------------- printing

int precedence(const ExprNode& n) {
    switch (n.kind) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        case Kind::Const: return n.value < 0.0 || std::signbit(n.value) ? 3 : 5;
        default: return 5;
    }
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print(const ExprNode& n, std::string& out);

void print_wrapped(const ExprNode& n, bool parens, std::string& out) {
    if (parens) out += '(';
    print(n, out);
    if (parens) out += ')';
}

void print(const ExprNode& n, std::string& out) {
    switch (n.kind) {
        case Kind::Const:
            if (std::signbit(n.value)) {
                out += "(-" + format_number(-n.value) + ")";
            } else {
                out += format_number(n.value);
            }
            return;
        case Kind::Variable: out += to_string(n.var); return;
        case Kind::Neg:
            out += '-';
            print_wrapped(*n.lhs, precedence(*n.lhs) < 3, out);
            return;
        case Kind::Add:
        case Kind::Sub:
        case Kind::Mul:
        case Kind::Div: {
            const int p = precedence(n);
            print_wrapped(*n.lhs, precedence(*n.lhs) < p, out);
            out += n.kind == Kind::Add ? " + " : n.kind == Kind::Sub ? " - "
                 : n.kind == Kind::Mul ? "*" : "/";
            print_wrapped(*n.rhs, precedence(*n.rhs) <= p, out);
            return;
        }
        case Kind::Pow:
            print_wrapped(*n.lhs, precedence(*n.lhs) < 5, out);
            out += '^';
            out += n.exponent < 0 ? "(" + std::to_string(n.exponent) + ")" : std::to_string(n.exponent);
            return;
        case Kind::Call:
            out += func_name(n.func);
            out += '(';
            print(*n.lhs, out);
            out += ')';
            return;
    }
}

std::string print(const ExprNode& n) {
    std::string s;
    print(n, s);
    return s;
}

// ---------------------------------------------------------------- folding

// Evaluates a node whose children are constants; nullopt-like via bool when the
// operation is undefined, so the error surfaces at evaluation time instead.
bool fold_value(const ExprNode& n, double a, double b, double& out) {
    switch (n.kind) {
        case Kind::Neg: out = -a; break;
        case Kind::Add: out = a + b; break;
        case Kind::Sub: out = a - b; break;
        case Kind::Mul: out = a * b; break;
        case Kind::Div:
            if (b == 0.0) return false;
            out = a / b;
            break;
        case Kind::Pow:
            if (a == 0.0 && n.exponent < 0) return false;
            out = std::pow(a, n.exponent);
            break;
        case Kind::Call:
            switch (n.func) {
                case Func::Sin: out = std::sin(a); break;
                case Func::Cos: out = std::cos(a); break;
                case Func::Exp: out = std::exp(a); break;
                case Func::Log:
                    if (!(a > 0.0)) return false;
                    out = std::log(a);
                    break;
                case Func::Sqrt:
                    if (a < 0.0) return false;
                    out = std::sqrt(a);
                    break;
            }
            break;
        default: return false;
    }
    return std::isfinite(out);
}

NodePtr fold_node(const NodePtr& n) {
    switch (n->kind) {
        case Kind::Const:
        case Kind::Variable: return n;
        default: break;
    }
    NodePtr a = n->lhs ? fold_node(n->lhs) : nullptr;
    NodePtr b = n->rhs ? fold_node(n->rhs) : nullptr;

    const bool a_const = a && a->kind == Kind::Const;
    const bool b_const = !b || b->kind == Kind::Const;
    if (a_const && b_const) {
        double v = 0.0;
        if (fold_value(*n, a->value, b ? b->value : 0.0, v)) return make_const(v);
    }

    switch (n->kind) {
        case Kind::Neg:
            return make_unary(Kind::Neg, a);
        case Kind::Add:
            if (is_const(a, 0.0)) return b;
            if (is_const(b, 0.0)) return a;
            return make_binary(Kind::Add, a, b);
        case Kind::Sub:
            if (is_const(b, 0.0)) return a;
            if (is_const(a, 0.0)) return fold_node(make_unary(Kind::Neg, b));
            return make_binary(Kind::Sub, a, b);
        case Kind::Mul:
            if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
            if (is_const(a, 1.0)) return b;
            if (is_const(b, 1.0)) return a;
            if (is_const(a, -1.0)) return make_unary(Kind::Neg, b);
            if (is_const(b, -1.0)) return make_unary(Kind::Neg, a);
            return make_binary(Kind::Mul, a, b);
        case Kind::Div:
            if (is_const(b, 1.0)) return a;
            if (is_const(a, 0.0) && !is_const(b, 0.0)) return make_const(0.0);
            return make_binary(Kind::Div, a, b);
        case Kind::Pow:
            if (n->exponent == 0) return make_const(1.0);
            if (n->exponent == 1) return a;
            return make_pow(a, n->exponent);
        case Kind::Call:
            return make_call(n->func, a);
        default:
            return n;
    }
}

// ---------------------------------------------------------------- differentiation

NodePtr derive(const NodePtr& n, Var v) {
    switch (n->kind) {
        case Kind::Const: return make_const(0.0);
        case Kind::Variable: return make_const(n->var == v ? 1.0 : 0.0);
        case Kind::Neg: return make_unary(Kind::Neg, derive(n->lhs, v));
        case Kind::Add:
        case Kind::Sub: return make_binary(n->kind, derive(n->lhs, v), derive(n->rhs, v));
        case Kind::Mul:
            return make_binary(Kind::Add, make_binary(Kind::Mul, derive(n->lhs, v), n->rhs),
                               make_binary(Kind::Mul, n->lhs, derive(n->rhs, v)));
        case Kind::Div:
            return make_binary(
                Kind::Div,
                make_binary(Kind::Sub, make_binary(Kind::Mul, derive(n->lhs, v), n->rhs),
                            make_binary(Kind::Mul, n->lhs, derive(n->rhs, v))),
                make_pow(n->rhs, 2));
        case Kind::Pow:
            return make_binary(Kind::Mul,
                               make_binary(Kind::Mul, make_const(n->exponent),
                                           make_pow(n->lhs, n->exponent - 1)),
                               derive(n->lhs, v));
        case Kind::Call: {
            const NodePtr& a = n->lhs;
            NodePtr outer;
            switch (n->func) {
                case Func::Sin: outer = make_call(Func::Cos, a); break;
                case Func::Cos: outer = make_unary(Kind::Neg, make_call(Func::Sin, a)); break;
                case Func::Exp: outer = n; break;
                case Func::Log: return make_binary(Kind::Div, derive(a, v), a);
                case Func::Sqrt:
                    return make_binary(Kind::Div, derive(a, v),
                                       make_binary(Kind::Mul, make_const(2.0), n));
            }
            return make_binary(Kind::Mul, outer, derive(a, v));
        }
    }
    return make_const(0.0);
}

// ---------------------------------------------------------------- evaluation

[[noreturn]] void eval_fail(const ExprNode& n, const char* what) {
    throw EvalError(what, print(n));
}

double eval_node(const ExprNode& n, const FPoint& at) {
    double r = 0.0;
    switch (n.kind) {
        case Kind::Const: return n.value;
        case Kind::Variable: return at[n.var];
        case Kind::Neg: return -eval_node(*n.lhs, at);
        case Kind::Add: r = eval_node(*n.lhs, at) + eval_node(*n.rhs, at); break;
        case Kind::Sub: r = eval_node(*n.lhs, at) - eval_node(*n.rhs, at); break;
        case Kind::Mul: r = eval_node(*n.lhs, at) * eval_node(*n.rhs, at); break;
        case Kind::Div: {
            const double num = eval_node(*n.lhs, at);
            const double den = eval_node(*n.rhs, at);
            if (den == 0.0) eval_fail(n, "division by zero");
            r = num / den;
            break;
        }
        case Kind::Pow: {
            const double base = eval_node(*n.lhs, at);
            if (base == 0.0 && n.exponent < 0) eval_fail(n, "zero to a negative power");
            r = std::pow(base, n.exponent);
            break;
        }
        case Kind::Call: {
            const double a = eval_node(*n.lhs, at);
            switch (n.func) {
                case Func::Sin: r = std::sin(a); break;
                case Func::Cos: r = std::cos(a); break;
                case Func::Exp: r = std::exp(a); break;
                case Func::Log:
                    if (!(a > 0.0)) eval_fail(n, "log of a non-positive value");
                    r = std::log(a);
                    break;
                case Func::Sqrt:
                    if (a < 0.0) eval_fail(n, "sqrt of a negative value");
                    r = std::sqrt(a);
                    break;
            }
            break;
        }
    }
    if (!std::isfinite(r)) eval_fail(n, "non-finite value");
    return r;
}

bool equal_nodes(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Kind::Const: return a.value == b.value && std::signbit(a.value) == std::signbit(b.value);
        case Kind::Variable: return a.var == b.var;
        case Kind::Neg: return equal_nodes(*a.lhs, *b.lhs);
        case Kind::Pow: return a.exponent == b.exponent && equal_nodes(*a.lhs, *b.lhs);
        case Kind::Call: return a.func == b.func && equal_nodes(*a.lhs, *b.lhs);
        default: return equal_nodes(*a.lhs, *b.lhs) && equal_nodes(*a.rhs, *b.rhs);
    }
}

// ---------------------------------------------------------------- parsing

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse_all() {
        skip_ws();
        if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
        NodePtr e = sum();
        skip_ws();
        if (pos_ != src_.size()) throw ParseError("unexpected character '" + std::string(1, src_[pos_]) + "'", pos_);
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    NodePtr sum() {
        NodePtr lhs = product();
        for (;;) {
            if (accept('+')) {
                lhs = make_binary(Kind::Add, lhs, product());
            } else if (accept('-')) {
                lhs = make_binary(Kind::Sub, lhs, product());
            } else {
                return lhs;
            }
        }
    }

    NodePtr product() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make_binary(Kind::Mul, lhs, unary());
            } else if (accept('/')) {
                lhs = make_binary(Kind::Div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make_unary(Kind::Neg, unary());
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        while (accept('^')) base = make_pow(base, integer_exponent());
        return base;
    }

    int integer_exponent() {
        skip_ws();
        const bool paren = accept('(');
        skip_ws();
        bool negative = false;
        if (accept('-')) negative = true;
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (start == pos_) throw ParseError("exponent must be an integer literal", start);
        if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E')) {
            throw ParseError("exponent must be an integer literal", start);
        }
        int value = 0;
        const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc{}) throw ParseError("exponent out of range", start);
        if (paren) expect(')');
        return negative ? -value : value;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = sum();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    NodePtr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            const std::size_t exp_start = pos_;
            digits();
            if (exp_start == pos_) pos_ = save;
        }
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (ec != std::errc{} || ptr != src_.data() + pos_) throw ParseError("malformed number", start);
        return make_const(v);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);

        static constexpr std::pair<std::string_view, Func> funcs[] = {
            {"sin", Func::Sin}, {"cos", Func::Cos}, {"exp", Func::Exp},
            {"log", Func::Log}, {"sqrt", Func::Sqrt}};
        for (const auto& [fname, f] : funcs) {
            if (name == fname) {
                expect('(');
                NodePtr arg = sum();
                expect(')');
                return make_call(f, arg);
            }
        }
        for (Var v : kAllVars) {
            if (name == to_string(v)) return make_var(v);
        }
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }
};

}  // namespace

std::string_view to_string(Var v) {
    switch (v) {
        case Var::Y1: return "y1";
        case Var::Y2: return "y2";
        case Var::Y3: return "y3";
        case Var::U: return "u";
        case Var::P1: return "p1";
        case Var::P2: return "p2";
        case Var::P3: return "p3";
    }
    return "?";
}

double FPoint::operator[](Var v) const {
    switch (v) {
        case Var::Y1: return y[0];
        case Var::Y2: return y[1];
        case Var::Y3: return y[2];
        case Var::U: return z;
        case Var::P1: return p[0];
        case Var::P2: return p[1];
        case Var::P3: return p[2];
    }
    return 0.0;
}

Expr::Expr() : root_(make_const(0.0)) {}
Expr::Expr(std::shared_ptr<const ExprNode> root) : root_(std::move(root)) {}

bool operator==(const Expr& a, const Expr& b) { return equal_nodes(*a.root_, *b.root_); }

Expr parse(std::string_view src) { return fold(Expr(Parser(src).parse_all())); }

double eval(const Expr& e, const FPoint& at) { return eval_node(e.root(), at); }

Expr partial(const Expr& e, Var v) { return fold(Expr(derive(e.ptr(), v))); }

std::string to_string(const Expr& e) { return print(e.root()); }

Expr fold(const Expr& e) { return Expr(fold_node(e.ptr())); }

DifferentiatedF::DifferentiatedF(Expr e) : f(std::move(e)) {
    for (Var v : kAllVars) d[static_cast<std::size_t>(v)] = hess2::partial(f, v);
}

}  // namespace hess2
