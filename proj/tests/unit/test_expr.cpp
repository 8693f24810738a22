#include <cmath>
#include <memory>
#include <string>

#include "doctest.h"
#include "hess2/errors.hpp"
#include "hess2/expr.hpp"
#include "oracles.hpp"

using namespace hess2;

namespace {

using Node = std::shared_ptr<const ExprNode>;
using Kind = ExprNode::Kind;

Node leaf_const(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Const;
    n->value = v;
    return n;
}

Node leaf_var(Var v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Variable;
    n->var = v;
    return n;
}

Node unary(Kind k, Node a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(a);
    return n;
}

Node binary(Kind k, Node a, Node b) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

Node call(Func f, Node a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Call;
    n->func = f;
    n->lhs = std::move(a);
    return n;
}

Node power(Node a, int k) {
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Pow;
    n->exponent = k;
    n->lhs = std::move(a);
    return n;
}

int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(oracle::rng()); }

// Random tree of depth <= `depth` whose partial functions are guarded so that
// evaluation stays inside their domains on the unit cube.
Node random_tree(int depth) {
    if (depth <= 1 || pick(4) == 0) {
        if (pick(3) == 0) return leaf_const(std::round(oracle::uniform(-4, 4) * 8) / 8);
        return leaf_var(kAllVars[pick(7)]);
    }
    // Guarded shapes wrap their operand in extra levels; fall back to plain
    // operators when the depth budget is too small for them.
    const int op = pick(10);
    if (op == 3 && depth >= 4)  // a / (2 + sin(b))
        return binary(Kind::Div, random_tree(depth - 1),
                      binary(Kind::Add, leaf_const(2), call(Func::Sin, random_tree(depth - 3))));
    if (op == 6 && depth >= 4)
        return power(binary(Kind::Add, leaf_const(2), call(Func::Cos, random_tree(depth - 3))), -1 - pick(2));
    if (op == 8 && depth >= 3) return call(Func::Exp, call(Func::Sin, random_tree(depth - 2)));
    if (op == 9 && depth >= 4) {
        const Node a = random_tree(depth - 3);
        return call(pick(2) ? Func::Log : Func::Sqrt,
                    binary(Kind::Add, leaf_const(1.5), binary(Kind::Mul, a, a)));
    }
    const Node a = random_tree(depth - 1);
    switch (op % 6) {
        case 0: return binary(Kind::Add, a, random_tree(depth - 1));
        case 1: return binary(Kind::Sub, a, random_tree(depth - 1));
        case 2: return binary(Kind::Mul, a, random_tree(depth - 1));
        case 3: return unary(Kind::Neg, a);
        case 4: return power(a, 1 + pick(3));
        default: return call(pick(2) ? Func::Sin : Func::Cos, a);
    }
}

FPoint random_point() {
    FPoint p;
    for (double& y : p.y) y = oracle::uniform(-1, 1);
    p.z = oracle::uniform(-1, 1);
    for (double& q : p.p) q = oracle::uniform(-1, 1);
    return p;
}

FPoint shifted(FPoint p, Var v, double h) {
    switch (v) {
        case Var::Y1: p.y[0] += h; break;
        case Var::Y2: p.y[1] += h; break;
        case Var::Y3: p.y[2] += h; break;
        case Var::U: p.z += h; break;
        case Var::P1: p.p[0] += h; break;
        case Var::P2: p.p[1] += h; break;
        case Var::P3: p.p[2] += h; break;
    }
    return p;
}

int depth(const ExprNode& n) {
    int d = 0;
    if (n.lhs) d = std::max(d, depth(*n.lhs));
    if (n.rhs) d = std::max(d, depth(*n.rhs));
    return d + 1;
}

}  // namespace

TEST_SUITE("expr") {

TEST_CASE("parse shapes") {
    const Expr zero = parse("0");
    CHECK(zero.root().kind == Kind::Const);
    CHECK(zero.root().value == 0.0);
    CHECK(parse("y1").root().kind == Kind::Variable);
    CHECK(parse("y1").root().var == Var::Y1);

    const Expr e = parse("sin(y1) + p2*u");
    REQUIRE(e.root().kind == Kind::Add);
    CHECK(e.root().lhs->kind == Kind::Call);
    CHECK(e.root().lhs->func == Func::Sin);
    REQUIRE(e.root().rhs->kind == Kind::Mul);
    CHECK(e.root().rhs->lhs->var == Var::P2);
    CHECK(e.root().rhs->rhs->var == Var::U);

    CHECK(parse("2*3+1").root().value == 7.0);
    CHECK(parse("y1^(-2)").root().exponent == -2);
    CHECK(parse("y1^-2").root().exponent == -2);
    CHECK(parse("-y1^2").root().kind == Kind::Neg);
    CHECK(parse("  y1 *  y2 ").root().kind == Kind::Mul);
    CHECK(parse("1e-3").root().value == 1e-3);
}

TEST_CASE("parse errors carry offsets") {
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("sin(y1"), ParseError);
    CHECK_THROWS_AS(parse("y1 +"), ParseError);
    CHECK_THROWS_AS(parse("y1^1.5"), ParseError);
    CHECK_THROWS_AS(parse("y1^y2"), ParseError);
    CHECK_THROWS_AS(parse("tan(y1)"), ParseError);
    try {
        parse("y1 + q");
        FAIL("expected ParseError");
    } catch (const ParseError& err) {
        CHECK(err.offset() == 5);
    }
}

TEST_CASE("eval examples") {
    FPoint p;
    p.y = {0.5, 0, 0};
    CHECK(eval(parse("y1"), p) == 0.5);
    p = FPoint{};
    p.z = 2;
    p.p = {3, 0, 0};
    CHECK(eval(parse("u*p1"), p) == 6.0);
    p = FPoint{};
    p.z = 5;
    p.p = {0, 1, 0};
    CHECK(eval(parse("sin(y1)+p2*u"), p) == 5.0);
    CHECK(eval(parse("2^10"), FPoint{}) == 1024.0);
    CHECK(eval(parse("sqrt(4)*exp(0)+log(1)"), FPoint{}) == 2.0);
}

TEST_CASE("eval domain errors") {
    const FPoint origin;
    CHECK_THROWS_AS(eval(parse("1/(y1-y1)"), origin), EvalError);
    CHECK_THROWS_AS(eval(parse("log(y1)"), origin), EvalError);
    CHECK_THROWS_AS(eval(parse("sqrt(y1-1)"), origin), EvalError);
    CHECK_THROWS_AS(eval(parse("y1^(-1)"), origin), EvalError);
    CHECK_THROWS_AS(eval(parse("exp(exp(exp(y1+10)))"), origin), EvalError);
    try {
        eval(parse("1 + 1/(y1-y1)"), origin);
    } catch (const EvalError& err) {
        CHECK(err.reason() == "division by zero");
        CHECK(err.subexpr() == "1/(y1 - y1)");
    }
}

TEST_CASE("symbolic partials") {
    CHECK(partial(parse("p2*u"), Var::U) == parse("p2"));
    CHECK(partial(parse("sin(y1)"), Var::Y1) == parse("cos(y1)"));
    CHECK(partial(parse("y1*y2"), Var::Y3) == parse("0"));
    CHECK(partial(parse("u^3"), Var::U) == parse("3*u^2"));
    const DifferentiatedF f(parse("y1 + u*p3"));
    CHECK(f.partial(Var::Y1) == parse("1"));
    CHECK(f.partial(Var::U) == parse("p3"));
    CHECK(f.partial(Var::P3) == parse("u"));
    CHECK(f.partial(Var::P1) == parse("0"));
}

TEST_CASE("partials agree with central differences on random trees") {
    int checked = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        const Expr e(random_tree(5));
        REQUIRE(depth(e.root()) <= 5);
        const FPoint at = random_point();
        for (Var v : kAllVars) {
            const double h = 1e-5;
            double fd, ad;
            try {
                fd = (eval(e, shifted(at, v, h)) - eval(e, shifted(at, v, -h))) / (2 * h);
                ad = eval(partial(e, v), at);
            } catch (const EvalError&) {
                continue;
            }
            if (std::abs(ad) > 1e6) continue;
            CHECK_MESSAGE(std::abs(fd - ad) <= 1e-5 * (1.0 + std::abs(ad)), to_string(e));
            ++checked;
        }
    }
    CHECK(checked > 10000);
}

TEST_CASE("print then parse is the identity on folded trees") {
    for (int trial = 0; trial < 3000; ++trial) {
        const Expr e = fold(Expr(random_tree(5)));
        const std::string text = to_string(e);
        const Expr back = parse(text);
        CHECK_MESSAGE(back == e, text);
        CHECK(to_string(back) == text);
    }
    for (const char* s : {"-y1^2", "(-y1)^2", "y1-(y2-y3)", "y1/(y2*y3)", "y1^(-3)", "-(-u)",
                          "(-2.5)*p1", "exp(sin(u))/(2+cos(y3))", "1e-300*y1"}) {
        const Expr e = parse(s);
        CHECK_MESSAGE(parse(to_string(e)) == e, s);
    }
}

TEST_CASE("folding identities") {
    CHECK(parse("y1+0") == parse("y1"));
    CHECK(parse("0+y1") == parse("y1"));
    CHECK(parse("y1*1") == parse("y1"));
    CHECK(parse("0*y1") == parse("0"));
    CHECK(parse("y1^1") == parse("y1"));
    CHECK(parse("y1^0") == parse("1"));
    CHECK(parse("y1/1") == parse("y1"));
    CHECK(parse("0-y1") == parse("-y1"));
    // 1/0 is left for eval to report.
    CHECK(parse("1/0").root().kind == Kind::Div);
}

TEST_CASE("eval is a pure function of its inputs") {
    const Expr e = parse("exp(sin(y1*p2)) + log(2 + u^2) / (3 + y3)");
    const FPoint at = random_point();
    const double a = eval(e, at);
    for (int i = 0; i < 10; ++i) CHECK(eval(e, at) == a);
}

}  // TEST_SUITE
