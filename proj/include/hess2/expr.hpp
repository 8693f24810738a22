#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>

namespace hess2 {

// Right-hand side variables of f(y, u, Du).
enum class Var { Y1, Y2, Y3, U, P1, P2, P3 };
inline constexpr std::array<Var, 7> kAllVars{Var::Y1, Var::Y2, Var::Y3, Var::U,
                                             Var::P1, Var::P2, Var::P3};

std::string_view to_string(Var v);

struct FPoint {
    std::array<double, 3> y{};
    double z = 0.0;
    std::array<double, 3> p{};

    double operator[](Var v) const;
};

enum class Func { Sin, Cos, Exp, Log, Sqrt };

struct ExprNode {
    enum class Kind { Const, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };

    Kind kind = Kind::Const;
    double value = 0.0;  // Const
    Var var = Var::Y1;   // Variable
    int exponent = 0;    // Pow
    Func func = Func::Sin;
    std::shared_ptr<const ExprNode> lhs;  // operand of unary nodes
    std::shared_ptr<const ExprNode> rhs;
};

// Immutable expression tree. Copies share structure.
class Expr {
public:
    Expr();  // constant 0
    explicit Expr(std::shared_ptr<const ExprNode> root);

    const ExprNode& root() const { return *root_; }
    const std::shared_ptr<const ExprNode>& ptr() const { return root_; }

    // Structural equality.
    friend bool operator==(const Expr& a, const Expr& b);

private:
    std::shared_ptr<const ExprNode> root_;
};

// Grammar, loosest to tightest:
//   sum     := product (('+'|'-') product)*
//   product := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' integer)*          integer may be -k or (-k)
//   primary := number | variable | func '(' sum ')' | '(' sum ')'
// Constant subtrees are folded; throws ParseError with the byte offset.
Expr parse(std::string_view src);

// Throws EvalError naming the offending subexpression on division by zero,
// log/sqrt outside their domain, or a non-finite intermediate.
double eval(const Expr& e, const FPoint& at);

// Exact symbolic first derivative, constant-folded.
Expr partial(const Expr& e, Var v);

// Minimal-parenthesis printing; parse(to_string(e)) == e for folded trees.
std::string to_string(const Expr& e);

// Folds constant subtrees and trivial identities (x+0, x*1, 0*x, x^1, ...).
Expr fold(const Expr& e);

// f together with its seven first partials, differentiated once up front.
struct DifferentiatedF {
    Expr f;
    std::array<Expr, 7> d;

    explicit DifferentiatedF(Expr e);
    const Expr& partial(Var v) const { return d[static_cast<std::size_t>(v)]; }
};

}  // namespace hess2
