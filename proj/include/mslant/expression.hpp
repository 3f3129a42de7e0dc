#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mslant/metallic.hpp"

namespace mslant {

// Expression trees for immersion components and vector-field coefficients.
//
// Grammar (standard precedence, left associative):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-'? power
//   power  := atom ('^' intlit)?
//   atom   := number | name | name '(' expr ')' | '(' expr ')'
//
// Names resolve to declared chart variables, then to the constants pi,
// sigma, sigma_bar, phi, phi_bar. Functions: sin cos tan exp log sqrt.
namespace ast {

enum class BinaryOp { Add, Sub, Mul, Div };
enum class Constant { Pi, Sigma, SigmaBar, Phi, PhiBar };
enum class Function { Sin, Cos, Tan, Exp, Log, Sqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Number { double value; };
struct Var { int index; std::string name; };
struct Const { Constant which; };
struct Neg { NodePtr operand; };
struct Binary { BinaryOp op; NodePtr lhs; NodePtr rhs; };
struct Power { NodePtr base; int exponent; };
struct Call { Function fn; NodePtr arg; };

struct Node {
    std::variant<Number, Var, Const, Neg, Binary, Power, Call> data;
};

std::string_view name(Constant c);
std::string_view name(Function f);

}  // namespace ast

// Value, gradient and Hessian of a scalar expression at one chart point.
struct Jet2 {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
};

// Immutable parsed expression bound to its chart variables and to the
// metallic parameters that give sigma / sigma_bar their values.
class Expr {
public:
    Expr(ast::NodePtr root, std::vector<std::string> vars, MetallicParams params);

    const ast::Node& root() const noexcept { return *root_; }
    const std::vector<std::string>& vars() const noexcept { return vars_; }
    const MetallicParams& params() const noexcept { return params_; }
    std::size_t arity() const noexcept { return vars_.size(); }

    // Same tree, constants rebound to other (p, q).
    Expr with_params(const MetallicParams& params) const { return Expr(root_, vars_, params); }

    double evaluate(const Eigen::VectorXd& point) const;

    // Minimal-parenthesis rendering that re-parses to an identical tree.
    std::string to_string() const;

    bool structurally_equal(const Expr& other) const;

private:
    ast::NodePtr root_;
    std::vector<std::string> vars_;
    MetallicParams params_;
};

// Throws ParseError (with byte offset) on malformed input and InputError when
// a declared variable shadows a reserved name.
Expr parse(std::string_view src, std::vector<std::string> vars, const MetallicParams& params);

// Exact first derivatives by forward mode, one pass per chart variable.
std::pair<double, Eigen::VectorXd> eval_gradient(const Expr& e, const Eigen::VectorXd& point);

// Exact value, gradient and Hessian by nested forward mode. One pass per
// unordered variable pair; the Hessian is filled symmetrically.
// Throws EvalError naming the failing subexpression.
Jet2 eval_jet(const Expr& e, const Eigen::VectorXd& point);

}  // namespace mslant
