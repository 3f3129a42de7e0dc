#include "mslant/expression.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "mslant/dual.hpp"
#include "mslant/errors.hpp"

namespace mslant {

namespace ast {

namespace {
constexpr std::array<std::pair<std::string_view, Constant>, 5> kConstants{{
    {"pi", Constant::Pi},
    {"sigma", Constant::Sigma},
    {"sigma_bar", Constant::SigmaBar},
    {"phi", Constant::Phi},
    {"phi_bar", Constant::PhiBar},
}};
constexpr std::array<std::pair<std::string_view, Function>, 6> kFunctions{{
    {"sin", Function::Sin},
    {"cos", Function::Cos},
    {"tan", Function::Tan},
    {"exp", Function::Exp},
    {"log", Function::Log},
    {"sqrt", Function::Sqrt},
}};
}  // namespace

std::string_view name(Constant c) {
    for (const auto& [n, k] : kConstants)
        if (k == c) return n;
    return "?";
}

std::string_view name(Function f) {
    for (const auto& [n, k] : kFunctions)
        if (k == f) return n;
    return "?";
}

}  // namespace ast

namespace {

using namespace ast;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

NodePtr make(auto&& payload) { return std::make_shared<const Node>(Node{std::forward<decltype(payload)>(payload)}); }

// ---------------------------------------------------------------------------
// Printing

constexpr int kPrecSum = 1;
constexpr int kPrecProduct = 2;
constexpr int kPrecUnary = 3;
constexpr int kPrecPower = 4;
constexpr int kPrecAtom = 5;

int precedence(const Node& n) {
    return std::visit(overloaded{
                          [](const Binary& b) {
                              return (b.op == BinaryOp::Add || b.op == BinaryOp::Sub) ? kPrecSum
                                                                                       : kPrecProduct;
                          },
                          [](const Neg&) { return kPrecUnary; },
                          [](const Power&) { return kPrecPower; },
                          [](const auto&) { return kPrecAtom; },
                      },
                      n.data);
}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

void print(const Node& n, std::string& out);

void print_wrapped(const Node& n, bool parens, std::string& out) {
    if (parens) out += '(';
    print(n, out);
    if (parens) out += ')';
}

void print(const Node& n, std::string& out) {
    std::visit(overloaded{
                   [&](const Number& x) { out += format_number(x.value); },
                   [&](const Var& x) { out += x.name; },
                   [&](const Const& x) { out += name(x.which); },
                   [&](const Neg& x) {
                       out += '-';
                       print_wrapped(*x.operand, precedence(*x.operand) < kPrecPower, out);
                   },
                   [&](const Binary& x) {
                       const int prec = precedence(n);
                       print_wrapped(*x.lhs, precedence(*x.lhs) < prec, out);
                       constexpr std::array<std::string_view, 4> ops{" + ", " - ", " * ", " / "};
                       out += ops[static_cast<std::size_t>(x.op)];
                       print_wrapped(*x.rhs, precedence(*x.rhs) <= prec, out);
                   },
                   [&](const Power& x) {
                       print_wrapped(*x.base, precedence(*x.base) < kPrecAtom, out);
                       out += '^';
                       out += std::to_string(x.exponent);
                   },
                   [&](const Call& x) {
                       out += name(x.fn);
                       out += '(';
                       print(*x.arg, out);
                       out += ')';
                   },
               },
               n.data);
}

std::string to_text(const Node& n) {
    std::string out;
    print(n, out);
    return out;
}

bool equal(const Node& a, const Node& b) {
    if (a.data.index() != b.data.index()) return false;
    return std::visit(
        overloaded{
            [&](const Number& x) { return x.value == std::get<Number>(b.data).value; },
            [&](const Var& x) { return x.index == std::get<Var>(b.data).index && x.name == std::get<Var>(b.data).name; },
            [&](const Const& x) { return x.which == std::get<Const>(b.data).which; },
            [&](const Neg& x) { return equal(*x.operand, *std::get<Neg>(b.data).operand); },
            [&](const Binary& x) {
                const auto& y = std::get<Binary>(b.data);
                return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
            },
            [&](const Power& x) {
                const auto& y = std::get<Power>(b.data);
                return x.exponent == y.exponent && equal(*x.base, *y.base);
            },
            [&](const Call& x) {
                const auto& y = std::get<Call>(b.data);
                return x.fn == y.fn && equal(*x.arg, *y.arg);
            },
        },
        a.data);
}

// ---------------------------------------------------------------------------
// Parsing

constexpr int kMaxExponent = 1024;

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& vars) : src_(src), vars_(vars) {}

    NodePtr parse() {
        skip_space();
        if (at_end()) throw ParseError("empty expression", pos_);
        auto root = expr();
        skip_space();
        if (!at_end()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
        return root;
    }

private:
    std::string_view src_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;

    bool at_end() const { return pos_ >= src_.size(); }

    void skip_space() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (!at_end() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        auto lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make(Binary{BinaryOp::Add, lhs, term()});
            } else if (accept('-')) {
                lhs = make(Binary{BinaryOp::Sub, lhs, term()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        auto lhs = factor();
        for (;;) {
            if (accept('*')) {
                lhs = make(Binary{BinaryOp::Mul, lhs, factor()});
            } else if (accept('/')) {
                lhs = make(Binary{BinaryOp::Div, lhs, factor()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr factor() {
        if (accept('-')) return make(Neg{power()});
        return power();
    }

    NodePtr power() {
        auto base = atom();
        if (!accept('^')) return base;
        skip_space();
        const std::size_t start = pos_;
        if (at_end() || !is_digit(src_[pos_])) throw ParseError("non-integer exponent", start);
        std::size_t end = start;
        while (end < src_.size() && is_digit(src_[end])) ++end;
        if (end < src_.size() && (src_[end] == '.' || src_[end] == 'e' || src_[end] == 'E'))
            throw ParseError("non-integer exponent", start);
        int exponent = 0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + end, exponent);
        if (ec != std::errc() || exponent > kMaxExponent)
            throw ParseError("exponent out of range", start);
        pos_ = end;
        return make(Power{base, exponent});
    }

    NodePtr atom() {
        skip_space();
        if (at_end()) throw ParseError("unexpected end of input, expected operand", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = expr();
            if (!accept(')')) throw ParseError("expected ')'", current());
            return inner;
        }
        if (is_digit(c) || c == '.') return number();
        if (is_name_start(c)) return named();
        throw ParseError(std::string("expected operand, found '") + c + "'", pos_);
    }

    std::size_t current() {
        skip_space();
        return pos_;
    }

    NodePtr number() {
        const std::size_t start = pos_;
        std::size_t end = pos_;
        while (end < src_.size() && is_digit(src_[end])) ++end;
        if (end < src_.size() && src_[end] == '.') {
            ++end;
            while (end < src_.size() && is_digit(src_[end])) ++end;
        }
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t exp_end = end + 1;
            if (exp_end < src_.size() && (src_[exp_end] == '+' || src_[exp_end] == '-')) ++exp_end;
            if (exp_end >= src_.size() || !is_digit(src_[exp_end]))
                throw ParseError("malformed number exponent", end);
            while (exp_end < src_.size() && is_digit(src_[exp_end])) ++exp_end;
            end = exp_end;
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + end, value);
        if (ec != std::errc() || ptr != src_.data() + end || !std::isfinite(value))
            throw ParseError("malformed number", start);
        pos_ = end;
        return make(Number{value});
    }

    NodePtr named() {
        const std::size_t start = pos_;
        std::size_t end = pos_;
        while (end < src_.size() && is_name_char(src_[end])) ++end;
        const std::string_view ident = src_.substr(start, end - start);
        pos_ = end;

        skip_space();
        if (!at_end() && src_[pos_] == '(') {
            const auto fn = std::find_if(kFunctions.begin(), kFunctions.end(),
                                         [&](const auto& entry) { return entry.first == ident; });
            if (fn == kFunctions.end())
                throw ParseError("unknown function '" + std::string(ident) + "'", start);
            ++pos_;
            auto arg = expr();
            if (!accept(')')) throw ParseError("expected ')'", current());
            return make(Call{fn->second, arg});
        }

        const auto var = std::find(vars_.begin(), vars_.end(), ident);
        if (var != vars_.end())
            return make(Var{static_cast<int>(var - vars_.begin()), std::string(ident)});
        const auto constant = std::find_if(kConstants.begin(), kConstants.end(),
                                           [&](const auto& entry) { return entry.first == ident; });
        if (constant != kConstants.end()) return make(Const{constant->second});
        const bool is_function = std::any_of(kFunctions.begin(), kFunctions.end(),
                                             [&](const auto& entry) { return entry.first == ident; });
        if (is_function)
            throw ParseError("function '" + std::string(ident) + "' requires '('", pos_);
        throw ParseError("unknown identifier '" + std::string(ident) + "'", start);
    }
};

// ---------------------------------------------------------------------------
// Evaluation

struct ConstantValues {
    double sigma;
    double sigma_bar;
    double phi;
    double phi_bar;
};

ConstantValues constants_for(const MetallicParams& params) {
    const auto golden = metallic_number(1, 1);
    return {params.sigma, params.sigma_bar, golden.sigma, golden.sigma_bar};
}

template <class S>
S evaluate(const Node& n, std::span<const S> x, const ConstantValues& c) {
    constexpr bool plain = std::is_same_v<S, double>;
    return std::visit(
        overloaded{
            [&](const Number& v) -> S { return S(v.value); },
            [&](const Var& v) -> S { return x[static_cast<std::size_t>(v.index)]; },
            [&](const Const& v) -> S {
                switch (v.which) {
                    case Constant::Pi: return S(std::numbers::pi);
                    case Constant::Sigma: return S(c.sigma);
                    case Constant::SigmaBar: return S(c.sigma_bar);
                    case Constant::Phi: return S(c.phi);
                    case Constant::PhiBar: return S(c.phi_bar);
                }
                return S(0.0);
            },
            [&](const Neg& v) -> S { return -evaluate<S>(*v.operand, x, c); },
            [&](const Binary& v) -> S {
                const S a = evaluate<S>(*v.lhs, x, c);
                const S b = evaluate<S>(*v.rhs, x, c);
                switch (v.op) {
                    case BinaryOp::Add: return a + b;
                    case BinaryOp::Sub: return a - b;
                    case BinaryOp::Mul: return a * b;
                    case BinaryOp::Div:
                        if (value_of(b) == 0.0) throw EvalError("division by zero", to_text(n));
                        return a / b;
                }
                return S(0.0);
            },
            [&](const Power& v) -> S {
                const S base = evaluate<S>(*v.base, x, c);
                S result(1.0);
                for (int k = 0; k < v.exponent; ++k) result = result * base;
                return result;
            },
            [&](const Call& v) -> S {
                using std::cos;
                using std::exp;
                using std::log;
                using std::sin;
                using std::sqrt;
                using std::tan;
                const S a = evaluate<S>(*v.arg, x, c);
                const double av = value_of(a);
                switch (v.fn) {
                    case Function::Sin: return sin(a);
                    case Function::Cos: return cos(a);
                    case Function::Tan:
                        if (std::cos(av) == 0.0) throw EvalError("tan at a pole", to_text(n));
                        return tan(a);
                    case Function::Exp: return exp(a);
                    case Function::Log:
                        if (!(av > 0.0)) throw EvalError("log of non-positive value", to_text(n));
                        return log(a);
                    case Function::Sqrt:
                        if (av < 0.0 || (!plain && av == 0.0))
                            throw EvalError(plain ? "sqrt of negative value"
                                                  : "sqrt not differentiable at or below zero",
                                            to_text(n));
                        return sqrt(a);
                }
                return S(0.0);
            },
        },
        n.data);
}

void check_point(const Expr& e, const Eigen::VectorXd& point) {
    if (static_cast<std::size_t>(point.size()) != e.arity())
        throw InputError("expression expects " + std::to_string(e.arity()) + " chart variables, got " +
                         std::to_string(point.size()));
}

}  // namespace

Expr::Expr(ast::NodePtr root, std::vector<std::string> vars, MetallicParams params)
    : root_(std::move(root)), vars_(std::move(vars)), params_(params) {}

double Expr::evaluate(const Eigen::VectorXd& point) const {
    check_point(*this, point);
    std::vector<double> x(point.data(), point.data() + point.size());
    return mslant::evaluate<double>(*root_, std::span<const double>(x), constants_for(params_));
}

std::string Expr::to_string() const { return to_text(*root_); }

bool Expr::structurally_equal(const Expr& other) const {
    return vars_ == other.vars_ && equal(*root_, *other.root_);
}

Expr parse(std::string_view src, std::vector<std::string> vars, const MetallicParams& params) {
    for (const auto& v : vars) {
        const bool ok = !v.empty() && is_name_start(v.front()) &&
                        std::all_of(v.begin(), v.end(), [](char c) { return is_name_char(c); });
        if (!ok) throw InputError("invalid chart variable name '" + v + "'");
        const bool reserved =
            std::any_of(kConstants.begin(), kConstants.end(), [&](const auto& e) { return e.first == v; }) ||
            std::any_of(kFunctions.begin(), kFunctions.end(), [&](const auto& e) { return e.first == v; });
        if (reserved) throw InputError("chart variable '" + v + "' shadows a reserved name");
    }
    auto root = Parser(src, vars).parse();
    return Expr(std::move(root), std::move(vars), params);
}

std::pair<double, Eigen::VectorXd> eval_gradient(const Expr& e, const Eigen::VectorXd& point) {
    check_point(e, point);
    using D = Dual<double>;
    const auto n = static_cast<std::size_t>(point.size());
    const auto c = constants_for(e.params());
    Eigen::VectorXd grad(point.size());
    double value = 0.0;
    std::vector<D> x(n);
    if (n == 0) return {e.evaluate(point), grad};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) x[k] = D(point[static_cast<Eigen::Index>(k)], k == i ? 1.0 : 0.0);
        const D r = evaluate<D>(e.root(), std::span<const D>(x), c);
        value = r.v;
        grad[static_cast<Eigen::Index>(i)] = r.d;
    }
    return {value, grad};
}

Jet2 eval_jet(const Expr& e, const Eigen::VectorXd& point) {
    check_point(e, point);
    using D = Dual<double>;
    using DD = Dual<D>;
    const auto n = point.size();
    const auto c = constants_for(e.params());
    Jet2 jet{0.0, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
    if (n == 0) {
        jet.value = e.evaluate(point);
        return jet;
    }
    std::vector<DD> x(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            // Outer perturbation along e_i, inner along e_j.
            for (Eigen::Index k = 0; k < n; ++k)
                x[static_cast<std::size_t>(k)] = DD(D(point[k], k == j ? 1.0 : 0.0), D(k == i ? 1.0 : 0.0, 0.0));
            const DD r = evaluate<DD>(e.root(), std::span<const DD>(x), c);
            jet.value = r.v.v;
            if (i == j) jet.gradient[i] = r.d.v;
            jet.hessian(i, j) = r.d.d;
            jet.hessian(j, i) = r.d.d;
        }
    }
    return jet;
}

}  // namespace mslant
