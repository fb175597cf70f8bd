#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace heatcons {

/// Closed-form function of the single radial variable r.
///
/// Grammar (conventional precedence, ^ binds tighter than unary minus,
/// ^ is right associative):
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'r' | '(' expr ')' | func '(' expr (',' expr)* ')'
///
/// Functions: exp, log, sqrt, sinh, cosh, tanh (one argument), min, max
/// (two arguments) and piecewise(r0, left, right), which is `left` for
/// r < r0 and `right` for r >= r0; r0 must be a constant >= 0.
///
/// A RadialExpr is an immutable handle to a shared tree, cheap to copy and
/// safe to evaluate from several threads at once.
class RadialExpr {
public:
    enum class Op {
        Literal,
        Variable,
        Negate,
        Add,
        Subtract,
        Multiply,
        Divide,
        Power,
        Exp,
        Log,
        Sqrt,
        Sinh,
        Cosh,
        Tanh,
        Min,
        Max,
        Piecewise,
    };

    /// The constant 0.
    RadialExpr();

    static RadialExpr parse(std::string_view text);
    static RadialExpr constant(double value);
    static RadialExpr variable();
    static RadialExpr unary(Op op, RadialExpr arg);
    static RadialExpr binary(Op op, RadialExpr lhs, RadialExpr rhs);
    /// `left` below `threshold`, `right` from `threshold` on.
    static RadialExpr piecewise(double threshold, RadialExpr left, RadialExpr right);

    double eval(double r) const;
    double operator()(double r) const { return eval(r); }

    /// log f(r) computed without overflowing intermediate values, so that
    /// e.g. log(r*exp(r^3)) stays finite at r = 100. Returns -inf where f
    /// vanishes and throws DomainError where f is negative.
    double log_eval(double r) const;

    /// Exact symbolic derivative with constant folding. Throws
    /// std::invalid_argument on min/max/piecewise nodes.
    RadialExpr derivative() const;

    /// Fully parenthesized canonical form; parse(to_string()) rebuilds a
    /// structurally equal tree.
    std::string to_string() const;

    Op op() const noexcept;
    std::size_t arity() const noexcept;
    const RadialExpr& child(std::size_t i) const;
    /// Literal value, or piecewise threshold.
    double value() const noexcept;

    bool is_constant() const noexcept;
    std::optional<double> constant_value() const;
    /// False if the tree contains min, max or piecewise.
    bool is_smooth() const noexcept;
    std::size_t node_count() const noexcept;

    bool structurally_equal(const RadialExpr& other) const noexcept;

private:
    struct Node;
    explicit RadialExpr(std::shared_ptr<const Node> node);

    std::shared_ptr<const Node> node_;
};

RadialExpr operator+(const RadialExpr& a, const RadialExpr& b);
RadialExpr operator-(const RadialExpr& a, const RadialExpr& b);
RadialExpr operator*(const RadialExpr& a, const RadialExpr& b);
RadialExpr operator/(const RadialExpr& a, const RadialExpr& b);
RadialExpr operator-(const RadialExpr& a);
RadialExpr pow(const RadialExpr& base, const RadialExpr& exponent);
RadialExpr exp(const RadialExpr& a);
RadialExpr log(const RadialExpr& a);
RadialExpr sqrt(const RadialExpr& a);

}  // namespace heatcons
