#include "heatcons/radial_expr.hpp"

#include "heatcons/error.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <cstdint>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace heatcons {

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t offset, std::vector<std::string> expected)
    : Error(message + " at byte " + std::to_string(offset) +
            (expected.empty() ? std::string() : " (expected one of: " + join(expected) + ")")),
      offset_(offset),
      expected_(std::move(expected)) {}

DomainError::DomainError(const std::string& message, double r, std::string subtree)
    : Error(message + " at r = " + std::to_string(r) + " in " + subtree), r_(r), subtree_(std::move(subtree)) {}

QuadratureError::QuadratureError(const std::string& message, double a, double b)
    : Error(message + " on [" + std::to_string(a) + ", " + std::to_string(b) + "]"), a_(a), b_(b) {}

struct RadialExpr::Node {
    Op op;
    double value = 0.0;  // literal value or piecewise threshold
    std::vector<RadialExpr> args;
};

namespace {

using Op = RadialExpr::Op;

std::size_t op_arity(Op op) {
    switch (op) {
        case Op::Literal:
        case Op::Variable: return 0;
        case Op::Negate:
        case Op::Exp:
        case Op::Log:
        case Op::Sqrt:
        case Op::Sinh:
        case Op::Cosh:
        case Op::Tanh: return 1;
        case Op::Piecewise: return 2;
        default: return 2;
    }
}

const char* function_name(Op op) {
    switch (op) {
        case Op::Exp: return "exp";
        case Op::Log: return "log";
        case Op::Sqrt: return "sqrt";
        case Op::Sinh: return "sinh";
        case Op::Cosh: return "cosh";
        case Op::Tanh: return "tanh";
        case Op::Min: return "min";
        case Op::Max: return "max";
        case Op::Piecewise: return "piecewise";
        default: return "";
    }
}

const char* infix_symbol(Op op) {
    switch (op) {
        case Op::Add: return " + ";
        case Op::Subtract: return " - ";
        case Op::Multiply: return " * ";
        case Op::Divide: return " / ";
        case Op::Power: return " ^ ";
        default: return "";
    }
}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    std::string s(buf.data(), end);
    if (std::signbit(v)) return "(" + s + ")";
    return s;
}

// Sign-aware logarithmic representation: value = sign * exp(logabs).
struct SignedLog {
    int sign = 0;
    double logabs = -std::numeric_limits<double>::infinity();

    static SignedLog of(double v) {
        if (v == 0.0) return {};
        return {v > 0 ? 1 : -1, std::log(std::fabs(v))};
    }
    double value() const { return sign == 0 ? 0.0 : sign * std::exp(logabs); }
};

SignedLog add_signed(SignedLog a, SignedLog b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    if (a.logabs < b.logabs) std::swap(a, b);
    if (std::isinf(a.logabs) && a.logabs > 0) {
        if (b.sign != a.sign && b.logabs == a.logabs) return {a.sign, std::numeric_limits<double>::quiet_NaN()};
        return a;
    }
    const double d = b.logabs - a.logabs;  // <= 0
    if (a.sign == b.sign) return {a.sign, a.logabs + std::log1p(std::exp(d))};
    if (d == 0.0) return {};
    return {a.sign, a.logabs + std::log1p(-std::exp(d))};
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    RadialExpr parse_all() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("empty expression", pos_, {"number", "r", "function", "(", "-"});
        RadialExpr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_, {"+", "-", "*", "/", "^", "end of input"});
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, std::vector<std::string> expected) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_, std::move(expected));
    }

    RadialExpr parse_expr() {
        RadialExpr lhs = parse_term();
        for (;;) {
            if (accept('+')) lhs = RadialExpr::binary(Op::Add, lhs, parse_term());
            else if (accept('-')) lhs = RadialExpr::binary(Op::Subtract, lhs, parse_term());
            else return lhs;
        }
    }

    RadialExpr parse_term() {
        RadialExpr lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = RadialExpr::binary(Op::Multiply, lhs, parse_unary());
            else if (accept('/')) lhs = RadialExpr::binary(Op::Divide, lhs, parse_unary());
            else return lhs;
        }
    }

    RadialExpr parse_unary() {
        if (accept('-')) {
            RadialExpr operand = parse_unary();
            // Negated literals fold so that printed negative constants re-parse
            // to the same tree.
            if (operand.op() == Op::Literal) return RadialExpr::constant(-operand.value());
            return RadialExpr::unary(Op::Negate, operand);
        }
        return parse_power();
    }

    RadialExpr parse_power() {
        RadialExpr base = parse_primary();
        if (accept('^')) return RadialExpr::binary(Op::Power, base, parse_unary());
        return base;
    }

    RadialExpr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_, {"number", "r", "function", "("});
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            RadialExpr inner = parse_expr();
            expect(')', {")", "+", "-", "*", "/", "^"});
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_, {"number", "r", "function", "("});
    }

    RadialExpr parse_number() {
        const std::size_t start = pos_;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
        if (ec != std::errc() || ptr == text_.data() + pos_) throw ParseError("malformed number", start, {"number"});
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        if (!std::isfinite(v)) throw ParseError("literal is not a finite real", start);
        return RadialExpr::constant(v);
    }

    RadialExpr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "r") return RadialExpr::variable();

        static constexpr std::pair<std::string_view, Op> unary_fns[] = {
            {"exp", Op::Exp}, {"log", Op::Log}, {"sqrt", Op::Sqrt},
            {"sinh", Op::Sinh}, {"cosh", Op::Cosh}, {"tanh", Op::Tanh},
        };
        for (const auto& [fn, op] : unary_fns) {
            if (name == fn) {
                expect('(', {"("});
                RadialExpr arg = parse_expr();
                expect(')', {")"});
                return RadialExpr::unary(op, arg);
            }
        }
        if (name == "min" || name == "max") {
            expect('(', {"("});
            RadialExpr a = parse_expr();
            expect(',', {","});
            RadialExpr b = parse_expr();
            expect(')', {")"});
            return RadialExpr::binary(name == "min" ? Op::Min : Op::Max, a, b);
        }
        if (name == "piecewise") {
            expect('(', {"("});
            skip_ws();
            const std::size_t threshold_pos = pos_;
            RadialExpr threshold = parse_expr();
            const auto t = threshold.constant_value();
            if (!t || !std::isfinite(*t) || *t < 0.0)
                throw ParseError("piecewise threshold must be a finite constant >= 0", threshold_pos);
            expect(',', {","});
            RadialExpr left = parse_expr();
            expect(',', {","});
            RadialExpr right = parse_expr();
            expect(')', {")"});
            return RadialExpr::piecewise(*t, left, right);
        }
        throw ParseError("unknown identifier '" + std::string(name) + "'", start,
                         {"r", "exp", "log", "sqrt", "sinh", "cosh", "tanh", "min", "max", "piecewise"});
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

RadialExpr::RadialExpr() : RadialExpr(constant(0.0)) {}

RadialExpr::RadialExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

RadialExpr RadialExpr::parse(std::string_view text) { return Parser(text).parse_all(); }

RadialExpr RadialExpr::constant(double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("radial expression literal must be finite");
    auto n = std::make_shared<Node>();
    n->op = Op::Literal;
    n->value = value;
    return RadialExpr(std::move(n));
}

RadialExpr RadialExpr::variable() {
    auto n = std::make_shared<Node>();
    n->op = Op::Variable;
    return RadialExpr(std::move(n));
}

RadialExpr RadialExpr::unary(Op op, RadialExpr arg) {
    if (op_arity(op) != 1) throw std::invalid_argument("not a unary operation");
    // A negated literal is stored as a negative literal, matching the parser.
    if (op == Op::Negate && arg.op() == Op::Literal) return constant(-arg.value());
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = {std::move(arg)};
    return RadialExpr(std::move(n));
}

RadialExpr RadialExpr::binary(Op op, RadialExpr lhs, RadialExpr rhs) {
    if (op_arity(op) != 2 || op == Op::Piecewise) throw std::invalid_argument("not a binary operation");
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = {std::move(lhs), std::move(rhs)};
    return RadialExpr(std::move(n));
}

RadialExpr RadialExpr::piecewise(double threshold, RadialExpr left, RadialExpr right) {
    if (!std::isfinite(threshold) || threshold < 0.0)
        throw std::invalid_argument("piecewise threshold must be finite and >= 0");
    auto n = std::make_shared<Node>();
    n->op = Op::Piecewise;
    n->value = threshold;
    n->args = {std::move(left), std::move(right)};
    return RadialExpr(std::move(n));
}

RadialExpr::Op RadialExpr::op() const noexcept { return node_->op; }
std::size_t RadialExpr::arity() const noexcept { return node_->args.size(); }
double RadialExpr::value() const noexcept { return node_->value; }

const RadialExpr& RadialExpr::child(std::size_t i) const {
    if (i >= node_->args.size()) throw std::out_of_range("RadialExpr::child");
    return node_->args[i];
}

bool RadialExpr::is_constant() const noexcept {
    if (node_->op == Op::Variable) return false;
    for (std::size_t i = 0; i < node_->args.size(); ++i)
        if (!node_->args[i].is_constant()) return false;
    return true;
}

std::optional<double> RadialExpr::constant_value() const {
    if (!is_constant()) return std::nullopt;
    try {
        const double v = eval(0.0);
        if (!std::isfinite(v)) return std::nullopt;
        return v;
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

bool RadialExpr::is_smooth() const noexcept {
    if (node_->op == Op::Min || node_->op == Op::Max || node_->op == Op::Piecewise) return false;
    for (std::size_t i = 0; i < node_->args.size(); ++i)
        if (!node_->args[i].is_smooth()) return false;
    return true;
}

std::size_t RadialExpr::node_count() const noexcept {
    std::size_t n = 1;
    for (std::size_t i = 0; i < node_->args.size(); ++i) n += node_->args[i].node_count();
    return n;
}

bool RadialExpr::structurally_equal(const RadialExpr& other) const noexcept {
    if (node_ == other.node_) return true;
    if (node_->op != other.node_->op || node_->args.size() != other.node_->args.size()) return false;
    if ((node_->op == Op::Literal || node_->op == Op::Piecewise) &&
        std::bit_cast<std::uint64_t>(node_->value) != std::bit_cast<std::uint64_t>(other.node_->value))
        return false;
    for (std::size_t i = 0; i < node_->args.size(); ++i)
        if (!node_->args[i].structurally_equal(other.node_->args[i])) return false;
    return true;
}

std::string RadialExpr::to_string() const {
    const Node& n = *node_;
    switch (n.op) {
        case Op::Literal: return format_number(n.value);
        case Op::Variable: return "r";
        case Op::Negate: return "(-" + n.args[0].to_string() + ")";
        case Op::Add:
        case Op::Subtract:
        case Op::Multiply:
        case Op::Divide:
        case Op::Power:
            return "(" + n.args[0].to_string() + infix_symbol(n.op) + n.args[1].to_string() + ")";
        case Op::Min:
        case Op::Max:
            return std::string(function_name(n.op)) + "(" + n.args[0].to_string() + ", " + n.args[1].to_string() + ")";
        case Op::Piecewise:
            return "piecewise(" + format_number(n.value) + ", " + n.args[0].to_string() + ", " +
                   n.args[1].to_string() + ")";
        default: return std::string(function_name(n.op)) + "(" + n.args[0].to_string() + ")";
    }
}

double RadialExpr::eval(double r) const {
    const Node& n = *node_;
    switch (n.op) {
        case Op::Literal: return n.value;
        case Op::Variable: return r;
        case Op::Negate: return -n.args[0].eval(r);
        case Op::Add: return n.args[0].eval(r) + n.args[1].eval(r);
        case Op::Subtract: return n.args[0].eval(r) - n.args[1].eval(r);
        case Op::Multiply: return n.args[0].eval(r) * n.args[1].eval(r);
        case Op::Divide: {
            const double num = n.args[0].eval(r);
            const double den = n.args[1].eval(r);
            if (den == 0.0) throw DomainError("division by zero", r, to_string());
            return num / den;
        }
        case Op::Power: {
            const double base = n.args[0].eval(r);
            const double ex = n.args[1].eval(r);
            if (base == 0.0 && ex < 0.0) throw DomainError("zero raised to a negative power", r, to_string());
            if (base < 0.0 && ex != std::floor(ex))
                throw DomainError("negative base with non-integer exponent", r, to_string());
            return std::pow(base, ex);
        }
        case Op::Exp: return std::exp(n.args[0].eval(r));
        case Op::Log: {
            const double a = n.args[0].eval(r);
            if (!(a > 0.0)) throw DomainError("log of a nonpositive value", r, to_string());
            return std::log(a);
        }
        case Op::Sqrt: {
            const double a = n.args[0].eval(r);
            if (a < 0.0) throw DomainError("sqrt of a negative value", r, to_string());
            return std::sqrt(a);
        }
        case Op::Sinh: return std::sinh(n.args[0].eval(r));
        case Op::Cosh: return std::cosh(n.args[0].eval(r));
        case Op::Tanh: return std::tanh(n.args[0].eval(r));
        case Op::Min: return std::fmin(n.args[0].eval(r), n.args[1].eval(r));
        case Op::Max: return std::fmax(n.args[0].eval(r), n.args[1].eval(r));
        case Op::Piecewise: return r < n.value ? n.args[0].eval(r) : n.args[1].eval(r);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

namespace {

SignedLog log_eval_impl(const RadialExpr& e, double r) {
    using std::fabs;
    switch (e.op()) {
        case Op::Literal: return SignedLog::of(e.value());
        case Op::Variable: return SignedLog::of(r);
        case Op::Negate: {
            SignedLog a = log_eval_impl(e.child(0), r);
            a.sign = -a.sign;
            return a;
        }
        case Op::Add: return add_signed(log_eval_impl(e.child(0), r), log_eval_impl(e.child(1), r));
        case Op::Subtract: {
            SignedLog b = log_eval_impl(e.child(1), r);
            b.sign = -b.sign;
            return add_signed(log_eval_impl(e.child(0), r), b);
        }
        case Op::Multiply: {
            const SignedLog a = log_eval_impl(e.child(0), r);
            const SignedLog b = log_eval_impl(e.child(1), r);
            if (a.sign == 0 || b.sign == 0) return {};
            return {a.sign * b.sign, a.logabs + b.logabs};
        }
        case Op::Divide: {
            const SignedLog a = log_eval_impl(e.child(0), r);
            const SignedLog b = log_eval_impl(e.child(1), r);
            if (b.sign == 0) throw DomainError("division by zero", r, e.to_string());
            if (a.sign == 0) return {};
            return {a.sign * b.sign, a.logabs - b.logabs};
        }
        case Op::Power: {
            const SignedLog base = log_eval_impl(e.child(0), r);
            const double ex = log_eval_impl(e.child(1), r).value();
            if (base.sign == 0) {
                if (ex < 0.0) throw DomainError("zero raised to a negative power", r, e.to_string());
                if (ex == 0.0) return SignedLog::of(1.0);
                return {};
            }
            if (ex == 0.0) return SignedLog::of(1.0);
            int sign = 1;
            if (base.sign < 0) {
                if (ex != std::floor(ex)) throw DomainError("negative base with non-integer exponent", r, e.to_string());
                sign = std::fmod(fabs(ex), 2.0) == 1.0 ? -1 : 1;
            }
            return {sign, ex * base.logabs};
        }
        case Op::Exp: return {1, log_eval_impl(e.child(0), r).value()};
        case Op::Log: {
            const SignedLog a = log_eval_impl(e.child(0), r);
            if (a.sign <= 0) throw DomainError("log of a nonpositive value", r, e.to_string());
            return SignedLog::of(a.logabs);
        }
        case Op::Sqrt: {
            const SignedLog a = log_eval_impl(e.child(0), r);
            if (a.sign < 0) throw DomainError("sqrt of a negative value", r, e.to_string());
            return {a.sign, 0.5 * a.logabs};
        }
        case Op::Sinh:
        case Op::Cosh: {
            const double x = log_eval_impl(e.child(0), r).value();
            if (fabs(x) < 20.0) return SignedLog::of(e.op() == Op::Sinh ? std::sinh(x) : std::cosh(x));
            const double tail = std::exp(-2.0 * fabs(x));
            if (e.op() == Op::Cosh) return {1, fabs(x) - std::log(2.0) + std::log1p(tail)};
            return {x > 0 ? 1 : -1, fabs(x) - std::log(2.0) + std::log1p(-tail)};
        }
        case Op::Tanh: return SignedLog::of(std::tanh(log_eval_impl(e.child(0), r).value()));
        case Op::Min:
        case Op::Max: {
            const SignedLog a = log_eval_impl(e.child(0), r);
            const SignedLog b = log_eval_impl(e.child(1), r);
            auto less = [](const SignedLog& x, const SignedLog& y) {
                if (x.sign != y.sign) return x.sign < y.sign;
                if (x.sign == 0) return false;
                return x.sign > 0 ? x.logabs < y.logabs : x.logabs > y.logabs;
            };
            const bool a_less = less(a, b);
            if (e.op() == Op::Min) return a_less ? a : b;
            return a_less ? b : a;
        }
        case Op::Piecewise: return log_eval_impl(r < e.value() ? e.child(0) : e.child(1), r);
    }
    return {};
}

bool is_literal(const RadialExpr& e, double v) { return e.op() == Op::Literal && e.value() == v; }

// Constructors with constant folding, used by differentiation.
RadialExpr fold(Op op, const RadialExpr& a, const RadialExpr& b) {
    if (a.op() == Op::Literal && b.op() == Op::Literal) {
        const double v = RadialExpr::binary(op, a, b).eval(0.0);
        if (std::isfinite(v)) return RadialExpr::constant(v);
    }
    switch (op) {
        case Op::Add:
            if (is_literal(a, 0.0)) return b;
            if (is_literal(b, 0.0)) return a;
            break;
        case Op::Subtract:
            if (is_literal(b, 0.0)) return a;
            if (is_literal(a, 0.0)) return b.op() == Op::Literal ? RadialExpr::constant(-b.value())
                                                                 : RadialExpr::unary(Op::Negate, b);
            break;
        case Op::Multiply:
            if (is_literal(a, 0.0) || is_literal(b, 0.0)) return RadialExpr::constant(0.0);
            if (is_literal(a, 1.0)) return b;
            if (is_literal(b, 1.0)) return a;
            break;
        case Op::Divide:
            if (is_literal(a, 0.0)) return RadialExpr::constant(0.0);
            if (is_literal(b, 1.0)) return a;
            break;
        case Op::Power:
            if (is_literal(b, 1.0)) return a;
            if (is_literal(b, 0.0)) return RadialExpr::constant(1.0);
            break;
        default: break;
    }
    return RadialExpr::binary(op, a, b);
}

RadialExpr fold_neg(const RadialExpr& a) {
    if (a.op() == Op::Literal) return RadialExpr::constant(-a.value());
    if (a.op() == Op::Negate) return a.child(0);
    return RadialExpr::unary(Op::Negate, a);
}

RadialExpr fold_unary(Op op, const RadialExpr& a) {
    if (a.op() == Op::Literal) {
        try {
            const double v = RadialExpr::unary(op, a).eval(0.0);
            if (std::isfinite(v)) return RadialExpr::constant(v);
        } catch (const DomainError&) {
        }
    }
    return RadialExpr::unary(op, a);
}

RadialExpr differentiate(const RadialExpr& e) {
    const RadialExpr zero = RadialExpr::constant(0.0);
    switch (e.op()) {
        case Op::Literal: return zero;
        case Op::Variable: return RadialExpr::constant(1.0);
        case Op::Negate: return fold_neg(differentiate(e.child(0)));
        case Op::Add: return fold(Op::Add, differentiate(e.child(0)), differentiate(e.child(1)));
        case Op::Subtract: return fold(Op::Subtract, differentiate(e.child(0)), differentiate(e.child(1)));
        case Op::Multiply: {
            const RadialExpr& a = e.child(0);
            const RadialExpr& b = e.child(1);
            return fold(Op::Add, fold(Op::Multiply, differentiate(a), b), fold(Op::Multiply, a, differentiate(b)));
        }
        case Op::Divide: {
            const RadialExpr& a = e.child(0);
            const RadialExpr& b = e.child(1);
            const RadialExpr num = fold(Op::Subtract, fold(Op::Multiply, differentiate(a), b),
                                        fold(Op::Multiply, a, differentiate(b)));
            return fold(Op::Divide, num, fold(Op::Multiply, b, b));
        }
        case Op::Power: {
            const RadialExpr& a = e.child(0);
            const RadialExpr& b = e.child(1);
            if (const auto c = b.constant_value()) {
                // c * a^(c-1) * a'
                const RadialExpr scaled = fold(Op::Multiply, RadialExpr::constant(*c),
                                               fold(Op::Power, a, RadialExpr::constant(*c - 1.0)));
                return fold(Op::Multiply, scaled, differentiate(a));
            }
            // a^b * (b' log a + b a'/a)
            const RadialExpr inner =
                fold(Op::Add, fold(Op::Multiply, differentiate(b), fold_unary(Op::Log, a)),
                     fold(Op::Divide, fold(Op::Multiply, b, differentiate(a)), a));
            return fold(Op::Multiply, e, inner);
        }
        case Op::Exp: return fold(Op::Multiply, e, differentiate(e.child(0)));
        case Op::Log: return fold(Op::Divide, differentiate(e.child(0)), e.child(0));
        case Op::Sqrt:
            return fold(Op::Divide, differentiate(e.child(0)), fold(Op::Multiply, RadialExpr::constant(2.0), e));
        case Op::Sinh: return fold(Op::Multiply, fold_unary(Op::Cosh, e.child(0)), differentiate(e.child(0)));
        case Op::Cosh: return fold(Op::Multiply, fold_unary(Op::Sinh, e.child(0)), differentiate(e.child(0)));
        case Op::Tanh: {
            const RadialExpr sech2 = fold(Op::Subtract, RadialExpr::constant(1.0), fold(Op::Multiply, e, e));
            return fold(Op::Multiply, sech2, differentiate(e.child(0)));
        }
        case Op::Min:
        case Op::Max:
        case Op::Piecewise:
            throw std::invalid_argument("cannot differentiate non-smooth node " + e.to_string());
    }
    return zero;
}

}  // namespace

double RadialExpr::log_eval(double r) const {
    const SignedLog v = log_eval_impl(*this, r);
    if (v.sign < 0) throw DomainError("logarithm of a negative value", r, to_string());
    if (std::isnan(v.logabs)) throw DomainError("indeterminate value", r, to_string());
    return v.logabs;
}

RadialExpr RadialExpr::derivative() const { return differentiate(*this); }

RadialExpr operator+(const RadialExpr& a, const RadialExpr& b) { return RadialExpr::binary(Op::Add, a, b); }
RadialExpr operator-(const RadialExpr& a, const RadialExpr& b) { return RadialExpr::binary(Op::Subtract, a, b); }
RadialExpr operator*(const RadialExpr& a, const RadialExpr& b) { return RadialExpr::binary(Op::Multiply, a, b); }
RadialExpr operator/(const RadialExpr& a, const RadialExpr& b) { return RadialExpr::binary(Op::Divide, a, b); }
RadialExpr operator-(const RadialExpr& a) { return RadialExpr::unary(Op::Negate, a); }
RadialExpr pow(const RadialExpr& base, const RadialExpr& exponent) {
    return RadialExpr::binary(Op::Power, base, exponent);
}
RadialExpr exp(const RadialExpr& a) { return RadialExpr::unary(Op::Exp, a); }
RadialExpr log(const RadialExpr& a) { return RadialExpr::unary(Op::Log, a); }
RadialExpr sqrt(const RadialExpr& a) { return RadialExpr::unary(Op::Sqrt, a); }

}  // namespace heatcons
