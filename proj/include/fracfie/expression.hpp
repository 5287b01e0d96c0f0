#pragma once

/**
 * @file expression.hpp
 * @brief Arithmetic expressions over the variables xi, y and r.
 *
 * Grammar (lowest to highest precedence):
 *
 *   expr    := term (('+' | '-') term)*
 *   term    := unary (('*' | '/') unary)*
 *   unary   := '-' unary | power
 *   power   := primary ('^' unary)?          right-associative
 *   primary := number | name | name '(' expr ')' | '(' expr ')'
 *
 * Names are the variables xi, y, r, the constant pi, and the functions
 * sqrt, exp, sin, cos, abs, gamma. Parsed trees are immutable; evaluation
 * runs a flattened postfix program and is safe from any number of threads.
 */

#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fracfie/error.hpp"
#include "fracfie/special.hpp"

namespace fracfie::expr {

enum class Variable : std::uint8_t { xi, y, r };
enum class Function : std::uint8_t { sqrt, exp, sin, cos, abs, gamma };
enum class NodeKind : std::uint8_t { number, pi, variable, negate, add, subtract, multiply, divide, power, call };

inline const char* name(Variable v) {
    switch (v) {
    case Variable::xi: return "xi";
    case Variable::y: return "y";
    case Variable::r: return "r";
    }
    return "?";
}

inline const char* name(Function f) {
    switch (f) {
    case Function::sqrt: return "sqrt";
    case Function::exp: return "exp";
    case Function::sin: return "sin";
    case Function::cos: return "cos";
    case Function::abs: return "abs";
    case Function::gamma: return "gamma";
    }
    return "?";
}

struct Node {
    NodeKind kind;
    std::size_t offset = 0;
    double value = 0.0;
    Variable variable = Variable::xi;
    Function function = Function::sqrt;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

using NodePtr = std::shared_ptr<const Node>;

/// Variable values for one evaluation.
struct Bindings {
    double xi = 0.0;
    double y = 0.0;
    double r = 0.0;
};

/// Structural equality, ignoring source offsets.
inline bool same_tree(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case NodeKind::number: return a.value == b.value;
    case NodeKind::pi: return true;
    case NodeKind::variable: return a.variable == b.variable;
    case NodeKind::negate: return same_tree(*a.lhs, *b.lhs);
    case NodeKind::call: return a.function == b.function && same_tree(*a.lhs, *b.lhs);
    default: return same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
    }
}

/// Fully parenthesized canonical text; parsing it gives back the same tree.
inline std::string print(const Node& n) {
    auto binary = [&](const char* op) { return "(" + print(*n.lhs) + " " + op + " " + print(*n.rhs) + ")"; };
    switch (n.kind) {
    case NodeKind::number: {
        std::array<char, 32> buf{};
        const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), n.value);
        return std::string(buf.data(), res.ptr);
    }
    case NodeKind::pi: return "pi";
    case NodeKind::variable: return name(n.variable);
    case NodeKind::negate: return "(-" + print(*n.lhs) + ")";
    case NodeKind::add: return binary("+");
    case NodeKind::subtract: return binary("-");
    case NodeKind::multiply: return binary("*");
    case NodeKind::divide: return binary("/");
    case NodeKind::power: return binary("^");
    case NodeKind::call: return std::string(name(n.function)) + "(" + print(*n.lhs) + ")";
    }
    return "";
}

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse() {
        skip_space();
        if (pos_ == src_.size()) throw ParseError("empty expression", pos_, {"number", "name", "(", "-"});
        NodePtr root = expression();
        skip_space();
        if (pos_ != src_.size())
            throw ParseError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_,
                             {"+", "-", "*", "/", "^", "end of input"});
        return root;
    }

private:
    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr make_binary(NodeKind kind, std::size_t offset, NodePtr lhs, NodePtr rhs) {
        auto n = std::make_shared<Node>();
        n->kind = kind;
        n->offset = offset;
        n->lhs = std::move(lhs);
        n->rhs = std::move(rhs);
        return n;
    }

    NodePtr expression() {
        NodePtr lhs = term();
        for (;;) {
            skip_space();
            const std::size_t at = pos_;
            if (accept('+'))
                lhs = make_binary(NodeKind::add, at, lhs, term());
            else if (accept('-'))
                lhs = make_binary(NodeKind::subtract, at, lhs, term());
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            skip_space();
            const std::size_t at = pos_;
            if (accept('*'))
                lhs = make_binary(NodeKind::multiply, at, lhs, unary());
            else if (accept('/'))
                lhs = make_binary(NodeKind::divide, at, lhs, unary());
            else
                return lhs;
        }
    }

    NodePtr unary() {
        skip_space();
        const std::size_t at = pos_;
        if (accept('-')) {
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::negate;
            n->offset = at;
            n->lhs = unary();
            return n;
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        skip_space();
        const std::size_t at = pos_;
        if (accept('^')) return make_binary(NodeKind::power, at, base, unary());
        return base;
    }

    NodePtr primary() {
        skip_space();
        const std::size_t at = pos_;
        if (pos_ == src_.size()) throw ParseError("unexpected end of input", pos_, {"number", "name", "(", "-"});
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = expression();
            if (!accept(')')) throw ParseError("unbalanced parenthesis", pos_, {")"});
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return named(at);
        throw ParseError("unexpected '" + std::string(1, c) + "'", pos_, {"number", "name", "(", "-"});
    }

    NodePtr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t count = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_, ++count;
            return count;
        };
        std::size_t mantissa = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) throw ParseError("malformed number", start, {"digit"});
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) throw ParseError("malformed exponent", pos_, {"digit"});
        }
        double value = 0.0;
        const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (res.ec != std::errc() || !std::isfinite(value))
            throw ParseError("number out of range", start, {"finite number"});
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::number;
        n->offset = start;
        n->value = value;
        return n;
    }

    NodePtr named(std::size_t at) {
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string_view word = src_.substr(at, pos_ - at);
        auto n = std::make_shared<Node>();
        n->offset = at;

        static constexpr std::array variables{Variable::xi, Variable::y, Variable::r};
        for (Variable v : variables)
            if (word == name(v)) {
                n->kind = NodeKind::variable;
                n->variable = v;
                return n;
            }
        if (word == "pi") {
            n->kind = NodeKind::pi;
            return n;
        }
        static constexpr std::array functions{Function::sqrt, Function::exp, Function::sin,
                                              Function::cos,  Function::abs, Function::gamma};
        for (Function f : functions)
            if (word == name(f)) {
                if (!accept('(')) throw ParseError("function '" + std::string(word) + "' needs an argument", pos_, {"("});
                n->kind = NodeKind::call;
                n->function = f;
                n->lhs = expression();
                if (!accept(')')) throw ParseError("unbalanced parenthesis", pos_, {")"});
                return n;
            }
        throw ParseError("unknown name '" + std::string(word) + "'", at,
                         {"xi", "y", "r", "pi", "sqrt", "exp", "sin", "cos", "abs", "gamma"});
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

struct Instruction {
    NodeKind kind;
    double value = 0.0;
    Variable variable = Variable::xi;
    Function function = Function::sqrt;
    std::size_t offset = 0;
};

inline std::size_t compile(const Node& n, std::vector<Instruction>& program) {
    std::size_t depth = 1;
    if (n.lhs) depth = std::max(depth, compile(*n.lhs, program));
    if (n.rhs) depth = std::max(depth, 1 + compile(*n.rhs, program));
    program.push_back({n.kind, n.value, n.variable, n.function, n.offset});
    return depth;
}

inline double apply_function(Function f, double x, std::size_t offset) {
    switch (f) {
    case Function::sqrt:
        if (x < 0.0) throw ExpressionEvalError("sqrt of negative value " + std::to_string(x), offset);
        return std::sqrt(x);
    case Function::exp: return std::exp(x);
    case Function::sin: return std::sin(x);
    case Function::cos: return std::cos(x);
    case Function::abs: return std::abs(x);
    case Function::gamma:
        if (!(x > 0.0)) throw ExpressionEvalError("gamma needs a positive argument, got " + std::to_string(x), offset);
        return special::gamma(x);
    }
    return 0.0;
}

} // namespace detail

/// Parsed, immutable expression.
class Expression {
public:
    static Expression parse(std::string_view src) {
        Expression e;
        e.source_ = std::string(src);
        e.root_ = detail::Parser(e.source_).parse();
        e.depth_ = detail::compile(*e.root_, e.program_);
        e.collect(*e.root_);
        return e;
    }

    const std::string& source() const noexcept { return source_; }
    const Node& root() const noexcept { return *root_; }
    std::string canonical() const { return print(*root_); }

    bool uses(Variable v) const noexcept { return (variables_ & (1u << static_cast<unsigned>(v))) != 0; }

    /// Evaluates the expression. Throws ExpressionEvalError on division by
    /// zero, roots of negatives, and non-finite results.
    double evaluate(const Bindings& b) const {
        constexpr std::size_t inline_depth = 32;
        std::array<double, inline_depth> small{};
        std::vector<double> large;
        double* stack = small.data();
        if (depth_ > inline_depth) {
            large.resize(depth_);
            stack = large.data();
        }
        std::size_t top = 0;
        for (const auto& ins : program_) {
            double result = 0.0;
            switch (ins.kind) {
            case NodeKind::number: result = ins.value; break;
            case NodeKind::pi: result = std::numbers::pi; break;
            case NodeKind::variable:
                result = ins.variable == Variable::xi ? b.xi : ins.variable == Variable::y ? b.y : b.r;
                break;
            case NodeKind::negate: result = -stack[--top]; break;
            case NodeKind::call: result = detail::apply_function(ins.function, stack[--top], ins.offset); break;
            default: {
                const double rhs = stack[--top];
                const double lhs = stack[--top];
                switch (ins.kind) {
                case NodeKind::add: result = lhs + rhs; break;
                case NodeKind::subtract: result = lhs - rhs; break;
                case NodeKind::multiply: result = lhs * rhs; break;
                case NodeKind::divide:
                    if (rhs == 0.0) throw ExpressionEvalError("division by zero", ins.offset);
                    result = lhs / rhs;
                    break;
                case NodeKind::power:
                    if (lhs < 0.0 && rhs != std::trunc(rhs))
                        throw ExpressionEvalError("non-integer power of negative value", ins.offset);
                    if (lhs == 0.0 && rhs < 0.0) throw ExpressionEvalError("division by zero", ins.offset);
                    result = std::pow(lhs, rhs);
                    break;
                default: break;
                }
            }
            }
            if (!std::isfinite(result)) throw ExpressionEvalError("non-finite result", ins.offset);
            stack[top++] = result;
        }
        return stack[0];
    }

    double operator()(double xi, double y = 0.0, double r = 0.0) const { return evaluate({xi, y, r}); }

    friend bool operator==(const Expression& a, const Expression& b) { return same_tree(*a.root_, *b.root_); }

private:
    Expression() = default;

    void collect(const Node& n) {
        if (n.kind == NodeKind::variable) variables_ |= 1u << static_cast<unsigned>(n.variable);
        if (n.lhs) collect(*n.lhs);
        if (n.rhs) collect(*n.rhs);
    }

    std::string source_;
    NodePtr root_;
    std::vector<detail::Instruction> program_;
    std::size_t depth_ = 1;
    unsigned variables_ = 0;
};

inline Expression parse_expression(std::string_view src) { return Expression::parse(src); }

} // namespace fracfie::expr
