#pragma once

// Minimal arithmetic grammar for initial-condition strings:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('-' | '+')* pow
//   pow    := primary ('^' unary)?        right-associative, below unary minus
//   primary:= number | 'r' | 'z' | fn '(' expr ')' | '(' expr ')'
//   fn     := 'exp' | 'sin' | 'cos'
// Parsed once into a small tree, evaluated per grid node.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "axmhd/grid.hpp"

namespace axmhd {

struct ExprError : Error { using Error::Error; };

namespace detail {

enum class ExprOp { Const, VarR, VarZ, Add, Sub, Mul, Div, Pow, Neg, Exp, Sin, Cos };

struct ExprNode {
    ExprOp op;
    double value = 0;
    std::unique_ptr<ExprNode> a, b;
};

inline double eval_node(const ExprNode& n, double r, double z) {
    switch (n.op) {
        case ExprOp::Const: return n.value;
        case ExprOp::VarR: return r;
        case ExprOp::VarZ: return z;
        case ExprOp::Add: return eval_node(*n.a, r, z) + eval_node(*n.b, r, z);
        case ExprOp::Sub: return eval_node(*n.a, r, z) - eval_node(*n.b, r, z);
        case ExprOp::Mul: return eval_node(*n.a, r, z) * eval_node(*n.b, r, z);
        case ExprOp::Div: return eval_node(*n.a, r, z) / eval_node(*n.b, r, z);
        case ExprOp::Pow: return std::pow(eval_node(*n.a, r, z), eval_node(*n.b, r, z));
        case ExprOp::Neg: return -eval_node(*n.a, r, z);
        case ExprOp::Exp: return std::exp(eval_node(*n.a, r, z));
        case ExprOp::Sin: return std::sin(eval_node(*n.a, r, z));
        case ExprOp::Cos: return std::cos(eval_node(*n.a, r, z));
    }
    return 0;  // unreachable
}

class ExprParser {
  public:
    explicit ExprParser(const std::string& text) : s_(text) {}

    std::unique_ptr<ExprNode> parse() {
        auto root = parse_expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return root;
    }

  private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ExprError("expression: " + what + " at column " +
                        std::to_string(pos_ + 1) + " of \"" + s_ + "\"");
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    std::unique_ptr<ExprNode> make(ExprOp op, std::unique_ptr<ExprNode> a = nullptr,
                                   std::unique_ptr<ExprNode> b = nullptr) {
        auto n = std::make_unique<ExprNode>();
        n->op = op;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    std::unique_ptr<ExprNode> parse_expr() {
        auto lhs = parse_term();
        while (true) {
            if (eat('+')) lhs = make(ExprOp::Add, std::move(lhs), parse_term());
            else if (eat('-')) lhs = make(ExprOp::Sub, std::move(lhs), parse_term());
            else return lhs;
        }
    }

    std::unique_ptr<ExprNode> parse_term() {
        auto lhs = parse_unary();
        while (true) {
            if (eat('*')) lhs = make(ExprOp::Mul, std::move(lhs), parse_unary());
            else if (eat('/')) lhs = make(ExprOp::Div, std::move(lhs), parse_unary());
            else return lhs;
        }
    }

    // "-r^2" is -(r^2); the exponent reopens at the unary level so "2^-3" works
    std::unique_ptr<ExprNode> parse_unary() {
        if (eat('-')) return make(ExprOp::Neg, parse_unary());
        if (eat('+')) return parse_unary();
        return parse_pow();
    }

    std::unique_ptr<ExprNode> parse_pow() {
        auto base = parse_primary();
        if (eat('^')) return make(ExprOp::Pow, std::move(base), parse_unary());
        return base;
    }

    std::unique_ptr<ExprNode> parse_primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];

        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* start = s_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(start, &end);
            if (end == start) fail("malformed number");
            pos_ += std::size_t(end - start);
            auto n = make(ExprOp::Const);
            n->value = v;
            return n;
        }

        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   std::isalpha(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            if (name == "r") return make(ExprOp::VarR);
            if (name == "z") return make(ExprOp::VarZ);
            ExprOp fn;
            if (name == "exp") fn = ExprOp::Exp;
            else if (name == "sin") fn = ExprOp::Sin;
            else if (name == "cos") fn = ExprOp::Cos;
            else {
                pos_ = start;
                fail("unknown identifier '" + name + "'");
            }
            if (!eat('(')) fail("expected '(' after function name");
            auto arg = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return make(fn, std::move(arg));
        }

        if (eat('(')) {
            auto inner = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

}  // namespace detail

// Compiled expression over the meridian coordinates.
class Expression {
  public:
    Expression() = default;
    explicit Expression(const std::string& text)
        : root_(detail::ExprParser(text).parse()), text_(text) {}

    double operator()(double r, double z) const {
        if (!root_) return 0.0;
        return detail::eval_node(*root_, r, z);
    }

    bool empty() const { return !root_; }
    const std::string& text() const { return text_; }

  private:
    std::shared_ptr<const detail::ExprNode> root_;
    std::string text_;
};

}  // namespace axmhd
