#include "stableform/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "stableform/errors.hpp"

namespace stableform {
namespace expr {

enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Log, Exp, Sqrt };

struct Expression::Node {
    Op op;
    double value = 0.0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->value = v;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

struct Lexer {
    const std::string& s;
    std::size_t pos = 0;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eof() {
        skip();
        return pos >= s.size();
    }
    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool consume(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool consume_word(const char* w) {
        skip();
        std::size_t n = std::string(w).size();
        if (s.compare(pos, n, w) == 0) {
            // words must not be followed by another identifier char
            char nx = pos + n < s.size() ? s[pos + n] : '\0';
            if (!std::isalnum(static_cast<unsigned char>(nx)) && nx != '_') {
                pos += n;
                return true;
            }
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw ConfigError("expression parse error at position " + std::to_string(pos) +
                          ": " + what + " in \"" + s + "\"");
    }
};

struct Parser {
    Lexer lex;

    NodePtr expression() {
        NodePtr n = term();
        for (;;) {
            if (lex.consume('+'))
                n = make(Op::Add, n, term());
            else if (lex.consume('-'))
                n = make(Op::Sub, n, term());
            else
                return n;
        }
    }

    NodePtr term() {
        NodePtr n = unary();
        for (;;) {
            if (lex.consume('*'))
                n = make(Op::Mul, n, unary());
            else if (lex.consume('/'))
                n = make(Op::Div, n, unary());
            else
                return n;
        }
    }

    NodePtr unary() {
        if (lex.consume('-')) return make(Op::Neg, unary());
        if (lex.consume('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (lex.consume('^')) return make(Op::Pow, base, unary());  // right assoc
        return base;
    }

    NodePtr atom() {
        if (lex.consume('(')) {
            NodePtr n = expression();
            if (!lex.consume(')')) lex.fail("expected ')'");
            return n;
        }
        if (lex.consume_word("pow")) {
            if (!lex.consume('(')) lex.fail("expected '(' after pow");
            NodePtr a = expression();
            if (!lex.consume(',')) lex.fail("expected ',' in pow");
            NodePtr b = expression();
            if (!lex.consume(')')) lex.fail("expected ')' after pow");
            return make(Op::Pow, a, b);
        }
        if (lex.consume_word("log")) return fn(Op::Log);
        if (lex.consume_word("exp")) return fn(Op::Exp);
        if (lex.consume_word("sqrt")) return fn(Op::Sqrt);
        if (lex.consume_word("|x|") || lex.consume_word("r")) return make(Op::Var);
        // |x| without word-boundary logic (lexer treats '|' as punctuation)
        if (lex.peek() == '|') {
            lex.consume('|');
            if (!(lex.consume('x') && lex.consume('|'))) lex.fail("expected |x|");
            return make(Op::Var);
        }
        char c = lex.peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            double v = std::strtod(lex.s.c_str() + lex.pos, &end);
            if (end == lex.s.c_str() + lex.pos) lex.fail("bad number");
            lex.pos = end - lex.s.c_str();
            return make(Op::Const, nullptr, nullptr, v);
        }
        lex.fail("unexpected token");
    }

    NodePtr fn(Op op) {
        if (!lex.consume('(')) lex.fail("expected '(' after function");
        NodePtr a = expression();
        if (!lex.consume(')')) lex.fail("expected ')'");
        return make(op, a);
    }
};

double eval_node(const Expression::Node& n, double r) {
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::Var: return r;
        case Op::Add: return eval_node(*n.a, r) + eval_node(*n.b, r);
        case Op::Sub: return eval_node(*n.a, r) - eval_node(*n.b, r);
        case Op::Mul: return eval_node(*n.a, r) * eval_node(*n.b, r);
        case Op::Div: return eval_node(*n.a, r) / eval_node(*n.b, r);
        case Op::Pow: return std::pow(eval_node(*n.a, r), eval_node(*n.b, r));
        case Op::Neg: return -eval_node(*n.a, r);
        case Op::Log: return std::log(eval_node(*n.a, r));
        case Op::Exp: return std::exp(eval_node(*n.a, r));
        case Op::Sqrt: return std::sqrt(eval_node(*n.a, r));
    }
    return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& text) {
    Parser p{Lexer{text}};
    NodePtr root = p.expression();
    if (!p.lex.eof()) p.lex.fail("trailing input");
    return Expression(std::move(root), text);
}

double Expression::eval(double r) const { return eval_node(*root_, r); }

Expression::Expression(std::shared_ptr<const Node> root, std::string text)
    : root_(std::move(root)), text_(std::move(text)) {}

Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;
Expression::~Expression() = default;

}  // namespace expr
}  // namespace stableform
