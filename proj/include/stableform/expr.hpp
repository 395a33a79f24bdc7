#pragma once

#include <memory>
#include <string>

namespace stableform {
namespace expr {

// Arithmetic expression in the single variable |x| (written `|x|` or `r`).
// Grammar: + - * / ^ pow(a,b) log exp sqrt, numeric literals, parentheses.
class Expression {
  public:
    static Expression parse(const std::string& text);  // throws ConfigError

    double eval(double r) const;
    const std::string& text() const { return text_; }

    Expression(Expression&&) noexcept;
    Expression& operator=(Expression&&) noexcept;
    Expression(const Expression&);
    Expression& operator=(const Expression&);
    ~Expression();

    struct Node;  // exposed for the parser implementation

  private:
    Expression(std::shared_ptr<const Node> root, std::string text);
    std::shared_ptr<const Node> root_;
    std::string text_;
};

}  // namespace expr
}  // namespace stableform
