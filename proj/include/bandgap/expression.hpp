#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace bandgap {

/// A parsed scalar expression in the variables x and y.
///
/// Grammar: numbers, `x`, `y`, `pi`, `e`, binary `+ - * /`, `^` (power,
/// right associative), unary minus, parentheses and the functions
/// `exp log sqrt sin cos abs`. Evaluation is pure and thread-safe.
class Expression {
 public:
  static Expression parse(std::string_view text);

  double operator()(double x, double y) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  Expression(std::string text, std::shared_ptr<const Node> root)
      : text_(std::move(text)), root_(std::move(root)) {}

  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace bandgap
