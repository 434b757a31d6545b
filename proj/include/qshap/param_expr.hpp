#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace qshap {

namespace detail {
struct ParamExprNode;
}

/// Arithmetic expression over circuit parameters: constants, variational
/// parameters theta[i], features x[i], and {+, -, *}. Immutable and cheap to
/// copy (nodes are shared), so circuits can be handed to parallel workers.
///
/// The textual grammar accepted by parse():
///   expr   := term (('+'|'-') term)*
///   term   := unary ('*' unary)*
///   unary  := '-' unary | primary
///   primary:= number | 'pi' | 'theta' '[' int ']' | 'x' '[' int ']' | '(' expr ')'
class ParamExpr {
 public:
  ParamExpr() : ParamExpr(constant(0.0)) {}

  static ParamExpr constant(double value);
  static ParamExpr pi();
  static ParamExpr theta(int index);
  static ParamExpr feature(int index);

  friend ParamExpr operator+(const ParamExpr& a, const ParamExpr& b);
  friend ParamExpr operator-(const ParamExpr& a, const ParamExpr& b);
  friend ParamExpr operator*(const ParamExpr& a, const ParamExpr& b);

  /// Throws ConfigError when the text does not match the grammar.
  static ParamExpr parse(std::string_view text);

  double eval(std::span<const double> theta, std::span<const double> x) const;

  /// Largest referenced index, -1 when the expression does not use the array.
  int max_theta_index() const;
  int max_feature_index() const;

  bool is_constant() const { return max_theta_index() < 0 && max_feature_index() < 0; }

  std::string to_string() const;

 private:
  explicit ParamExpr(std::shared_ptr<const detail::ParamExprNode> root)
      : root_(std::move(root)) {}
  std::shared_ptr<const detail::ParamExprNode> root_;
};

}  // namespace qshap
