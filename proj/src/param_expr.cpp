#include "qshap/param_expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "qshap/errors.hpp"

namespace qshap {

namespace detail {
struct ParamExprNode {
  enum class Op { Const, Theta, Feature, Add, Sub, Mul };
  Op op = Op::Const;
  double value = 0.0;
  int index = 0;
  std::shared_ptr<const ParamExprNode> lhs, rhs;
};
}  // namespace detail

namespace {

using Node = detail::ParamExprNode;

std::shared_ptr<const Node> leaf(Node::Op op, double value, int index) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->index = index;
  return n;
}

double eval_node(const Node& n, std::span<const double> theta, std::span<const double> x) {
  switch (n.op) {
    case Node::Op::Const:
      return n.value;
    case Node::Op::Theta:
      if (n.index < 0 || static_cast<std::size_t>(n.index) >= theta.size())
        throw ConfigError("theta[" + std::to_string(n.index) + "] out of range (dim " +
                          std::to_string(theta.size()) + ")");
      return theta[n.index];
    case Node::Op::Feature:
      if (n.index < 0 || static_cast<std::size_t>(n.index) >= x.size())
        throw ConfigError("x[" + std::to_string(n.index) + "] out of range (dim " +
                          std::to_string(x.size()) + ")");
      return x[n.index];
    case Node::Op::Add:
      return eval_node(*n.lhs, theta, x) + eval_node(*n.rhs, theta, x);
    case Node::Op::Sub:
      return eval_node(*n.lhs, theta, x) - eval_node(*n.rhs, theta, x);
    case Node::Op::Mul:
      return eval_node(*n.lhs, theta, x) * eval_node(*n.rhs, theta, x);
  }
  return 0.0;
}

int max_index(const Node& n, Node::Op which) {
  switch (n.op) {
    case Node::Op::Const:
      return -1;
    case Node::Op::Theta:
    case Node::Op::Feature:
      return n.op == which ? n.index : -1;
    default:
      return std::max(max_index(*n.lhs, which), max_index(*n.rhs, which));
  }
}

void print_node(const Node& n, std::string& out) {
  switch (n.op) {
    case Node::Op::Const: {
      char buf[64];
      auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), n.value);
      (void)ec;
      out.append(buf, p);
      return;
    }
    case Node::Op::Theta:
      out += "theta[" + std::to_string(n.index) + "]";
      return;
    case Node::Op::Feature:
      out += "x[" + std::to_string(n.index) + "]";
      return;
    case Node::Op::Add:
    case Node::Op::Sub:
    case Node::Op::Mul:
      out += '(';
      print_node(*n.lhs, out);
      out += n.op == Node::Op::Add ? " + " : n.op == Node::Op::Sub ? " - " : " * ";
      print_node(*n.rhs, out);
      out += ')';
      return;
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::shared_ptr<const Node> run() {
    auto e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return e;
  }

 private:
  std::shared_ptr<const Node> expr() {
    auto lhs = term();
    for (;;) {
      skip_ws();
      if (consume('+')) {
        lhs = binary(Node::Op::Add, lhs, term());
      } else if (consume('-')) {
        lhs = binary(Node::Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  std::shared_ptr<const Node> term() {
    auto lhs = unary();
    for (;;) {
      skip_ws();
      if (consume('*')) {
        lhs = binary(Node::Op::Mul, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  std::shared_ptr<const Node> unary() {
    skip_ws();
    if (consume('-')) return binary(Node::Op::Sub, leaf(Node::Op::Const, 0.0, 0), unary());
    return primary();
  }

  std::shared_ptr<const Node> primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expr();
      skip_ws();
      if (!consume(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (keyword("pi")) return leaf(Node::Op::Const, std::numbers::pi, 0);
    if (keyword("theta")) return leaf(Node::Op::Theta, 0.0, bracket_index());
    if (keyword("x")) return leaf(Node::Op::Feature, 0.0, bracket_index());
    fail("unexpected character");
    return nullptr;
  }

  std::shared_ptr<const Node> number() {
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [p, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{}) fail("bad numeric literal");
    pos_ = static_cast<std::size_t>(p - text_.data());
    return leaf(Node::Op::Const, value, 0);
  }

  int bracket_index() {
    skip_ws();
    if (!consume('[')) fail("expected '['");
    skip_ws();
    int index = 0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [p, ec] = std::from_chars(begin, end, index);
    if (ec != std::errc{} || index < 0) fail("bad index");
    pos_ = static_cast<std::size_t>(p - text_.data());
    skip_ws();
    if (!consume(']')) fail("expected ']'");
    return index;
  }

  bool keyword(std::string_view kw) {
    if (text_.substr(pos_, kw.size()) != kw) return false;
    std::size_t after = pos_ + kw.size();
    if (after < text_.size()) {
      char c = text_[after];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') return false;
    }
    pos_ = after;
    return true;
  }

  static std::shared_ptr<const Node> binary(Node::Op op, std::shared_ptr<const Node> lhs,
                                            std::shared_ptr<const Node> rhs) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw ConfigError("parameter expression '" + std::string(text_) + "': " + what +
                      " at offset " + std::to_string(pos_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::shared_ptr<const Node> binary_public(Node::Op op, std::shared_ptr<const Node> lhs,
                                          std::shared_ptr<const Node> rhs) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

}  // namespace

ParamExpr ParamExpr::constant(double value) { return ParamExpr(leaf(Node::Op::Const, value, 0)); }
ParamExpr ParamExpr::pi() { return constant(std::numbers::pi); }
ParamExpr ParamExpr::theta(int index) { return ParamExpr(leaf(Node::Op::Theta, 0.0, index)); }
ParamExpr ParamExpr::feature(int index) { return ParamExpr(leaf(Node::Op::Feature, 0.0, index)); }

ParamExpr operator+(const ParamExpr& a, const ParamExpr& b) {
  return ParamExpr(binary_public(Node::Op::Add, a.root_, b.root_));
}
ParamExpr operator-(const ParamExpr& a, const ParamExpr& b) {
  return ParamExpr(binary_public(Node::Op::Sub, a.root_, b.root_));
}
ParamExpr operator*(const ParamExpr& a, const ParamExpr& b) {
  return ParamExpr(binary_public(Node::Op::Mul, a.root_, b.root_));
}

ParamExpr ParamExpr::parse(std::string_view text) { return ParamExpr(Parser(text).run()); }

double ParamExpr::eval(std::span<const double> theta, std::span<const double> x) const {
  return eval_node(*root_, theta, x);
}

int ParamExpr::max_theta_index() const { return max_index(*root_, Node::Op::Theta); }
int ParamExpr::max_feature_index() const { return max_index(*root_, Node::Op::Feature); }

std::string ParamExpr::to_string() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

}  // namespace qshap
