#pragma once

// Cost expressions over the processor count `p`, the problem dimension `n`
// and named constants.
//
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?
//   atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
//
// so that `-2^2 == -4`, `2^-1 == 0.5` and `2^3^2 == 512`.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>

namespace speeduplab {

using Constants = std::map<std::string, double, std::less<>>;

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Log, Log2, Exp, Sqrt };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct NumberNode {
  double value;
};
struct IdentNode {
  std::string name;
};
struct NegateNode {
  ExprPtr operand;
};
struct BinaryNode {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct CallNode {
  Function function;
  ExprPtr argument;
};

struct ExprNode {
  std::variant<NumberNode, IdentNode, NegateNode, BinaryNode, CallNode> node;
};

/// Immutable expression tree. Copies share structure.
class Expr {
 public:
  static Expr number(double value);
  static Expr ident(std::string name);
  static Expr negate(const Expr& operand);
  static Expr binary(BinaryOp op, const Expr& lhs, const Expr& rhs);
  static Expr call(Function function, const Expr& argument);

  /// `root` must be non-null.
  explicit Expr(ExprPtr root) : root_(std::move(root)) {}

  const ExprNode& root() const noexcept { return *root_; }
  const ExprPtr& ptr() const noexcept { return root_; }

  /// Structural equality; numeric literals compare bitwise.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  ExprPtr root_;
};

/// Values for the free identifiers of an expression. The constant table is
/// borrowed and must outlive the bindings.
struct Bindings {
  double p = 1.0;
  double n = 1.0;
  const Constants* constants = nullptr;
};

/// Throws SyntaxError (1-based offset) on malformed input or unknown functions.
Expr parse(std::string_view source);

/// Text that parses back to a structurally identical tree.
std::string unparse(const Expr& expr);

/// Throws EvalError on unbound identifiers, domain errors (p < 1, n < 1,
/// log/sqrt of non-positive values, division by zero) and non-finite
/// intermediate results.
double evaluate(const Expr& expr, const Bindings& bindings);

/// Replaces every subtree that references neither `p` nor `n` by its value
/// under `constants`. Unbound constants are left in place.
Expr fold_constants(const Expr& expr, const Constants& constants);

/// Every identifier that appears in the tree, including `p` and `n`.
std::set<std::string, std::less<>> identifiers(const Expr& expr);

bool references(const Expr& expr, std::string_view identifier);

std::string_view function_name(Function function) noexcept;

}  // namespace speeduplab
