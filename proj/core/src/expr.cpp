#include "speeduplab/expr.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

#include "speeduplab/error.hpp"

namespace speeduplab {

namespace {

constexpr std::size_t kMaxNesting = 256;

constexpr std::array<std::pair<std::string_view, Function>, 4> kFunctions{{
    {"log", Function::Log},
    {"log2", Function::Log2},
    {"exp", Function::Exp},
    {"sqrt", Function::Sqrt},
}};

std::optional<Function> lookup_function(std::string_view name) {
  for (const auto& [text, fn] : kFunctions) {
    if (text == name) return fn;
  }
  return std::nullopt;
}

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr run() {
    skip_ws();
    if (at_end()) fail("empty expression");
    Expr e = parse_expr();
    skip_ws();
    if (!at_end()) fail(std::string("unexpected '") + src_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { fail_at(message, pos_); }
  [[noreturn]] void fail_at(const std::string& message, std::size_t pos) const {
    throw SyntaxError(message, pos + 1);
  }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return at_end() ? '\0' : src_[pos_]; }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(src_[pos_])) != 0) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (at_end()) fail(std::string("expected '") + c + "' but reached end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : parser(p) {
      if (++parser.depth_ > kMaxNesting) parser.fail("expression nested too deeply");
    }
    ~DepthGuard() { --parser.depth_; }
    Parser& parser;
  };

  Expr parse_expr() {
    DepthGuard guard(*this);
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(BinaryOp::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = Expr::binary(BinaryOp::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(BinaryOp::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = Expr::binary(BinaryOp::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    DepthGuard guard(*this);
    if (accept('-')) return Expr::negate(parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (accept('^')) return Expr::binary(BinaryOp::Pow, base, parse_unary());
    return base;
  }

  Expr parse_atom() {
    skip_ws();
    if (at_end()) fail("unexpected end of input");
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (is_digit(c) || c == '.') return parse_number();
    if (is_ident_start(c)) {
      const std::size_t start = pos_;
      while (!at_end() && is_ident_char(src_[pos_])) ++pos_;
      std::string name(src_.substr(start, pos_ - start));
      skip_ws();
      if (peek() == '(') {
        auto fn = lookup_function(name);
        if (!fn) fail_at("unknown function '" + name + "'", start);
        ++pos_;
        Expr arg = parse_expr();
        expect(')');
        return Expr::call(*fn, arg);
      }
      return Expr::ident(std::move(name));
    }
    fail(std::string("unexpected '") + c + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    std::size_t digits = 0;
    while (!at_end() && is_digit(src_[pos_])) ++pos_, ++digits;
    if (peek() == '.') {
      ++pos_;
      while (!at_end() && is_digit(src_[pos_])) ++pos_, ++digits;
    }
    if (digits == 0) fail_at("malformed number", start);
    if (peek() == 'e' || peek() == 'E') {
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (!is_digit(peek())) fail("malformed exponent in number");
      while (!at_end() && is_digit(src_[pos_])) ++pos_;
    }
    double value = 0.0;
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
      fail_at("number out of range", start);
    }
    return Expr::number(value);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;
};

// Precedence levels used by the unparser.
enum Level { kAdd = 1, kMul = 2, kUnary = 3, kPower = 4, kAtom = 5 };

Level level_of(const ExprNode& node) {
  return std::visit(
      [](const auto& n) -> Level {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          return std::signbit(n.value) ? kUnary : kAtom;
        } else if constexpr (std::is_same_v<T, NegateNode>) {
          return kUnary;
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          switch (n.op) {
            case BinaryOp::Add:
            case BinaryOp::Sub:
              return kAdd;
            case BinaryOp::Mul:
            case BinaryOp::Div:
              return kMul;
            case BinaryOp::Pow:
              return kPower;
          }
          return kAtom;
        } else {
          return kAtom;
        }
      },
      node.node);
}

void write(const ExprNode& node, std::string& out);

void write_wrapped(const ExprNode& node, bool wrap, std::string& out) {
  if (wrap) out += '(';
  write(node, out);
  if (wrap) out += ')';
}

void write_number(double value, std::string& out) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), std::fabs(value));
  if (std::signbit(value)) out += '-';
  out.append(buf.data(), ptr);
}

void write(const ExprNode& node, std::string& out) {
  std::visit(
      [&out](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          write_number(n.value, out);
        } else if constexpr (std::is_same_v<T, IdentNode>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, NegateNode>) {
          out += '-';
          write_wrapped(*n.operand, level_of(*n.operand) < kUnary, out);
        } else if constexpr (std::is_same_v<T, CallNode>) {
          out += function_name(n.function);
          out += '(';
          write(*n.argument, out);
          out += ')';
        } else {
          const Level lhs = level_of(*n.lhs);
          const Level rhs = level_of(*n.rhs);
          switch (n.op) {
            case BinaryOp::Add:
            case BinaryOp::Sub:
              write_wrapped(*n.lhs, lhs < kAdd, out);
              out += n.op == BinaryOp::Add ? " + " : " - ";
              write_wrapped(*n.rhs, rhs <= kAdd, out);
              break;
            case BinaryOp::Mul:
            case BinaryOp::Div:
              write_wrapped(*n.lhs, lhs < kMul, out);
              out += n.op == BinaryOp::Mul ? '*' : '/';
              write_wrapped(*n.rhs, rhs <= kMul, out);
              break;
            case BinaryOp::Pow:
              write_wrapped(*n.lhs, lhs < kAtom, out);
              out += '^';
              write_wrapped(*n.rhs, rhs < kUnary, out);
              break;
          }
        }
      },
      node.node);
}

double checked(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw EvalError(EvalError::Kind::NonFinite, std::string("non-finite result in ") + what);
  }
  return value;
}

[[noreturn]] void domain(const std::string& message) {
  throw EvalError(EvalError::Kind::Domain, message);
}

double power(double base, double exponent) {
  if (exponent != std::floor(exponent) && !(base > 0.0)) {
    domain("non-integer power of non-positive base");
  }
  if (base == 0.0 && exponent < 0.0) domain("division by zero in power");
  return checked(std::pow(base, exponent), "power");
}

double eval_node(const ExprNode& node, const Bindings& b) {
  return std::visit(
      [&b](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, IdentNode>) {
          if (n.name == "p") return b.p;
          if (n.name == "n") return b.n;
          if (b.constants != nullptr) {
            if (auto it = b.constants->find(n.name); it != b.constants->end()) return it->second;
          }
          throw EvalError(EvalError::Kind::UnboundIdentifier, "unbound identifier '" + n.name + "'");
        } else if constexpr (std::is_same_v<T, NegateNode>) {
          return -eval_node(*n.operand, b);
        } else if constexpr (std::is_same_v<T, CallNode>) {
          const double x = eval_node(*n.argument, b);
          switch (n.function) {
            case Function::Log:
              if (!(x > 0.0)) domain("log of non-positive value");
              return std::log(x);
            case Function::Log2:
              if (!(x > 0.0)) domain("log2 of non-positive value");
              return std::log2(x);
            case Function::Exp:
              return checked(std::exp(x), "exp");
            case Function::Sqrt:
              if (x < 0.0) domain("sqrt of negative value");
              return std::sqrt(x);
          }
          return 0.0;
        } else {
          const double lhs = eval_node(*n.lhs, b);
          const double rhs = eval_node(*n.rhs, b);
          switch (n.op) {
            case BinaryOp::Add:
              return checked(lhs + rhs, "addition");
            case BinaryOp::Sub:
              return checked(lhs - rhs, "subtraction");
            case BinaryOp::Mul:
              return checked(lhs * rhs, "multiplication");
            case BinaryOp::Div:
              if (rhs == 0.0) domain("division by zero");
              return checked(lhs / rhs, "division");
            case BinaryOp::Pow:
              return power(lhs, rhs);
          }
          return 0.0;
        }
      },
      node.node);
}

void collect(const ExprNode& node, std::set<std::string, std::less<>>& out) {
  std::visit(
      [&out](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IdentNode>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, NegateNode>) {
          collect(*n.operand, out);
        } else if constexpr (std::is_same_v<T, CallNode>) {
          collect(*n.argument, out);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          collect(*n.lhs, out);
          collect(*n.rhs, out);
        }
      },
      node.node);
}

bool structurally_equal(const ExprNode& a, const ExprNode& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&b](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, NumberNode>) {
          return std::bit_cast<std::uint64_t>(x.value) == std::bit_cast<std::uint64_t>(y.value);
        } else if constexpr (std::is_same_v<T, IdentNode>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, NegateNode>) {
          return structurally_equal(*x.operand, *y.operand);
        } else if constexpr (std::is_same_v<T, CallNode>) {
          return x.function == y.function && structurally_equal(*x.argument, *y.argument);
        } else {
          return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) &&
                 structurally_equal(*x.rhs, *y.rhs);
        }
      },
      a.node);
}

bool is_variable_free(const ExprNode& node) {
  std::set<std::string, std::less<>> ids;
  collect(node, ids);
  return !ids.contains("p") && !ids.contains("n");
}

ExprPtr make(ExprNode node) { return std::make_shared<const ExprNode>(std::move(node)); }

ExprPtr fold_node(const ExprPtr& node, const Constants& constants) {
  if (std::holds_alternative<NumberNode>(node->node)) return node;
  if (is_variable_free(*node)) {
    try {
      return make(ExprNode{NumberNode{eval_node(*node, Bindings{1.0, 1.0, &constants})}});
    } catch (const EvalError&) {
      // unbound or failing subtrees stay symbolic
    }
  }
  return std::visit(
      [&](const auto& n) -> ExprPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NegateNode>) {
          return make(ExprNode{NegateNode{fold_node(n.operand, constants)}});
        } else if constexpr (std::is_same_v<T, CallNode>) {
          return make(ExprNode{CallNode{n.function, fold_node(n.argument, constants)}});
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          return make(ExprNode{
              BinaryNode{n.op, fold_node(n.lhs, constants), fold_node(n.rhs, constants)}});
        } else {
          return node;
        }
      },
      node->node);
}

}  // namespace

Expr Expr::number(double value) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{NumberNode{value}}));
}
Expr Expr::ident(std::string name) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{IdentNode{std::move(name)}}));
}
Expr Expr::negate(const Expr& operand) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{NegateNode{operand.root_}}));
}
Expr Expr::binary(BinaryOp op, const Expr& lhs, const Expr& rhs) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{BinaryNode{op, lhs.root_, rhs.root_}}));
}
Expr Expr::call(Function function, const Expr& argument) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{CallNode{function, argument.root_}}));
}

bool operator==(const Expr& a, const Expr& b) {
  return a.root_ == b.root_ || structurally_equal(*a.root_, *b.root_);
}

Expr parse(std::string_view source) { return Parser(source).run(); }

std::string unparse(const Expr& expr) {
  std::string out;
  write(expr.root(), out);
  return out;
}

double evaluate(const Expr& expr, const Bindings& bindings) {
  if (!(bindings.p >= 1.0)) domain("processor count p must be >= 1");
  if (!(bindings.n >= 1.0)) domain("problem dimension n must be >= 1");
  return eval_node(expr.root(), bindings);
}

Expr fold_constants(const Expr& expr, const Constants& constants) {
  return Expr(fold_node(expr.ptr(), constants));
}

std::set<std::string, std::less<>> identifiers(const Expr& expr) {
  std::set<std::string, std::less<>> out;
  collect(expr.root(), out);
  return out;
}

bool references(const Expr& expr, std::string_view identifier) {
  return identifiers(expr).contains(identifier);
}

std::string_view function_name(Function function) noexcept {
  for (const auto& [text, fn] : kFunctions) {
    if (fn == function) return text;
  }
  return "?";
}

}  // namespace speeduplab
