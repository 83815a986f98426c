#pragma once

// Scalar coefficient fields: a small arithmetic expression language over the
// base coordinates x1..xd, evaluated with exact first derivatives by
// forward-mode dual numbers.
//
// Grammar (whitespace-insensitive):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' exponent)*          left-associative
//   exponent:= ('-' | '+')* primary             must not depend on x
//   primary := number | name | func '(' expr ')' | '(' expr ')'
//   func    := exp | log | sqrt | sin | cos | abs
//   name    := x1 .. xd | bound constant | pi
//
// Precedence: ^ binds tighter than unary minus, so "-x1^2" is -(x1^2).

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "godel/error.hpp"

namespace godel {

/// Largest base dimension supported by the dual-number evaluator.
inline constexpr int kMaxDim = 8;

enum class Op : std::uint8_t {
  Constant,
  Variable,
  Neg,
  Exp,
  Log,
  Sqrt,
  Sin,
  Cos,
  Abs,
  Add,
  Sub,
  Mul,
  Div,
  Pow,  // lhs ^ value, value constant
};

struct ExprNode {
  Op op = Op::Constant;
  double value = 0.0;  // Constant: the constant; Pow: the exponent
  int var = -1;        // Variable: coordinate index
  int lhs = -1;
  int rhs = -1;
};

/// Immutable expression tree stored as an arena in post-order: every child
/// precedes its parent, so evaluation is a single forward sweep.
class ExprAst {
 public:
  ExprAst() = default;

  int dim() const noexcept { return dim_; }
  bool empty() const noexcept { return nodes_.empty(); }
  const std::vector<ExprNode>& nodes() const noexcept { return nodes_; }
  int root() const noexcept { return static_cast<int>(nodes_.size()) - 1; }

  bool uses_variable(int index) const noexcept {
    for (const auto& n : nodes_)
      if (n.op == Op::Variable && n.var == index) return true;
    return false;
  }
  bool is_constant() const noexcept {
    for (const auto& n : nodes_)
      if (n.op == Op::Variable) return false;
    return true;
  }

  static ExprAst constant(double v, int dim) {
    ExprAst a;
    a.dim_ = dim;
    a.nodes_.push_back({Op::Constant, v, -1, -1, -1});
    return a;
  }

 private:
  friend class ExprParser;
  int dim_ = 0;
  std::vector<ExprNode> nodes_;
};

struct ParseOptions {
  /// Named constants substituted at parse time.
  std::map<std::string, double> constants;
  /// Extra names mapped onto variable indices (e.g. "t" -> d for a
  /// time-dependent profile that is then rejected by the caller).
  std::map<std::string, int> aliases;
};

class ExprParser {
 public:
  static ExprAst parse(std::string_view text, int dim, const ParseOptions& opts) {
    if (dim < 1 || dim > kMaxDim)
      throw InvalidArgument("expression dimension must be in [1, " + std::to_string(kMaxDim) +
                            "], got " + std::to_string(dim));
    ExprParser p(text, dim, opts);
    p.skip_ws();
    if (p.pos_ >= text.size()) p.fail(ParseError::Kind::Syntax, "empty expression");
    p.parse_expr();
    p.skip_ws();
    if (p.pos_ != text.size()) p.fail(ParseError::Kind::Syntax, "unexpected trailing input");
    p.ast_.dim_ = dim;
    return std::move(p.ast_);
  }

 private:
  ExprParser(std::string_view text, int dim, const ParseOptions& opts)
      : text_(text), dim_(dim), opts_(opts) {}

  [[noreturn]] void fail(ParseError::Kind kind, const std::string& msg) const {
    throw ParseError(kind, msg, pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r'))
      ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  int push(ExprNode n) {
    ast_.nodes_.push_back(n);
    return static_cast<int>(ast_.nodes_.size()) - 1;
  }

  struct DepthGuard {
    explicit DepthGuard(ExprParser& p) : p_(p) {
      if (++p_.depth_ > 200) p_.fail(ParseError::Kind::Syntax, "expression nested too deeply");
    }
    ~DepthGuard() { --p_.depth_; }
    ExprParser& p_;
  };

  int parse_expr() {
    DepthGuard g(*this);
    int lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        int rhs = parse_term();
        lhs = push({Op::Add, 0, -1, lhs, rhs});
      } else if (accept('-')) {
        int rhs = parse_term();
        lhs = push({Op::Sub, 0, -1, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        int rhs = parse_unary();
        lhs = push({Op::Mul, 0, -1, lhs, rhs});
      } else if (accept('/')) {
        int rhs = parse_unary();
        lhs = push({Op::Div, 0, -1, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    DepthGuard g(*this);
    if (accept('-')) {
      int c = parse_unary();
      return push({Op::Neg, 0, -1, c, -1});
    }
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    while (accept('^')) {
      std::size_t at = pos_;
      double expo = parse_exponent(at);
      base = push({Op::Pow, expo, -1, base, -1});
    }
    return base;
  }

  // The exponent subtree is parsed into the arena, folded to a number, and
  // dropped again; only its value is kept on the Pow node.
  double parse_exponent(std::size_t at) {
    int sign = 1;
    for (;;) {
      if (accept('-'))
        sign = -sign;
      else if (!accept('+'))
        break;
    }
    std::size_t mark = ast_.nodes_.size();
    int sub = parse_primary();
    for (std::size_t i = mark; i < ast_.nodes_.size(); ++i) {
      if (ast_.nodes_[i].op == Op::Variable) {
        pos_ = at;
        fail(ParseError::Kind::NonConstantExponent, "exponent must not depend on x");
      }
    }
    double v = fold(static_cast<std::size_t>(sub), mark);
    ast_.nodes_.resize(mark);
    if (!std::isfinite(v)) {
      pos_ = at;
      fail(ParseError::Kind::Syntax, "exponent is not a finite number");
    }
    return sign * v;
  }

  double fold(std::size_t idx, std::size_t mark) const {
    const ExprNode& n = ast_.nodes_[idx];
    auto sub = [&](int i) { return fold(static_cast<std::size_t>(i), mark); };
    switch (n.op) {
      case Op::Constant: return n.value;
      case Op::Variable: return 0.0;  // unreachable, rejected above
      case Op::Neg: return -sub(n.lhs);
      case Op::Exp: return std::exp(sub(n.lhs));
      case Op::Log: return std::log(sub(n.lhs));
      case Op::Sqrt: return std::sqrt(sub(n.lhs));
      case Op::Sin: return std::sin(sub(n.lhs));
      case Op::Cos: return std::cos(sub(n.lhs));
      case Op::Abs: return std::abs(sub(n.lhs));
      case Op::Add: return sub(n.lhs) + sub(n.rhs);
      case Op::Sub: return sub(n.lhs) - sub(n.rhs);
      case Op::Mul: return sub(n.lhs) * sub(n.rhs);
      case Op::Div: return sub(n.lhs) / sub(n.rhs);
      case Op::Pow: return std::pow(sub(n.lhs), n.value);
    }
    return 0.0;
  }

  int parse_primary() {
    DepthGuard g(*this);
    char c = peek();
    if (c == '(') {
      ++pos_;
      int inner = parse_expr();
      if (!accept(')')) fail(ParseError::Kind::Syntax, "expected ')'");
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (is_ident_start(c)) return parse_identifier();
    if (c == '\0') fail(ParseError::Kind::Syntax, "unexpected end of input");
    fail(ParseError::Kind::Syntax, std::string("unexpected character '") + c + "'");
  }

  int parse_number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t n = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) {
      pos_ = start;
      fail(ParseError::Kind::Syntax, "malformed number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;
    }
    double v = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
      pos_ = start;
      fail(ParseError::Kind::Syntax, "malformed number");
    }
    return push({Op::Constant, v, -1, -1, -1});
  }

  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

  int parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    std::string name(text_.substr(start, pos_ - start));

    static const std::map<std::string, Op, std::less<>> functions = {
        {"exp", Op::Exp}, {"log", Op::Log}, {"sqrt", Op::Sqrt},
        {"sin", Op::Sin}, {"cos", Op::Cos}, {"abs", Op::Abs}};
    if (auto f = functions.find(name); f != functions.end()) {
      if (!accept('(')) fail(ParseError::Kind::Syntax, "expected '(' after " + name);
      int arg = parse_expr();
      if (!accept(')')) fail(ParseError::Kind::Syntax, "expected ')'");
      return push({f->second, 0, -1, arg, -1});
    }
    if (auto a = opts_.aliases.find(name); a != opts_.aliases.end())
      return push({Op::Variable, 0, a->second, -1, -1});
    if (auto k = opts_.constants.find(name); k != opts_.constants.end())
      return push({Op::Constant, k->second, -1, -1, -1});
    if (name.size() >= 2 && name[0] == 'x' && name[1] != '0') {
      bool all_digits = true;
      for (std::size_t i = 1; i < name.size(); ++i)
        all_digits = all_digits && name[i] >= '0' && name[i] <= '9';
      if (all_digits && name.size() <= 4) {
        int index = std::stoi(name.substr(1)) - 1;
        if (index >= dim_) {
          pos_ = start;
          fail(ParseError::Kind::VariableOutOfRange,
               "variable " + name + " out of range for dimension " + std::to_string(dim_));
        }
        return push({Op::Variable, 0, index, -1, -1});
      }
    }
    if (name == "pi") return push({Op::Constant, std::numbers::pi, -1, -1, -1});
    pos_ = start;
    fail(ParseError::Kind::UnknownIdentifier, "unknown identifier '" + name + "'");
  }

  std::string_view text_;
  int dim_;
  const ParseOptions& opts_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  ExprAst ast_;
};

/// Parses `text` over base dimension `dim`. Named constants are bound now.
inline ExprAst parse_expression(std::string_view text, int dim, const ParseOptions& opts = {}) {
  for (const auto& [name, v] : opts.constants)
    if (!std::isfinite(v))
      throw InvalidArgument("named constant '" + name + "' is not finite");
  return ExprParser::parse(text, dim, opts);
}

/// Value and exact gradient of a field at one point.
struct FieldSample {
  double value = 0.0;
  std::vector<double> gradient;
};

namespace detail {

struct Dual {
  double v = 0.0;
  std::array<double, kMaxDim> g{};
};

inline std::vector<double> to_vector(std::span<const double> x) { return {x.begin(), x.end()}; }

template <bool WithGradient>
void eval_nodes(const ExprAst& ast, std::span<const double> x, std::span<Dual> out) {
  const int d = ast.dim();
  const auto& nodes = ast.nodes();
  auto scale = [d](Dual& r, const Dual& a, double k) {
    if constexpr (WithGradient) {
      for (int i = 0; i < d; ++i) r.g[i] = a.g[i] == 0.0 ? 0.0 : k * a.g[i];
    }
  };
  for (std::size_t idx = 0; idx < nodes.size(); ++idx) {
    const ExprNode& n = nodes[idx];
    Dual& r = out[idx];
    switch (n.op) {
      case Op::Constant:
        r.v = n.value;
        if constexpr (WithGradient) r.g.fill(0.0);
        break;
      case Op::Variable:
        r.v = x[static_cast<std::size_t>(n.var)];
        if constexpr (WithGradient) {
          r.g.fill(0.0);
          if (n.var < d) r.g[static_cast<std::size_t>(n.var)] = 1.0;
        }
        break;
      case Op::Neg: {
        const Dual& a = out[n.lhs];
        r.v = -a.v;
        scale(r, a, -1.0);
        break;
      }
      case Op::Exp: {
        const Dual& a = out[n.lhs];
        r.v = std::exp(a.v);
        scale(r, a, r.v);
        break;
      }
      case Op::Log: {
        const Dual& a = out[n.lhs];
        if (!(a.v > 0.0)) throw DomainError("log of non-positive value", to_vector(x));
        r.v = std::log(a.v);
        scale(r, a, 1.0 / a.v);
        break;
      }
      case Op::Sqrt: {
        const Dual& a = out[n.lhs];
        if (a.v < 0.0) throw DomainError("sqrt of negative value", to_vector(x));
        r.v = std::sqrt(a.v);
        if constexpr (WithGradient) {
          for (int i = 0; i < d; ++i) {
            if (a.g[i] == 0.0) {
              r.g[i] = 0.0;
            } else if (r.v == 0.0) {
              throw DomainError("sqrt is not differentiable at 0", to_vector(x));
            } else {
              r.g[i] = 0.5 * a.g[i] / r.v;
            }
          }
        }
        break;
      }
      case Op::Sin: {
        const Dual& a = out[n.lhs];
        r.v = std::sin(a.v);
        scale(r, a, std::cos(a.v));
        break;
      }
      case Op::Cos: {
        const Dual& a = out[n.lhs];
        r.v = std::cos(a.v);
        scale(r, a, -std::sin(a.v));
        break;
      }
      case Op::Abs: {
        // subgradient 0 at the kink
        const Dual& a = out[n.lhs];
        r.v = std::abs(a.v);
        scale(r, a, a.v > 0.0 ? 1.0 : (a.v < 0.0 ? -1.0 : 0.0));
        break;
      }
      case Op::Add: {
        const Dual &a = out[n.lhs], &b = out[n.rhs];
        r.v = a.v + b.v;
        if constexpr (WithGradient)
          for (int i = 0; i < d; ++i) r.g[i] = a.g[i] + b.g[i];
        break;
      }
      case Op::Sub: {
        const Dual &a = out[n.lhs], &b = out[n.rhs];
        r.v = a.v - b.v;
        if constexpr (WithGradient)
          for (int i = 0; i < d; ++i) r.g[i] = a.g[i] - b.g[i];
        break;
      }
      case Op::Mul: {
        const Dual &a = out[n.lhs], &b = out[n.rhs];
        r.v = a.v * b.v;
        if constexpr (WithGradient)
          for (int i = 0; i < d; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
        break;
      }
      case Op::Div: {
        const Dual &a = out[n.lhs], &b = out[n.rhs];
        if (b.v == 0.0) throw DomainError("division by zero", to_vector(x));
        r.v = a.v / b.v;
        if constexpr (WithGradient)
          for (int i = 0; i < d; ++i) r.g[i] = (a.g[i] - r.v * b.g[i]) / b.v;
        break;
      }
      case Op::Pow: {
        const Dual& a = out[n.lhs];
        const double p = n.value;
        const bool integral = std::floor(p) == p;
        if (a.v < 0.0 && !integral)
          throw DomainError("negative base raised to a non-integer power", to_vector(x));
        if (a.v == 0.0 && p < 0.0) throw DomainError("zero raised to a negative power", to_vector(x));
        r.v = std::pow(a.v, p);
        if constexpr (WithGradient) {
          for (int i = 0; i < d; ++i) {
            if (a.g[i] == 0.0 || p == 0.0) {
              r.g[i] = 0.0;
            } else if (a.v == 0.0 && p < 1.0) {
              throw DomainError("power is not differentiable at 0", to_vector(x));
            } else {
              r.g[i] = p * std::pow(a.v, p - 1.0) * a.g[i];
            }
          }
        }
        break;
      }
    }
  }
}

template <bool WithGradient>
Dual eval_root(const ExprAst& ast, std::span<const double> x) {
  if (ast.empty()) throw InvalidArgument("evaluating an empty expression");
  if (static_cast<int>(x.size()) < ast.dim())
    throw InvalidArgument("point has " + std::to_string(x.size()) +
                          " coordinates, expression expects " + std::to_string(ast.dim()));
  for (double xi : x)
    if (!std::isfinite(xi)) throw DomainError("non-finite coordinate", to_vector(x));
  const std::size_t n = ast.nodes().size();
  constexpr std::size_t kInline = 64;
  if (n <= kInline) {
    std::array<Dual, kInline> buf;
    eval_nodes<WithGradient>(ast, x, std::span<Dual>(buf.data(), n));
    return buf[n - 1];
  }
  std::vector<Dual> buf(n);
  eval_nodes<WithGradient>(ast, x, buf);
  return buf.back();
}

}  // namespace detail

/// Value and exact gradient. Throws DomainError on log/sqrt of negative
/// arguments, division by zero, or any non-finite value or partial.
inline FieldSample eval_with_gradient(const ExprAst& ast, std::span<const double> x) {
  detail::Dual r = detail::eval_root<true>(ast, x);
  FieldSample s;
  s.value = r.v;
  s.gradient.assign(r.g.begin(), r.g.begin() + ast.dim());
  if (!std::isfinite(s.value)) throw DomainError("non-finite field value", detail::to_vector(x));
  for (double gi : s.gradient)
    if (!std::isfinite(gi)) throw DomainError("non-finite field gradient", detail::to_vector(x));
  return s;
}

/// Value only; use this near abs() kinks where the gradient is meaningless.
inline double evaluate(const ExprAst& ast, std::span<const double> x) {
  double v = detail::eval_root<false>(ast, x).v;
  if (!std::isfinite(v)) throw DomainError("non-finite field value", detail::to_vector(x));
  return v;
}

namespace detail {
inline std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

inline void print_node(const ExprAst& ast, int idx, std::string& out) {
  const ExprNode& n = ast.nodes()[static_cast<std::size_t>(idx)];
  auto unary = [&](const char* name) {
    out += name;
    out += '(';
    print_node(ast, n.lhs, out);
    out += ')';
  };
  auto binary = [&](char op) {
    out += '(';
    print_node(ast, n.lhs, out);
    out += ' ';
    out += op;
    out += ' ';
    print_node(ast, n.rhs, out);
    out += ')';
  };
  switch (n.op) {
    case Op::Constant:
      if (n.value < 0.0 || std::signbit(n.value))
        out += "(-" + format_number(-n.value) + ")";
      else
        out += format_number(n.value);
      break;
    case Op::Variable: out += "x" + std::to_string(n.var + 1); break;
    case Op::Neg:
      out += "(-";
      print_node(ast, n.lhs, out);
      out += ')';
      break;
    case Op::Exp: unary("exp"); break;
    case Op::Log: unary("log"); break;
    case Op::Sqrt: unary("sqrt"); break;
    case Op::Sin: unary("sin"); break;
    case Op::Cos: unary("cos"); break;
    case Op::Abs: unary("abs"); break;
    case Op::Add: binary('+'); break;
    case Op::Sub: binary('-'); break;
    case Op::Mul: binary('*'); break;
    case Op::Div: binary('/'); break;
    case Op::Pow:
      out += '(';
      print_node(ast, n.lhs, out);
      out += "^(";
      if (n.value < 0.0 || std::signbit(n.value))
        out += "-" + format_number(-n.value);
      else
        out += format_number(n.value);
      out += "))";
      break;
  }
}
}  // namespace detail

/// Fully parenthesised text that re-parses to an equivalent tree.
inline std::string to_string(const ExprAst& ast) {
  if (ast.empty()) return {};
  std::string out;
  detail::print_node(ast, ast.root(), out);
  return out;
}

}  // namespace godel
