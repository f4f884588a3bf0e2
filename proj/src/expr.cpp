#include "subriem/expr.hpp"

#include "subriem/extremal.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

namespace subriem {

struct ExprNode {
  enum class Kind { Number, Var, Rho, Xh, Xv, OpR, OpP, OpM, Neg, Add, Sub, Mul, Div, Pow, Call };
  Kind kind = Kind::Number;
  double number = 0.0;
  int i = 0;
  int j = 0;
  std::string fn;
  std::vector<std::shared_ptr<const ExprNode>> args;
};

using NodePtr = std::shared_ptr<const ExprNode>;
using Kind = ExprNode::Kind;

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error(msg + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
      line_(line), column_(column) {}

namespace {

struct Token {
  enum class Type { Number, Ident, Symbol, End };
  Type type = Type::End;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const unsigned char ch = static_cast<unsigned char>(src[i]);
    if (std::isspace(ch)) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isdigit(ch) || (ch == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
        ++j;
      }
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
          ++j;
        }
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) {
          ++k;
        }
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
            ++k;
          }
          j = k;
        }
      }
      t.type = Token::Type::Number;
      t.text = src.substr(i, j - i);
      t.number = std::strtod(t.text.c_str(), nullptr);
      if (!std::isfinite(t.number)) {
        throw ParseError("numeric literal out of range '" + t.text + "'", line, col);
      }
      advance(j - i);
    } else if (std::isalpha(ch) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      t.type = Token::Type::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
    } else if (std::string("+-*/^(),").find(static_cast<char>(ch)) != std::string::npos) {
      t.type = Token::Type::Symbol;
      t.text = std::string(1, static_cast<char>(ch));
      advance(1);
    } else {
      throw ParseError(std::string("unexpected character '") + static_cast<char>(ch) + "'", line, col);
    }
    out.push_back(t);
  }
  Token end;
  end.type = Token::Type::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

NodePtr make_number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Number;
  n->number = v;
  return n;
}

NodePtr make_unary(Kind k, NodePtr a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->args.push_back(std::move(a));
  return n;
}

NodePtr make_binary(Kind k, NodePtr a, NodePtr b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->args.push_back(std::move(a));
  n->args.push_back(std::move(b));
  return n;
}

// Parses the digits following a one-letter prefix; returns nullopt if not all digits.
std::optional<int> index_suffix(const std::string& s, std::size_t from, std::size_t to) {
  if (from >= to || to > s.size()) {
    return std::nullopt;
  }
  int v = 0;
  for (std::size_t k = from; k < to; ++k) {
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) {
      return std::nullopt;
    }
    v = v * 10 + (s[k] - '0');
    if (v > 100000) {
      return v;
    }
  }
  return v;
}

struct FunctionInfo {
  const char* name;
  int min_args;
  int max_args; // -1 for variadic
  bool operator_only;
};

const FunctionInfo kFunctions[] = {
    {"abs", 1, 1, false},  {"log", 1, 1, false},    {"sqrt", 1, 1, false},  {"exp", 1, 1, false},
    {"min", 2, -1, false}, {"max", 2, -1, false},   {"mplus", 2, 2, true}, {"mminus", 2, 2, true},
};

class Parser {
public:
  Parser(const std::string& src, const GeometrySpec& g, ExprContext ctx, int m)
      : tokens_(lex(src)), g_(g), ctx_(ctx), m_(m) {}

  NodePtr parse_all() {
    NodePtr e = expr();
    if (peek().type != Token::Type::End) {
      fail("unexpected '" + peek().text + "'", peek());
    }
    return e;
  }

private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  GeometrySpec g_;
  ExprContext ctx_;
  int m_;

  const Token& peek() const { return tokens_[pos_]; }
  Token next() { return tokens_[pos_++]; }
  bool is_symbol(const char* s) const { return peek().type == Token::Type::Symbol && peek().text == s; }

  [[noreturn]] void fail(const std::string& msg, const Token& t) const { throw ParseError(msg, t.line, t.column); }

  void expect(const char* s) {
    if (!is_symbol(s)) {
      const Token& t = peek();
      fail(std::string("expected '") + s + "' but found " + (t.type == Token::Type::End ? "end of input" : "'" + t.text + "'"), t);
    }
    next();
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (is_symbol("+") || is_symbol("-")) {
      const Kind k = next().text == "+" ? Kind::Add : Kind::Sub;
      lhs = make_binary(k, lhs, term());
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (is_symbol("*") || is_symbol("/")) {
      const Kind k = next().text == "*" ? Kind::Mul : Kind::Div;
      lhs = make_binary(k, lhs, factor());
    }
    return lhs;
  }

  NodePtr factor() {
    NodePtr b = base();
    if (is_symbol("^")) {
      next();
      double sign = 1.0;
      if (is_symbol("-") || is_symbol("+")) {
        sign = next().text == "-" ? -1.0 : 1.0;
      }
      if (peek().type != Token::Type::Number) {
        fail("exponent after '^' must be a numeric literal", peek());
      }
      const double e = sign * next().number;
      b = make_binary(Kind::Pow, b, make_number(e));
      if (is_symbol("^")) {
        fail("chained '^' is not allowed; use parentheses", peek());
      }
    }
    return b;
  }

  NodePtr base() {
    const Token t = peek();
    if (is_symbol("-")) {
      next();
      return make_unary(Kind::Neg, factor());
    }
    if (is_symbol("(")) {
      next();
      NodePtr e = expr();
      expect(")");
      return e;
    }
    if (t.type == Token::Type::Number) {
      next();
      return make_number(t.number);
    }
    if (t.type == Token::Type::Ident) {
      next();
      if (is_symbol("(")) {
        return call(t);
      }
      return identifier(t);
    }
    if (t.type == Token::Type::End) {
      fail("unexpected end of input", t);
    }
    fail("unexpected '" + t.text + "'", t);
  }

  NodePtr call(const Token& name) {
    const FunctionInfo* info = nullptr;
    for (const auto& f : kFunctions) {
      if (name.text == f.name) {
        info = &f;
      }
    }
    if (info == nullptr || (info->operator_only && ctx_ != ExprContext::Operator)) {
      fail("unknown function '" + name.text + "'", name);
    }
    expect("(");
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Call;
    n->fn = name.text;
    if (!is_symbol(")")) {
      n->args.push_back(expr());
      while (is_symbol(",")) {
        next();
        n->args.push_back(expr());
      }
    }
    expect(")");
    const int count = static_cast<int>(n->args.size());
    if (count < info->min_args || (info->max_args >= 0 && count > info->max_args)) {
      std::ostringstream os;
      os << "function '" << name.text << "' expects ";
      if (info->max_args < 0) {
        os << "at least " << info->min_args;
      } else {
        os << info->min_args;
      }
      os << " argument(s), got " << count;
      fail(os.str(), name);
    }
    return n;
  }

  NodePtr identifier(const Token& t) {
    const std::string& s = t.text;
    auto n = std::make_shared<ExprNode>();
    if (ctx_ == ExprContext::Radial) {
      if (s == "rho") {
        n->kind = Kind::Var;
        n->i = 0;
        return n;
      }
      fail("unknown identifier '" + s + "' (profiles use the variable rho)", t);
    }
    if (s == "rho") {
      n->kind = Kind::Rho;
      return n;
    }
    if (s == "xh") {
      n->kind = Kind::Xh;
      return n;
    }
    if (s == "xv") {
      n->kind = Kind::Xv;
      return n;
    }
    if (s.size() > 1 && s[0] == 'x') {
      if (auto idx = index_suffix(s, 1, s.size())) {
        if (*idx < 1 || *idx > g_.ambient_dim()) {
          fail("variable index out of range: '" + s + "' (" + g_.name() + " has " + std::to_string(g_.ambient_dim()) + " coordinates)", t);
        }
        n->kind = Kind::Var;
        n->i = *idx - 1;
        return n;
      }
    }
    if (ctx_ == ExprContext::Operator) {
      if (s == "r") {
        n->kind = Kind::OpR;
        return n;
      }
      if (s.size() > 1 && s[0] == 'p') {
        if (auto idx = index_suffix(s, 1, s.size())) {
          if (*idx < 1 || *idx > m_) {
            fail("gradient index out of range: '" + s + "'", t);
          }
          n->kind = Kind::OpP;
          n->i = *idx - 1;
          return n;
        }
      }
      const auto us = s.find('_');
      if (s.size() > 3 && s[0] == 'M' && us != std::string::npos) {
        auto a = index_suffix(s, 1, us);
        auto b = index_suffix(s, us + 1, s.size());
        if (a && b) {
          if (*a < 1 || *a > m_ || *b < 1 || *b > m_) {
            fail("matrix index out of range: '" + s + "'", t);
          }
          n->kind = Kind::OpM;
          n->i = *a - 1;
          n->j = *b - 1;
          return n;
        }
      }
    }
    fail("unknown identifier '" + s + "'", t);
  }
};

template <class T>
struct EvalCtx {
  const Expr* expr = nullptr;
  const std::vector<T>* x = nullptr;
  const OperatorArgs* op = nullptr;
  mutable std::optional<T> rho;
};

template <class T>
T constant_like(const std::vector<T>& x, double v) {
  return x[0] * 0.0 + v;
}

template <class T>
T sum_sq(const std::vector<T>& x, int begin, int end) {
  T s = x[0] * 0.0;
  for (int k = begin; k < end; ++k) {
    s = s + x[k] * x[k];
  }
  return s;
}

template <class T>
T checked_sqrt(const T& a, const char* what) {
  const double v = value_of(a);
  if (v < 0.0) {
    throw EvalError(std::string("sqrt of a negative value in ") + what);
  }
  if constexpr (std::is_same_v<T, Taylor2>) {
    if (v == 0.0) {
      throw EvalError(std::string(what) + " is not differentiable at 0");
    }
  }
  using std::sqrt;
  return sqrt(a);
}

bool is_small_integer(double e) { return e == std::floor(e) && std::abs(e) <= 64.0; }

template <class T>
T eval_node(const ExprNode& n, const EvalCtx<T>& c) {
  const auto& x = *c.x;
  switch (n.kind) {
  case Kind::Number:
    return constant_like(x, n.number);
  case Kind::Var:
    return x[n.i];
  case Kind::Rho:
    if (!c.rho) {
      c.rho = gauge_of(c.expr->geometry(), x);
    }
    return *c.rho;
  case Kind::Xh: {
    const GeometrySpec& g = c.expr->geometry();
    return checked_sqrt(sum_sq(x, 0, g.horizontal_dim()), "xh");
  }
  case Kind::Xv: {
    const GeometrySpec& g = c.expr->geometry();
    return checked_sqrt(sum_sq(x, g.horizontal_dim(), g.ambient_dim()), "xv");
  }
  case Kind::OpR:
    return constant_like(x, c.op->r);
  case Kind::OpP:
    return constant_like(x, c.op->p(n.i));
  case Kind::OpM:
    return constant_like(x, c.op->M(n.i, n.j));
  case Kind::Neg:
    return -eval_node(*n.args[0], c);
  case Kind::Add:
    return eval_node(*n.args[0], c) + eval_node(*n.args[1], c);
  case Kind::Sub:
    return eval_node(*n.args[0], c) - eval_node(*n.args[1], c);
  case Kind::Mul:
    return eval_node(*n.args[0], c) * eval_node(*n.args[1], c);
  case Kind::Div: {
    const T a = eval_node(*n.args[0], c);
    const T b = eval_node(*n.args[1], c);
    if (value_of(b) == 0.0) {
      throw EvalError("division by zero");
    }
    return a / b;
  }
  case Kind::Pow: {
    const T a = eval_node(*n.args[0], c);
    const double e = n.args[1]->number;
    if (is_small_integer(e)) {
      if (e < 0.0 && value_of(a) == 0.0) {
        throw EvalError("division by zero in negative power");
      }
      return ipow_generic(a, static_cast<int>(e));
    }
    const double v = value_of(a);
    if (v < 0.0) {
      throw EvalError("non-integer power of a negative base");
    }
    if (v == 0.0) {
      if (e < 0.0) {
        throw EvalError("division by zero in negative power");
      }
      if constexpr (std::is_same_v<T, Taylor2>) {
        throw EvalError("non-integer power is not twice differentiable at 0");
      }
    }
    using std::pow;
    return pow(a, e);
  }
  case Kind::Call: {
    const std::string& f = n.fn;
    if (f == "mplus" || f == "mminus") {
      const double l = value_of(eval_node(*n.args[0], c));
      const double L = value_of(eval_node(*n.args[1], c));
      const Ellipticity ell{l, L};
      return constant_like(x, f == "mplus" ? pucci_plus(ell, c.op->M) : pucci_minus(ell, c.op->M));
    }
    if (f == "min" || f == "max") {
      T acc = eval_node(*n.args[0], c);
      for (std::size_t k = 1; k < n.args.size(); ++k) {
        const T b = eval_node(*n.args[k], c);
        if constexpr (std::is_same_v<T, Taylor2>) {
          acc = f == "min" ? min(acc, b) : max(acc, b);
        } else {
          if (f == "min") {
            acc = b < acc ? b : acc;
          } else {
            acc = b > acc ? b : acc;
          }
        }
      }
      return acc;
    }
    const T a = eval_node(*n.args[0], c);
    using std::abs;
    using std::exp;
    using std::log;
    if (f == "abs") {
      return abs(a);
    }
    if (f == "exp") {
      return exp(a);
    }
    if (f == "log") {
      if (!(value_of(a) > 0.0)) {
        throw EvalError("log of a nonpositive value");
      }
      return log(a);
    }
    if (f == "sqrt") {
      return checked_sqrt(a, "sqrt");
    }
    throw EvalError("unknown function " + f);
  }
  }
  throw EvalError("corrupt expression node");
}

void print_node(const ExprNode& n, const Expr& e, std::ostream& os) {
  switch (n.kind) {
  case Kind::Number: {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", n.number);
    os << buf;
    return;
  }
  case Kind::Var:
    if (e.context() == ExprContext::Radial) {
      os << "rho";
    } else {
      os << 'x' << (n.i + 1);
    }
    return;
  case Kind::Rho:
    os << "rho";
    return;
  case Kind::Xh:
    os << "xh";
    return;
  case Kind::Xv:
    os << "xv";
    return;
  case Kind::OpR:
    os << 'r';
    return;
  case Kind::OpP:
    os << 'p' << (n.i + 1);
    return;
  case Kind::OpM:
    os << 'M' << (n.i + 1) << '_' << (n.j + 1);
    return;
  case Kind::Neg:
    os << "(-";
    print_node(*n.args[0], e, os);
    os << ')';
    return;
  case Kind::Add:
  case Kind::Sub:
  case Kind::Mul:
  case Kind::Div: {
    const char op = n.kind == Kind::Add ? '+' : n.kind == Kind::Sub ? '-' : n.kind == Kind::Mul ? '*' : '/';
    os << '(';
    print_node(*n.args[0], e, os);
    os << ' ' << op << ' ';
    print_node(*n.args[1], e, os);
    os << ')';
    return;
  }
  case Kind::Pow:
    os << '(';
    print_node(*n.args[0], e, os);
    os << ")^";
    print_node(*n.args[1], e, os);
    return;
  case Kind::Call:
    os << n.fn << '(';
    for (std::size_t k = 0; k < n.args.size(); ++k) {
      if (k > 0) {
        os << ", ";
      }
      print_node(*n.args[k], e, os);
    }
    os << ')';
    return;
  }
}

bool nodes_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.i != b.i || a.j != b.j || a.fn != b.fn || a.args.size() != b.args.size()) {
    return false;
  }
  if (a.kind == Kind::Number && a.number != b.number) {
    return false;
  }
  for (std::size_t k = 0; k < a.args.size(); ++k) {
    if (!nodes_equal(*a.args[k], *b.args[k])) {
      return false;
    }
  }
  return true;
}

bool node_constant(const ExprNode& n) {
  switch (n.kind) {
  case Kind::Number:
    return true;
  case Kind::Var:
  case Kind::Rho:
  case Kind::Xh:
  case Kind::Xv:
  case Kind::OpR:
  case Kind::OpP:
  case Kind::OpM:
    return false;
  default:
    if (n.kind == Kind::Call && (n.fn == "mplus" || n.fn == "mminus")) {
      return false;
    }
    for (const auto& a : n.args) {
      if (!node_constant(*a)) {
        return false;
      }
    }
    return true;
  }
}

std::vector<double> to_std(const Point& p) { return std::vector<double>(p.data(), p.data() + p.size()); }

void check_bound(const Expr& e, const Point& p) {
  if (e.empty()) {
    throw EvalError("empty expression");
  }
  if (e.context() == ExprContext::Radial) {
    if (p.size() != 1) {
      throw DimensionError("radial expression evaluated at a point of dimension " + std::to_string(p.size()));
    }
    return;
  }
  check_point(e.geometry(), p);
}

} // namespace

Expr::Expr(std::shared_ptr<const ExprNode> root, GeometrySpec geometry, ExprContext context, int op_dim)
    : root_(std::move(root)), geometry_(geometry), context_(context), op_dim_(op_dim) {}

bool Expr::is_constant() const { return root_ != nullptr && node_constant(*root_); }

Expr parse(const std::string& src, const GeometrySpec& g) {
  Parser p(src, g, ExprContext::Point, 0);
  return Expr(p.parse_all(), g, ExprContext::Point, 0);
}

Expr parse_radial(const std::string& src) {
  const GeometrySpec g = GeometrySpec::grushin_plane();
  Parser p(src, g, ExprContext::Radial, 0);
  return Expr(p.parse_all(), g, ExprContext::Radial, 0);
}

Expr parse_operator(const std::string& src, const GeometrySpec& g, int m) {
  Parser p(src, g, ExprContext::Operator, m);
  return Expr(p.parse_all(), g, ExprContext::Operator, m);
}

std::string print(const Expr& e) {
  std::ostringstream os;
  if (!e.empty()) {
    print_node(e.root(), e, os);
  }
  return os.str();
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) {
    return a.empty() && b.empty();
  }
  return nodes_equal(a.root(), b.root());
}

double eval(const Expr& e, const Point& p) {
  if (e.context() == ExprContext::Operator) {
    throw EvalError("operator expressions need eval_operator");
  }
  check_bound(e, p);
  const auto x = to_std(p);
  EvalCtx<double> c;
  c.expr = &e;
  c.x = &x;
  return eval_node(e.root(), c);
}

Taylor2 eval_taylor(const Expr& e, const Point& p) {
  if (e.context() == ExprContext::Operator) {
    throw EvalError("operator expressions need eval_operator");
  }
  check_bound(e, p);
  const int n = static_cast<int>(p.size());
  std::vector<Taylor2> x;
  x.reserve(n);
  for (int k = 0; k < n; ++k) {
    x.push_back(Taylor2::variable(p(k), n, k));
  }
  EvalCtx<Taylor2> c;
  c.expr = &e;
  c.x = &x;
  return eval_node(e.root(), c);
}

Taylor2 eval_radial(const Expr& e, double rho) {
  if (e.context() != ExprContext::Radial) {
    throw EvalError("not a radial profile expression");
  }
  Point p(1);
  p(0) = rho;
  return eval_taylor(e, p);
}

double eval_operator(const Expr& e, const OperatorArgs& args) {
  if (e.empty()) {
    throw EvalError("empty expression");
  }
  check_point(e.geometry(), args.x);
  if (args.p.size() != e.operator_dim() || args.M.rows() != e.operator_dim() || args.M.cols() != e.operator_dim()) {
    throw DimensionError("operator arguments do not match the declared dimension");
  }
  const auto x = to_std(args.x);
  EvalCtx<double> c;
  c.expr = &e;
  c.x = &x;
  c.op = &args;
  return eval_node(e.root(), c);
}

Eigen::VectorXd VectorExpr::eval(const Point& p, int expected_dim) const {
  if (is_zero()) {
    return Eigen::VectorXd::Zero(expected_dim);
  }
  if (static_cast<int>(entries.size()) != expected_dim) {
    throw DimensionError("vector field has " + std::to_string(entries.size()) + " entries, expected " + std::to_string(expected_dim));
  }
  Eigen::VectorXd out(expected_dim);
  for (int k = 0; k < expected_dim; ++k) {
    out(k) = subriem::eval(entries[k], p);
  }
  return out;
}

} // namespace subriem
