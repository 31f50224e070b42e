#include "stagrav/expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "stagrav/errors.hpp"

namespace stagrav {

namespace expr_detail {

enum class Op { kConst, kCoord, kParam, kAdd, kSub, kMul, kDiv, kPow, kNeg, kFunc };
enum class Func { kSin, kCos, kTan, kCot, kCsc, kSqrt, kExp, kLog, kSinh, kCosh };

struct Node {
  Op op = Op::kConst;
  Real value = 0.0;
  int index = 0;
  Func func = Func::kSin;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

}  // namespace expr_detail

namespace {

using expr_detail::Func;
using expr_detail::Node;
using expr_detail::Op;
using NodePtr = std::shared_ptr<const Node>;

struct FuncName {
  std::string_view name;
  Func func;
};

constexpr std::array<FuncName, 10> kFunctions{{{"sin", Func::kSin},
                                                {"cos", Func::kCos},
                                                {"tan", Func::kTan},
                                                {"cot", Func::kCot},
                                                {"csc", Func::kCsc},
                                                {"sqrt", Func::kSqrt},
                                                {"exp", Func::kExp},
                                                {"log", Func::kLog},
                                                {"sinh", Func::kSinh},
                                                {"cosh", Func::kCosh}}};

std::string_view func_name(Func f) {
  for (const auto& fn : kFunctions)
    if (fn.func == f) return fn.name;
  return "?";
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::kConst && n->value == v; }
bool is_const(const NodePtr& n) { return n->op == Op::kConst; }

NodePtr make_const(Real v) {
  auto n = std::make_shared<Node>();
  n->op = Op::kConst;
  n->value = v;
  return n;
}

NodePtr make_leaf(Op op, int index) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->index = index;
  return n;
}

Real apply_func(Func f, Real x) {
  switch (f) {
    case Func::kSin: return std::sin(x);
    case Func::kCos: return std::cos(x);
    case Func::kTan: return std::tan(x);
    case Func::kCot: return std::cos(x) / std::sin(x);
    case Func::kCsc: return 1.0L / std::sin(x);
    case Func::kSqrt: return std::sqrt(x);
    case Func::kExp: return std::exp(x);
    case Func::kLog: return std::log(x);
    case Func::kSinh: return std::sinh(x);
    case Func::kCosh: return std::cosh(x);
  }
  return std::nanl("");
}

NodePtr make_neg(NodePtr a) {
  if (is_const(a)) return make_const(-a->value);
  if (a->op == Op::kNeg) return a->a;
  auto n = std::make_shared<Node>();
  n->op = Op::kNeg;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  switch (op) {
    case Op::kAdd:
      if (is_const(a) && is_const(b)) return make_const(a->value + b->value);
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      break;
    case Op::kSub:
      if (is_const(a) && is_const(b)) return make_const(a->value - b->value);
      if (is_const(b, 0.0)) return a;
      if (is_const(a, 0.0)) return make_neg(b);
      break;
    case Op::kMul:
      if (is_const(a) && is_const(b)) return make_const(a->value * b->value);
      if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      if (is_const(a, -1.0)) return make_neg(b);
      if (is_const(b, -1.0)) return make_neg(a);
      break;
    case Op::kDiv:
      if (is_const(a) && is_const(b) && b->value != 0.0) return make_const(a->value / b->value);
      if (is_const(a, 0.0) && !is_const(b, 0.0)) return make_const(0.0);
      if (is_const(b, 1.0)) return a;
      break;
    case Op::kPow:
      if (is_const(a) && is_const(b)) {
        const Real v = std::pow(a->value, b->value);
        if (std::isfinite(v)) return make_const(v);
      }
      if (is_const(b, 1.0)) return a;
      if (is_const(b, 0.0)) return make_const(1.0);
      break;
    default:
      break;
  }
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_func(Func f, NodePtr a) {
  if (is_const(a)) {
    const Real v = apply_func(f, a->value);
    if (std::isfinite(v)) return make_const(v);
  }
  auto n = std::make_shared<Node>();
  n->op = Op::kFunc;
  n->func = f;
  n->a = std::move(a);
  return n;
}

NodePtr add(NodePtr a, NodePtr b) { return make_binary(Op::kAdd, std::move(a), std::move(b)); }
NodePtr sub(NodePtr a, NodePtr b) { return make_binary(Op::kSub, std::move(a), std::move(b)); }
NodePtr mul(NodePtr a, NodePtr b) { return make_binary(Op::kMul, std::move(a), std::move(b)); }
NodePtr divide(NodePtr a, NodePtr b) { return make_binary(Op::kDiv, std::move(a), std::move(b)); }
NodePtr power(NodePtr a, NodePtr b) { return make_binary(Op::kPow, std::move(a), std::move(b)); }

bool depends_on_coords(const NodePtr& n) {
  if (!n) return false;
  if (n->op == Op::kCoord) return true;
  return depends_on_coords(n->a) || depends_on_coords(n->b);
}

std::size_t count_nodes(const NodePtr& n) {
  if (!n) return 0;
  return 1 + count_nodes(n->a) + count_nodes(n->b);
}

void print(const NodePtr& n, const Symbols& s, std::ostream& os) {
  switch (n->op) {
    case Op::kConst: {
      std::array<char, 32> buf{};
      auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), n->value);
      os << std::string_view(buf.data(), static_cast<std::size_t>(end - buf.data()));
      return;
    }
    case Op::kCoord: os << s.coordinates[static_cast<std::size_t>(n->index)]; return;
    case Op::kParam: os << s.parameters[static_cast<std::size_t>(n->index)]; return;
    case Op::kNeg:
      os << "(-";
      print(n->a, s, os);
      os << ")";
      return;
    case Op::kFunc:
      os << func_name(n->func) << "(";
      print(n->a, s, os);
      os << ")";
      return;
    default: {
      const char* sym = n->op == Op::kAdd   ? " + "
                        : n->op == Op::kSub ? " - "
                        : n->op == Op::kMul ? "*"
                        : n->op == Op::kDiv ? "/"
                                            : "^";
      os << "(";
      print(n->a, s, os);
      os << sym;
      print(n->b, s, os);
      os << ")";
    }
  }
}

std::string node_string(const NodePtr& n, const Symbols& s) {
  std::ostringstream os;
  print(n, s, os);
  return os.str();
}

NodePtr differentiate(const NodePtr& n, int mu) {
  switch (n->op) {
    case Op::kConst:
    case Op::kParam: return make_const(0.0);
    case Op::kCoord: return make_const(n->index == mu ? 1.0 : 0.0);
    case Op::kNeg: return make_neg(differentiate(n->a, mu));
    case Op::kAdd: return add(differentiate(n->a, mu), differentiate(n->b, mu));
    case Op::kSub: return sub(differentiate(n->a, mu), differentiate(n->b, mu));
    case Op::kMul:
      return add(mul(differentiate(n->a, mu), n->b), mul(n->a, differentiate(n->b, mu)));
    case Op::kDiv: {
      // (a/b)' = a'/b - a b'/b^2
      auto da = differentiate(n->a, mu);
      auto db = differentiate(n->b, mu);
      return sub(divide(da, n->b), divide(mul(n->a, db), power(n->b, make_const(2.0))));
    }
    case Op::kPow: {
      auto du = differentiate(n->a, mu);
      if (!depends_on_coords(n->b)) {
        // constant exponent: c u^(c-1) u'
        return mul(mul(n->b, power(n->a, sub(n->b, make_const(1.0)))), du);
      }
      auto dv = differentiate(n->b, mu);
      auto log_u = make_func(Func::kLog, n->a);
      return mul(n, add(mul(dv, log_u), divide(mul(n->b, du), n->a)));
    }
    case Op::kFunc: {
      auto du = differentiate(n->a, mu);
      if (is_const(du, 0.0)) return make_const(0.0);
      const NodePtr& u = n->a;
      NodePtr outer;
      switch (n->func) {
        case Func::kSin: outer = make_func(Func::kCos, u); break;
        case Func::kCos: outer = make_neg(make_func(Func::kSin, u)); break;
        case Func::kTan: outer = power(make_func(Func::kCos, u), make_const(-2.0)); break;
        case Func::kCot: outer = make_neg(power(make_func(Func::kCsc, u), make_const(2.0))); break;
        case Func::kCsc:
          outer = make_neg(mul(make_func(Func::kCsc, u), make_func(Func::kCot, u)));
          break;
        case Func::kSqrt: outer = divide(make_const(0.5), make_func(Func::kSqrt, u)); break;
        case Func::kExp: outer = n; break;
        case Func::kLog: outer = divide(make_const(1.0), u); break;
        case Func::kSinh: outer = make_func(Func::kCosh, u); break;
        case Func::kCosh: outer = make_func(Func::kSinh, u); break;
      }
      return mul(outer, du);
    }
  }
  return make_const(0.0);
}

Real evaluate(const NodePtr& n, std::span<const double, kDim> x, std::span<const double> p,
                const Symbols& s) {
  auto fail = [&](const char* what) -> Real { throw DomainError(what, node_string(n, s)); };
  auto check = [&](Real v) {
    if (!std::isfinite(v)) fail("non-finite result");
    return v;
  };
  switch (n->op) {
    case Op::kConst: return n->value;
    case Op::kCoord: return x[static_cast<std::size_t>(n->index)];
    case Op::kParam: return p[static_cast<std::size_t>(n->index)];
    case Op::kNeg: return -evaluate(n->a, x, p, s);
    case Op::kAdd: return check(evaluate(n->a, x, p, s) + evaluate(n->b, x, p, s));
    case Op::kSub: return check(evaluate(n->a, x, p, s) - evaluate(n->b, x, p, s));
    case Op::kMul: return check(evaluate(n->a, x, p, s) * evaluate(n->b, x, p, s));
    case Op::kDiv: {
      const Real num = evaluate(n->a, x, p, s);
      const Real den = evaluate(n->b, x, p, s);
      if (den == 0.0) fail("division by zero");
      return check(num / den);
    }
    case Op::kPow: {
      const Real base = evaluate(n->a, x, p, s);
      const Real expo = evaluate(n->b, x, p, s);
      if (base < 0.0 && expo != std::floor(expo)) fail("negative base with non-integer exponent");
      if (base == 0.0 && expo < 0.0) fail("zero base with negative exponent");
      return check(std::pow(base, expo));
    }
    case Op::kFunc: {
      const Real u = evaluate(n->a, x, p, s);
      switch (n->func) {
        case Func::kSqrt:
          if (u < 0.0) fail("square root of a negative value");
          break;
        case Func::kLog:
          if (u <= 0.0) fail("logarithm of a non-positive value");
          break;
        case Func::kCot:
        case Func::kCsc:
          if (std::sin(u) == 0.0) fail("pole");
          break;
        case Func::kTan:
          if (std::cos(u) == 0.0) fail("pole");
          break;
        default:
          break;
      }
      return check(apply_func(n->func, u));
    }
  }
  return 0.0L;
}

class Parser {
 public:
  Parser(std::string_view text, const Symbols& symbols) : text_(text), symbols_(symbols) {}

  NodePtr parse() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    NodePtr n = parse_sum();
    skip_space();
    if (pos_ < text_.size()) throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
    return n;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      if (accept('+'))
        lhs = add(lhs, parse_product());
      else if (accept('-'))
        lhs = sub(lhs, parse_product());
      else
        return lhs;
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*'))
        lhs = mul(lhs, parse_unary());
      else if (accept('/'))
        lhs = divide(lhs, parse_unary());
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_neg(parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^')) return power(base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        digits();
      else
        pos_ = save;
    }
    long double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) throw ParseError("malformed number", start);
    return make_const(v);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    for (const auto& fn : kFunctions) {
      if (fn.name == name) {
        if (!accept('(')) throw ParseError("expected '(' after function '" + std::string(name) + "'", pos_);
        NodePtr arg = parse_sum();
        expect(')');
        return make_func(fn.func, arg);
      }
    }
    if (const int i = symbols_.coordinate_index(name); i >= 0) return make_leaf(Op::kCoord, i);
    if (const int i = symbols_.parameter_index(name); i >= 0) return make_leaf(Op::kParam, i);
    if (name == "pi") return make_const(std::numbers::pi_v<long double>);
    throw UnknownIdentifierError(std::string(name), start);
  }

  std::string_view text_;
  const Symbols& symbols_;
  std::size_t pos_ = 0;
};

}  // namespace

int Symbols::coordinate_index(std::string_view name) const {
  for (std::size_t i = 0; i < coordinates.size(); ++i)
    if (coordinates[i] == name) return static_cast<int>(i);
  return -1;
}

int Symbols::parameter_index(std::string_view name) const {
  for (std::size_t i = 0; i < parameters.size(); ++i)
    if (parameters[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> Symbols::parameter_values(const std::map<std::string, double>& values) const {
  std::vector<double> out;
  out.reserve(parameters.size());
  for (const auto& name : parameters) {
    auto it = values.find(name);
    if (it == values.end()) throw Error("missing value for parameter '" + name + "'");
    out.push_back(it->second);
  }
  return out;
}

Expr Expr::parse(std::string_view text, SymbolsPtr symbols) {
  Parser parser(text, *symbols);
  NodePtr root = parser.parse();
  return Expr(std::move(root), std::move(symbols));
}

Expr Expr::constant(double value, SymbolsPtr symbols) { return Expr(make_const(value), std::move(symbols)); }

Expr Expr::diff(int mu) const { return Expr(differentiate(root_, mu), symbols_); }

double Expr::eval(std::span<const double, kDim> point, std::span<const double> params) const {
  return static_cast<double>(evaluate(root_, point, params, *symbols_));
}

Real Expr::eval_real(std::span<const double, kDim> point, std::span<const double> params) const {
  return evaluate(root_, point, params, *symbols_);
}

std::string Expr::to_string() const { return node_string(root_, *symbols_); }

bool Expr::depends_on_coordinates() const { return depends_on_coords(root_); }

std::size_t Expr::size() const { return count_nodes(root_); }

Expr parse(std::string_view text, const std::vector<std::string>& chart,
           const std::vector<std::string>& params) {
  if (chart.size() != kDim) throw Error("a chart needs exactly four coordinate names");
  auto symbols = std::make_shared<Symbols>();
  for (std::size_t i = 0; i < kDim; ++i) symbols->coordinates[i] = chart[i];
  symbols->parameters = params;
  return Expr::parse(text, std::move(symbols));
}

Expr diff(const Expr& e, std::string_view coordinate) {
  const int mu = e.symbols()->coordinate_index(coordinate);
  if (mu < 0) throw UnknownIdentifierError(std::string(coordinate), 0);
  return e.diff(mu);
}

Jet2 eval_jet2(const Expr& e, std::span<const double, kDim> point,
               const std::map<std::string, double>& params) {
  const auto p = e.symbols()->parameter_values(params);
  return JetEvaluator(e, 2).evaluate_jet2(point, p);
}

JetEvaluator::JetEvaluator(const Expr& e, int max_order) : max_order_(max_order) {
  if (max_order < 0 || max_order > Jet::kMaxOrder) throw Error("unsupported jet order");
  const int n = Jet::size_for_order(max_order);
  trees_.resize(static_cast<std::size_t>(n));
  trees_[0] = e;
  for (int i = 1; i < n; ++i) {
    auto exps = Jet::monomial_exponents(i);
    int mu = 0;
    while (exps[static_cast<std::size_t>(mu)] == 0) ++mu;
    exps[static_cast<std::size_t>(mu)] -= 1;
    trees_[static_cast<std::size_t>(i)] =
        trees_[static_cast<std::size_t>(Jet::monomial_index(exps))].diff(mu);
  }
}

Jet JetEvaluator::evaluate(std::span<const double, kDim> point, std::span<const double> params,
                           int order) const {
  if (order > max_order_) throw JetOrderError("jet order exceeds the prepared derivative trees");
  Jet out(0.0, order);
  const int n = Jet::size_for_order(order);
  for (int i = 0; i < n; ++i) {
    const auto& exps = Jet::monomial_exponents(i);
    Real fact = 1.0;
    for (int v : exps)
      for (int k = 2; k <= v; ++k) fact *= k;
    out.set_coefficient(i, trees_[static_cast<std::size_t>(i)].eval_real(point, params) / fact);
  }
  return out;
}

Jet2 JetEvaluator::evaluate_jet2(std::span<const double, kDim> point,
                                 std::span<const double> params) const {
  const Jet j = evaluate(point, params, 2);
  Jet2 out;
  out.value = j.value();
  for (int mu = 0; mu < kDim; ++mu) {
    out.grad[static_cast<std::size_t>(mu)] = j.partial(mu);
    for (int nu = 0; nu < kDim; ++nu)
      out.hess[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)] = j.partial(mu, nu);
  }
  return out;
}

}  // namespace stagrav
