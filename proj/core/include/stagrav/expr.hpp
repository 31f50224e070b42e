#pragma once

#include <array>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stagrav/jet.hpp"

namespace stagrav {

/// Names an expression may refer to: four chart coordinates and any number
/// of real parameters. `pi` is always available as a constant.
struct Symbols {
  std::array<std::string, kDim> coordinates;
  std::vector<std::string> parameters;

  int coordinate_index(std::string_view name) const;  // -1 when absent
  int parameter_index(std::string_view name) const;   // -1 when absent
  /// Parameter values in declaration order; throws on missing names.
  std::vector<double> parameter_values(const std::map<std::string, double>& values) const;
};

using SymbolsPtr = std::shared_ptr<const Symbols>;
using Point = std::array<double, kDim>;

namespace expr_detail {
struct Node;
}

/// Immutable expression tree over chart coordinates and parameters.
///
/// Grammar: + - (left-assoc) < * / (left-assoc) < unary - < ^ (right-assoc).
/// Functions: sin cos tan cot csc sqrt exp log sinh cosh.
class Expr {
 public:
  Expr() = default;

  static Expr parse(std::string_view text, SymbolsPtr symbols);
  static Expr constant(double value, SymbolsPtr symbols);

  /// Exact partial derivative with respect to chart coordinate `mu`.
  Expr diff(int mu) const;
  double eval(std::span<const double, kDim> point, std::span<const double> params) const;
  /// Same evaluation carried out in extended precision.
  Real eval_real(std::span<const double, kDim> point, std::span<const double> params) const;

  std::string to_string() const;
  bool depends_on_coordinates() const;
  /// Number of nodes in the tree.
  std::size_t size() const;
  const SymbolsPtr& symbols() const { return symbols_; }
  bool valid() const { return root_ != nullptr; }

 private:
  Expr(std::shared_ptr<const expr_detail::Node> root, SymbolsPtr symbols)
      : root_(std::move(root)), symbols_(std::move(symbols)) {}

  std::shared_ptr<const expr_detail::Node> root_;
  SymbolsPtr symbols_;
};

/// Convenience overloads taking names instead of a Symbols object.
Expr parse(std::string_view text, const std::vector<std::string>& chart,
           const std::vector<std::string>& params);
Expr diff(const Expr& e, std::string_view coordinate);

/// Value, gradient and Hessian at a chart point.
struct Jet2 {
  double value = 0.0;
  std::array<double, kDim> grad{};
  std::array<std::array<double, kDim>, kDim> hess{};
};

Jet2 eval_jet2(const Expr& e, std::span<const double, kDim> point,
               const std::map<std::string, double>& params);

/// Holds every symbolic partial derivative of an expression up to
/// `max_order`, so repeated evaluation never re-differentiates.
class JetEvaluator {
 public:
  JetEvaluator() = default;
  JetEvaluator(const Expr& e, int max_order);

  int max_order() const { return max_order_; }
  const Expr& expression() const { return trees_.front(); }
  Jet evaluate(std::span<const double, kDim> point, std::span<const double> params,
               int order) const;
  Jet2 evaluate_jet2(std::span<const double, kDim> point, std::span<const double> params) const;

 private:
  int max_order_ = 0;
  std::vector<Expr> trees_;  // indexed by Jet monomial index
};

}  // namespace stagrav
