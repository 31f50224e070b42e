#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "stagrav/errors.hpp"

namespace stagrav {

inline constexpr int kDim = 4;

/// Working precision of jet arithmetic and expression evaluation. Curvature
/// terms of a weak field cancel to second order in M/r, so the extra bits of
/// long double directly extend the usable radial range.
using Real = long double;

/// Truncated multivariate Taylor polynomial in the four chart coordinates,
/// centred at an evaluation point.
///
/// Coefficients are stored per monomial x^α (|α| <= order) in graded order,
/// so the partial derivative ∂^α f equals α! times the stored coefficient.
/// Arithmetic truncates to the smaller order of the operands, which makes the
/// number of available derivative levels explicit: `derivative()` consumes one
/// level and raises JetOrderError once none are left.
class Jet {
 public:
  static constexpr int kMaxOrder = 3;
  static constexpr int kSize = 35;  // C(kMaxOrder + 4, 4)

  /// Exact zero (constants carry the maximal order).
  Jet() noexcept : order_(kMaxOrder), zero_(true) {}
  explicit Jet(Real value, int order = kMaxOrder);
  // Only the coefficients up to the jet's own order are meaningful, so copies
  // move just that prefix.
  Jet(const Jet& o) noexcept : order_(o.order_), zero_(o.zero_) { copy_prefix(o); }
  Jet& operator=(const Jet& o) noexcept {
    order_ = o.order_;
    zero_ = o.zero_;
    copy_prefix(o);
    return *this;
  }

  /// Coordinate function x^mu expanded around `base`.
  static Jet coordinate(int mu, Real base, int order);

  int order() const noexcept { return order_; }
  Real value() const noexcept { return zero_ ? 0.0L : c_[0]; }
  /// Raw Taylor coefficient for monomial index `i` (see monomial_exponents).
  Real coefficient(int i) const noexcept {
    return (zero_ || i >= size_for_order(order_)) ? 0.0L : c_[static_cast<std::size_t>(i)];
  }
  void set_coefficient(int i, Real v) noexcept;

  Real partial(int mu) const;
  Real partial(int mu, int nu) const;
  Real partial(int mu, int nu, int rho) const;

  /// ∂f/∂x^mu as a jet of one lower order.
  Jet derivative(int mu) const;
  Jet truncated(int order) const;
  Jet reciprocal() const;
  bool is_zero() const noexcept;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(Real s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(Jet a, Real s) { return a *= s; }
  friend Jet operator*(Real s, Jet a) { return a *= s; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b) { return a * b.reciprocal(); }

  /// Number of monomials with total degree <= order.
  static constexpr int size_for_order(int order) {
    constexpr std::array<int, 4> sizes{1, 5, 15, 35};
    return sizes[static_cast<std::size_t>(order)];
  }
  static const std::array<int, kDim>& monomial_exponents(int i);
  /// Index of the monomial with the given exponents, or -1 if degree > kMaxOrder.
  static int monomial_index(const std::array<int, kDim>& exponents);

 private:
  void copy_prefix(const Jet& o) noexcept {
    if (!zero_)
      for (int i = 0, n = size_for_order(order_); i < n; ++i)
        c_[static_cast<std::size_t>(i)] = o.c_[static_cast<std::size_t>(i)];
  }
  // Turns an exact zero into explicit zero coefficients before mutation.
  void materialize() noexcept;

  int order_;
  bool zero_;
  std::array<Real, kSize> c_;
};

inline bool is_zero(const Jet& j) noexcept { return j.is_zero(); }
inline bool is_zero(double x) noexcept { return x == 0.0; }
inline bool is_zero(long double x) noexcept { return x == 0.0L; }

inline int jet_order(const Jet& j) noexcept { return j.order(); }
inline int jet_order(double) noexcept { return Jet::kMaxOrder; }

}  // namespace stagrav
