#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <type_traits>

#include "stagrav/jet.hpp"

namespace stagrav {

/// Signature of the spacetime algebra R_{1,3}: eta = diag(+1, -1, -1, -1).
struct Signature {
  static constexpr std::array<double, 4> eta{1.0, -1.0, -1.0, -1.0};
  static constexpr double lower(int a) { return eta[static_cast<std::size_t>(a)]; }
};

/// Blade masks: bit i set means the blade contains g^i, factors ascending.
inline constexpr int kBlades = 16;
inline constexpr unsigned kScalarMask = 0b0000;
inline constexpr unsigned kPseudoscalarMask = 0b1111;

constexpr int blade_grade(unsigned mask) { return std::popcount(mask); }

constexpr unsigned blade_mask(int a) { return 1u << a; }
constexpr unsigned blade_mask(int a, int b) { return (1u << a) | (1u << b); }
constexpr unsigned blade_mask(int a, int b, int c) { return (1u << a) | (1u << b) | (1u << c); }

namespace detail {

// Sign of e_A e_B from reordering (popcount-swap) times the metric of the
// shared factors.
constexpr int product_sign(unsigned a, unsigned b) {
  int swaps = 0;
  for (unsigned t = a >> 1; t != 0; t >>= 1) swaps += std::popcount(t & b);
  int sign = (swaps % 2 == 0) ? 1 : -1;
  for (unsigned common = a & b; common != 0; common &= common - 1) {
    const int i = std::countr_zero(common);
    if (Signature::eta[static_cast<std::size_t>(i)] < 0) sign = -sign;
  }
  return sign;
}

constexpr std::array<std::array<int, kBlades>, kBlades> make_sign_table() {
  std::array<std::array<int, kBlades>, kBlades> t{};
  for (unsigned a = 0; a < kBlades; ++a)
    for (unsigned b = 0; b < kBlades; ++b) t[a][b] = product_sign(a, b);
  return t;
}

inline constexpr auto kSignTable = make_sign_table();

constexpr int reverse_sign(int grade) { return ((grade * (grade - 1) / 2) % 2 == 0) ? 1 : -1; }

}  // namespace detail

/// Sign of the basis product e_A e_B = sign * e_{A xor B}.
constexpr int basis_product_sign(unsigned a, unsigned b) { return detail::kSignTable[a][b]; }

/// Multivector of R_{1,3} with coefficients of scalar type T (double or Jet),
/// expressed in the orthonormal tetrad basis.
template <typename T>
class BasicMultivector {
 public:
  BasicMultivector() {
    if constexpr (std::is_arithmetic_v<T>) c_.fill(T(0));
  }

  static BasicMultivector scalar(T s) {
    BasicMultivector m;
    m.c_[0] = std::move(s);
    return m;
  }
  static BasicMultivector blade(unsigned mask, T coefficient) {
    BasicMultivector m;
    m.c_[mask] = std::move(coefficient);
    return m;
  }
  /// Basis 1-form g^a (upper index).
  static BasicMultivector basis_vector(int a) { return blade(blade_mask(a), T(1.0)); }
  /// Lowered basis 1-form g_a = eta_ab g^b.
  static BasicMultivector basis_covector(int a) {
    return blade(blade_mask(a), T(Signature::lower(a)));
  }
  static BasicMultivector pseudoscalar() { return blade(kPseudoscalarMask, T(1.0)); }

  T& operator[](unsigned mask) { return c_[mask]; }
  const T& operator[](unsigned mask) const { return c_[mask]; }
  const std::array<T, kBlades>& coefficients() const { return c_; }

  BasicMultivector& operator+=(const BasicMultivector& o) {
    for (int i = 0; i < kBlades; ++i) c_[i] += o.c_[i];
    return *this;
  }
  BasicMultivector& operator-=(const BasicMultivector& o) {
    for (int i = 0; i < kBlades; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  BasicMultivector& operator*=(double s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  BasicMultivector& scale(const T& s) {
    for (auto& x : c_)
      if (!is_zero(x)) x = x * s;
    return *this;
  }

  friend BasicMultivector operator+(BasicMultivector a, const BasicMultivector& b) { return a += b; }
  friend BasicMultivector operator-(BasicMultivector a, const BasicMultivector& b) { return a -= b; }
  friend BasicMultivector operator-(BasicMultivector a) { return a *= -1.0; }
  friend BasicMultivector operator*(BasicMultivector a, double s) { return a *= s; }
  friend BasicMultivector operator*(double s, BasicMultivector a) { return a *= s; }

  /// Geometric (Clifford) product.
  friend BasicMultivector operator*(const BasicMultivector& a, const BasicMultivector& b) {
    return a.template combine<Product::kGeometric>(b);
  }

  BasicMultivector wedge(const BasicMultivector& b) const { return combine<Product::kWedge>(b); }
  /// Left contraction, adjoint to the wedge: (X ⌟ Y)·Z = Y·(rev(X) ∧ Z).
  BasicMultivector left_contract(const BasicMultivector& b) const {
    return combine<Product::kLeftContraction>(b);
  }
  /// Right contraction: (X ⌞ Y)·Z = X·(Z ∧ rev(Y)).
  BasicMultivector right_contract(const BasicMultivector& b) const {
    return combine<Product::kRightContraction>(b);
  }

  BasicMultivector grade(int r) const {
    BasicMultivector out;
    for (unsigned m = 0; m < kBlades; ++m)
      if (blade_grade(m) == r) out.c_[m] = c_[m];
    return out;
  }
  BasicMultivector reverse() const {
    BasicMultivector out = *this;
    for (unsigned m = 0; m < kBlades; ++m)
      if (detail::reverse_sign(blade_grade(m)) < 0) out.c_[m] *= -1.0;
    return out;
  }
  BasicMultivector grade_involution() const {
    BasicMultivector out = *this;
    for (unsigned m = 0; m < kBlades; ++m)
      if (blade_grade(m) % 2 == 1) out.c_[m] *= -1.0;
    return out;
  }

  /// X·Y = <rev(X) Y>_0.
  T scalar_product(const BasicMultivector& b) const {
    T sum(0.0);
    for (unsigned m = 0; m < kBlades; ++m) {
      if (is_zero(c_[m]) || is_zero(b.c_[m])) continue;
      const double s = detail::reverse_sign(blade_grade(m)) * basis_product_sign(m, m);
      sum += s * (c_[m] * b.c_[m]);
    }
    return sum;
  }

  /// Hodge dual: rev(X) ⌟ tau.
  BasicMultivector hodge_star() const { return reverse().left_contract(pseudoscalar()); }
  /// Inverse of hodge_star; on grade p, star^-1 = -(-1)^p star.
  BasicMultivector inverse_hodge_star() const {
    BasicMultivector out;
    for (int p = 0; p <= 4; ++p) {
      BasicMultivector part = grade(p).hodge_star();
      out += (p % 2 == 0 ? -1.0 : 1.0) * part;
    }
    return out;
  }

  /// [A, B] = AB - BA.
  BasicMultivector commutator(const BasicMultivector& b) const { return (*this) * b - b * (*this); }

  /// Lowest jet order among the coefficients.
  int order() const {
    int o = Jet::kMaxOrder;
    for (const auto& x : c_) o = std::min(o, jet_order(x));
    return o;
  }

 private:
  enum class Product { kGeometric, kWedge, kLeftContraction, kRightContraction };

  template <Product P>
  BasicMultivector combine(const BasicMultivector& b) const {
    std::array<bool, kBlades> nz_a{};
    std::array<bool, kBlades> nz_b{};
    for (int i = 0; i < kBlades; ++i) {
      nz_a[i] = !is_zero(c_[i]);
      nz_b[i] = !is_zero(b.c_[i]);
    }
    BasicMultivector out;
    for (unsigned i = 0; i < kBlades; ++i) {
      if (!nz_a[i]) continue;
      for (unsigned j = 0; j < kBlades; ++j) {
        if (!nz_b[j]) continue;
        if constexpr (P == Product::kWedge) {
          if ((i & j) != 0) continue;
        } else if constexpr (P == Product::kLeftContraction) {
          if ((i & j) != i) continue;
        } else if constexpr (P == Product::kRightContraction) {
          if ((i & j) != j) continue;
        }
        const int s = basis_product_sign(i, j);
        if (s > 0)
          out.c_[i ^ j] += c_[i] * b.c_[j];
        else
          out.c_[i ^ j] -= c_[i] * b.c_[j];
      }
    }
    return out;
  }

  std::array<T, kBlades> c_;
};

using Multivector = BasicMultivector<double>;

/// Coefficient values of a jet multivector at the expansion point.
inline Multivector values(const BasicMultivector<Jet>& m) {
  Multivector out;
  for (unsigned i = 0; i < kBlades; ++i) out[i] = m[i].value();
  return out;
}

inline BasicMultivector<Jet> constant_jet(const Multivector& m) {
  BasicMultivector<Jet> out;
  for (unsigned i = 0; i < kBlades; ++i) out[i] = Jet(m[i]);
  return out;
}

// Free-function spellings used throughout the calculus code.
template <typename T>
BasicMultivector<T> geometric_product(const BasicMultivector<T>& a, const BasicMultivector<T>& b) {
  return a * b;
}
template <typename T>
BasicMultivector<T> wedge(const BasicMultivector<T>& a, const BasicMultivector<T>& b) {
  return a.wedge(b);
}
template <typename T>
BasicMultivector<T> left_contraction(const BasicMultivector<T>& a, const BasicMultivector<T>& b) {
  return a.left_contract(b);
}
template <typename T>
BasicMultivector<T> right_contraction(const BasicMultivector<T>& a, const BasicMultivector<T>& b) {
  return a.right_contract(b);
}
template <typename T>
T scalar_product(const BasicMultivector<T>& a, const BasicMultivector<T>& b) {
  return a.scalar_product(b);
}
template <typename T>
BasicMultivector<T> reverse(const BasicMultivector<T>& a) {
  return a.reverse();
}
template <typename T>
BasicMultivector<T> grade_involution(const BasicMultivector<T>& a) {
  return a.grade_involution();
}
template <typename T>
BasicMultivector<T> grade(const BasicMultivector<T>& a, int r) {
  return a.grade(r);
}
template <typename T>
BasicMultivector<T> hodge_star(const BasicMultivector<T>& a) {
  return a.hodge_star();
}
template <typename T>
BasicMultivector<T> inverse_hodge_star(const BasicMultivector<T>& a) {
  return a.inverse_hodge_star();
}
template <typename T>
BasicMultivector<T> commutator(const BasicMultivector<T>& a, const BasicMultivector<T>& b) {
  return a.commutator(b);
}

/// Largest absolute coefficient.
double max_abs(const Multivector& m);
/// Largest absolute coefficient outside grade r.
double max_abs_outside_grade(const Multivector& m, int r);

/// Human-readable blade label, e.g. "g0^g1".
const char* blade_name(unsigned mask);

std::ostream& operator<<(std::ostream& os, const Multivector& m);

}  // namespace stagrav
