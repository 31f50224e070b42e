#include "stagrav/jet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stagrav {
namespace {

struct Triple {
  int i;
  int j;
  int k;
};

struct DerivativeEntry {
  int target;  // monomial index in the result
  int source;  // monomial index of target + e_mu
  Real factor;
};

struct Tables {
  std::array<std::array<int, kDim>, Jet::kSize> exponents{};
  std::array<int, Jet::kSize> degree{};
  // index_of[a][b][c][d], -1 when total degree exceeds the maximum order.
  std::array<std::array<std::array<std::array<int, 4>, 4>, 4>, 4> index_of{};
  std::array<std::vector<Triple>, Jet::kMaxOrder + 1> products;
  std::array<std::array<std::vector<DerivativeEntry>, kDim>, Jet::kMaxOrder + 1> derivatives;

  Tables() {
    for (auto& a : index_of)
      for (auto& b : a)
        for (auto& c : b) c.fill(-1);
    int n = 0;
    for (int deg = 0; deg <= Jet::kMaxOrder; ++deg) {
      for (int a = deg; a >= 0; --a)
        for (int b = deg - a; b >= 0; --b)
          for (int c = deg - a - b; c >= 0; --c) {
            const int d = deg - a - b - c;
            exponents[n] = {a, b, c, d};
            degree[n] = deg;
            index_of[a][b][c][d] = n;
            ++n;
          }
    }
    for (int order = 0; order <= Jet::kMaxOrder; ++order) {
      const int size = Jet::size_for_order(order);
      for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) {
          if (degree[i] + degree[j] > order) continue;
          std::array<int, kDim> e{};
          for (int m = 0; m < kDim; ++m) e[m] = exponents[i][m] + exponents[j][m];
          products[order].push_back({i, j, index_of[e[0]][e[1]][e[2]][e[3]]});
        }
      if (order == 0) continue;
      // derivative of an order-`order` jet yields order-1 coefficients
      for (int mu = 0; mu < kDim; ++mu) {
        for (int t = 0; t < Jet::size_for_order(order - 1); ++t) {
          auto e = exponents[t];
          e[mu] += 1;
          derivatives[order][mu].push_back(
              {t, index_of[e[0]][e[1]][e[2]][e[3]], static_cast<Real>(e[mu])});
        }
      }
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

Real factorial(int n) {
  Real f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

Jet::Jet(Real value, int order) : order_(order), zero_(value == 0.0L) {
  if (zero_) return;
  c_[0] = value;
  for (int i = 1, n = size_for_order(order_); i < n; ++i) c_[static_cast<std::size_t>(i)] = 0.0L;
}

void Jet::materialize() noexcept {
  if (!zero_) return;
  for (int i = 0, n = size_for_order(order_); i < n; ++i) c_[static_cast<std::size_t>(i)] = 0.0L;
  zero_ = false;
}

void Jet::set_coefficient(int i, Real v) noexcept {
  if (zero_ && v == 0.0L) return;
  materialize();
  c_[static_cast<std::size_t>(i)] = v;
}

Jet Jet::coordinate(int mu, Real base, int order) {
  Jet j(0.0, order);
  j.materialize();
  j.c_[0] = base;
  if (order >= 1) j.c_[static_cast<std::size_t>(1 + mu)] = 1.0;
  return j;
}

const std::array<int, kDim>& Jet::monomial_exponents(int i) {
  return tables().exponents[static_cast<std::size_t>(i)];
}

int Jet::monomial_index(const std::array<int, kDim>& e) {
  int total = 0;
  for (int v : e) {
    if (v < 0) return -1;
    total += v;
  }
  if (total > kMaxOrder) return -1;
  return tables().index_of[e[0]][e[1]][e[2]][e[3]];
}

Real Jet::partial(int mu) const {
  if (order_ < 1) throw JetOrderError("first partial requested from an order-0 jet");
  return coefficient(1 + mu);
}

Real Jet::partial(int mu, int nu) const {
  if (order_ < 2) throw JetOrderError("second partial requested from a jet of order < 2");
  std::array<int, kDim> e{};
  e[mu] += 1;
  e[nu] += 1;
  const int idx = monomial_index(e);
  return coefficient(idx) * (mu == nu ? 2.0L : 1.0L);
}

Real Jet::partial(int mu, int nu, int rho) const {
  if (order_ < 3) throw JetOrderError("third partial requested from a jet of order < 3");
  std::array<int, kDim> e{};
  e[mu] += 1;
  e[nu] += 1;
  e[rho] += 1;
  Real f = 1.0;
  for (int v : e) f *= factorial(v);
  return coefficient(monomial_index(e)) * f;
}

Jet Jet::derivative(int mu) const {
  if (order_ < 1) throw JetOrderError("derivative of an order-0 jet");
  Jet out(0.0, order_ - 1);
  if (zero_) return out;
  out.zero_ = false;
  for (const auto& d : tables().derivatives[order_][mu])
    out.c_[d.target] = d.factor * c_[d.source];
  return out;
}

Jet Jet::truncated(int order) const {
  if (order >= order_) return *this;
  Jet out(0.0, order);
  if (zero_) return out;
  out.zero_ = false;
  std::copy_n(c_.begin(), size_for_order(order), out.c_.begin());
  return out;
}

Jet Jet::reciprocal() const {
  const Real a0 = value();
  if (a0 == 0.0 || !std::isfinite(a0)) throw DomainError("reciprocal of zero", "jet");
  // 1/(a0 (1 + u)) = (1/a0) sum_n (-u)^n, u nilpotent beyond order_.
  Jet u = *this;
  u.c_[0] = 0.0;
  u *= 1.0 / a0;
  Jet term(1.0, order_);
  Jet sum(1.0, order_);
  for (int n = 1; n <= order_; ++n) {
    term = term * u;
    term *= -1.0;
    sum += term;
  }
  sum *= 1.0 / a0;
  return sum;
}

bool Jet::is_zero() const noexcept {
  if (zero_) return true;
  const int n = size_for_order(order_);
  for (int i = 0; i < n; ++i)
    if (c_[static_cast<std::size_t>(i)] != 0.0) return false;
  return true;
}

Jet& Jet::operator+=(const Jet& o) {
  order_ = std::min(order_, o.order_);
  if (o.zero_) return *this;
  if (zero_) {
    zero_ = false;
    copy_prefix(o);
    return *this;
  }
  for (int i = 0, n = size_for_order(order_); i < n; ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  order_ = std::min(order_, o.order_);
  if (o.zero_) return *this;
  if (zero_) {
    zero_ = false;
    for (int i = 0, n = size_for_order(order_); i < n; ++i) c_[i] = -o.c_[i];
    return *this;
  }
  for (int i = 0, n = size_for_order(order_); i < n; ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(Real s) {
  if (zero_) return *this;
  if (s == 0.0L) {
    zero_ = true;
    return *this;
  }
  for (int i = 0, n = size_for_order(order_); i < n; ++i) c_[i] *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  const int order = std::min(a.order_, b.order_);
  Jet out(0.0, order);
  if (a.zero_ || b.zero_) return out;
  out.materialize();
  for (const auto& t : tables().products[order]) out.c_[t.k] += a.c_[t.i] * b.c_[t.j];
  return out;
}

}  // namespace stagrav
