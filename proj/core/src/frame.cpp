#include "stagrav/frame.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <utility>

#include "stagrav/errors.hpp"

namespace stagrav {

namespace {

constexpr double kMaxCondition = 1e12;

double eta(int a) { return Signature::eta[static_cast<std::size_t>(a)]; }

// Minors of m for every pair of equal-popcount row/column masks, built by
// expansion along the lowest row.
std::array<std::array<Jet, kBlades>, kBlades> all_minors(const Matrix4<Jet>& m) {
  std::array<std::array<Jet, kBlades>, kBlades> out{};
  out[0][0] = Jet(1.0);
  for (unsigned rows = 1; rows < kBlades; ++rows) {
    const int a = std::countr_zero(rows);
    const unsigned rest = rows & (rows - 1);
    for (unsigned cols = 1; cols < kBlades; ++cols) {
      if (std::popcount(cols) != std::popcount(rows)) continue;
      Jet sum(0.0);
      int position = 0;
      for (int mu = 0; mu < kDim; ++mu) {
        if (!(cols & (1u << mu))) continue;
        const Jet term = m[a][mu] * out[rest][cols & ~(1u << mu)];
        if (position % 2 == 0)
          sum += term;
        else
          sum -= term;
        ++position;
      }
      out[rows][cols] = sum;
    }
  }
  return out;
}

template <typename T>
Matrix4<double> values_of(const Matrix4<T>& m) {
  Matrix4<double> out{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      if constexpr (std::is_same_v<T, Jet>)
        out[i][j] = m[i][j].value();
      else
        out[i][j] = m[i][j];
    }
  return out;
}

double norm1(const Matrix4<double>& m) {
  double best = 0.0;
  for (int j = 0; j < kDim; ++j) {
    double col = 0.0;
    for (int i = 0; i < kDim; ++i) col += std::abs(m[i][j]);
    best = std::max(best, col);
  }
  return best;
}

template <typename T>
Matrix4<T> gauss_jordan(Matrix4<T> a) {
  Matrix4<T> inv{};
  for (int i = 0; i < kDim; ++i) inv[i][i] = T(1.0);
  auto val = [](const T& x) {
    if constexpr (std::is_same_v<T, Jet>)
      return x.value();
    else
      return x;
  };
  for (int col = 0; col < kDim; ++col) {
    int pivot = col;
    for (int r = col + 1; r < kDim; ++r)
      if (std::abs(val(a[r][col])) > std::abs(val(a[pivot][col]))) pivot = r;
    if (val(a[pivot][col]) == 0.0) throw SingularTetradError("tetrad matrix is singular");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    T scale;
    if constexpr (std::is_same_v<T, Jet>)
      scale = a[col][col].reciprocal();
    else
      scale = 1.0 / a[col][col];
    for (int j = 0; j < kDim; ++j) {
      a[col][j] = a[col][j] * scale;
      inv[col][j] = inv[col][j] * scale;
    }
    for (int r = 0; r < kDim; ++r) {
      if (r == col || is_zero(a[r][col])) continue;
      const T f = a[r][col];
      for (int j = 0; j < kDim; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

}  // namespace

Matrix4<Jet> invert(const Matrix4<Jet>& m) { return gauss_jordan(m); }
Matrix4<double> invert(const Matrix4<double>& m) { return gauss_jordan(m); }

Tetrad::Tetrad(SymbolsPtr symbols, const std::array<std::array<std::string, kDim>, kDim>& entries)
    : symbols_(std::move(symbols)) {
  Matrix4<Expr> parsed;
  for (int a = 0; a < kDim; ++a)
    for (int mu = 0; mu < kDim; ++mu) parsed[a][mu] = Expr::parse(entries[a][mu], symbols_);
  *this = Tetrad(symbols_, std::move(parsed));
}

Tetrad::Tetrad(SymbolsPtr symbols, Matrix4<Expr> entries)
    : symbols_(std::move(symbols)), entries_(std::move(entries)) {
  for (int a = 0; a < kDim; ++a)
    for (int mu = 0; mu < kDim; ++mu)
      evaluators_[a][mu] = JetEvaluator(entries_[a][mu], Jet::kMaxOrder);
}

Matrix4<Jet> Tetrad::jets(std::span<const double, kDim> point, std::span<const double> params,
                          int order) const {
  Matrix4<Jet> out;
  for (int a = 0; a < kDim; ++a)
    for (int mu = 0; mu < kDim; ++mu) out[a][mu] = evaluators_[a][mu].evaluate(point, params, order);
  return out;
}

Tetrad schwarzschild_tetrad() {
  auto symbols = std::make_shared<Symbols>();
  symbols->coordinates = {"t", "r", "theta", "phi"};
  symbols->parameters = {"M"};
  return Tetrad(symbols, {{{"(1-2*M/r)^(1/2)", "0", "0", "0"},
                           {"0", "(1-2*M/r)^(-1/2)", "0", "0"},
                           {"0", "0", "r", "0"},
                           {"0", "0", "0", "r*sin(theta)"}}});
}

Tetrad minkowski_tetrad() {
  auto symbols = std::make_shared<Symbols>();
  symbols->coordinates = {"t", "x", "y", "z"};
  return Tetrad(symbols, {{{"1", "0", "0", "0"},
                           {"0", "1", "0", "0"},
                           {"0", "0", "1", "0"},
                           {"0", "0", "0", "1"}}});
}

FrameJet frame_jet(const Tetrad& tetrad, std::span<const double, kDim> point,
                   std::span<const double> params, int order) {
  if (order < 1 || order > Jet::kMaxOrder) throw JetOrderError("frame jets need order 1..3");
  FrameJet f;
  f.order = order;
  std::copy(point.begin(), point.end(), f.point.begin());
  f.h = tetrad.jets(point, params, order);

  const Matrix4<double> hv = values_of(f.h);
  const Matrix4<double> hv_inv = invert(hv);
  if (norm1(hv) * norm1(hv_inv) > kMaxCondition)
    throw SingularTetradError("tetrad condition number exceeds 1e12");

  const Matrix4<Jet> hinv = invert(f.h);
  for (int a = 0; a < kDim; ++a)
    for (int mu = 0; mu < kDim; ++mu) f.E[a][mu] = hinv[mu][a];

  f.h_minor = all_minors(f.h);
  f.E_minor = all_minors(f.E);

  const Jet& det = f.h_minor[kPseudoscalarMask][kPseudoscalarMask];
  f.sqrt_abs_det_g = det.value() < 0.0 ? -det : det;

  // Metric jets.
  for (int mu = 0; mu < kDim; ++mu)
    for (int nu = 0; nu < kDim; ++nu) {
      Jet dn(0.0);
      Jet up(0.0);
      for (int a = 0; a < kDim; ++a) {
        dn += eta(a) * (f.h[a][mu] * f.h[a][nu]);
        up += eta(a) * (f.E[a][mu] * f.E[a][nu]);
      }
      f.g_dn[mu][nu] = dn;
      f.g_up[mu][nu] = up;
    }

  // Structure coefficients c^k_ab = -E_a^mu E_b^nu (d_mu h^k_nu - d_nu h^k_mu).
  Array3<Jet> dh;  // dh[k][mu][nu] = d_mu h^k_nu
  for (int k = 0; k < kDim; ++k)
    for (int mu = 0; mu < kDim; ++mu)
      for (int nu = 0; nu < kDim; ++nu) dh[k][mu][nu] = f.h[k][nu].derivative(mu);
  for (int k = 0; k < kDim; ++k) {
    Matrix4<Jet> curl;
    for (int mu = 0; mu < kDim; ++mu)
      for (int nu = 0; nu < kDim; ++nu) curl[mu][nu] = dh[k][mu][nu] - dh[k][nu][mu];
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) {
        Jet sum(0.0);
        for (int mu = 0; mu < kDim; ++mu)
          for (int nu = 0; nu < kDim; ++nu) {
            if (mu == nu || curl[mu][nu].is_zero()) continue;
            sum += f.E[a][mu] * f.E[b][nu] * curl[mu][nu];
          }
        f.c[k][a][b] = -sum;
      }
  }

  // L(g_k) = 1/2 (c_rks + c_krs + c_srk) g^r ^ g^s with c_abc = eta_aa c^a_bc.
  auto c_low = [&](int a, int b, int cc) { return eta(a) * f.c[a][b][cc]; };
  for (int k = 0; k < kDim; ++k) {
    FieldJet Lk;
    for (int r = 0; r < kDim; ++r)
      for (int s = r + 1; s < kDim; ++s) {
        // r<s and s<r terms combine on the same blade with opposite orientation.
        const Jet rs = c_low(r, k, s) + c_low(k, r, s) + c_low(s, r, k);
        const Jet sr = c_low(s, k, r) + c_low(k, s, r) + c_low(r, s, k);
        Lk[blade_mask(r, s)] = 0.5 * (rs - sr);
      }
    f.L[k] = Lk;
  }

  // Lambda^m_kl = -(D_k g^m) . g_l with D_k g^m = 1/4 [L_k, g^m].
  for (int m = 0; m < kDim; ++m) {
    const FieldJet gm = FieldJet::basis_vector(m);
    for (int k = 0; k < kDim; ++k) {
      const FieldJet Dg = 0.25 * f.L[k].commutator(gm);
      for (int l = 0; l < kDim; ++l)
        f.Lambda[m][k][l] = -Dg.scalar_product(FieldJet::basis_covector(l));
    }
  }

  // Coordinate Christoffel symbols from metric jets.
  Array3<Jet> dg;  // dg[s][mu][nu] = d_s g_mu nu
  for (int s = 0; s < kDim; ++s)
    for (int mu = 0; mu < kDim; ++mu)
      for (int nu = 0; nu < kDim; ++nu) dg[s][mu][nu] = f.g_dn[mu][nu].derivative(s);
  for (int l = 0; l < kDim; ++l)
    for (int mu = 0; mu < kDim; ++mu)
      for (int nu = mu; nu < kDim; ++nu) {
        Jet sum(0.0);
        for (int s = 0; s < kDim; ++s) {
          const Jet bracket = dg[mu][s][nu] + dg[nu][s][mu] - dg[s][mu][nu];
          if (bracket.is_zero()) continue;
          sum += f.g_up[l][s] * bracket;
        }
        f.christoffel[l][mu][nu] = 0.5 * sum;
        f.christoffel[l][nu][mu] = f.christoffel[l][mu][nu];
      }

  if (order >= 2) {
    // R^r_{s mu nu} = d_mu G^r_{nu s} - d_nu G^r_{mu s} + G^r_{mu l} G^l_{nu s} - G^r_{nu l} G^l_{mu s}
    // contracted to R_{s nu} = R^r_{s r nu}.
    const auto& G = f.christoffel;
    Matrix4<Jet> ricci_coord;
    for (int s = 0; s < kDim; ++s)
      for (int nu = s; nu < kDim; ++nu) {
        Jet sum(0.0);
        for (int r = 0; r < kDim; ++r) {
          sum += G[r][nu][s].derivative(r) - G[r][r][s].derivative(nu);
          for (int l = 0; l < kDim; ++l)
            sum += G[r][r][l] * G[l][nu][s] - G[r][nu][l] * G[l][r][s];
        }
        ricci_coord[s][nu] = sum;
        ricci_coord[nu][s] = sum;
      }
    // Ricci 1-forms are R^d = (d wedge d) g^d, the negative of the contraction above.
    for (auto& row : ricci_coord)
      for (auto& x : row) x *= -1.0;
    Jet R(0.0);
    for (int s = 0; s < kDim; ++s)
      for (int nu = 0; nu < kDim; ++nu) R += f.g_up[s][nu] * ricci_coord[s][nu];
    f.ricci_scalar = R;
    for (int d = 0; d < kDim; ++d)
      for (int k = 0; k < kDim; ++k) {
        Jet sum(0.0);
        for (int s = 0; s < kDim; ++s)
          for (int nu = 0; nu < kDim; ++nu) sum += f.E[d][s] * f.E[k][nu] * ricci_coord[s][nu];
        f.ricci[d][k] = sum;
        f.einstein[d][k] = d == k ? sum - (0.5 * eta(d)) * R : sum;
      }
  }
  return f;
}

FrameSample sample_frame(const FrameJet& f) {
  FrameSample s;
  s.point = f.point;
  s.h = values_of(f.h);
  for (int a = 0; a < kDim; ++a)
    for (int mu = 0; mu < kDim; ++mu) s.h_inv[mu][a] = f.E[a][mu].value();
  s.g_dn = values_of(f.g_dn);
  s.g_up = values_of(f.g_up);
  s.sqrt_abs_det_g = f.sqrt_abs_det_g.value();
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) {
        s.c[i][j][k] = f.c[i][j][k].value();
        s.Lambda[i][j][k] = f.Lambda[i][j][k].value();
        s.christoffel[i][j][k] = f.christoffel[i][j][k].value();
      }
  for (int k = 0; k < kDim; ++k) s.L[k] = values(f.L[k]);
  s.ricci_scalar = f.ricci_scalar.value();
  s.einstein = values_of(f.einstein);
  return s;
}

FrameSample sample_frame(const Tetrad& tetrad, std::span<const double, kDim> point,
                         std::span<const double> params) {
  return sample_frame(frame_jet(tetrad, point, params, 2));
}

std::array<Multivector, kDim> connection_bivectors(const FrameSample& sample) { return sample.L; }

Array3<double> frame_connection_coefficients(const FrameSample& sample) { return sample.Lambda; }

Curvature curvature(const FrameSample& sample) { return {sample.ricci_scalar, sample.einstein}; }

Multivector volume_form(const FrameSample&) { return Multivector::pseudoscalar(); }

}  // namespace stagrav
