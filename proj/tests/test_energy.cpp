#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <numbers>

#include "stagrav/energy_momentum.hpp"
#include "support.hpp"

using namespace stagrav;
using namespace stagrav::testing;

namespace {

const std::vector<double> kMass{1.0};
constexpr double kPi = std::numbers::pi;

double eta(int a) { return Signature::eta[static_cast<std::size_t>(a)]; }

Configuration vacuum_schwarzschild() { return Configuration{schwarzschild_tetrad(), {}, kMass}; }

Configuration minkowski_with(MatterFields m) { return Configuration{minkowski_tetrad(), std::move(m), {}}; }

double relative(const OneForms& a, const OneForms& b) {
  OneForms diff;
  for (int d = 0; d < kDim; ++d) diff[d] = a[d] - b[d];
  return max_abs(diff) / std::max(1e-300, std::max(max_abs(a), max_abs(b)));
}

std::string random_polynomial(std::mt19937_64& rng, const std::array<std::string, kDim>& names) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::string e = std::to_string(u(rng));
  for (const auto& n : names) e += "+(" + std::to_string(u(rng)) + ")*" + n;
  for (int i = 0; i < kDim; ++i)
    for (int j = i; j < kDim; ++j) e += "+(" + std::to_string(u(rng)) + ")*" + names[i] + "*" + names[j];
  e += "+(" + std::to_string(u(rng)) + ")*sin(" + names[2] + ")*cos(" + names[3] + ")";
  return e;
}

CoordinateOneForm random_potential(std::mt19937_64& rng, SymbolsPtr symbols) {
  std::array<std::string, kDim> c;
  for (auto& s : c) s = random_polynomial(rng, symbols->coordinates);
  return CoordinateOneForm(symbols, c);
}

SpinorField random_spinor(std::mt19937_64& rng, SymbolsPtr symbols) {
  std::array<std::string, 8> c;
  for (auto& s : c) s = random_polynomial(rng, symbols->coordinates);
  return SpinorField(symbols, c);
}

// Variational oracle: the gravitational Lagrangian density l(h, dh) assembled
// from plain multivectors, differentiated numerically in h^d_mu and in the
// field strengths F^d_{mu nu} = d_mu h^d_nu - d_nu h^d_mu.
using FieldStrengths = std::array<Matrix4<double>, kDim>;

struct Coframe {
  Matrix4<double> E{};  // E[a][mu]
  std::array<Multivector, kDim> dg;

  Multivector dx(int mu) const {
    Multivector o;
    for (int b = 0; b < kDim; ++b) o[blade_mask(b)] = E[b][mu];
    return o;
  }
  Multivector d_blade(unsigned mask) const {
    if (mask == 0) return {};
    const int f = std::countr_zero(mask);
    const unsigned rest = mask & (mask - 1);
    return dg[f].wedge(Multivector::blade(rest, 1.0)) - Multivector::basis_vector(f).wedge(d_blade(rest));
  }
  Multivector d_constant(const Multivector& X) const {
    Multivector o;
    for (unsigned m = 0; m < kBlades; ++m)
      if (X[m] != 0.0) o += X[m] * d_blade(m);
    return o;
  }
};

Coframe make_coframe(const Matrix4<double>& h, const FieldStrengths& F) {
  Coframe c;
  const Matrix4<double> hi = invert(h);
  for (int a = 0; a < kDim; ++a)
    for (int mu = 0; mu < kDim; ++mu) c.E[a][mu] = hi[mu][a];
  for (int a = 0; a < kDim; ++a)
    for (int m = 0; m < kDim; ++m)
      for (int n = m + 1; n < kDim; ++n) c.dg[a] += F[a][m][n] * c.dx(m).wedge(c.dx(n));
  return c;
}

double det4(Matrix4<double> a) {
  double d = 1.0;
  for (int c = 0; c < kDim; ++c) {
    int p = c;
    for (int r = c + 1; r < kDim; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (p != c) {
      std::swap(a[p], a[c]);
      d = -d;
    }
    d *= a[c][c];
    for (int r = c + 1; r < kDim; ++r) {
      const double f = a[r][c] / a[c][c];
      for (int j = c; j < kDim; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return d;
}

double lagrangian_density(const Matrix4<double>& h, const FieldStrengths& F) {
  const Coframe c = make_coframe(h, F);
  Multivector L, W;
  for (int a = 0; a < kDim; ++a) {
    L -= 0.5 * c.dg[a].wedge(eta(a) * c.dg[a].hodge_star());
    const Multivector s = c.d_constant(Multivector::basis_vector(a).hodge_star()).hodge_star();
    L += 0.5 * s.wedge(eta(a) * s.hodge_star());
    W += c.dg[a].wedge(Multivector::basis_covector(a));
  }
  L += 0.25 * W.wedge(W.hodge_star());
  return L[kPseudoscalarMask] * det4(h);
}

Multivector coordinate_blade(const Coframe& c, unsigned mask) {
  Multivector b = Multivector::scalar(1.0);
  for (int n = 0; n < kDim; ++n)
    if (mask & (1u << n)) b = b.wedge(c.dx(n));
  return b;
}

}  // namespace

TEST(Gravitational, MinkowskiIsZero) {
  const Configuration cfg = minkowski_with({});
  const EMReport r = evaluate_report(cfg, Point{0.3, -1.0, 2.0, 0.5});
  EXPECT_EQ(max_abs(r.t_nice), 0.0);
  EXPECT_EQ(max_abs(r.t_lagrangian), 0.0);
  EXPECT_EQ(max_abs(r.S), 0.0);
  EXPECT_EQ(max_abs(r.h), 0.0);
  EXPECT_EQ(max_abs(r.asymmetry), 0.0);
  EXPECT_EQ(r.lagrangians.L_g, 0.0);
  EXPECT_FALSE(r.lagrangians.L_M);
}

TEST(Gravitational, SchwarzschildGoldenValues) {
  const Point p{0, 10, kPi / 4, 0};
  const OneForms t = grav_em_nice(schwarzschild_tetrad(), p, kMass);
  EXPECT_NEAR(t[0][blade_mask(0)], 1.25e-4, 1e-16);
  EXPECT_LT(max_abs(t[0] - Multivector::blade(blade_mask(0), t[0][blade_mask(0)])), 1e-18);
  EXPECT_LT(max_abs(t[1]), 1e-18);
  EXPECT_NEAR(t[2][blade_mask(1)], std::sqrt(0.8) / 100, 1e-16);
  EXPECT_NEAR(t[2][blade_mask(2)], -0.002, 1e-16);
  // csc^2(pi/4) (-1 + 10 + cos(pi/2)) / 1000
  EXPECT_NEAR(t[3][blade_mask(3)], 0.018, 1e-15);

  const OneForms equator = grav_em_nice(schwarzschild_tetrad(), Point{0, 10, kPi / 2, 0}, kMass);
  EXPECT_NEAR(equator[3][blade_mask(3)], 0.008, 1e-16);
  EXPECT_LT(std::abs(equator[2][blade_mask(1)]), 1e-18);
}

TEST(Gravitational, ComponentMatrixAndAsymmetry) {
  const Point p{0, 10, kPi / 4, 0};
  const OneForms t = grav_em_nice(schwarzschild_tetrad(), p, kMass);
  const Matrix4<double> m = components(t);
  EXPECT_NEAR(m[1][2], -0.00894427190999916, 1e-15);
  EXPECT_NEAR(m[2][1], 0.0, 1e-18);
  EXPECT_NEAR(m[0][0], 1.25e-4, 1e-16);
  EXPECT_NEAR(m[2][2], 0.002, 1e-16);
  EXPECT_NEAR(m[3][3], -0.018, 1e-15);
  const Matrix4<double> asym = em_asymmetry(t);
  EXPECT_NEAR(asym[1][2], -0.00894427190999916, 1e-15);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) EXPECT_EQ(asym[i][j], -asym[j][i]);
}

TEST(Gravitational, AsymmetryIsAntisymmetricOnSyntheticTetrads) {
  std::mt19937_64 rng(51);
  for (unsigned seed = 0; seed < 5; ++seed) {
    const Matrix4<double> a = em_asymmetry(grav_em_nice(synthetic_tetrad(800 + seed), random_point(rng), {}));
    for (int i = 0; i < kDim; ++i) {
      EXPECT_EQ(a[i][i], 0.0);
      for (int j = 0; j < kDim; ++j) EXPECT_EQ(a[i][j], -a[j][i]);
    }
  }
}

TEST(Gravitational, RoutesAgreeOnSchwarzschild) {
  std::mt19937_64 rng(52);
  for (int n = 0; n < 50; ++n) {
    const Point p = schwarzschild_point(rng);
    const EMReport r = evaluate_report(vacuum_schwarzschild(), p);
    EXPECT_LT(relative(r.t_lagrangian, lower_index(r.t_nice)), 1e-8) << "r=" << p[1] << " theta=" << p[2];
  }
}

TEST(Gravitational, RoutesAgreeOnSyntheticTetrads) {
  std::mt19937_64 rng(53);
  for (unsigned seed = 0; seed < 20; ++seed) {
    const Configuration cfg{synthetic_tetrad(900 + seed, 0.05), {}, {}};
    const EMReport r = evaluate_report(cfg, random_point(rng));
    EXPECT_LT(relative(r.t_lagrangian, lower_index(r.t_nice)), 1e-8) << "seed " << seed;
    EXPECT_LT(max_abs(r.eq211) / r.scale, 1e-10) << "seed " << seed;
  }
}

TEST(Gravitational, LagrangianFormsAreVariationalDerivatives) {
  std::mt19937_64 rng(54);
  for (unsigned seed = 0; seed < 3; ++seed) {
    const FrameJet frame = frame_jet(synthetic_tetrad(1000 + seed, 0.1), random_point(rng), {}, 2);
    Matrix4<double> h{};
    FieldStrengths F{};
    for (int a = 0; a < kDim; ++a)
      for (int mu = 0; mu < kDim; ++mu) h[a][mu] = frame.h[a][mu].value();
    for (int a = 0; a < kDim; ++a)
      for (int m = 0; m < kDim; ++m)
        for (int n = 0; n < kDim; ++n)
          F[a][m][n] = static_cast<double>(frame.h[a][n].partial(m) - frame.h[a][m].partial(n));
    const Coframe c = make_coframe(h, F);
    const LagrangianRouteJets forms = grav_em_lagrangian_forms(frame);
    const double eps = 1e-5;
    for (int d = 0; d < kDim; ++d) {
      Multivector theta;
      for (int mu = 0; mu < kDim; ++mu) {
        auto hp = h, hm = h;
        hp[d][mu] += eps;
        hm[d][mu] -= eps;
        const double der = (lagrangian_density(hp, F) - lagrangian_density(hm, F)) / (2 * eps);
        theta += (mu % 2 ? -1.0 : 1.0) * der * coordinate_blade(c, 15u & ~(1u << mu));
      }
      const Multivector star_t = values(forms.star_t[d]);
      EXPECT_LT(max_abs(theta - star_t), 1e-7 * std::max(1.0, max_abs(star_t))) << "d=" << d;

      Multivector pi;
      for (int m = 0; m < kDim; ++m)
        for (int n = m + 1; n < kDim; ++n) {
          auto Fp = F, Fm = F;
          Fp[d][m][n] += eps;
          Fp[d][n][m] -= eps;
          Fm[d][m][n] -= eps;
          Fm[d][n][m] += eps;
          const double der = (lagrangian_density(h, Fp) - lagrangian_density(h, Fm)) / (2 * eps);
          const unsigned M = blade_mask(m, n), comp = 15u & ~M;
          pi += basis_product_sign(M, comp) * der * coordinate_blade(c, comp);
        }
      const Multivector star_S = values(forms.star_S[d]);
      EXPECT_LT(max_abs(pi - star_S), 1e-7 * std::max(1.0, max_abs(star_S))) << "d=" << d;
    }
  }
}

TEST(Gravitational, VacuumConsistencyOnSchwarzschild) {
  std::mt19937_64 rng(55);
  for (int n = 0; n < 50; ++n) {
    const Point p = schwarzschild_point(rng);
    const EMReport r = evaluate_report(vacuum_schwarzschild(), p);
    EXPECT_LT(std::abs(r.ricci_scalar), 1e-8 * r.scale);
    EXPECT_LT(max_abs(r.G), 1e-8 * r.scale);
    EXPECT_LT(max_abs(r.eq211), 1e-8 * r.scale);
    EXPECT_LT(max_abs(r.field_residual), 1e-8 * r.scale);
    for (int d = 0; d < kDim; ++d)
      for (const Multivector* m : {&r.t_nice[d], &r.t_lagrangian[d], &r.G[d]})
        EXPECT_LT(max_abs_outside_grade(*m, 1), 1e-10 * r.scale);
  }
}

TEST(Gravitational, ConservationOnSchwarzschild) {
  std::mt19937_64 rng(56);
  for (int n = 0; n < 20; ++n) {
    const Point p = schwarzschild_point(rng);
    const double scale = evaluate_report(vacuum_schwarzschild(), p).scale;
    EXPECT_LT(max_abs(conservation_residual(vacuum_schwarzschild(), p)), 1e-6 * scale);
  }
  EXPECT_EQ(max_abs(conservation_residual(minkowski_with({}), Point{1, 2, 3, 4})), 0.0);
}

TEST(Gravitational, SourceOfFieldEquationIsCoclosed) {
  std::mt19937_64 rng(57);
  for (unsigned seed = 0; seed < 5; ++seed) {
    const FrameJet frame = frame_jet(synthetic_tetrad(1100 + seed, 0.05), random_point(rng), {}, 3);
    for (int d = 0; d < kDim; ++d) {
      const FieldJet source = codifferential(frame, exterior_d(frame, FieldJet::basis_covector(d)));
      EXPECT_LT(max_abs(values(codifferential(frame, source))), 1e-9 * std::max(1.0, max_abs(values(source))));
    }
  }
}

TEST(Maxwell, ConstantElectricField) {
  const double E = 0.7;
  MatterFields m;
  m.A = CoordinateOneForm(minkowski_tetrad().symbols(), {"-0.7*x", "0", "0", "0"});
  const Configuration cfg = minkowski_with(m);
  const EMReport r = evaluate_report(cfg, Point{0.2, 0.4, -0.3, 1.0});
  ASSERT_TRUE(r.maxwell);
  EXPECT_NEAR(r.maxwell->F[blade_mask(0, 1)], E, 1e-15);
  EXPECT_NEAR(r.maxwell->T_ab[0][0], 0.5 * E * E, 1e-15);
  EXPECT_NEAR(r.maxwell->T_ab_components[0][0], 0.5 * E * E, 1e-15);
  EXPECT_NEAR(r.maxwell->T_ab[1][1], -0.5 * E * E, 1e-15);
  EXPECT_NEAR(*r.lagrangians.L_M, 0.5 * E * E, 1e-15);
  EXPECT_LT(max_abs(r.maxwell_eq_residual->deltaF_plus_J), 1e-15);
  EXPECT_EQ(max_abs(r.maxwell_eq_residual->dF), 0.0);
}

TEST(Maxwell, ZeroPotential) {
  MatterFields m;
  m.A = CoordinateOneForm(minkowski_tetrad().symbols(), {"0", "0", "0", "0"});
  const EMReport r = evaluate_report(minkowski_with(m), Point{0, 0, 0, 0});
  EXPECT_EQ(max_abs(r.maxwell->T), 0.0);
  EXPECT_EQ(max_abs(r.maxwell->T_ab), 0.0);
}

TEST(Maxwell, PlaneWaveSolvesVacuumEquations) {
  const Tetrad T = minkowski_tetrad();
  const CoordinateOneForm A(T.symbols(), {"0", "0", "cos(t-x)", "0"});
  std::mt19937_64 rng(58);
  for (int n = 0; n < 10; ++n) {
    const FrameJet frame = frame_jet(T, random_point(rng, 3.0), {}, 2);
    const MaxwellResidual res = maxwell_residual(frame, A.jet(frame, {}), nullptr, 0.0);
    EXPECT_LT(max_abs(res.deltaF_plus_J), 1e-14);
    EXPECT_EQ(max_abs(res.dF), 0.0);
  }
}

TEST(Maxwell, RandomPotentialsOnSchwarzschild) {
  std::mt19937_64 rng(59);
  const Tetrad T = schwarzschild_tetrad();
  for (int n = 0; n < 100; ++n) {
    const FrameJet frame = frame_jet(T, schwarzschild_point(rng), kMass, 2);
    const CoordinateOneForm A = random_potential(rng, T.symbols());
    const MaxwellEM em = maxwell_em(frame, A.jet(frame, kMass));
    const double s = std::max(1e-300, max_abs(em.T_ab));
    EXPECT_LT(max_abs_diff(em.T_ab, transposed(em.T_ab)) / s, 1e-9);
    EXPECT_LT(max_abs_diff(em.T_ab, em.T_ab_components) / s, 1e-9);
    EXPECT_LT(em.grade_leak / s, 1e-9);
    const MaxwellResidual res = maxwell_residual(frame, A.jet(frame, kMass), nullptr, 0.0);
    EXPECT_LT(max_abs(res.dF), 1e-9 * std::max(1.0, max_abs(em.F)));
  }
}

TEST(Maxwell, CodifferentialOfFieldIsCoclosed) {
  std::mt19937_64 rng(60);
  const Tetrad T = schwarzschild_tetrad();
  for (int n = 0; n < 10; ++n) {
    const FrameJet frame = frame_jet(T, schwarzschild_point(rng), kMass, 3);
    const FieldJet F = exterior_d(frame, random_potential(rng, T.symbols()).jet(frame, kMass));
    const FieldJet deltaF = codifferential(frame, F);
    EXPECT_LT(max_abs(values(codifferential(frame, deltaF))), 1e-9 * std::max(1.0, max_abs(values(deltaF))));
  }
}

TEST(Dirac, RestPlaneWave) {
  const Tetrad T = minkowski_tetrad();
  // exp(-g2 g1 t) = cos t + sin t g1 g2
  const SpinorField psi(T.symbols(), {"cos(t)", "0", "0", "0", "sin(t)", "0", "0", "0"});
  MatterFields m;
  m.psi = psi;
  m.mass = 1.0;
  const Configuration cfg = minkowski_with(m);
  std::mt19937_64 rng(61);
  for (int n = 0; n < 10; ++n) {
    const EMReport r = evaluate_report(cfg, random_point(rng, 3.0));
    ASSERT_TRUE(r.dirac_eq_residual);
    EXPECT_LT(max_abs(*r.dirac_eq_residual), 1e-10);
    EXPECT_LT(max_abs_diff(r.dirac->T_mk, transposed(r.dirac->T_mk)), 1e-15);
    EXPECT_NEAR(r.dirac->T_mk[0][0], 1.0, 1e-14);
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b)
        if (a + b > 0) EXPECT_NEAR(r.dirac->T_mk[a][b], 0.0, 1e-14);
  }
}

TEST(Dirac, WrongFrequencyIsNotASolution) {
  const Tetrad T = minkowski_tetrad();
  MatterFields m;
  m.psi = SpinorField(T.symbols(), {"cos(t)", "0", "0", "0", "-sin(t)", "0", "0", "0"});
  m.mass = 1.0;
  const EMReport r = evaluate_report(minkowski_with(m), Point{0.4, 0, 0, 0});
  EXPECT_GT(max_abs(*r.dirac_eq_residual), 1.0);
}

TEST(Dirac, ConstantSpinor) {
  const Tetrad T = minkowski_tetrad();
  MatterFields m;
  m.psi = SpinorField(T.symbols(), {"1", "0", "0", "0", "0", "0", "0", "0"});
  EXPECT_EQ(max_abs(*evaluate_report(minkowski_with(m), Point{0, 0, 0, 0}).dirac_eq_residual), 0.0);
  m.mass = 1.0;
  const EMReport r = evaluate_report(minkowski_with(m), Point{0, 0, 0, 0});
  EXPECT_EQ(max_abs(*r.dirac_eq_residual + Multivector::basis_vector(0)), 0.0);
  EXPECT_EQ(max_abs(r.dirac->T_mk), 0.0);
  EXPECT_DOUBLE_EQ(*r.lagrangians.L_D, 1.0);
}

TEST(Dirac, RandomSpinorsGiveSymmetricComponents) {
  std::mt19937_64 rng(62);
  const Tetrad T = schwarzschild_tetrad();
  for (int n = 0; n < 20; ++n) {
    const FrameJet frame = frame_jet(T, schwarzschild_point(rng), kMass, 2);
    const DiracEM em = dirac_em(frame, random_spinor(rng, T.symbols()).jet(frame.point, kMass, 2));
    EXPECT_EQ(max_abs_diff(em.T_mk, transposed(em.T_mk)), 0.0);
    for (int k = 0; k < kDim; ++k) EXPECT_EQ(max_abs_outside_grade(em.T[k], 1), 0.0);
  }
}

TEST(Interaction, UnitSpinorInTimelikePotential) {
  const Tetrad T = minkowski_tetrad();
  MatterFields m;
  m.A = CoordinateOneForm(T.symbols(), {"1", "0", "0", "0"});
  m.psi = SpinorField(T.symbols(), {"1", "0", "0", "0", "0", "0", "0", "0"});
  m.charge = 1.0;
  EMReport r = evaluate_report(minkowski_with(m), Point{0, 0, 0, 0});
  ASSERT_TRUE(r.interaction);
  EXPECT_EQ(max_abs(r.interaction->T[0] - Multivector::basis_vector(0)), 0.0);
  for (int a = 1; a < kDim; ++a) EXPECT_EQ(max_abs(r.interaction->T[a]), 0.0);
  EXPECT_EQ(r.interaction->T_ab[0][0], 1.0);
  EXPECT_EQ(r.interaction->current_mismatch, 0.0);
  m.charge = 0.0;
  r = evaluate_report(minkowski_with(m), Point{0, 0, 0, 0});
  EXPECT_EQ(max_abs(r.interaction->T), 0.0);
}

TEST(Interaction, RandomFieldsGiveSymmetricTensor) {
  std::mt19937_64 rng(63);
  const Tetrad T = schwarzschild_tetrad();
  for (int n = 0; n < 20; ++n) {
    const FrameJet frame = frame_jet(T, schwarzschild_point(rng), kMass, 2);
    const FieldJet A = random_potential(rng, T.symbols()).jet(frame, kMass);
    const FieldJet psi = random_spinor(rng, T.symbols()).jet(frame.point, kMass, 2);
    const InteractionEM em = interaction_em(A, psi, 0.8);
    EXPECT_EQ(max_abs_diff(em.T_ab, transposed(em.T_ab)), 0.0);
  }
}

TEST(FieldEquation, FlatSpaceResidualIsTheMatterSource) {
  std::mt19937_64 rng(64);
  const Tetrad T = minkowski_tetrad();
  MatterFields m;
  m.A = random_potential(rng, T.symbols());
  m.psi = random_spinor(rng, T.symbols());
  m.mass = 0.4;
  m.charge = 0.9;
  const Configuration cfg = minkowski_with(m);
  const Point p = random_point(rng);
  const FrameJet frame = frame_jet(T, p, {}, 2);
  const OneFormJets Tm = matter_forms(frame, cfg);
  const OneForms res = field_equation_residual(cfg, p);
  const EMReport r = evaluate_report(cfg, p);
  for (int d = 0; d < kDim; ++d) {
    EXPECT_LT(max_abs(res[d] - values(Tm[d])), 1e-14);
    EXPECT_LT(max_abs(values(Tm[d]) - (r.maxwell->T[d] + r.dirac->T[d] + r.interaction->T[d])), 1e-14);
  }
}

TEST(Lagrangians, SchwarzschildGravitationalDensityIsFinite) {
  const EMReport r = evaluate_report(vacuum_schwarzschild(), Point{0, 10, kPi / 3, 0});
  EXPECT_TRUE(std::isfinite(r.lagrangians.L_g));
  EXPECT_NE(r.lagrangians.L_g, 0.0);
  EXPECT_FALSE(r.lagrangians.L_D);
  EXPECT_FALSE(r.lagrangians.L_FD);
}
