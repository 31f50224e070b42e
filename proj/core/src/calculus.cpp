#include "stagrav/calculus.hpp"

#include <bit>

#include "stagrav/errors.hpp"

namespace stagrav {

namespace {

void require_order(const FieldJet& X, const char* op) {
  if (X.order() < 1) throw JetOrderError(std::string(op) + " applied to a field with no derivative order left");
}

// (-1)^{number of elements of `mask` below mu}
double insertion_sign(unsigned mask, int mu) {
  return std::popcount(mask & ((1u << mu) - 1u)) % 2 == 0 ? 1.0 : -1.0;
}

}  // namespace

MultivectorField::MultivectorField(SymbolsPtr symbols, const std::map<unsigned, std::string>& components) {
  std::array<Expr, kBlades> parsed;
  for (const auto& [mask, text] : components) {
    if (mask >= static_cast<unsigned>(kBlades)) throw Error("blade mask out of range");
    parsed[mask] = Expr::parse(text, symbols);
  }
  *this = MultivectorField(std::move(symbols), std::move(parsed));
}

MultivectorField::MultivectorField(SymbolsPtr, std::array<Expr, kBlades> components)
    : components_(std::move(components)) {
  for (int i = 0; i < kBlades; ++i) {
    present_[i] = components_[i].valid();
    if (present_[i]) evaluators_[i] = JetEvaluator(components_[i], Jet::kMaxOrder);
  }
}

FieldJet MultivectorField::jet(std::span<const double, kDim> point, std::span<const double> params,
                               int order) const {
  FieldJet out;
  for (int i = 0; i < kBlades; ++i)
    out[i] = present_[i] ? evaluators_[i].evaluate(point, params, order) : Jet(0.0, order);
  return out;
}

SpinorField::SpinorField(SymbolsPtr symbols, const std::array<std::string, 8>& components) {
  std::map<unsigned, std::string> by_mask;
  for (std::size_t i = 0; i < kMasks.size(); ++i) by_mask[kMasks[i]] = components[i];
  field_ = MultivectorField(std::move(symbols), by_mask);
}

FieldJet SpinorField::jet(std::span<const double, kDim> point, std::span<const double> params,
                          int order) const {
  return field_.jet(point, params, order);
}

VectorField::VectorField(SymbolsPtr symbols, const std::array<std::string, kDim>& components) {
  for (int k = 0; k < kDim; ++k)
    evaluators_[k] = JetEvaluator(Expr::parse(components[k], symbols), Jet::kMaxOrder);
}

std::array<Jet, kDim> VectorField::jet(std::span<const double, kDim> point,
                                       std::span<const double> params, int order) const {
  std::array<Jet, kDim> out;
  for (int k = 0; k < kDim; ++k) out[k] = evaluators_[k].evaluate(point, params, order);
  return out;
}

FieldJet coordinate_coframe(const FrameJet& frame, int mu) {
  FieldJet out;
  for (int a = 0; a < kDim; ++a) out[blade_mask(a)] = frame.E[a][mu];
  return out;
}

FieldJet pfaff_derivative(const FrameJet& frame, const FieldJet& X, int k) {
  require_order(X, "pfaff derivative");
  FieldJet out;
  for (unsigned m = 0; m < kBlades; ++m) {
    if (X[m].is_zero()) {
      out[m] = Jet(0.0, X[m].order() - 1);
      continue;
    }
    Jet sum(0.0);
    for (int mu = 0; mu < kDim; ++mu) {
      if (frame.E[k][mu].is_zero()) continue;
      sum += frame.E[k][mu] * X[m].derivative(mu);
    }
    out[m] = sum;
  }
  return out;
}

FieldJet covariant_derivative(const FrameJet& frame, const FieldJet& X, int k) {
  FieldJet out = pfaff_derivative(frame, X, k);
  out += 0.25 * frame.L[k].commutator(X);
  return out;
}

FieldJet spinor_covariant_derivative(const FrameJet& frame, const FieldJet& psi, int k) {
  FieldJet out = pfaff_derivative(frame, psi, k);
  out += 0.25 * (frame.L[k] * psi);
  return out;
}

FieldJet exterior_d(const FrameJet& frame, const FieldJet& X) {
  require_order(X, "exterior derivative");
  // Coordinate components omega_M = sum_J X_J det(h[J][M]).
  std::array<Jet, kBlades> omega;
  for (unsigned M = 0; M < kBlades; ++M) {
    Jet sum(0.0);
    for (unsigned J = 0; J < kBlades; ++J) {
      if (std::popcount(J) != std::popcount(M) || X[J].is_zero()) continue;
      sum += X[J] * frame.h_minor[J][M];
    }
    omega[M] = sum;
  }
  // d omega in coordinates: dx^mu ^ dx^M = sign dx^{M + mu}.
  std::array<Jet, kBlades> d_omega;
  for (unsigned M = 0; M < kBlades; ++M) {
    if (omega[M].is_zero()) continue;
    for (int mu = 0; mu < kDim; ++mu) {
      if (M & (1u << mu)) continue;
      const unsigned target = M | (1u << mu);
      d_omega[target] += insertion_sign(M, mu) * omega[M].derivative(mu);
    }
  }
  int order = X.order() - 1;
  // Back to the tetrad basis: coefficient of g^J is sum_M omega_M det(E[J][M]).
  FieldJet out;
  for (unsigned J = 0; J < kBlades; ++J) {
    Jet sum(0.0, order);
    for (unsigned M = 0; M < kBlades; ++M) {
      if (std::popcount(J) != std::popcount(M) || d_omega[M].is_zero()) continue;
      sum += d_omega[M] * frame.E_minor[J][M];
    }
    out[J] = sum;
  }
  return out;
}

FieldJet codifferential(const FrameJet& frame, const FieldJet& X) {
  FieldJet out;
  for (int k = 0; k < kDim; ++k)
    out -= FieldJet::basis_vector(k).left_contract(covariant_derivative(frame, X, k));
  return out;
}

FieldJet dirac_operator(const FrameJet& frame, const FieldJet& X) {
  FieldJet out;
  for (int k = 0; k < kDim; ++k) out += FieldJet::basis_vector(k) * covariant_derivative(frame, X, k);
  return out;
}

FieldJet covariant_dalembertian(const FrameJet& frame, const FieldJet& X) {
  std::array<FieldJet, kDim> DX;
  for (int k = 0; k < kDim; ++k) DX[k] = covariant_derivative(frame, X, k);
  FieldJet out;
  for (int k = 0; k < kDim; ++k) {
    FieldJet term = covariant_derivative(frame, DX[k], k);
    for (int m = 0; m < kDim; ++m) {
      FieldJet scaled = DX[m];
      scaled.scale(frame.Lambda[m][k][k]);
      term -= scaled;
    }
    out += Signature::eta[static_cast<std::size_t>(k)] * term;
  }
  return out;
}

FieldJet lie_generator(const FrameJet& frame, const std::array<Jet, kDim>& xi) {
  FieldJet S;
  FieldJet xi_flat;
  for (int k = 0; k < kDim; ++k) {
    FieldJet Lk = frame.L[k];
    Lk.scale(xi[k]);
    S += Lk;
    xi_flat[blade_mask(k)] = Signature::eta[static_cast<std::size_t>(k)] * xi[k];
  }
  S += exterior_d(frame, xi_flat);
  return S;
}

namespace {

FieldJet pfaff_along(const FrameJet& frame, const FieldJet& X, const std::array<Jet, kDim>& xi) {
  FieldJet out;
  for (int k = 0; k < kDim; ++k) {
    if (xi[k].is_zero()) continue;
    FieldJet term = pfaff_derivative(frame, X, k);
    term.scale(xi[k]);
    out += term;
  }
  return out;
}

}  // namespace

FieldJet lie_derivative(const FrameJet& frame, const FieldJet& X, const std::array<Jet, kDim>& xi) {
  require_order(X, "Lie derivative");
  FieldJet out = pfaff_along(frame, X, xi);
  out += 0.25 * lie_generator(frame, xi).commutator(X);
  return out;
}

FieldJet spinor_lie_derivative(const FrameJet& frame, const FieldJet& psi,
                               const std::array<Jet, kDim>& xi) {
  require_order(psi, "spinor Lie derivative");
  FieldJet out = pfaff_along(frame, psi, xi);
  out += 0.25 * (lie_generator(frame, xi) * psi);
  return out;
}

}  // namespace stagrav
