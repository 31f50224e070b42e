#pragma once

#include <memory>
#include <random>
#include <string>

#include "stagrav/energy_momentum.hpp"

namespace stagrav::testing {

/// Identity tetrad plus quadratic polynomial perturbations of size `scale`
/// on the chart (t, x, y, z).
inline Tetrad synthetic_tetrad(unsigned seed, double scale = 0.05) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto symbols = std::make_shared<Symbols>();
  symbols->coordinates = {"t", "x", "y", "z"};
  const char* names[kDim] = {"t", "x", "y", "z"};
  const std::string s = std::to_string(scale);
  std::array<std::array<std::string, kDim>, kDim> entries;
  for (int a = 0; a < kDim; ++a)
    for (int mu = 0; mu < kDim; ++mu) {
      std::string e = a == mu ? "1" : "0";
      for (int i = 0; i < kDim; ++i) e += "+" + s + "*(" + std::to_string(u(rng)) + ")*" + names[i];
      for (int i = 0; i < kDim; ++i)
        for (int j = i; j < kDim; ++j)
          e += "+" + s + "*(" + std::to_string(u(rng)) + ")*" + names[i] + "*" + names[j];
      entries[a][mu] = e;
    }
  return Tetrad(symbols, entries);
}

inline Point random_point(std::mt19937_64& rng, double half_width = 0.5) {
  std::uniform_real_distribution<double> u(-half_width, half_width);
  return {u(rng), u(rng), u(rng), u(rng)};
}

/// Random exterior Schwarzschild point (M = 1): r in [3, 50], theta away from the axis.
inline Point schwarzschild_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> r(3.0, 50.0), th(0.1, 3.0415926535897931), ang(0.0, 6.283185307179586);
  return {ang(rng), r(rng), th(rng), ang(rng)};
}

inline double max_abs_diff(const Matrix4<double>& a, const Matrix4<double>& b) {
  double out = 0.0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) out = std::max(out, std::abs(a[i][j] - b[i][j]));
  return out;
}

inline double max_abs(const Matrix4<double>& m) {
  double out = 0.0;
  for (const auto& row : m)
    for (double v : row) out = std::max(out, std::abs(v));
  return out;
}

inline Matrix4<double> transposed(const Matrix4<double>& m) {
  Matrix4<double> t{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) t[i][j] = m[j][i];
  return t;
}

}  // namespace stagrav::testing
