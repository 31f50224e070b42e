#include "stagrav/algebra.hpp"

#include <algorithm>

namespace stagrav {

double max_abs(const Multivector& m) {
  double out = 0.0;
  for (double x : m.coefficients()) out = std::max(out, std::abs(x));
  return out;
}

double max_abs_outside_grade(const Multivector& m, int r) {
  double out = 0.0;
  for (unsigned i = 0; i < kBlades; ++i)
    if (blade_grade(i) != r) out = std::max(out, std::abs(m[i]));
  return out;
}

const char* blade_name(unsigned mask) {
  static constexpr std::array<const char*, kBlades> names{
      "1",        "g0",       "g1",       "g0^g1",    "g2",       "g0^g2",
      "g1^g2",    "g0^g1^g2", "g3",       "g0^g3",    "g1^g3",    "g0^g1^g3",
      "g2^g3",    "g0^g2^g3", "g1^g2^g3", "tau"};
  return names[mask & 0xFu];
}

std::ostream& operator<<(std::ostream& os, const Multivector& m) {
  bool first = true;
  for (unsigned i = 0; i < kBlades; ++i) {
    if (m[i] == 0.0) continue;
    if (!first) os << " + ";
    os << m[i] << "*" << blade_name(i);
    first = false;
  }
  if (first) os << "0";
  return os;
}

}  // namespace stagrav
