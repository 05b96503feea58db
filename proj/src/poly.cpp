#include <cmath>
#include <stdexcept>

#include "ctrap/poly.hpp"

namespace ctrap {

BivariatePoly BivariatePoly::sqrt(const BivariatePoly& s, int cap) {
  if (cap > kMaxDegree) cap = kMaxDegree;
  const double s00 = s(0, 0);
  if (!(s00 > 0.0)) throw std::domain_error("BivariatePoly::sqrt: constant term must be positive");
  BivariatePoly g;
  g.lo_ = 0;
  g.hi_ = cap;
  const double g00 = std::sqrt(s00);
  g.c_[0] = g00;
  // match g*g = s degree by degree
  for (int t = 1; t <= cap; ++t) {
    for (int k = 0; k <= t; ++k) {
      const int j = t - k;
      double acc = s(j, k);
      for (int j1 = 0; j1 <= j; ++j1)
        for (int k1 = 0; k1 <= k; ++k1) {
          if ((j1 == 0 && k1 == 0) || (j1 == j && k1 == k)) continue;
          acc -= g.c_[index(j1, k1)] * g.c_[index(j - j1, k - k1)];
        }
      g.c_[index(j, k)] = acc / (2.0 * g00);
    }
  }
  return g;
}

}  // namespace ctrap
