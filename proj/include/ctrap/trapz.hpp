#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ctrap/geom.hpp"

namespace ctrap {

struct Puncture {
  int j = 0;
  int k = 0;
};

/// Boundary derivatives for the Euler-Maclaurin end corrections on a rectangle.
///
/// `fa_lo[k]`/`fa_hi[k]` hold df/dalpha at alpha = a / alpha = b for each beta_k;
/// `fb_lo[j]`/`fb_hi[j]` hold df/dbeta at beta = c / beta = d for each alpha_j.
/// The third-derivative arrays mirror those. The corner arrays hold mixed partials at
/// (a,c), (b,c), (a,d), (b,d); the order-6 rule uses all four so it stays exact for
/// polynomials of degree 5 in each variable.
struct EdgeDerivatives {
  std::vector<double> fa_lo, fa_hi, fb_lo, fb_hi;
  std::vector<double> faaa_lo, faaa_hi, fbbb_lo, fbbb_hi;
  std::array<double, 4> fab{};
  std::array<double, 4> fabbb{};
  std::array<double, 4> faaab{};
  std::array<double, 4> faaabbb{};
  bool has_third = false;
};

/// Samples f(alpha_j, beta_k) on an (n+1) x (m+1) lattice over [a,b] x [c,d].
struct RectGridFn {
  double a = 0, b = 1, c = 0, d = 1;
  int n = 1, m = 1;
  std::vector<double> values;  // index k * (n + 1) + j
  std::optional<EdgeDerivatives> edges;

  double dalpha() const { return (b - a) / n; }
  double dbeta() const { return (d - c) / m; }
  double at(int j, int k) const { return values[static_cast<std::size_t>(k) * (n + 1) + j]; }
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Trapezoid weight (1, 1/2 or 1/4) of lattice node (j, k) on an n x m rectangle.
inline double trap_weight(int j, int k, int n, int m) {
  double w = 1.0;
  if (j == 0 || j == n) w *= 0.5;
  if (k == 0 || k == m) w *= 0.5;
  return w;
}

/// Pairwise (cascade) summation; deterministic for a fixed input order.
double pairwise_sum(std::span<const double> v);

/// Euler-Maclaurin trapezoidal rule of order 2, 4 or 6 on a rectangle.
double trap_rect(const RectGridFn& f, int order, std::optional<Puncture> puncture = std::nullopt);

/// Order-4 trapezoidal rule over the full chart domain [-pi,pi] x [-pi/2,pi/2].
///
/// `values[grid.node_index(j,k)]` are samples of an integrand that already carries the
/// cos(beta) Jacobian factor. Alpha end terms cancel by periodicity. The beta end terms
/// use centered 4th-order differences across the poles with the continuation
/// G(alpha, pi/2 + t) = -G(alpha + pi, pi/2 - t), which is how cos(beta) continues.
template <class T>
T trap_closed_surface(const ChartGrid& grid, std::span<const T> values, std::optional<Puncture> puncture = std::nullopt) {
  const int n = grid.n, m = grid.m;
  if (m < 4) throw QuadratureError("closed-surface T4 needs m >= 4");
  auto row_sum = [&](int k) {
    T s{};
    for (int j = 0; j < n; ++j) s += values[grid.node_index(j, k)];
    return s;
  };
  T interior{};
  for (int k = 1; k < m; ++k) interior += row_sum(k);
  interior += 0.5 * (row_sum(0) + row_sum(m));
  if (puncture) {
    const double w = (puncture->k == 0 || puncture->k == m) ? 0.5 : 1.0;
    interior -= w * values[grid.node_index(puncture->j, puncture->k)];
  }
  const T edge = (1.0 / 144.0) * (16.0 * (row_sum(1) + row_sum(m - 1)) - 2.0 * (row_sum(2) + row_sum(m - 2)));
  return (grid.dalpha() * grid.dbeta()) * (interior + edge);
}

}  // namespace ctrap
