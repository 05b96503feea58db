#pragma once

#include <array>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ctrap/geom.hpp"

namespace ctrap {

class ReductionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Window integral int int s^p t^q / rho_o^{2k+1} mapped to the unit form
/// int int u^p v^q / (1 + u^2 + 2Cuv + v^2)^{k+1/2} over [a,b] x [c,d].
struct ReducedWindow {
  double C = 0.0;
  double a = -1, b = 1, c = -1, d = 1;
  double dist = 1.0;  // |d| of the target
  double ca = 1.0;    // sqrt(ca2)
  double cb = 1.0;    // sqrt(cb2)

  /// d^{p+q+1-2k} / (ca^{p+1} cb^{q+1}): reduced integral to window integral.
  double scale(int p, int q, int k) const;
};

/// Substitution u = ca s / d, v = cb t / d over the local window [s_lo,s_hi] x [t_lo,t_hi].
ReducedWindow reduce_window(const QuadraticCoeffs& q, double s_lo, double s_hi, double t_lo, double t_hi);

inline constexpr int kMaxPower = 12;  // p, q <= 12
inline constexpr int kMaxK = 5;       // k <= 5

// The upward recursions cancel for high powers on small windows; extended precision keeps
// about nine significant digits there.
using RecReal = long double;
using AntiderivRow = std::array<std::array<RecReal, kMaxK + 1>, kMaxPower + 1>;

/// Indefinite antiderivatives F_pk(u; v) = int u^p / rho_u^{2k+1} du at one point.
AntiderivRow antideriv_F(double u, double v, double C);

/// Corner ordering used throughout: 0:(a,c) 1:(b,c) 2:(a,d) 3:(b,d).
struct OneDimTables {
  std::array<AntiderivRow, 4> F;  // F_pk(u; v) at the four corners
  std::array<AntiderivRow, 4> G;  // G_qk(v; u) at the four corners
  std::array<double, 4> u{}, v{};
};

OneDimTables onedim_tables(const ReducedWindow& red);

/// Definite F_pk over u in [a, b] at fixed v.
double definite_F(int p, int k, double a, double b, double v, double C);

/// Closed form int_{R^2} rho_u^{-11} du dv = 2 pi / (9 sqrt(1 - C^2)).
RecReal whole_plane_I005(double C);

/// I_005 over the rectangle: whole-plane value minus the exterior, with the exterior
/// integrated by Gauss-Legendre panels in v of the closed-form u-integrals.
RecReal init_I005(const ReducedWindow& red);

struct AntiderivTables {
  // I[p][q][k]
  std::array<std::array<std::array<double, kMaxK + 1>, kMaxPower + 1>, kMaxPower + 1> I{};
  double operator()(int p, int q, int k) const { return I[p][q][k]; }
};

/// Steps 1-3: I_00k backwards from I_005, the 2k = p+q+1 diagonal, then the rest.
/// Entries with p + q > max_total are left at zero.
AntiderivTables fill_I_table(const ReducedWindow& red, const OneDimTables& tabs, RecReal I005,
                             int max_total = 2 * kMaxPower);

/// Convenience: all three stages for one window.
AntiderivTables window_tables(const ReducedWindow& red, int max_total = 2 * kMaxPower);

/// Step 1 run forward from a given I_000 (k = 0 -> 5). Only used to show that the
/// forward direction loses digits.
std::array<double, kMaxK + 1> forward_I00k(const ReducedWindow& red, const OneDimTables& tabs, double I000);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x, w;
  std::vector<RecReal> xl, wl;  // the same rule in extended precision
};
const GaussRule& gauss_legendre(int n);

}  // namespace ctrap
