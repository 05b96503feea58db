#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "ctrap/geom.hpp"
#include "ctrap/nearcore.hpp"
#include "ctrap/poly.hpp"
#include "ctrap/trapz.hpp"

namespace ctrap {

struct BasisIndex {
  int p = 0, q = 0, k = 0;
  auto operator<=>(const BasisIndex&) const = default;
};

/// Coefficient of (eta / rho_o^2)^n in the expansion of rho^{-r}.
double binomial_factor(int r, int n);

/// Indices for one kernel term with numerator of order m, all n in 0..r+1-m.
std::vector<BasisIndex> basis_set(int r, int m);
/// Indices of the n-th binomial term only.
std::vector<BasisIndex> basis_set(int r, int m, int n);

/// Union over the three Stokes kernel terms, sorted; 179 entries.
const std::vector<BasisIndex>& basis_inventory();
/// Position of (p,q,k) in basis_inventory(), or -1.
int basis_slot(int p, int q, int k);

/// eta = |x - x_o|^2 - (d^2 + ca2 s^2 + 2 cab s t + cb2 t^2), degrees 3..6.
BivariatePoly eta_series(const std::array<BivariatePoly, 3>& xhat);
BivariatePoly eta_series(const StandardEllipsoid& ell, Chart chart, double alpha_b, double beta_b, const Vec3& x_o);

/// Half width n_w of the correction window for a chart with n longitudes.
int window_half_width(int n);

/// Correction window in lattice indices and local offsets from the base point.
struct Window {
  int j0 = 0, k0 = 0;     // nearest node
  int jlo = 0, nja = 0;   // unwrapped first alpha index and node count (jlo + i, i < nja)
  int klo = 0, khi = 0;   // beta rows, inside [0, m]
  double s_lo = 0, s_hi = 0, t_lo = 0, t_hi = 0;
  double ds = 0, dt = 0;

  int nkb() const { return khi - klo + 1; }
  int wrap_j(int i, int n) const { return ((jlo + i) % n + n) % n; }
};

Window make_window(const ChartGrid& grid, double alpha_b, double beta_b, int n_w);

/// Bicubic interpolation weights expressed as Taylor coefficients about (alpha_b, beta_b).
///
/// `weight[slot][node]` gives the coefficient of s^a t^b (slot = BivariatePoly::index(a,b),
/// a + b <= 3) contributed by lattice value `node[i]`. Rows beyond a pole are mapped to
/// the row mirrored through it with alpha shifted by pi.
struct DensityStencil {
  std::array<int, 16> node{};
  std::array<std::array<double, 16>, 10> weight{};
};

DensityStencil density_stencil(const ChartGrid& grid, double alpha_b, double beta_b);

/// Series of a vector density about the base point, total degree <= 3.
std::array<BivariatePoly, 3> density_jet(const DensityStencil& st, std::span<const Vec3> values);
std::array<BivariatePoly, 3> density_jet(const ChartGrid& grid, std::span<const Vec3> values, double alpha_b,
                                         double beta_b);
/// Value of the bicubic interpolant at an arbitrary chart point.
Vec3 interpolate_density(const ChartGrid& grid, std::span<const Vec3> values, double alpha, double beta);

enum class Kernel { SLP, DLP };

/// Density-independent part of a correction: base point, series of x - x_o, nJ, J and
/// powers of eta.
struct GeometryPlan {
  Chart chart = Chart::Grid1;
  double alpha_b = 0, beta_b = 0;
  QuadraticCoeffs quad;
  std::array<BivariatePoly, 3> xhat;
  std::array<BivariatePoly, 3> nJ;
  BivariatePoly J;
  std::array<BivariatePoly, 4> eta_pow;  // eta^0 .. eta^3
};

GeometryPlan geometry_plan(const StandardEllipsoid& ell, Chart chart, double alpha_b, double beta_b, const Vec3& x_o,
                           const QuadraticCoeffs& quad);

/// Coefficients c_pqk per velocity component, laid out by basis_slot.
struct CorrectionPlan {
  std::array<std::array<double, 179>, 3> c{};
};

/// Add the contribution of one kernel term numerator[i] / rho^r, scaled by `scale`.
void add_kernel_term(CorrectionPlan& plan, const GeometryPlan& geo, int r, int m,
                     const std::array<BivariatePoly, 3>& numerator, double scale);

/// Full plan for the SLP (1/8pi)(f J/rho + (f.x^)x^ J/rho^3) or the DLP -(3/4pi)(f.x^)x^(x^.nJ)/rho^5.
CorrectionPlan assemble_plan(Kernel kernel, const GeometryPlan& geo, const std::array<BivariatePoly, 3>& fjet);

/// e_pqk = int_W H_pqk - T6_W[H_pqk] for every inventory index. With a puncture the node
/// (j0, k0) is dropped from the trapezoidal sum.
std::array<double, 179> basis_errors(const ReducedWindow& red, const AntiderivTables& tables,
                                     const QuadraticCoeffs& quad, const Window& win, bool puncture);
std::array<double, 179> basis_errors(const QuadraticCoeffs& quad, const Window& win, bool puncture);

/// Sum c_pqk e_pqk per component.
Vec3 correction_E6(const CorrectionPlan& plan, const std::array<double, 179>& errors);

/// Trapezoidal rule of order 2, 4 or 6 applied to every basis function on the window lattice,
/// with analytic boundary derivatives.
std::array<double, 179> basis_trapezoid(const QuadraticCoeffs& quad, const Window& win, int order, bool puncture);

/// Exact window integrals int_W H_pqk for every inventory index.
std::array<double, 179> basis_integrals(const ReducedWindow& red, const AntiderivTables& tables);

}  // namespace ctrap
