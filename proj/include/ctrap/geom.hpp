#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <utility>

#include "ctrap/poly.hpp"
#include "ctrap/vec3.hpp"

namespace ctrap {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 centered at the origin.
struct StandardEllipsoid {
  double a = 1.0, b = 1.0, c = 1.0;

  double max_axis() const;
  double min_axis() const;
  bool is_sphere() const { return a == b && b == c; }
  /// lambda with x on the lambda-scaled ellipsoid; < 1 inside, > 1 outside.
  double level(const Vec3& x) const;
};

/// Rigid placement E = R E~ + s with R = B(phi) C(theta) D(psi).
struct Pose {
  double phi = 0.0, theta = 0.0, psi = 0.0;
  Vec3 s{};

  Mat3 rotation() const;
  bool is_identity() const { return phi == 0.0 && theta == 0.0 && psi == 0.0 && s.x == 0.0 && s.y == 0.0 && s.z == 0.0; }
};

/// World point to the standard frame: R^T (x - s).
Vec3 standardize(const Pose& pose, const Vec3& x);
/// Standard-frame point to world: R x + s.
Vec3 unstandardize(const Pose& pose, const Vec3& x);
/// Standard-frame vector to world: R v.
Vec3 rotate_back(const Pose& pose, const Vec3& v);
/// World vector to the standard frame: R^T v.
Vec3 rotate_in(const Pose& pose, const Vec3& v);

/// Grid1 has poles on the z axis, Grid2 on the x axis.
enum class Chart { Grid1, Grid2 };

std::string to_string(Chart c);

/// Latitude-longitude lattice alpha_j = -pi + 2 pi j / n, beta_k = -pi/2 + pi k / m.
struct ChartGrid {
  Chart chart = Chart::Grid1;
  int n = 4;
  int m = 2;

  ChartGrid() = default;
  ChartGrid(Chart c, int n_, int m_);

  double dalpha() const;
  double dbeta() const;
  double alpha(int j) const;
  double beta(int k) const;
  double h() const { return dalpha() > dbeta() ? dalpha() : dbeta(); }
  /// Nodes per chart, pole rows included: n * (m + 1).
  int node_count() const { return n * (m + 1); }
  int node_index(int j, int k) const { return k * n + j; }
};

Vec3 param_point(const StandardEllipsoid& ell, Chart chart, double alpha, double beta);

/// Partial derivatives d^i/dalpha^i d^j/dbeta^j x(alpha, beta) for i + j <= order.
class SurfaceJet {
 public:
  static constexpr int kMaxOrder = 8;

  SurfaceJet() = default;
  SurfaceJet(int order) : order_(order) {}

  int order() const { return order_; }
  const Vec3& d(int i, int j) const { return p_[BivariatePoly::index(i, j)]; }
  Vec3& d(int i, int j) { return p_[BivariatePoly::index(i, j)]; }

  Vec3 point() const { return d(0, 0); }
  Vec3 xa() const { return d(1, 0); }
  Vec3 xb() const { return d(0, 1); }

 private:
  int order_ = 0;
  std::array<Vec3, (kMaxOrder + 1) * (kMaxOrder + 2) / 2> p_{};
};

/// Analytic jet of the chart parametrization up to total order `order` (<= 8).
SurfaceJet param_jet(const StandardEllipsoid& ell, Chart chart, double alpha, double beta, int order = 4);

/// Taylor series of x(alpha_b + s, beta_b + t) in (s, t) up to total degree `degree`.
std::array<BivariatePoly, 3> position_series(const StandardEllipsoid& ell, Chart chart, double alpha, double beta,
                                             int degree);

/// Taylor series of nJ = x_alpha x x_beta = abc cos(beta) <x/a^2, y/b^2, z/c^2>.
std::array<BivariatePoly, 3> normal_series(const StandardEllipsoid& ell, Chart chart, double alpha, double beta,
                                           int degree);

struct SurfaceElement {
  Vec3 nJ;
  double J = 0.0;
};

SurfaceElement surface_element(const StandardEllipsoid& ell, Chart chart, double alpha, double beta);

/// Chart whose poles are farther from the standard-frame target; ties go to Grid1.
Chart select_chart(const StandardEllipsoid& ell, const Vec3& x_std);

/// Chart coordinates of the radial surface point x / lambda.
std::pair<double, double> chart_coords(const StandardEllipsoid& ell, Chart chart, const Vec3& x_std);

/// |lambda - 1| * max(a, b, c).
double distance_upper_bound(const StandardEllipsoid& ell, const Vec3& x_std);

struct ProjectionResult {
  double alpha = 0.0, beta = 0.0;
  /// Signed: x_o - x_b = d n with n the outward normal.
  double d = 0.0;
  Vec3 xb;
  Vec3 normal;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct ProjectionOptions {
  double tol = 1e-12;
  int max_iter = 50;
};

/// Chart node (alpha_j, beta_k) closest to x_o in space.
std::pair<int, int> nearest_node(const StandardEllipsoid& ell, const ChartGrid& grid, const Vec3& x_std);

/// Orthogonal projection of x_o onto the surface by damped Newton iteration on the
/// tangency conditions (x - x_o).x_alpha = (x - x_o).x_beta = 0.
ProjectionResult project(const StandardEllipsoid& ell, Chart chart, const Vec3& x_std, double alpha0, double beta0,
                         const ProjectionOptions& opt = {});

/// Coefficients of rho_o^2 = d^2 + ca2 s^2 + 2 cab s t + cb2 t^2.
struct QuadraticCoeffs {
  double d = 0.0;
  double ca2 = 0.0, cab = 0.0, cb2 = 0.0;

  bool positive_definite() const { return ca2 > 0.0 && cb2 > 0.0 && cab * cab < ca2 * cb2; }
};

QuadraticCoeffs quadratic_coeffs(const SurfaceJet& jet, const Vec3& x_o);

struct CurvatureData {
  double E = 0, F = 0, G = 0, L = 0, M = 0, N = 0;
  double H = 0, K = 0;
  double kappa1 = 0, kappa2 = 0;
  double r_osc = 0;
};

CurvatureData curvature_data(const SurfaceJet& jet);

/// 1 - 2 d H + d^2 K > 0 with d signed (negative inside).
bool is_positive_definite(double d_signed, double H, double K);

}  // namespace ctrap
