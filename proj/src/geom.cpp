#include "ctrap/geom.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>

namespace ctrap {

namespace {

constexpr double kPi = std::numbers::pi;

// Derivatives of cos/sin: d^i cos(t) = cos(t + i pi/2), exact in the cycle.
double dcos(double c, double s, int i) {
  switch (i & 3) {
    case 0: return c;
    case 1: return -s;
    case 2: return -c;
    default: return s;
  }
}
double dsin(double c, double s, int i) {
  switch (i & 3) {
    case 0: return s;
    case 1: return c;
    case 2: return -s;
    default: return -c;
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

std::array<double, SurfaceJet::kMaxOrder + 5> taylor(double c, double s, bool cosine, int degree) {
  std::array<double, SurfaceJet::kMaxOrder + 5> t{};
  for (int i = 0; i <= degree; ++i) t[i] = (cosine ? dcos(c, s, i) : dsin(c, s, i)) / factorial(i);
  return t;
}

}  // namespace

double StandardEllipsoid::max_axis() const { return std::max({a, b, c}); }
double StandardEllipsoid::min_axis() const { return std::min({a, b, c}); }

double StandardEllipsoid::level(const Vec3& x) const {
  return std::sqrt(x.x * x.x / (a * a) + x.y * x.y / (b * b) + x.z * x.z / (c * c));
}

Mat3 Pose::rotation() const {
  auto rz = [](double t) {
    Mat3 r = Mat3::identity();
    r(0, 0) = std::cos(t);
    r(0, 1) = -std::sin(t);
    r(1, 0) = std::sin(t);
    r(1, 1) = std::cos(t);
    return r;
  };
  Mat3 cx = Mat3::identity();
  cx(1, 1) = std::cos(theta);
  cx(1, 2) = -std::sin(theta);
  cx(2, 1) = std::sin(theta);
  cx(2, 2) = std::cos(theta);
  return rz(phi) * cx * rz(psi);
}

Vec3 standardize(const Pose& pose, const Vec3& x) { return pose.rotation().transposed() * (x - pose.s); }
Vec3 unstandardize(const Pose& pose, const Vec3& x) { return pose.rotation() * x + pose.s; }
Vec3 rotate_back(const Pose& pose, const Vec3& v) { return pose.rotation() * v; }
Vec3 rotate_in(const Pose& pose, const Vec3& v) { return pose.rotation().transposed() * v; }

std::string to_string(Chart c) { return c == Chart::Grid1 ? "grid1" : "grid2"; }

ChartGrid::ChartGrid(Chart c, int n_, int m_) : chart(c), n(n_), m(m_) {
  if (n < 4 || m < 2) throw GeometryError("chart grid needs n >= 4 and m >= 2");
  if (n % 2 != 0) throw GeometryError("chart grid needs an even n (pole reflection pairs alpha with alpha + pi)");
}

double ChartGrid::dalpha() const { return 2.0 * kPi / n; }
double ChartGrid::dbeta() const { return kPi / m; }
double ChartGrid::alpha(int j) const { return -kPi + 2.0 * kPi * j / n; }
double ChartGrid::beta(int k) const { return -0.5 * kPi + kPi * k / m; }

Vec3 param_point(const StandardEllipsoid& ell, Chart chart, double alpha, double beta) {
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double cb = std::cos(beta), sb = std::sin(beta);
  if (chart == Chart::Grid1) return {ell.a * ca * cb, ell.b * sa * cb, ell.c * sb};
  return {ell.a * sb, ell.b * ca * cb, ell.c * sa * cb};
}

SurfaceJet param_jet(const StandardEllipsoid& ell, Chart chart, double alpha, double beta, int order) {
  if (order < 0 || order > SurfaceJet::kMaxOrder) throw GeometryError("jet order out of range");
  SurfaceJet jet(order);
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double cb = std::cos(beta), sb = std::sin(beta);
  for (int t = 0; t <= order; ++t)
    for (int j = 0; j <= t; ++j) {
      const int i = t - j;
      const double cai = dcos(ca, sa, i), sai = dsin(ca, sa, i);
      const double cbj = dcos(cb, sb, j), sbj = dsin(cb, sb, j);
      const double pole = (i == 0) ? sbj : 0.0;
      if (chart == Chart::Grid1)
        jet.d(i, j) = {ell.a * cai * cbj, ell.b * sai * cbj, ell.c * pole};
      else
        jet.d(i, j) = {ell.a * pole, ell.b * cai * cbj, ell.c * sai * cbj};
    }
  return jet;
}

std::array<BivariatePoly, 3> position_series(const StandardEllipsoid& ell, Chart chart, double alpha, double beta,
                                             int degree) {
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double cb = std::cos(beta), sb = std::sin(beta);
  const auto tca = taylor(ca, sa, true, degree), tsa = taylor(ca, sa, false, degree);
  const auto tcb = taylor(cb, sb, true, degree), tsb = taylor(cb, sb, false, degree);
  const std::span<const double> sca(tca.data(), degree + 1), ssa(tsa.data(), degree + 1);
  const std::span<const double> scb(tcb.data(), degree + 1), ssb(tsb.data(), degree + 1);
  const auto CA = BivariatePoly::in_a(sca), SA = BivariatePoly::in_a(ssa);
  const auto CB = BivariatePoly::in_b(scb), SB = BivariatePoly::in_b(ssb);
  if (chart == Chart::Grid1)
    return {ell.a * BivariatePoly::multiply(CA, CB, degree), ell.b * BivariatePoly::multiply(SA, CB, degree),
            ell.c * SB};
  return {ell.a * SB, ell.b * BivariatePoly::multiply(CA, CB, degree),
          ell.c * BivariatePoly::multiply(SA, CB, degree)};
}

std::array<BivariatePoly, 3> normal_series(const StandardEllipsoid& ell, Chart chart, double alpha, double beta,
                                           int degree) {
  const auto x = position_series(ell, chart, alpha, beta, degree);
  const double cb = std::cos(beta), sb = std::sin(beta);
  const auto tcb = taylor(cb, sb, true, degree);
  const auto CB = BivariatePoly::in_b(std::span<const double>(tcb.data(), degree + 1));
  const double abc = ell.a * ell.b * ell.c;
  const double inv[3] = {1.0 / (ell.a * ell.a), 1.0 / (ell.b * ell.b), 1.0 / (ell.c * ell.c)};
  std::array<BivariatePoly, 3> nj;
  for (int i = 0; i < 3; ++i) nj[i] = (abc * inv[i]) * BivariatePoly::multiply(CB, x[i], degree);
  return nj;
}

SurfaceElement surface_element(const StandardEllipsoid& ell, Chart chart, double alpha, double beta) {
  const Vec3 x = param_point(ell, chart, alpha, beta);
  const double w = ell.a * ell.b * ell.c * std::cos(beta);
  const Vec3 nj{w * x.x / (ell.a * ell.a), w * x.y / (ell.b * ell.b), w * x.z / (ell.c * ell.c)};
  return {nj, norm(nj)};
}

Chart select_chart(const StandardEllipsoid& ell, const Vec3& x) {
  const double d1 = std::min(norm(x - Vec3{0, 0, ell.c}), norm(x - Vec3{0, 0, -ell.c}));
  const double d2 = std::min(norm(x - Vec3{ell.a, 0, 0}), norm(x - Vec3{-ell.a, 0, 0}));
  return d1 >= d2 ? Chart::Grid1 : Chart::Grid2;
}

double distance_upper_bound(const StandardEllipsoid& ell, const Vec3& x) {
  return std::fabs(ell.level(x) - 1.0) * ell.max_axis();
}

namespace {

// Chart coordinates of the surface point x / lambda.
std::pair<double, double> inverse_param(const StandardEllipsoid& ell, Chart chart, const Vec3& x) {
  const double lam = ell.level(x);
  const Vec3 u = lam > 0.0 ? Vec3{x.x / (ell.a * lam), x.y / (ell.b * lam), x.z / (ell.c * lam)} : Vec3{1, 0, 0};
  if (chart == Chart::Grid1) return {std::atan2(u.y, u.x), std::asin(std::clamp(u.z, -1.0, 1.0))};
  return {std::atan2(u.z, u.y), std::asin(std::clamp(u.x, -1.0, 1.0))};
}

double wrap_alpha(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a < -kPi) a += 2.0 * kPi;
  return a;
}

}  // namespace

std::pair<double, double> chart_coords(const StandardEllipsoid& ell, Chart chart, const Vec3& x) {
  return inverse_param(ell, chart, x);
}

std::pair<int, int> nearest_node(const StandardEllipsoid& ell, const ChartGrid& grid, const Vec3& x) {
  const auto [a0, b0] = inverse_param(ell, grid.chart, x);
  const int jc = static_cast<int>(std::lround((a0 + kPi) / grid.dalpha()));
  const int kc = static_cast<int>(std::lround((b0 + 0.5 * kPi) / grid.dbeta()));
  constexpr int kReach = 3;
  double best = std::numeric_limits<double>::infinity();
  std::pair<int, int> arg{0, 0};
  for (int k = std::max(0, kc - kReach); k <= std::min(grid.m, kc + kReach); ++k)
    for (int dj = -kReach; dj <= kReach; ++dj) {
      const int j = ((jc + dj) % grid.n + grid.n) % grid.n;
      const double dist = norm(param_point(ell, grid.chart, grid.alpha(j), grid.beta(k)) - x);
      if (dist < best) {
        best = dist;
        arg = {j, k};
      }
    }
  return arg;
}

ProjectionResult project(const StandardEllipsoid& ell, Chart chart, const Vec3& xo, double alpha0, double beta0,
                         const ProjectionOptions& opt) {
  ProjectionResult res;
  double al = alpha0;
  double be = std::clamp(beta0, -0.5 * kPi + 1e-8, 0.5 * kPi - 1e-8);
  const double scale = std::max(1.0, ell.max_axis());

  auto residual_of = [&](const SurfaceJet& jet) {
    const Vec3 r = jet.point() - xo;
    const double na = norm(jet.xa()), nb = norm(jet.xb());
    const double ga = dot(r, jet.xa()), gb = dot(r, jet.xb());
    return std::max(std::fabs(ga) / std::max(na, 1e-300), std::fabs(gb) / std::max(nb, 1e-300));
  };

  SurfaceJet jet = param_jet(ell, chart, al, be, 2);
  double f = 0.5 * dot(jet.point() - xo, jet.point() - xo);
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    res.residual = residual_of(jet);
    if (res.residual < opt.tol * scale) {
      res.converged = true;
      break;
    }
    const Vec3 r = jet.point() - xo;
    const double ga = dot(r, jet.xa()), gb = dot(r, jet.xb());
    const double A = dot(jet.xa(), jet.xa()) + dot(r, jet.d(2, 0));
    const double C = dot(jet.xa(), jet.xb()) + dot(r, jet.d(1, 1));
    const double B = dot(jet.xb(), jet.xb()) + dot(r, jet.d(0, 2));
    const double det = A * B - C * C;
    double da, db;
    bool newton = false;
    if (A > 0.0 && B > 0.0 && det > 1e-14 * A * B) {
      newton = true;
      da = -(B * ga - C * gb) / det;
      db = -(-C * ga + A * gb) / det;
    } else {
      // Fall back to a scaled gradient step when the Hessian is indefinite.
      const double E = dot(jet.xa(), jet.xa()), G = dot(jet.xb(), jet.xb());
      da = -ga / std::max(E, 1e-300);
      db = -gb / std::max(G, 1e-300);
    }
    const double step_cap = 0.5;
    const double len = std::sqrt(da * da + db * db);
    if (len > step_cap) {
      da *= step_cap / len;
      db *= step_cap / len;
    }
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      const double an = wrap_alpha(al + t * da);
      const double bn = std::clamp(be + t * db, -0.5 * kPi + 1e-10, 0.5 * kPi - 1e-10);
      const Vec3 p = param_point(ell, chart, an, bn);
      const double fn = 0.5 * dot(p - xo, p - xo);
      // near the root f only changes at roundoff level, so short Newton steps are taken as is
      if (fn <= f || (newton && len < 1e-2) || ls == 39) {
        al = an;
        be = bn;
        f = fn;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    jet = param_jet(ell, chart, al, be, 2);
  }
  if (!res.converged) {
    res.residual = residual_of(jet);
    res.converged = res.residual < opt.tol * scale;
  }
  res.iterations = it;
  res.alpha = al;
  res.beta = be;
  res.xb = jet.point();
  const Vec3 nj = cross(jet.xa(), jet.xb());
  res.normal = nj / norm(nj);
  res.d = dot(xo - res.xb, res.normal);
  return res;
}

QuadraticCoeffs quadratic_coeffs(const SurfaceJet& jet, const Vec3& xo) {
  const Vec3 r = jet.point() - xo;
  QuadraticCoeffs q;
  q.d = norm(r);
  q.ca2 = dot(r, jet.d(2, 0)) + dot(jet.xa(), jet.xa());
  q.cab = dot(r, jet.d(1, 1)) + dot(jet.xa(), jet.xb());
  q.cb2 = dot(r, jet.d(0, 2)) + dot(jet.xb(), jet.xb());
  return q;
}

CurvatureData curvature_data(const SurfaceJet& jet) {
  CurvatureData c;
  c.E = dot(jet.xa(), jet.xa());
  c.F = dot(jet.xa(), jet.xb());
  c.G = dot(jet.xb(), jet.xb());
  const double g = c.E * c.G - c.F * c.F;
  if (!(g > 1e-14 * std::max(1.0, c.E * c.G)))
    throw GeometryError("degenerate first fundamental form (chart pole)");
  const Vec3 nj = cross(jet.xa(), jet.xb());
  const Vec3 n = nj / norm(nj);
  c.L = dot(n, jet.d(2, 0));
  c.M = dot(n, jet.d(1, 1));
  c.N = dot(n, jet.d(0, 2));
  c.H = (c.E * c.N - 2.0 * c.F * c.M + c.G * c.L) / (2.0 * g);
  c.K = (c.L * c.N - c.M * c.M) / g;
  const double disc = std::sqrt(std::max(0.0, c.H * c.H - c.K));
  c.kappa1 = c.H - disc;
  c.kappa2 = c.H + disc;
  c.r_osc = 1.0 / std::fabs(c.kappa1);
  return c;
}

bool is_positive_definite(double d, double H, double K) { return 1.0 - 2.0 * d * H + d * d * K > 0.0; }

}  // namespace ctrap
