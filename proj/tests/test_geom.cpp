#include <cmath>
#include <numbers>
#include <random>

#include "ctrap/geom.hpp"
#include "doctest.h"

using namespace ctrap;
using std::numbers::pi;

namespace {
double implicit_residual(const StandardEllipsoid& e, const Vec3& x) {
  return std::abs(x.x * x.x / (e.a * e.a) + x.y * x.y / (e.b * e.b) + x.z * x.z / (e.c * e.c) - 1.0);
}
const StandardEllipsoid kE321{3, 2, 1};
const StandardEllipsoid kUnit{1, 1, 1};
}  // namespace

TEST_CASE("param_point examples") {
  const Vec3 p1 = param_point(kE321, Chart::Grid1, 0, 0);
  CHECK(norm(p1 - Vec3{3, 0, 0}) < 1e-15);
  const Vec3 p2 = param_point(kE321, Chart::Grid2, 0, pi / 2);
  CHECK(norm(p2 - Vec3{3, 0, 0}) < 1e-15);
  const Vec3 p3 = param_point(kUnit, Chart::Grid1, pi / 2, 0);
  CHECK(norm(p3 - Vec3{0, 1, 0}) < 1e-15);
}

TEST_CASE("param_point lies on the surface") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(-pi, pi), ub(-pi / 2, pi / 2);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i)
    for (Chart ch : {Chart::Grid1, Chart::Grid2})
      worst = std::max(worst, implicit_residual(kE321, param_point(kE321, ch, ua(rng), ub(rng))));
  CHECK(worst < 1e-13);
}

TEST_CASE("param_jet sphere values and finite differences") {
  const SurfaceJet j = param_jet(kUnit, Chart::Grid1, 0, 0);
  CHECK(norm(j.xa() - Vec3{0, 1, 0}) < 1e-15);
  CHECK(norm(j.xb() - Vec3{0, 0, 1}) < 1e-15);
  CHECK(norm(j.d(2, 0) - Vec3{-1, 0, 0}) < 1e-15);

  const double h = 1e-4, al = 0.37, be = -0.61;
  for (Chart ch : {Chart::Grid1, Chart::Grid2}) {
    const SurfaceJet jt = param_jet(kE321, ch, al, be, 4);
    auto P = [&](double a, double b) { return param_point(kE321, ch, a, b); };
    const Vec3 fa = (1.0 / (2 * h)) * (P(al + h, be) - P(al - h, be));
    const Vec3 fb = (1.0 / (2 * h)) * (P(al, be + h) - P(al, be - h));
    const Vec3 fab = (1.0 / (4 * h * h)) * (P(al + h, be + h) - P(al + h, be - h) - P(al - h, be + h) + P(al - h, be - h));
    CHECK(norm(fa - jt.xa()) / norm(jt.xa()) < 1e-6);
    CHECK(norm(fb - jt.xb()) / norm(jt.xb()) < 1e-6);
    CHECK(norm(fab - jt.d(1, 1)) / norm(jt.d(1, 1)) < 1e-6);
    // fourth-order partials against differences of the third-order jet
    const Vec3 f31 = (1.0 / (2 * h)) *
                     (param_jet(kE321, ch, al, be + h, 4).d(3, 0) - param_jet(kE321, ch, al, be - h, 4).d(3, 0));
    CHECK(norm(f31 - jt.d(3, 1)) / std::max(1.0, norm(jt.d(3, 1))) < 1e-6);
  }
}

TEST_CASE("position series reproduces the map") {
  const auto s = position_series(kE321, Chart::Grid1, 0.4, 0.2, 6);
  const Vec3 exact = param_point(kE321, Chart::Grid1, 0.45, 0.17);
  const Vec3 approx{s[0].eval(0.05, -0.03), s[1].eval(0.05, -0.03), s[2].eval(0.05, -0.03)};
  CHECK(norm(exact - approx) < 1e-10);
}

TEST_CASE("surface_element") {
  CHECK(surface_element(kUnit, Chart::Grid1, 0.3, 0.0).J == doctest::Approx(1.0));
  CHECK(surface_element(kUnit, Chart::Grid1, 0.3, pi / 2).J < 1e-15);
  for (Chart ch : {Chart::Grid1, Chart::Grid2}) {
    const SurfaceJet j = param_jet(kE321, ch, 0.3, 0.4, 1);
    const Vec3 cr = cross(j.xa(), j.xb());
    CHECK(norm(surface_element(kE321, ch, 0.3, 0.4).nJ - cr) < 1e-13);
  }
}

TEST_CASE("pose standardization") {
  Pose id;
  const Vec3 x{0.3, -1.2, 2.0};
  CHECK(norm(standardize(id, x) - x) == 0.0);
  Pose tr;
  tr.s = {1, 2, 3};
  CHECK(norm(standardize(tr, x) - (x - Vec3{1, 2, 3})) < 1e-15);
  Pose p{pi / 3, pi / 4, 7 * pi / 8, {0.1, -0.2, 0.3}};
  const Mat3 R = p.rotation();
  const Mat3 RtR = R.transposed() * R;
  double off = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) off = std::max(off, std::abs(RtR(i, k) - (i == k ? 1.0 : 0.0)));
  CHECK(off < 1e-14);
  const double det = R(0, 0) * (R(1, 1) * R(2, 2) - R(1, 2) * R(2, 1)) - R(0, 1) * (R(1, 0) * R(2, 2) - R(1, 2) * R(2, 0)) +
                     R(0, 2) * (R(1, 0) * R(2, 1) - R(1, 1) * R(2, 0));
  CHECK(std::abs(det - 1.0) < 1e-14);
  CHECK(norm(unstandardize(p, standardize(p, x)) - x) < 1e-14);
  CHECK(norm(rotate_in(p, rotate_back(p, x)) - x) < 1e-14);
}

TEST_CASE("select_chart") {
  CHECK(select_chart(kE321, {0, 0, 1.1}) == Chart::Grid2);
  CHECK(select_chart(kE321, {3.1, 0, 0}) == Chart::Grid1);
  CHECK(select_chart(kUnit, {0, 1.1, 0}) == Chart::Grid1);
}

TEST_CASE("distance_upper_bound") {
  CHECK(distance_upper_bound(kUnit, {2, 0, 0}) == doctest::Approx(1.0));
  CHECK(distance_upper_bound(kUnit, {1, 0, 0}) == doctest::Approx(0.0));
  CHECK(distance_upper_bound(kE321, {0, 0, 1.2}) == doctest::Approx(0.6));
}

TEST_CASE("distance screen calibration") {
  // d >= d_up (1 - eps) with eps = 1 - min/max axis; equality on spheres
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ua(-pi, pi), ub(-1.4, 1.4), ud(0.0, 1.0);
  for (const StandardEllipsoid& e : {kUnit, kE321, StandardEllipsoid{1.2, 0.8, 0.5}}) {
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000; ++i) {
      const double al = ua(rng), be = ub(rng), d = 0.6 * ud(rng) + 1e-3;
      const Vec3 xb = param_point(e, Chart::Grid1, al, be);
      const Vec3 n = normalized(surface_element(e, Chart::Grid1, al, be).nJ);
      const double dup = distance_upper_bound(e, xb + d * n);
      worst_ratio = std::min(worst_ratio, d / dup);
      CHECK(d <= dup * (1 + 1e-12));
    }
    INFO("axes " << e.a << " " << e.b << " " << e.c);
    CHECK(worst_ratio >= e.min_axis() / e.max_axis() - 1e-12);
    if (e.is_sphere()) CHECK(1.0 - worst_ratio < 1e-12);
  }
}

TEST_CASE("project examples") {
  ChartGrid g(Chart::Grid1, 20, 10);
  auto run = [&](const StandardEllipsoid& e, Vec3 xo) {
    const auto [j, k] = nearest_node(e, g, xo);
    return project(e, Chart::Grid1, xo, g.alpha(j), g.beta(k));
  };
  auto r1 = run(kUnit, {2, 0, 0});
  CHECK(r1.converged);
  CHECK(norm(r1.xb - Vec3{1, 0, 0}) < 1e-12);
  CHECK(r1.d == doctest::Approx(1.0).epsilon(1e-12));
  auto r2 = run(kUnit, {0.5, 0, 0});
  CHECK(r2.converged);
  CHECK(r2.d == doctest::Approx(-0.5).epsilon(1e-12));
  const Vec3 xb = param_point(kE321, Chart::Grid1, 0.7, 0.3);
  const Vec3 n = normalized(surface_element(kE321, Chart::Grid1, 0.7, 0.3).nJ);
  auto r3 = run(kE321, xb + 0.05 * n);
  CHECK(r3.converged);
  CHECK(std::abs(r3.alpha - 0.7) < 1e-10);
  CHECK(std::abs(r3.beta - 0.3) < 1e-10);
  CHECK(std::abs(r3.d - 0.05) < 1e-10);
  CHECK(norm(cross(r3.xb - (xb + 0.05 * n), r3.normal)) < 1e-12);
}

TEST_CASE("projection recovers constructed foot points") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ua(-pi, pi), ub(-1.2, 1.2), us(-1.0, 1.0);
  int fails = 0;
  for (Chart ch : {Chart::Grid1, Chart::Grid2}) {
    ChartGrid g(ch, 40, 20);
    for (int i = 0; i < 300; ++i) {
      const double al = ua(rng), be = ub(rng);
      const SurfaceJet jet = param_jet(kE321, ch, al, be, 2);
      const CurvatureData cd = curvature_data(jet);
      // inside, the foot point is only the nearest point short of the medial axis
      const double s = us(rng);
      const double reach = s < 0 ? std::min(cd.r_osc, kE321.min_axis() * kE321.min_axis() / kE321.max_axis()) : cd.r_osc;
      const double d = 0.5 * reach * s;
      const Vec3 n = normalized(cross(jet.xa(), jet.xb()));
      const Vec3 xo = jet.point() + d * n;
      if (select_chart(kE321, xo) != ch) continue;
      const auto [j, k] = nearest_node(kE321, g, xo);
      const auto r = project(kE321, ch, xo, g.alpha(j), g.beta(k));
      const double da = std::remainder(r.alpha - al, 2 * pi);
      if (!r.converged || std::abs(da) > 1e-9 || std::abs(r.beta - be) > 1e-9) {
        ++fails;
        MESSAGE("fail al=" << al << " be=" << be << " d=" << d << " rosc=" << cd.r_osc << " got " << r.alpha << " "
                           << r.beta << " d " << r.d << " conv " << r.converged << " res " << r.residual);
      }
    }
  }
  CHECK(fails == 0);
}

TEST_CASE("quadratic coefficients") {
  for (double d : {0.3, -0.5}) {
    const SurfaceJet jet = param_jet(kUnit, Chart::Grid1, 0.2, 0.0, 2);
    const Vec3 xo = (1.0 + d) * jet.point();
    const QuadraticCoeffs q = quadratic_coeffs(jet, xo);
    CHECK(q.ca2 == doctest::Approx(1 + d));
    CHECK(std::abs(q.cab) < 1e-15);
    CHECK(q.cb2 == doctest::Approx(1 + d));
    CHECK(q.d == doctest::Approx(std::abs(d)));
  }
  const SurfaceJet jet = param_jet(kE321, Chart::Grid2, 0.4, -0.3, 2);
  const QuadraticCoeffs q = quadratic_coeffs(jet, jet.point());
  CHECK(q.ca2 == doctest::Approx(dot(jet.xa(), jet.xa())));
  CHECK(q.cab == doctest::Approx(dot(jet.xa(), jet.xb())));
  CHECK(q.cb2 == doctest::Approx(dot(jet.xb(), jet.xb())));
}

TEST_CASE("quadratic coefficients are rotation invariant") {
  Pose p{pi / 3, pi / 4, 7 * pi / 8, {1, -2, 0.5}};
  const SurfaceJet jet = param_jet(kE321, Chart::Grid1, 0.9, 0.4, 2);
  const Vec3 xo = jet.point() + Vec3{0.01, 0.02, 0.03};
  const QuadraticCoeffs q0 = quadratic_coeffs(jet, xo);
  SurfaceJet wj(2);
  const Mat3 R = p.rotation();
  for (int i = 0; i <= 2; ++i)
    for (int j = 0; i + j <= 2; ++j) wj.d(i, j) = (i + j == 0) ? unstandardize(p, jet.d(0, 0)) : R * jet.d(i, j);
  const QuadraticCoeffs q1 = quadratic_coeffs(wj, unstandardize(p, xo));
  CHECK(std::abs(q0.ca2 - q1.ca2) < 1e-12);
  CHECK(std::abs(q0.cab - q1.cab) < 1e-12);
  CHECK(std::abs(q0.cb2 - q1.cb2) < 1e-12);
  CHECK(std::abs(q0.d - q1.d) < 1e-12);
}

TEST_CASE("curvature data") {
  const CurvatureData c1 = curvature_data(param_jet(kUnit, Chart::Grid1, 0.4, 0.3, 2));
  CHECK(c1.kappa1 == doctest::Approx(-1.0));
  CHECK(c1.kappa2 == doctest::Approx(-1.0));
  CHECK(c1.r_osc == doctest::Approx(1.0));
  const CurvatureData c2 = curvature_data(param_jet(StandardEllipsoid{2, 2, 2}, Chart::Grid1, 0.4, 0.3, 2));
  CHECK(c2.kappa1 == doctest::Approx(-0.5));
  CHECK(c2.r_osc == doctest::Approx(2.0));
  // (3,0,0) on (3,2,1): principal curvatures -3/4 and -3
  const CurvatureData c3 = curvature_data(param_jet(kE321, Chart::Grid1, 0, 0, 2));
  CHECK(c3.K == doctest::Approx(9.0 / 4.0).epsilon(1e-6));
  CHECK(c3.kappa1 <= c3.kappa2);
  CHECK(c3.kappa2 < 0.0);
  CHECK(std::abs(c3.K - c3.kappa1 * c3.kappa2) < 1e-12);
  CHECK(std::abs(2 * c3.H - c3.kappa1 - c3.kappa2) < 1e-12);
  CHECK_THROWS_AS(curvature_data(param_jet(kUnit, Chart::Grid1, 0, pi / 2, 2)), GeometryError);
}

TEST_CASE("positive definiteness criterion") {
  CHECK(is_positive_definite(-0.5, -1, 1));
  CHECK_FALSE(is_positive_definite(-1.0, -1, 1));
  CHECK(is_positive_definite(0.3, -1, 1));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ua(-pi, pi), ub(-1.3, 1.3), u01(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const SurfaceJet jet = param_jet(kE321, Chart::Grid1, ua(rng), ub(rng), 2);
    const CurvatureData cd = curvature_data(jet);
    CHECK(is_positive_definite(5.0 * u01(rng), cd.H, cd.K));
    CHECK(is_positive_definite(-0.9 * cd.r_osc * u01(rng), cd.H, cd.K));
  }
}

TEST_CASE("chart grid validation") {
  CHECK_THROWS(ChartGrid(Chart::Grid1, 3, 4));
  CHECK_THROWS(ChartGrid(Chart::Grid1, 8, 1));
  ChartGrid g(Chart::Grid2, 8, 4);
  CHECK(g.dalpha() == doctest::Approx(2 * pi / 8));
  CHECK(g.beta(4) == doctest::Approx(pi / 2));
}
