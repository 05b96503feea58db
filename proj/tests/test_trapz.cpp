#include <cmath>
#include <numbers>
#include <vector>

#include "ctrap/geom.hpp"
#include "ctrap/trapz.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "trapz_fixtures.hpp"

using namespace ctrap;
using std::numbers::pi;

using fixture::exp_grid;
using fixture::sample;

TEST_CASE("constants are integrated exactly at every order") {
  auto one = [](double, double) { return 1.0; };
  auto zero = [](double, double) { return 0.0; };
  const RectGridFn g = sample(0, 1, 0, 1, 5, 7, one, zero, zero, zero, zero, zero);
  for (int order : {2, 4, 6}) CHECK(trap_rect(g, order) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("order 6 is exact on low-degree polynomials") {
  const RectGridFn g = sample(
      0, 1, 0, 1, 4, 3, [](double x, double y) { return x * x * x * y; }, [](double x, double y) { return 3 * x * x * y; },
      [](double x, double) { return x * x * x; }, [](double, double y) { return 6 * y; },
      [](double, double) { return 0.0; }, [](double x, double) { return 3 * x * x; });
  CHECK(std::abs(trap_rect(g, 6) - 0.125) < 1e-14);
  const RectGridFn g5 = sample(
      -0.5, 1.5, 0.2, 1.1, 6, 5, [](double x, double y) { return std::pow(x, 5) * std::pow(y, 4) - 2 * x * x * y; },
      [](double x, double y) { return 5 * std::pow(x, 4) * std::pow(y, 4) - 4 * x * y; },
      [](double x, double y) { return 4 * std::pow(x, 5) * std::pow(y, 3) - 2 * x * x; },
      [](double x, double y) { return 60 * x * x * std::pow(y, 4); },
      [](double x, double y) { return 24 * std::pow(x, 5) * y; },
      [](double x, double y) { return 20 * std::pow(x, 4) * std::pow(y, 3) - 4 * x; },
      [](double x, double y) { return 120 * std::pow(x, 4) * y; }, [](double x, double y) { return 240 * x * x * y * y * y; },
      [](double x, double y) { return 1440 * x * x * y; });
  auto F = [](double x, double y) { return std::pow(x, 6) / 6 * std::pow(y, 5) / 5 - 2 * x * x * x / 3 * y * y / 2; };
  const double exact = F(1.5, 1.1) - F(-0.5, 1.1) - F(1.5, 0.2) + F(-0.5, 0.2);
  CHECK(std::abs(trap_rect(g5, 6) - exact) < 1e-13);
}

TEST_CASE("observed orders on exp(x+y)") {
  const double exact = (std::exp(1.0) - 1) * (std::exp(1.0) - 1);
  for (int order : {2, 4, 6}) {
    std::vector<double> err;
    for (int n : {8, 16, 32}) err.push_back(std::abs(trap_rect(exp_grid(n), order) - exact));
    for (int i = 0; i + 1 < 3; ++i) {
      const double obs = std::log2(err[i] / err[i + 1]);
      INFO("order " << order << " observed " << obs);
      CHECK(std::abs(obs - order) < 0.3);
    }
  }
}

TEST_CASE("puncture identity and order 2 equals the weighted sum") {
  const RectGridFn g = exp_grid(8);
  for (int order : {2, 4, 6})
    for (auto [j, k] : {std::pair{0, 0}, {3, 5}, {8, 2}, {8, 8}}) {
      const double full = trap_rect(g, order);
      const double punct = trap_rect(g, order, Puncture{j, k});
      const double w = trap_weight(j, k, 8, 8) * g.dalpha() * g.dbeta() * g.at(j, k);
      CHECK(std::abs(punct + w - full) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(full));
    }
  double s = 0.0;
  for (int k = 0; k <= 8; ++k)
    for (int j = 0; j <= 8; ++j) s += trap_weight(j, k, 8, 8) * g.at(j, k);
  CHECK(std::abs(s * g.dalpha() * g.dbeta() - trap_rect(g, 2)) < 1e-14);
}

TEST_CASE("missing derivatives are rejected") {
  RectGridFn g = exp_grid(4);
  g.edges.reset();
  CHECK_THROWS_AS(trap_rect(g, 4), QuadratureError);
  CHECK_THROWS_AS(trap_rect(g, 3), QuadratureError);
  RectGridFn h = exp_grid(4);
  h.edges->has_third = false;
  CHECK_NOTHROW(trap_rect(h, 4));
  CHECK_THROWS_AS(trap_rect(h, 6), QuadratureError);
}

namespace {
template <class G>
double closed(const StandardEllipsoid& e, int n, G integrand, int m = 0) {
  ChartGrid grid(Chart::Grid1, n, m > 0 ? m : n / 2);
  std::vector<double> v(grid.node_count());
  for (int k = 0; k <= grid.m; ++k)
    for (int j = 0; j < grid.n; ++j) {
      const double al = grid.alpha(j), be = grid.beta(k);
      v[grid.node_index(j, k)] = integrand(param_point(e, Chart::Grid1, al, be)) * surface_element(e, Chart::Grid1, al, be).J;
    }
  return trap_closed_surface<double>(grid, v);
}
}  // namespace

TEST_CASE("closed-surface rule on the sphere") {
  const StandardEllipsoid s{1, 1, 1};
  auto one = [](const Vec3&) { return 1.0; };
  const double e20 = std::abs(closed(s, 20, one) - 4 * pi);
  const double e40 = std::abs(closed(s, 40, one) - 4 * pi);
  INFO("ratio " << e20 / e40);
  CHECK(e20 / e40 > 8.0);
  CHECK(e20 / e40 < 24.0);
  auto x2 = [](const Vec3& x) { return x.x * x.x; };
  const double x20 = std::abs(closed(s, 20, x2) - 4 * pi / 3), x40 = std::abs(closed(s, 40, x2) - 4 * pi / 3);
  CHECK(x40 < 1e-4);
  CHECK(x20 / x40 > 8.0);
}

TEST_CASE("closed-surface rule on the (3,2,1) ellipsoid area") {
  const StandardEllipsoid e{3, 2, 1};
  const double area = oracle::integrate2(
      [&](double al, double be) { return surface_element(e, Chart::Grid1, al, be).J; }, -pi, pi, -pi / 2, pi / 2, 1e-13);
  const double t = closed(e, 160, [](const Vec3&) { return 1.0; }, 160);
  CHECK(std::abs(t - area) / area < 1e-8);
}

TEST_CASE("closed-surface puncture removes one node") {
  const StandardEllipsoid s{1, 1, 1};
  ChartGrid grid(Chart::Grid1, 12, 6);
  std::vector<double> v(grid.node_count(), 0.0);
  for (int i = 0; i < grid.node_count(); ++i) v[i] = 1.0 + 0.01 * i;
  const double full = trap_closed_surface<double>(grid, v);
  const double p = trap_closed_surface<double>(grid, v, Puncture{3, 2});
  CHECK(std::abs(full - p - grid.dalpha() * grid.dbeta() * v[grid.node_index(3, 2)]) < 1e-13);
}
