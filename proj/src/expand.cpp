#include "ctrap/expand.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ctrap {

double binomial_factor(int r, int n) {
  if (n < 0 || n > 3) throw std::invalid_argument("binomial_factor: n must be in 0..3");
  double c = 1.0;
  for (int i = 0; i < n; ++i) c *= -(r + 2.0 * i) / (2.0 * (i + 1));
  return c;
}

namespace {

void check_term(int r, int m) {
  if (!((r == 1 && m == 0) || (r == 3 && m == 2) || (r == 5 && m == 3)))
    throw std::invalid_argument("basis_set: unsupported kernel term");
}

}  // namespace

std::vector<BasisIndex> basis_set(int r, int m, int n) {
  check_term(r, m);
  if (n < 0 || n > r + 1 - m) throw std::invalid_argument("basis_set: n out of range");
  std::vector<BasisIndex> out;
  const int k = (r + 2 * n - 1) / 2;
  for (int t = 3 * n; t <= 2 * n + r + 1; ++t)
    for (int q = 0; q <= t; ++q) out.push_back({t - q, q, k});
  return out;
}

std::vector<BasisIndex> basis_set(int r, int m) {
  check_term(r, m);
  std::vector<BasisIndex> out;
  for (int n = 0; n <= r + 1 - m; ++n) {
    auto part = basis_set(r, m, n);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

const std::vector<BasisIndex>& basis_inventory() {
  static const std::vector<BasisIndex> inv = [] {
    std::vector<BasisIndex> all;
    for (auto [r, m] : {std::pair{1, 0}, {3, 2}, {5, 3}}) {
      auto part = basis_set(r, m);
      all.insert(all.end(), part.begin(), part.end());
    }
    std::sort(all.begin(), all.end(), [](const BasisIndex& x, const BasisIndex& y) {
      return std::tie(x.k, x.p, x.q) < std::tie(y.k, y.p, y.q);
    });
    all.erase(std::unique(all.begin(), all.end()), all.end());
    if (all.size() != 179) throw std::logic_error("basis inventory size changed");
    return all;
  }();
  return inv;
}

int basis_slot(int p, int q, int k) {
  static const auto table = [] {
    std::array<int, 13 * 13 * 6> t;
    t.fill(-1);
    const auto& inv = basis_inventory();
    for (int i = 0; i < static_cast<int>(inv.size()); ++i) t[(inv[i].k * 13 + inv[i].p) * 13 + inv[i].q] = i;
    return t;
  }();
  if (p < 0 || q < 0 || k < 0 || p > 12 || q > 12 || k > 5) return -1;
  return table[(k * 13 + p) * 13 + q];
}

BivariatePoly eta_series(const std::array<BivariatePoly, 3>& xhat) {
  BivariatePoly r2;
  for (int i = 0; i < 3; ++i) r2 += BivariatePoly::multiply(xhat[i], xhat[i], 6);
  return r2.truncated(3, 6);
}

BivariatePoly eta_series(const StandardEllipsoid& ell, Chart chart, double alpha_b, double beta_b, const Vec3& x_o) {
  auto x = position_series(ell, chart, alpha_b, beta_b, 6);
  x[0].set(0, 0, x[0](0, 0) - x_o.x);
  x[1].set(0, 0, x[1](0, 0) - x_o.y);
  x[2].set(0, 0, x[2](0, 0) - x_o.z);
  return eta_series(x);
}

int window_half_width(int n) {
  if (n <= 80) return 5;
  if (n == 160) return 9;
  if (n == 320) return 15;
  if (n == 640) return 26;
  return static_cast<int>(std::lround(5.0 * std::pow(n / 80.0, 0.8)));
}

Window make_window(const ChartGrid& grid, double alpha_b, double beta_b, int n_w) {
  constexpr double pi = std::numbers::pi;
  Window w;
  w.ds = grid.dalpha();
  w.dt = grid.dbeta();
  const int jc = static_cast<int>(std::lround((alpha_b + pi) / w.ds));
  const int kc = std::clamp(static_cast<int>(std::lround((beta_b + 0.5 * pi) / w.dt)), 0, grid.m);
  w.j0 = ((jc % grid.n) + grid.n) % grid.n;
  w.k0 = kc;
  const int nwa = std::min(n_w, grid.n / 2);
  w.jlo = jc - nwa;
  w.nja = 2 * nwa + 1;
  if (2 * n_w >= grid.m) {
    w.klo = 0;
    w.khi = grid.m;
  } else {
    w.klo = kc - n_w;
    w.khi = kc + n_w;
    if (w.klo < 0) {
      w.khi -= w.klo;
      w.klo = 0;
    }
    if (w.khi > grid.m) {
      w.klo -= w.khi - grid.m;
      w.khi = grid.m;
    }
  }
  w.s_lo = w.jlo * w.ds - pi - alpha_b;
  w.s_hi = w.s_lo + (w.nja - 1) * w.ds;
  w.t_lo = w.klo * w.dt - 0.5 * pi - beta_b;
  w.t_hi = w.khi * w.dt - 0.5 * pi - beta_b;
  return w;
}

namespace {

// Taylor coefficients at 0 of the four cubic Lagrange basis polynomials on nodes x.
std::array<std::array<double, 4>, 4> lagrange_taylor(const std::array<double, 4>& x) {
  std::array<std::array<double, 4>, 4> L{};
  for (int i = 0; i < 4; ++i) {
    std::array<double, 4> poly{1, 0, 0, 0};
    double denom = 1.0;
    int deg = 0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      // multiply by (t - x_j)
      for (int d = deg + 1; d >= 1; --d) poly[d] = poly[d - 1] - x[j] * poly[d];
      poly[0] = -x[j] * poly[0];
      ++deg;
      denom *= x[i] - x[j];
    }
    for (int d = 0; d < 4; ++d) L[i][d] = poly[d] / denom;
  }
  return L;
}

}  // namespace

DensityStencil density_stencil(const ChartGrid& grid, double alpha_b, double beta_b) {
  constexpr double pi = std::numbers::pi;
  const double da = grid.dalpha(), db = grid.dbeta();
  const int jb = static_cast<int>(std::floor((alpha_b + pi) / da));
  const int kb = std::clamp(static_cast<int>(std::floor((beta_b + 0.5 * pi) / db)), 0, grid.m - 1);
  std::array<double, 4> xs{}, ys{};
  for (int i = 0; i < 4; ++i) {
    xs[i] = (jb - 1 + i) * da - pi - alpha_b;
    ys[i] = (kb - 1 + i) * db - 0.5 * pi - beta_b;
  }
  const auto La = lagrange_taylor(xs), Lb = lagrange_taylor(ys);
  DensityStencil st;
  for (int l = 0; l < 4; ++l)
    for (int i = 0; i < 4; ++i) {
      int j = jb - 1 + i, k = kb - 1 + l;
      if (k < 0) {
        k = -k;
        j += grid.n / 2;
      } else if (k > grid.m) {
        k = 2 * grid.m - k;
        j += grid.n / 2;
      }
      j = ((j % grid.n) + grid.n) % grid.n;
      const int slot = l * 4 + i;
      st.node[slot] = grid.node_index(j, k);
      for (int a = 0; a <= 3; ++a)
        for (int b = 0; a + b <= 3; ++b) st.weight[BivariatePoly::index(a, b)][slot] = La[i][a] * Lb[l][b];
    }
  return st;
}

std::array<BivariatePoly, 3> density_jet(const DensityStencil& st, std::span<const Vec3> values) {
  std::array<BivariatePoly, 3> f;
  for (auto& c : f) c = BivariatePoly::constant(0.0);
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; a + b <= 3; ++b) {
      const auto& w = st.weight[BivariatePoly::index(a, b)];
      Vec3 acc{};
      for (int i = 0; i < 16; ++i) acc += w[i] * values[st.node[i]];
      f[0].set(a, b, acc.x);
      f[1].set(a, b, acc.y);
      f[2].set(a, b, acc.z);
    }
  return f;
}

std::array<BivariatePoly, 3> density_jet(const ChartGrid& grid, std::span<const Vec3> values, double alpha_b,
                                         double beta_b) {
  return density_jet(density_stencil(grid, alpha_b, beta_b), values);
}

Vec3 interpolate_density(const ChartGrid& grid, std::span<const Vec3> values, double alpha, double beta) {
  constexpr double pi = std::numbers::pi;
  const double xa = (alpha + pi) / grid.dalpha(), xb = (beta + 0.5 * pi) / grid.dbeta();
  const int jb = static_cast<int>(std::floor(xa));
  const int kb = std::clamp(static_cast<int>(std::floor(xb)), 0, grid.m - 1);
  // cubic Lagrange weights on nodes -1, 0, 1, 2 at offset t
  auto lag = [](double t) {
    return std::array<double, 4>{-t * (t - 1) * (t - 2) / 6, (t + 1) * (t - 1) * (t - 2) / 2,
                                 -(t + 1) * t * (t - 2) / 2, (t + 1) * t * (t - 1) / 6};
  };
  const auto wa = lag(xa - jb), wb = lag(xb - kb);
  Vec3 acc{};
  for (int l = 0; l < 4; ++l) {
    int k = kb - 1 + l, shift = 0;
    if (k < 0) {
      k = -k;
      shift = grid.n / 2;
    } else if (k > grid.m) {
      k = 2 * grid.m - k;
      shift = grid.n / 2;
    }
    Vec3 row{};
    for (int i = 0; i < 4; ++i) {
      const int j = ((jb - 1 + i + shift) % grid.n + grid.n) % grid.n;
      row += wa[i] * values[grid.node_index(j, k)];
    }
    acc += wb[l] * row;
  }
  return acc;
}

GeometryPlan geometry_plan(const StandardEllipsoid& ell, Chart chart, double alpha_b, double beta_b, const Vec3& x_o,
                           const QuadraticCoeffs& quad) {
  GeometryPlan g;
  g.chart = chart;
  g.alpha_b = alpha_b;
  g.beta_b = beta_b;
  g.quad = quad;
  g.xhat = position_series(ell, chart, alpha_b, beta_b, 6);
  g.xhat[0].set(0, 0, g.xhat[0](0, 0) - x_o.x);
  g.xhat[1].set(0, 0, g.xhat[1](0, 0) - x_o.y);
  g.xhat[2].set(0, 0, g.xhat[2](0, 0) - x_o.z);
  g.nJ = normal_series(ell, chart, alpha_b, beta_b, 6);
  BivariatePoly nn;
  for (int i = 0; i < 3; ++i) nn += BivariatePoly::multiply(g.nJ[i], g.nJ[i], 4);
  g.J = BivariatePoly::sqrt(nn, 4);
  const BivariatePoly eta = eta_series(g.xhat);
  g.eta_pow[0] = BivariatePoly::constant(1.0);
  g.eta_pow[1] = eta;
  g.eta_pow[2] = BivariatePoly::multiply(eta, eta, 12);
  g.eta_pow[3] = BivariatePoly::multiply(g.eta_pow[2], eta, 12);
  return g;
}

void add_kernel_term(CorrectionPlan& plan, const GeometryPlan& geo, int r, int m,
                     const std::array<BivariatePoly, 3>& numerator, double scale) {
  check_term(r, m);
  for (int n = 0; n <= r + 1 - m; ++n) {
    const int k = (r + 2 * n - 1) / 2;
    const int lo = 3 * n, hi = 2 * n + r + 1;
    const double b = binomial_factor(r, n) * scale;
    for (int i = 0; i < 3; ++i) {
      const BivariatePoly prod = BivariatePoly::multiply(numerator[i], geo.eta_pow[n], hi);
      for (int t = std::max(lo, prod.lo()); t <= std::min(hi, prod.hi()); ++t)
        for (int q = 0; q <= t; ++q) {
          const double v = prod(t - q, q);
          if (v == 0.0) continue;
          plan.c[i][basis_slot(t - q, q, k)] += b * v;
        }
    }
  }
}

namespace {

BivariatePoly dot3(const std::array<BivariatePoly, 3>& a, const std::array<BivariatePoly, 3>& b, int cap) {
  BivariatePoly s;
  for (int i = 0; i < 3; ++i) s += BivariatePoly::multiply(a[i], b[i], cap);
  return s;
}

}  // namespace

CorrectionPlan assemble_plan(Kernel kernel, const GeometryPlan& geo, const std::array<BivariatePoly, 3>& fjet) {
  constexpr double pi = std::numbers::pi;
  CorrectionPlan plan;
  if (kernel == Kernel::SLP) {
    std::array<BivariatePoly, 3> num1;
    for (int i = 0; i < 3; ++i) num1[i] = BivariatePoly::multiply(fjet[i], geo.J, 2);
    add_kernel_term(plan, geo, 1, 0, num1, 1.0 / (8.0 * pi));
    const BivariatePoly fxJ = BivariatePoly::multiply(dot3(fjet, geo.xhat, 4), geo.J, 4);
    std::array<BivariatePoly, 3> num3;
    for (int i = 0; i < 3; ++i) num3[i] = BivariatePoly::multiply(fxJ, geo.xhat[i], 4);
    add_kernel_term(plan, geo, 3, 2, num3, 1.0 / (8.0 * pi));
  } else {
    const BivariatePoly fx = dot3(fjet, geo.xhat, 6);
    const BivariatePoly xn = dot3(geo.xhat, geo.nJ, 6);
    const BivariatePoly fxxn = BivariatePoly::multiply(fx, xn, 6);
    std::array<BivariatePoly, 3> num5;
    for (int i = 0; i < 3; ++i) num5[i] = BivariatePoly::multiply(fxxn, geo.xhat[i], 6);
    add_kernel_term(plan, geo, 5, 3, num5, -3.0 / (4.0 * pi));
  }
  return plan;
}

std::array<double, 179> basis_integrals(const ReducedWindow& red, const AntiderivTables& tables) {
  std::array<double, 179> out{};
  const auto& inv = basis_inventory();
  for (int b = 0; b < 179; ++b) out[b] = red.scale(inv[b].p, inv[b].q, inv[b].k) * tables(inv[b].p, inv[b].q, inv[b].k);
  return out;
}

namespace {

constexpr std::array<std::array<double, 13>, 13> kBinom = [] {
  std::array<std::array<double, 13>, 13> c{};
  for (int n = 0; n <= 12; ++n) {
    c[n][0] = 1.0;
    for (int k = 1; k <= n; ++k) c[n][k] = c[n - 1][k - 1] + (k <= n - 1 ? c[n - 1][k] : 0.0);
  }
  return c;
}();

// Taylor coefficients (degree <= 3) of (x0 + e)^p in e, for p = 0..12.
struct ShiftedPowers {
  std::array<std::array<double, 4>, 13> c{};
  explicit ShiftedPowers(double x0) {
    std::array<double, 13> pw{};
    pw[0] = 1.0;
    for (int i = 1; i <= 12; ++i) pw[i] = pw[i - 1] * x0;
    for (int p = 0; p <= 12; ++p)
      for (int i = 0; i <= std::min(p, 3); ++i) c[p][i] = kBinom[p][i] * pw[p - i];
  }
};

// rho^{-(2k+1)} along one direction: rho^2(e) = A + B e + C e^2, degree <= 3 in e, k = 0..5.
std::array<std::array<double, 4>, 6> radial_series_1d(double A, double B, double C) {
  std::array<std::array<double, 4>, 6> out{};
  const double b1 = B / A, c1 = C / A;
  const double sqA = std::sqrt(A);
  double base = 1.0 / sqA;  // A^{-1/2}
  for (int k = 0; k <= 5; ++k) {
    const double nu = k + 0.5;
    const double g1 = -nu, g2 = nu * (nu + 1) / 2, g3 = -nu * (nu + 1) * (nu + 2) / 6;
    out[k][0] = base;
    out[k][1] = base * g1 * b1;
    out[k][2] = base * (g1 * c1 + g2 * b1 * b1);
    out[k][3] = base * (2 * g2 * b1 * c1 + g3 * b1 * b1 * b1);
    base /= A;
  }
  return out;
}

// 4x4 Taylor block [i][j] (i,j <= 3) of rho^{-(2k+1)} about (s0,t0), k = 0..5.
std::array<std::array<std::array<double, 4>, 4>, 6> radial_series_2d(const QuadraticCoeffs& q, double s0, double t0) {
  const double A = q.d * q.d + q.ca2 * s0 * s0 + 2 * q.cab * s0 * t0 + q.cb2 * t0 * t0;
  // powers of w = rho^2/A - 1 truncated to the 4x4 block a, b <= 3
  using Block = std::array<std::array<double, 4>, 4>;
  Block w{};
  w[1][0] = 2 * (q.ca2 * s0 + q.cab * t0) / A;
  w[0][1] = 2 * (q.cab * s0 + q.cb2 * t0) / A;
  w[2][0] = q.ca2 / A;
  w[1][1] = 2 * q.cab / A;
  w[0][2] = q.cb2 / A;
  std::array<Block, 7> wp{};
  wp[0][0][0] = 1.0;
  for (int j = 1; j <= 6; ++j)
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; b <= 3; ++b) {
        double acc = 0.0;
        for (int a1 = 0; a1 <= std::min(a, 2); ++a1)
          for (int b1 = 0; a1 + b1 <= 2 && b1 <= b; ++b1) acc += w[a1][b1] * wp[j - 1][a - a1][b - b1];
        wp[j][a][b] = acc;
      }
  std::array<std::array<std::array<double, 4>, 4>, 6> out{};
  double base = 1.0 / std::sqrt(A);
  for (int k = 0; k <= 5; ++k) {
    const double nu = k + 0.5;
    double g = 1.0;
    for (int j = 0; j <= 6; ++j) {
      for (int a = 0; a <= 3; ++a)
        for (int b = 0; b <= 3; ++b) out[k][a][b] += base * g * wp[j][a][b];
      g *= -(nu + j) / (j + 1);
    }
    base /= A;
  }
  return out;
}

}  // namespace

namespace {

// p ranges per k in the inventory: p <= 2k + 2.
constexpr int pmax_for(int k) { return 2 * k + 2; }

}  // namespace

std::array<double, 179> basis_trapezoid(const QuadraticCoeffs& q, const Window& win, int order, bool puncture) {
  if (order != 2 && order != 4 && order != 6) throw std::invalid_argument("basis_trapezoid: order must be 2, 4 or 6");
  const auto& inv = basis_inventory();
  const int na = win.nja - 1, nb = win.nkb() - 1;
  const int ip = win.nja / 2, lp = win.k0 - win.klo;
  const double ds = win.ds, dt = win.dt, d2 = q.d * q.d;
  std::array<double, 179> sum{};

  std::array<double, 13> sp{}, tp{};
  std::array<double, 6> R{};
  // row[p][k] = sum over one lattice row of w s^p rho^{-(2k+1)}
  std::array<std::array<double, 6>, 13> row{};
  auto powers = [](std::array<double, 13>& pw, double x) {
    pw[0] = 1.0;
    for (int e = 1; e <= 12; ++e) pw[e] = pw[e - 1] * x;
  };
  for (int l = 0; l <= nb; ++l) {
    const double t = win.t_lo + l * dt;
    for (auto& r : row) r.fill(0.0);
    for (int i = 0; i <= na; ++i) {
      if (puncture && i == ip && l == lp) continue;
      const double s = win.s_lo + i * ds;
      const double rho2 = d2 + q.ca2 * s * s + 2 * q.cab * s * t + q.cb2 * t * t;
      const double w = (i == 0 || i == na) ? 0.5 : 1.0;
      R[0] = w / std::sqrt(rho2);
      for (int k = 1; k <= 5; ++k) R[k] = R[k - 1] / rho2;
      powers(sp, s);
      for (int k = 0; k <= 5; ++k)
        for (int pp = 0; pp <= pmax_for(k); ++pp) row[pp][k] += sp[pp] * R[k];
    }
    powers(tp, t);
    const double wl = (l == 0 || l == nb) ? 0.5 : 1.0;
    for (int bi = 0; bi < 179; ++bi) sum[bi] += wl * tp[inv[bi].q] * row[inv[bi].p][inv[bi].k];
  }
  for (double& v : sum) v *= ds * dt;
  if (order == 2) return sum;

  const double a2 = ds * ds / 12.0, b2 = dt * dt / 12.0;
  const double a4 = -ds * ds * ds * ds / 720.0, b4 = -dt * dt * dt * dt / 720.0;
  const bool six = order == 6;

  // h[p][k]: a2 h1 + 6 a4 h3 of the edge derivative for s^p rho^{-(2k+1)}
  std::array<std::array<double, 6>, 13> h{};
  // alpha edges: s = s_lo (sign -1) and s_hi (+1), all beta rows
  for (int side = 0; side < 2; ++side) {
    const double s0 = side == 0 ? win.s_lo : win.s_hi;
    const double sign = side == 0 ? -1.0 : 1.0;
    const ShiftedPowers S(s0);
    for (int l = 0; l <= nb; ++l) {
      const double t = win.t_lo + l * dt;
      const double A = d2 + q.ca2 * s0 * s0 + 2 * q.cab * s0 * t + q.cb2 * t * t;
      const auto Rs = radial_series_1d(A, 2 * (q.ca2 * s0 + q.cab * t), q.ca2);
      powers(tp, t);
      const double w = sign * ((l == 0 || l == nb) ? 0.5 : 1.0) * dt;
      for (int k = 0; k <= 5; ++k) {
        const auto& r = Rs[k];
        for (int pp = 0; pp <= pmax_for(k); ++pp) {
          const auto& c = S.c[pp];
          double v = a2 * (c[0] * r[1] + c[1] * r[0]);
          if (six) v += 6.0 * a4 * (c[0] * r[3] + c[1] * r[2] + c[2] * r[1] + c[3] * r[0]);
          h[pp][k] = w * v;
        }
      }
      for (int bi = 0; bi < 179; ++bi) sum[bi] -= h[inv[bi].p][inv[bi].k] * tp[inv[bi].q];
    }
  }
  // beta edges
  for (int side = 0; side < 2; ++side) {
    const double t0 = side == 0 ? win.t_lo : win.t_hi;
    const double sign = side == 0 ? -1.0 : 1.0;
    const ShiftedPowers T(t0);
    for (int i = 0; i <= na; ++i) {
      const double s = win.s_lo + i * ds;
      const double A = d2 + q.ca2 * s * s + 2 * q.cab * s * t0 + q.cb2 * t0 * t0;
      const auto Rt = radial_series_1d(A, 2 * (q.cab * s + q.cb2 * t0), q.cb2);
      powers(sp, s);
      const double w = sign * ((i == 0 || i == na) ? 0.5 : 1.0) * ds;
      for (int k = 0; k <= 5; ++k) {
        const auto& r = Rt[k];
        for (int qq = 0; qq <= pmax_for(k); ++qq) {
          const auto& c = T.c[qq];
          double v = b2 * (c[0] * r[1] + c[1] * r[0]);
          if (six) v += 6.0 * b4 * (c[0] * r[3] + c[1] * r[2] + c[2] * r[1] + c[3] * r[0]);
          h[qq][k] = w * v;
        }
      }
      for (int bi = 0; bi < 179; ++bi) sum[bi] -= h[inv[bi].q][inv[bi].k] * sp[inv[bi].p];
    }
  }
  // corners: mixed partials with signs (+,-,-,+) over (lo,lo) (hi,lo) (lo,hi) (hi,hi)
  for (int corner = 0; corner < 4; ++corner) {
    const double s0 = (corner & 1) ? win.s_hi : win.s_lo;
    const double t0 = (corner & 2) ? win.t_hi : win.t_lo;
    const double sign = (corner == 0 || corner == 3) ? 1.0 : -1.0;
    const ShiftedPowers S(s0), T(t0);
    const auto Rst = radial_series_2d(q, s0, t0);
    for (int b = 0; b < 179; ++b) {
      const auto& cs = S.c[inv[b].p];
      const auto& ct = T.c[inv[b].q];
      const auto& r = Rst[inv[b].k];
      auto coef = [&](int a, int bb) {
        double acc = 0.0;
        for (int a1 = 0; a1 <= a; ++a1)
          for (int b1 = 0; b1 <= bb; ++b1) acc += cs[a1] * ct[b1] * r[a - a1][bb - b1];
        return acc;
      };
      double add = a2 * b2 * coef(1, 1);
      if (six) add += a2 * b4 * 6.0 * coef(1, 3) + a4 * b2 * 6.0 * coef(3, 1) + a4 * b4 * 36.0 * coef(3, 3);
      sum[b] += sign * add;
    }
  }
  return sum;
}

std::array<double, 179> basis_errors(const ReducedWindow& red, const AntiderivTables& tables,
                                     const QuadraticCoeffs& quad, const Window& win, bool puncture) {
  const auto I = basis_integrals(red, tables);
  const auto T = basis_trapezoid(quad, win, 6, puncture);
  std::array<double, 179> e{};
  for (int b = 0; b < 179; ++b) e[b] = I[b] - T[b];
  return e;
}

std::array<double, 179> basis_errors(const QuadraticCoeffs& quad, const Window& win, bool puncture) {
  const ReducedWindow red = reduce_window(quad, win.s_lo, win.s_hi, win.t_lo, win.t_hi);
  return basis_errors(red, window_tables(red, kMaxPower), quad, win, puncture);
}

Vec3 correction_E6(const CorrectionPlan& plan, const std::array<double, 179>& errors) {
  Vec3 out{};
  double acc[3] = {0, 0, 0};
  for (int i = 0; i < 3; ++i)
    for (int b = 0; b < 179; ++b) acc[i] += plan.c[i][b] * errors[b];
  out.x = acc[0];
  out.y = acc[1];
  out.z = acc[2];
  return out;
}

}  // namespace ctrap
