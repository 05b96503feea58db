#include "ctrap/nearcore.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace ctrap {

double ReducedWindow::scale(int p, int q, int k) const {
  return std::pow(dist, p + q + 1 - 2 * k) / (std::pow(ca, p + 1) * std::pow(cb, q + 1));
}

ReducedWindow reduce_window(const QuadraticCoeffs& q, double s_lo, double s_hi, double t_lo, double t_hi) {
  if (!(q.ca2 > 0.0) || !(q.cb2 > 0.0)) throw ReductionError("reduce_window: non-positive metric coefficient");
  if (!(q.d > 0.0)) throw ReductionError("reduce_window: target distance must be positive");
  if (!(s_hi > s_lo) || !(t_hi > t_lo)) throw ReductionError("reduce_window: empty window");
  ReducedWindow r;
  r.ca = std::sqrt(q.ca2);
  r.cb = std::sqrt(q.cb2);
  r.C = q.cab / (r.ca * r.cb);
  if (!(std::abs(r.C) < 1.0)) throw ReductionError("reduce_window: |C| >= 1, metric not positive definite");
  r.dist = q.d;
  r.a = r.ca * s_lo / q.d;
  r.b = r.ca * s_hi / q.d;
  r.c = r.cb * t_lo / q.d;
  r.d = r.cb * t_hi / q.d;
  return r;
}

AntiderivRow antideriv_F(double u_in, double v_in, double C_in) {
  using R = RecReal;
  const R u = u_in, v = v_in, C = C_in;
  AntiderivRow F{};
  const R rho = std::sqrt(1.0 + u * u + 2.0 * C * u * v + v * v);
  const R w = u + C * v;
  const R A = (1.0 - C * C) * v * v + 1.0;
  // rho - w loses digits when w > 0; (rho - w)(rho + w) = A
  const R arg = w > 0.0 ? A / (rho + w) : rho - w;
  F[0][0] = -std::log(arg);
  std::array<R, 2 * kMaxK + 2> rpow{};  // rho^{-(2k-1)} for k = 0..K
  rpow[0] = rho;
  const R inv2 = 1.0 / (rho * rho);
  R cur = 1 / rho;
  for (int k = 1; k <= kMaxK; ++k) {
    rpow[k] = cur;  // rho^{-(2k-1)}
    cur *= inv2;
  }
  for (int k = 1; k <= kMaxK; ++k)
    F[0][k] = (w * rpow[k] + 2.0 * (k - 1) * F[0][k - 1]) / (A * (2 * k - 1));
  std::array<R, kMaxPower + 1> up{};
  up[0] = 1.0;
  for (int p = 1; p <= kMaxPower; ++p) up[p] = up[p - 1] * u;
  for (int p = 1; p <= kMaxPower; ++p) {
    const R fm2 = p >= 2 ? F[p - 2][0] : 0.0;
    F[p][0] = (up[p - 1] * rho - (2 * p - 1) * C * v * F[p - 1][0] - (p - 1) * (v * v + 1.0) * fm2) / p;
  }
  for (int k = 1; k <= kMaxK; ++k) {
    for (int p = 1; p <= kMaxPower; ++p) {
      const R fm2 = p >= 2 ? F[p - 2][k - 1] : 0.0;
      F[p][k] = (-up[p - 1] * rpow[k] + (p - 1) * fm2) / (2 * k - 1) - C * v * F[p - 1][k];
    }
  }
  return F;
}

OneDimTables onedim_tables(const ReducedWindow& red) {
  OneDimTables t;
  t.u = {red.a, red.b, red.a, red.b};
  t.v = {red.c, red.c, red.d, red.d};
  for (int i = 0; i < 4; ++i) {
    t.F[i] = antideriv_F(t.u[i], t.v[i], red.C);
    t.G[i] = antideriv_F(t.v[i], t.u[i], red.C);
  }
  return t;
}

double definite_F(int p, int k, double a, double b, double v, double C) {
  return static_cast<double>(antideriv_F(b, v, C)[p][k] - antideriv_F(a, v, C)[p][k]);
}

RecReal whole_plane_I005(double C) {
  return 2 * std::numbers::pi_v<RecReal> / (9 * std::sqrt(1 - static_cast<RecReal>(C) * C));
}

const GaussRule& gauss_legendre(int n) {
  using R = RecReal;
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule g;
  g.x.resize(n);
  g.w.resize(n);
  g.xl.resize(n);
  g.wl.resize(n);
  const auto legendre = [n](R x, R& dp) {
    R p0 = 1, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const R p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1);
    return p1;
  };
  for (int i = 0; i < n; ++i) {
    R x = std::cos(std::numbers::pi_v<R> * (i + R(0.75)) / (n + R(0.5)));
    R dp = 0;
    for (int it2 = 0; it2 < 100; ++it2) {
      const R dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) < 1e-19L) break;
    }
    legendre(x, dp);
    g.xl[i] = x;
    g.wl[i] = 2 / ((1 - x * x) * dp * dp);
    g.x[i] = static_cast<double>(g.xl[i]);
    g.w[i] = static_cast<double>(g.wl[i]);
  }
  return cache.emplace(n, std::move(g)).first->second;
}

namespace {

using R = RecReal;

// Breakpoints graded geometrically away from the origin, clipped to [lo, hi].
std::vector<R> graded_breaks(R lo, R hi) {
  std::vector<R> br{lo, hi};
  if (lo < 0 && hi > 0) br.push_back(0);
  for (R s = 0.25; s < 1e12L; s *= 2) {
    if (s > lo && s < hi) br.push_back(s);
    if (-s > lo && -s < hi) br.push_back(-s);
  }
  std::sort(br.begin(), br.end());
  return br;
}

template <class Fn>
R panel_sum(const std::vector<R>& br, Fn&& f) {
  const GaussRule& g = gauss_legendre(16);
  R total = 0;
  for (size_t i = 0; i + 1 < br.size(); ++i) {
    const R m = (br[i] + br[i + 1]) / 2, h = (br[i + 1] - br[i]) / 2;
    if (h <= 0) continue;
    R s = 0;
    for (size_t q = 0; q < g.xl.size(); ++q) s += g.wl[q] * f(m + h * g.xl[q]);
    total += h * s;
  }
  return total;
}

// F_05(u; v) = int rho_u^{-11} du; the k >= 1 recursion needs no logarithm.
R antideriv_F05(R u, R v, R C) {
  const R rho2 = 1 + u * u + 2 * C * u * v + v * v;
  const R w = u + C * v;
  const R A = (1 - C * C) * v * v + 1;
  const R inv = 1 / std::sqrt(rho2), inv2 = 1 / rho2;
  R r = inv;  // rho^{-(2k-1)}
  R F = w * r / A;
  for (int k = 2; k <= 5; ++k) {
    r *= inv2;
    F = (w * r + 2 * (k - 1) * F) / (A * (2 * k - 1));
  }
  return F;
}

// int_x^inf (1 + beta v^2)^{-5} dv for x >= 0.
R line_tail(R x, R beta) {
  const R sb = std::sqrt(beta);
  const R e = 1 + beta * x * x;
  // K_n(x) = int_0^x and K_n(inf) by the standard reduction in n
  R K = std::atan(sb * x) / sb, Kinf = std::numbers::pi_v<R> / (2 * sb);
  R ep = 1;
  for (int n = 2; n <= 5; ++n) {
    ep *= e;
    const R f = R(2 * n - 3) / (2 * (n - 1));
    K = x / (2 * (n - 1) * ep) + f * K;
    Kinf *= f;
  }
  return Kinf - K;
}

}  // namespace

RecReal init_I005(const ReducedWindow& red) {
  const R C = red.C;
  const R beta = 1 - C * C;
  const R kLine = R(256) / 315;
  // int_R rho_u^{-11} du = (256/315) (1 + beta v^2)^{-5}
  auto line = [&](R v) {
    const R A = 1 + beta * v * v;
    const R A2 = A * A;
    return kLine / (A2 * A2 * A);
  };
  // v outside [c, d]: closed form
  auto tail = [&](R x) { return x >= 0 ? line_tail(x, beta) : 2 * line_tail(0, beta) - line_tail(-x, beta); };
  R ext = kLine * (tail(red.d) + (2 * line_tail(0, beta) - tail(red.c)));
  // u outside [a, b] for v inside [c, d]; beyond |v| = cut the integrand is below line(v),
  // whose remaining mass is under 1e-26
  const R cut = 1000 * std::pow(beta, R(-5) / 9);
  const R lo = std::max(R(red.c), -cut), hi = std::min(R(red.d), cut);
  if (lo < hi)
    ext += panel_sum(graded_breaks(lo, hi), [&](R v) {
      return line(v) - (antideriv_F05(red.b, v, C) - antideriv_F05(red.a, v, C));
    });
  return whole_plane_I005(red.C) - ext;
}

namespace {

// Corner signs for Delta[phi] with corner order (a,c) (b,c) (a,d) (b,d).
constexpr std::array<RecReal, 4> kSign = {1, -1, -1, 1};

template <class Fn>
RecReal corner_delta(const OneDimTables& t, Fn&& f) {
  RecReal s = 0;
  for (int i = 0; i < 4; ++i) s += kSign[i] * f(i, t.u[i], t.v[i], t.F[i], t.G[i]);
  return s;
}

}  // namespace

AntiderivTables fill_I_table(const ReducedWindow& red, const OneDimTables& tabs, RecReal I005, int max_total) {
  using R = RecReal;
  std::array<std::array<std::array<R, kMaxK + 1>, kMaxPower + 1>, kMaxPower + 1> I{};
  const R C = red.C;
  const R om = 1 - C * C;
  auto g = [&](int p, int q, int k) -> R { return (p < 0 || q < 0) ? 0 : I[p][q][k]; };
  std::array<std::array<R, kMaxPower + 2>, 4> U{}, V{};
  for (int i = 0; i < 4; ++i) {
    U[i][0] = V[i][0] = 1.0;
    for (int e = 1; e <= kMaxPower + 1; ++e) {
      U[i][e] = U[i][e - 1] * tabs.u[i];
      V[i][e] = V[i][e - 1] * tabs.v[i];
    }
  }

  I[0][0][5] = I005;
  for (int k = 4; k >= 0; --k) {
    const R br = corner_delta(tabs, [&](int, R u, R v, const AntiderivRow& F, const AntiderivRow& G) {
      return u * G[0][k] + v * F[0][k];
    });
    I[0][0][k] = ((2 * k + 1) * I[0][0][k + 1] - br) / (2 * k - 1);
  }

  for (int KK = 1; KK <= kMaxK; ++KK) {
    const int k = KK - 1;
    const R den = (2 * k + 1) * om;
    for (int q = 0; q < 2 * KK; ++q) {
      const int p = 2 * KK - 1 - q;
      if (p > kMaxPower || q > kMaxPower) continue;
      if (p >= 1) {
        const R br = corner_delta(tabs, [&](int i, R, R, const AntiderivRow& F, const AntiderivRow& G) {
          return C * V[i][q] * F[p - 1][k] - U[i][p - 1] * G[q][k];
        });
        I[p][q][KK] = ((p - 1) * g(p - 2, q, k) - C * q * g(p - 1, q - 1, k) + br) / den;
      } else {
        const R br = corner_delta(tabs, [&](int i, R, R, const AntiderivRow& F, const AntiderivRow& G) {
          return C * U[i][p] * G[q - 1][k] - V[i][q - 1] * F[p][k];
        });
        I[p][q][KK] = ((q - 1) * g(p, q - 2, k) - C * p * g(p - 1, q - 1, k) + br) / den;
      }
    }
  }

  for (int k = 0; k <= kMaxK; ++k) {
    for (int q = 0; q <= kMaxPower; ++q) {
      for (int p = 0; p <= kMaxPower && p + q <= max_total; ++p) {
        if (p == 0 && q == 0) continue;
        if (2 * k - p - q - 1 == 0) continue;
        const R den = om * (2 * k - p - q - 1);
        if (q == 0) {
          const R br = corner_delta(tabs, [&](int i, R, R v, const AntiderivRow& F, const AntiderivRow& G) {
            return C * F[p - 1][k] - om * v * F[p][k] - (U[i][p - 1] + om * U[i][p + 1]) * G[0][k];
          });
          I[p][q][k] = ((p - 1) * g(p - 2, q, k) + br) / den;
        } else {
          const R br = corner_delta(tabs, [&](int i, R, R, const AntiderivRow& F, const AntiderivRow& G) {
            return C * U[i][p] * G[q - 1][k] - om * U[i][p + 1] * G[q][k] -
                   (V[i][q - 1] + om * V[i][q + 1]) * F[p][k];
          });
          I[p][q][k] = ((q - 1) * g(p, q - 2, k) - C * p * g(p - 1, q - 1, k) + br) / den;
        }
      }
    }
  }
  AntiderivTables T;
  for (int p = 0; p <= kMaxPower; ++p)
    for (int q = 0; q <= kMaxPower; ++q)
      for (int k = 0; k <= kMaxK; ++k) T.I[p][q][k] = static_cast<double>(I[p][q][k]);
  return T;
}

AntiderivTables window_tables(const ReducedWindow& red, int max_total) {
  const OneDimTables tabs = onedim_tables(red);
  return fill_I_table(red, tabs, init_I005(red), max_total);
}

std::array<double, kMaxK + 1> forward_I00k(const ReducedWindow& red, const OneDimTables& tabs, double I000) {
  (void)red;
  std::array<double, kMaxK + 1> out{};
  out[0] = I000;
  for (int k = 0; k < kMaxK; ++k) {
    const double br = corner_delta(tabs, [&](int, double u, double v, const AntiderivRow& F, const AntiderivRow& G) {
      return u * G[0][k] + v * F[0][k];
    });
    out[k + 1] = ((2 * k - 1) * out[k] + br) / (2 * k + 1);
  }
  return out;
}

}  // namespace ctrap
