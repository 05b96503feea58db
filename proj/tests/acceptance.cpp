// Acceptance checks P1..P10. One PASS/FAIL line each; exit status 1 if any fails.
// Usage: acceptance [P1 P2 ...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ctrap/expand.hpp"
#include "ctrap/experiments.hpp"
#include "oracles.hpp"
#include "trapz_fixtures.hpp"

using namespace ctrap;
using std::numbers::pi;

namespace {

const std::string kScenes = CTRAP_SOURCE_DIR "/scenes/";

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail: " << what << "] ";
    }
  }
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

const std::vector<double> kDSweep{1e-4, 1e-3, 1e-2, 1e-1};

// Max-norm errors against `exact` over an interior or exterior patch of the sphere.
double patch_error(const Body& b, Kernel kernel, double d, bool interior, const EvalOptions& opt,
                   const std::function<Vec3(const Vec3&)>& exact) {
  double e = 0.0;
  for (const Vec3& x : patch_targets(b, 64, d, interior))
    e = std::max(e, max_abs(eval_layer(b, kernel, x, opt).value - exact(x)));
  return e;
}

void p1(Outcome& out) {
  const auto minus_f = [](const Vec3&) { return Vec3{-1, 0, 0}; };
  std::vector<double> worst, worst_rule;
  for (int n : {10, 20, 40, 80}) {
    Body b(StandardEllipsoid{1, 1, 1}, Pose{}, n, n / 2, n, n / 2);
    b.set_uniform_density({1, 0, 0});
    double lo = 1e300, hi = 0, hi_rule = 0;
    for (double d : kDSweep) {
      const double e = patch_error(b, Kernel::DLP, d, true, EvalOptions{true, {}, true}, minus_f);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
      hi_rule = std::max(hi_rule, patch_error(b, Kernel::DLP, d, true, EvalOptions{}, minus_f));
    }
    out.detail << "n=" << n << " max " << sci(hi) << " spread " << sci(hi / lo) << "; ";
    out.require(hi / lo < 30, "d spread at n=" + std::to_string(n));
    if (n == 40) out.require(hi <= 1e-4, "level at n=40");
    worst.push_back(hi);
    worst_rule.push_back(hi_rule);
  }
  out.detail << "orders";
  for (size_t i = 0; i + 1 < worst.size(); ++i) {
    const double o = std::log2(worst[i] / worst[i + 1]);
    out.detail << ' ' << sci(o);
    out.require(o >= 3.5, "order " + std::to_string(10 << i) + "->" + std::to_string(20 << i));
  }
  out.detail << " (puncture by rule only:";
  for (size_t i = 0; i + 1 < worst_rule.size(); ++i) out.detail << ' ' << sci(std::log2(worst_rule[i] / worst_rule[i + 1]));
  out.detail << ')';
}

void p2(Outcome& out) {
  std::vector<double> worst;
  for (int n : {10, 20, 40}) {
    Scene s = load_scene(kScenes + "sphere.scene", n);
    const Body& b = s.bodies[0];
    const Vec3 U = s.u_inf;
    const auto disturbance = [U](const Vec3& x) { return oracle::sphere_flow(U, x) - U; };
    double lo = 1e300, hi = 0;
    std::map<double, double> unc;
    for (double d : kDSweep) {
      const double e = patch_error(b, Kernel::SLP, d, false, EvalOptions{}, disturbance);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
      if (n >= 20 && (d == 1e-3 || d == 1e-2))
        unc[d] = patch_error(b, Kernel::SLP, d, false, EvalOptions{false, {}}, disturbance);
    }
    out.detail << "n=" << n << " corrected " << sci(hi) << " spread " << sci(hi / lo);
    out.require(hi / lo < 30, "d spread at n=" + std::to_string(n));
    if (n >= 20) {
      const double slope = std::log10(unc[1e-2] / unc[1e-3]);
      out.detail << " uncorrected slope " << sci(slope);
      out.require(std::abs(slope + 1.0) <= 0.25, "uncorrected slope at n=" + std::to_string(n));
    }
    out.detail << "; ";
    worst.push_back(hi);
  }
  out.detail << "orders";
  for (size_t i = 0; i + 1 < worst.size(); ++i) {
    const double o = std::log2(worst[i] / worst[i + 1]);
    out.detail << ' ' << sci(o);
    out.require(o >= 3.5, "corrected order");
  }
}

void p3(Outcome& out) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uC(-0.8, 0.8), uw(0.5, 6.0), ua(1.0 / 3.0, 3.0), uoff(-0.6, 0.6);
  std::uniform_int_distribution<int> upq(0, 12), uk(0, 5);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    ReducedWindow r;
    r.C = uC(rng);
    const double wa = uw(rng), wb = wa * ua(rng);
    r.a = -wa * (0.5 + uoff(rng));
    r.b = r.a + wa;
    r.c = -wb * (0.5 + uoff(rng));
    r.d = r.c + wb;
    const int p = upq(rng), q = upq(rng), k = uk(rng);
    const auto H = [&](double u, double v) {
      return std::pow(u, p) * std::pow(v, q) / std::pow(1 + u * u + 2 * r.C * u * v + v * v, k + 0.5);
    };
    const double ex = oracle::integrate2(H, r.a, r.b, r.c, r.d, 1e-13);
    const double mag = oracle::integrate2([&](double u, double v) { return std::abs(H(u, v)); }, r.a, r.b, r.c, r.d, 1e-6);
    // Odd integrands over nearly symmetric windows cancel; measure those against the size of |H|.
    const double scale = std::max(std::abs(ex), 1e-3 * mag);
    const double rel = std::abs(window_tables(r)(p, q, k) - ex) / scale;
    if (std::getenv("CTRAP_VERBOSE") && rel > 1e-9)
      std::printf("  p=%d q=%d k=%d C=%.3f [%.3f,%.3f]x[%.3f,%.3f] exact %.6e rel %.2e\n", p, q, k, r.C, r.a, r.b, r.c,
                  r.d, ex, rel);
    worst = std::max(worst, rel);
  }
  out.detail << "I_pqk worst relative error " << sci(worst) << " over 200 cases; ";
  out.require(worst <= 1e-8, "I_pqk accuracy");

  std::mt19937_64 rng2(11);
  std::uniform_real_distribution<double> uu(-3, 3);
  double worst_f = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double C = uC(rng2), v = uu(rng2), a = uu(rng2), b = uu(rng2);
    const auto closed = [&](long double u) {
      const long double rho = std::sqrt(1.0L + u * u + 2.0L * C * u * v + static_cast<long double>(v) * v);
      return -std::log(-u - static_cast<long double>(C) * v + rho);
    };
    const double ex = static_cast<double>(closed(b) - closed(a));
    const double got = antideriv_F(b, v, C)[0][0] - antideriv_F(a, v, C)[0][0];
    worst_f = std::max(worst_f, std::abs(got - ex) / std::max(std::abs(ex), 1.0));
  }
  const double ref = antideriv_F(1, 0, 0)[0][0] - antideriv_F(-1, 0, 0)[0][0];
  worst_f = std::max(worst_f, std::abs(ref - 2 * std::asinh(1.0)));
  out.detail << "F_00 worst error " << sci(worst_f);
  out.require(worst_f <= 1e-12, "F_00 closed form");
}

// Polynomial sum c[i][j] x^i y^j with i, j <= 5 and its mixed derivatives.
struct Poly55 {
  double c[6][6];

  double deriv(double x, double y, int dx, int dy) const {
    double s = 0.0;
    for (int i = dx; i <= 5; ++i)
      for (int j = dy; j <= 5; ++j) {
        double f = c[i][j];
        for (int t = 0; t < dx; ++t) f *= i - t;
        for (int t = 0; t < dy; ++t) f *= j - t;
        s += f * std::pow(x, i - dx) * std::pow(y, j - dy);
      }
    return s;
  }
  double integral(double a, double b, double cc, double d) const {
    double s = 0.0;
    for (int i = 0; i <= 5; ++i)
      for (int j = 0; j <= 5; ++j)
        s += c[i][j] * (std::pow(b, i + 1) - std::pow(a, i + 1)) / (i + 1) * (std::pow(d, j + 1) - std::pow(cc, j + 1)) /
             (j + 1);
    return s;
  }
};

void p4(Outcome& out) {
  const double exact = (std::exp(1.0) - 1) * (std::exp(1.0) - 1);
  for (int order : {2, 4, 6}) {
    std::vector<double> err;
    for (int n : {8, 16, 32}) err.push_back(std::abs(trap_rect(fixture::exp_grid(n), order) - exact));
    out.detail << "T" << order << " orders";
    for (int i = 0; i < 2; ++i) {
      const double o = std::log2(err[i] / err[i + 1]);
      out.detail << ' ' << sci(o);
      out.require(std::abs(o - order) <= 0.3, "T" + std::to_string(order) + " order");
    }
    out.detail << "; ";
  }

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uc(-1, 1);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Poly55 P;
    for (auto& row : P.c)
      for (double& v : row) v = uc(rng);
    const double a = -0.5 + 0.2 * uc(rng), b = 1.0 + 0.2 * uc(rng), c = -0.7 + 0.2 * uc(rng), d = 0.6 + 0.2 * uc(rng);
    auto D = [&P](int dx, int dy) { return [&P, dx, dy](double x, double y) { return P.deriv(x, y, dx, dy); }; };
    const RectGridFn g =
        fixture::sample(a, b, c, d, 5 + trial % 4, 4 + trial % 5, D(0, 0), D(1, 0), D(0, 1), D(3, 0), D(0, 3), D(1, 1),
                        D(1, 3), D(3, 1), D(3, 3));
    const double ex = P.integral(a, b, c, d);
    worst = std::max(worst, std::abs(trap_rect(g, 6) - ex) / std::max(1.0, std::abs(ex)));
  }
  out.detail << "T6 on degree-5 polynomials worst " << sci(worst) << "; ";
  out.require(worst <= 1e-13, "T6 polynomial exactness");

  const RectGridFn g = fixture::exp_grid(8);
  double worst_p = 0.0;
  for (int order : {2, 4, 6})
    for (int j = 0; j <= 8; ++j)
      for (int k = 0; k <= 8; ++k) {
        const double full = trap_rect(g, order);
        const double punct = trap_rect(g, order, Puncture{j, k});
        const double w = trap_weight(j, k, 8, 8) * g.dalpha() * g.dbeta() * g.at(j, k);
        worst_p = std::max(worst_p, std::abs(punct + w - full) / std::abs(full));
      }
  out.detail << "puncture identity worst " << sci(worst_p);
  out.require(worst_p <= 4 * std::numeric_limits<double>::epsilon(), "puncture identity");
}

void p5(Outcome& out) {
  // Window of 11 x 11 nodes with spacing h; the target lies above (0.5 d, 0.7 d) or (-0.3 d, 0.7 d)
  // relative to the centre node, so the nearest node stays within O(d) of the base point.
  const double h = 0.8;
  const QuadraticCoeffs shape{0, 1.2, 0.3, 0.8};
  for (auto [p, q, k] : {std::array{0, 0, 0}, {2, 0, 1}, {0, 3, 2}}) {
    const int slot = basis_slot(p, q, k);
    const int expect = p + q - (2 * k + 1);
    out.detail << "H" << p << q << k << " slopes";
    for (double off : {0.5, -0.3}) {
      std::vector<double> ld, le;
      for (int e = 0; e <= 8; ++e) {
        const double d = std::pow(10.0, -3 + 0.25 * e);
        Window w;
        w.ds = w.dt = h;
        w.j0 = w.k0 = 5;
        w.nja = 11;
        w.khi = 10;
        w.s_lo = -5 * h - off * d;
        w.s_hi = w.s_lo + 10 * h;
        w.t_lo = -5 * h - 0.7 * d;
        w.t_hi = w.t_lo + 10 * h;
        QuadraticCoeffs qc = shape;
        qc.d = d;
        const auto red = reduce_window(qc, w.s_lo, w.s_hi, w.t_lo, w.t_hi);
        const double err = basis_integrals(red, window_tables(red))[slot] - basis_trapezoid(qc, w, 2, false)[slot];
        ld.push_back(std::log(d));
        le.push_back(std::log(std::abs(err)));
      }
      const double s = slope_fit(ld, le);
      out.detail << ' ' << sci(s);
      out.require(std::abs(s - expect) <= 0.3, "H" + std::to_string(p) + std::to_string(q) + std::to_string(k));
    }
    out.detail << " (expect " << expect << "); ";
  }
}

void p6(Outcome& out) {
  std::set<BasisIndex> all;
  for (auto [r, m] : {std::pair{1, 0}, {3, 2}, {5, 3}})
    for (const BasisIndex& b : basis_set(r, m)) all.insert(b);
  out.detail << all.size() << " indices; ranges";
  out.require(all.size() == 179, "union size");
  out.require(all == std::set<BasisIndex>(basis_inventory().begin(), basis_inventory().end()),
              "inventory equals the union");
  std::map<int, std::pair<int, int>> range;
  for (const BasisIndex& b : all) {
    auto& r = range.try_emplace(2 * b.k + 1, std::pair{99, -1}).first->second;
    r.first = std::min(r.first, b.p + b.q);
    r.second = std::max(r.second, b.p + b.q);
  }
  const std::map<int, std::pair<int, int>> expect{{1, {0, 2}}, {3, {0, 4}},  {5, {0, 6}},
                                                  {7, {3, 8}}, {9, {6, 10}}, {11, {9, 12}}};
  for (const auto& [r, lh] : range) out.detail << ' ' << r << ':' << lh.first << '-' << lh.second;
  out.require(range == expect, "p+q ranges");
}

void p7(Outcome& out) {
  const std::string scene = kScenes + "ellipsoid321.scene";
  SolveOptions o;
  o.tol = 1e-10;
  Scene ref = load_scene(scene, 40);
  solve_densities(ref.bodies, ref.u_inf, o);
  std::vector<Vec3> targets;
  const Body& rb = ref.bodies[0];
  const int S = 64;
  for (int i = 0; i < S; ++i)
    for (int j = 0; j < S; ++j) {
      const double al = 0.5 * pi * i / (S - 1), be = 0.5 * pi * j / (S - 1);
      const Vec3 n = normalized(surface_element(rb.ell, Chart::Grid1, al, be).nJ);
      targets.push_back(param_point(rb.ell, Chart::Grid1, al, be) + 0.1 * n);
    }
  std::vector<Vec3> u_ref;
  for (const Vec3& x : targets) u_ref.push_back(velocity(ref, x));
  std::vector<double> corr;
  for (int m : {5, 10, 20}) {
    Scene s = load_scene(scene, m);
    solve_densities(s.bodies, s.u_inf, o);
    double ec = 0, eu = 0;
    for (size_t i = 0; i < targets.size(); ++i) {
      ec = std::max(ec, max_abs(velocity(s, targets[i]) - u_ref[i]));
      eu = std::max(eu, max_abs(velocity(s, targets[i], EvalOptions{false, {}}) - u_ref[i]));
    }
    out.detail << "m=" << m << " corrected " << sci(ec) << " uncorrected " << sci(eu) << "; ";
    if (m == 10) {
      out.detail << "ratio " << sci(eu / ec) << "; ";
      out.require(eu / ec >= 1e4, "corrected/uncorrected ratio at m=10");
    }
    corr.push_back(ec);
  }
  out.detail << "orders";
  for (size_t i = 0; i + 1 < corr.size(); ++i) {
    const double ord = std::log2(corr[i] / corr[i + 1]);
    out.detail << ' ' << sci(ord);
    out.require(ord >= 3.5, "corrected order");
  }
}

void p8(Outcome& out) {
  const Scene s = load_scene(kScenes + "sphere.scene", 40);
  const ShadowSpec spec = *s.shadow;
  const InsideTest inside = [&](const Vec3& x) { return inside_any(s, x); };
  auto run = [&](bool correction, int& crossed, double& worst) {
    const EvalOptions opt{correction, {}};
    const VelocityField u = [&](const Vec3& x) { return velocity(s, x, opt); };
    crossed = 0;
    worst = 0.0;
    for (const TraceRecord& r : shadow_experiment(u, inside, spec, 0.02)) {
      crossed += r.status == TraceStatus::Crossed;
      if (r.error) worst = std::max(worst, *r.error);
    }
  };
  int cc = 0, cu = 0;
  double wc = 0, wu = 0;
  run(true, cc, wc);
  run(false, cu, wu);
  const int total = spec.count * spec.count;
  out.detail << "corrected " << cc << '/' << total << " crossed, max error " << sci(wc) << "; uncorrected " << cu << '/'
             << total << " crossed, max error " << sci(wu);
  out.require(cc == total, "corrected particles all cross");
  out.require(wc < 1e-3, "corrected reversibility");
  out.require(cu < total || wu >= 100 * wc, "uncorrected run distinguishable");
}

// Closest points of two bodies by alternating projection from the best node.
std::pair<Vec3, Vec3> closest_points(const Body& A, const Body& B) {
  const auto proj = [](const Body& T, const Vec3& w) {
    const Vec3 x = standardize(T.pose, w);
    const Chart c = select_chart(T.ell, x);
    const auto [j, k] = nearest_node(T.ell, T.grid(c), x);
    const ProjectionResult p = project(T.ell, c, x, T.grid(c).alpha(j), T.grid(c).beta(k));
    return std::pair{unstandardize(T.pose, p.xb), p.d};
  };
  double best = 1e300;
  Vec3 pa, pb;
  for (int i = 0; i < A.grid1.node_count(); ++i) {
    const Vec3 w = A.node_point(Chart::Grid1, i);
    const auto [xb, d] = proj(B, w);
    if (d < best) {
      best = d;
      pa = w;
      pb = xb;
    }
  }
  for (int it = 0; it < 50; ++it) {
    pa = proj(A, pb).first;
    pb = proj(B, pa).first;
  }
  return {pa, pb};
}

// Self-convergence of the corrected velocity on mid-gap planes plus a streamline check at the finest mesh.
void self_convergence(Outcome& out, const std::string& name, const std::vector<double>& res, double t_max) {
  std::vector<Vec3> samples;
  std::vector<std::vector<Vec3>> values;
  Scene fine;
  for (double r : res) {
    Scene s = load_scene(kScenes + name + ".scene", r);
    SolveOptions o;
    o.tol = 1e-8;
    try {
      const SolveReport rep = solve_densities(s.bodies, s.u_inf, o);
      out.detail << name << ' ' << r << ": " << rep.iterations << " its; ";
    } catch (const SolverError& e) {
      out.require(false, name + " GMRES at " + sci(r));
      return;
    }
    if (samples.empty()) {
      for (size_t a = 0; a < s.bodies.size(); ++a)
        for (size_t b = a + 1; b < s.bodies.size(); ++b) {
          const auto [pa, pb] = closest_points(s.bodies[a], s.bodies[b]);
          const Vec3 c = 0.5 * (pa + pb), nrm = normalized(pb - pa);
          const Vec3 e1 = normalized(cross(nrm, Vec3{0.3, 0.5, 0.8})), e2 = cross(nrm, e1);
          for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
              const Vec3 x = c + (-0.2 + 0.1 * i) * e1 + (-0.2 + 0.1 * j) * e2;
              if (!inside_any(s, x)) samples.push_back(x);
            }
        }
    }
    std::vector<Vec3> u;
    for (const Vec3& x : samples) u.push_back(velocity(s, x));
    values.push_back(std::move(u));
    fine = std::move(s);
  }
  std::vector<double> diff;
  for (size_t i = 0; i + 1 < values.size(); ++i) {
    double m = 0.0;
    for (size_t k = 0; k < samples.size(); ++k) m = std::max(m, max_abs(values[i][k] - values[i + 1][k]));
    diff.push_back(m);
  }
  const double order = std::log2(diff[0] / diff[1]);
  out.detail << samples.size() << " samples, differences " << sci(diff[0]) << ' ' << sci(diff[1]) << " order "
             << sci(order) << "; ";
  out.require(order >= 3, name + " self-convergence order");
  int entered = 0;
  const auto lines = trace_streamlines(fine, streamline_seeds(fine), 0.1, t_max);
  for (const Streamline& l : lines) entered += l.status == TraceStatus::EnteredBody;
  out.detail << lines.size() << " streamlines, " << entered << " entered; ";
  out.require(entered == 0, name + " streamlines stay outside");
}

void p9(Outcome& out) {
  self_convergence(out, "two_spheres", {20, 40, 80}, 8.0);
  self_convergence(out, "three_ellipsoids", {0.25, 0.5, 1.0}, 12.0);
}

std::vector<Vec3> directions(int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Vec3> out;
  for (int i = 0; i < count; ++i) out.push_back(normalized(Vec3{g(rng), g(rng), g(rng)}));
  return out;
}

void p10(Outcome& out) {
  const StandardEllipsoid e{3, 2, 1};
  const Pose pose{pi / 3, pi / 4, 7 * pi / 8, Vec3{-1, -2, -0.5}};
  Body posed(e, pose, 40, 10, 30, 20), plain(e, Pose{}, 40, 10, 30, 20);
  for (int i = 0; i < posed.grid1.node_count(); ++i) {
    const Vec3 f{std::sin(0.1 * i), std::cos(0.05 * i), 0.3};
    plain.f1[i] = f;
    posed.f1[i] = f;
  }
  posed.transfer_density();
  plain.transfer_density();
  const Mat3 R = pose.rotation();
  double worst = 0.0;
  int corrected = 0;
  for (const Vec3& u : directions(40, 21))
    for (double d : {1e-3, 0.05, 0.5, 3.0}) {
      const Vec3 xs{(3 + d) * u.x, (2 + d) * u.y, (1 + d) * u.z};
      const LayerPair a = eval_layers(posed, unstandardize(pose, xs)), b = eval_layers(plain, xs);
      worst = std::max(worst, max_abs(a.slp - R * b.slp) / (1 + max_abs(b.slp)));
      worst = std::max(worst, max_abs(a.dlp - R * b.dlp) / (1 + max_abs(b.dlp)));
      corrected += b.flags.correct;
    }
  out.detail << "equivariance worst " << sci(worst) << " (" << corrected << " corrected targets); ";
  out.require(worst <= 1e-12, "posed versus standard");

  Body b(e, Pose{0.3, 0.2, 0.1, {1, 2, 3}}, 40, 10, 30, 20);
  b.set_uniform_density({1, 2, 3});
  int screened = 0, differ = 0;
  for (const Vec3& u : directions(200, 16)) {
    const Vec3 x = Vec3{1, 2, 3} + (4.0 + 6.0 * std::abs(u.x)) * u;
    const LayerPair c = eval_layers(b, x), n = eval_layers(b, x, {false, {}});
    if (c.flags.d_up > 6 * 3 * b.grid(c.flags.chart).h()) {
      ++screened;
      const bool same = c.slp.x == n.slp.x && c.slp.y == n.slp.y && c.slp.z == n.slp.z && c.dlp.x == n.dlp.x &&
                        c.dlp.y == n.dlp.y && c.dlp.z == n.dlp.z;
      differ += !same || c.flags.correct;
    }
  }
  out.detail << screened << " screened targets, " << differ << " differ";
  out.require(screened > 20 && differ == 0, "screened targets bit-identical");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> checks{
      {"P1", p1}, {"P2", p2}, {"P3", p3}, {"P4", p4}, {"P5", p5},
      {"P6", p6}, {"P7", p7}, {"P8", p8}, {"P9", p9}, {"P10", p10}};
  std::set<std::string> only(argv + 1, argv + argc);
  bool all_pass = true;
  for (const auto& [name, fn] : checks) {
    if (!only.empty() && !only.count(name)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s (%.0f s) %s\n", name.c_str(), o.pass ? "PASS" : "FAIL", secs, o.detail.str().c_str());
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
