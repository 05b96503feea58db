#include "ctrap/stokes.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>

#include "ctrap/nearcore.hpp"

namespace ctrap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSlp = 1.0 / (8.0 * kPi);
constexpr double kDlp = -3.0 / (4.0 * kPi);

bool finite(const Vec3& v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

}  // namespace

NodeGeometry node_geometry(const StandardEllipsoid& ell, const ChartGrid& grid) {
  if (grid.m < 4) throw EvaluationError("charts need m >= 4");
  NodeGeometry g;
  const int count = grid.node_count();
  g.x.resize(count);
  g.nJ.resize(count);
  g.J.resize(count);
  g.w.resize(count);
  const int m = grid.m;
  std::vector<double> row(m + 1, 1.0);
  row[0] = row[m] = 0.5;
  row[1] += 16.0 / 144.0;
  row[m - 1] += 16.0 / 144.0;
  row[2] -= 2.0 / 144.0;
  row[m - 2] -= 2.0 / 144.0;
  const double cell = grid.dalpha() * grid.dbeta();
  for (int k = 0; k <= m; ++k)
    for (int j = 0; j < grid.n; ++j) {
      const int i = grid.node_index(j, k);
      const double al = grid.alpha(j), be = grid.beta(k);
      g.x[i] = param_point(ell, grid.chart, al, be);
      const SurfaceElement se = surface_element(ell, grid.chart, al, be);
      g.nJ[i] = se.nJ;
      g.J[i] = se.J;
      g.w[i] = cell * row[k];
    }
  return g;
}

Body::Body(const StandardEllipsoid& e, const Pose& p, int n1, int m1, int n2, int m2)
    : ell(e), pose(p), grid1(Chart::Grid1, n1, m1), grid2(Chart::Grid2, n2, m2) {
  geo1 = node_geometry(ell, grid1);
  geo2 = node_geometry(ell, grid2);
  f1.assign(grid1.node_count(), Vec3{});
  f2.assign(grid2.node_count(), Vec3{});
}

void Body::set_uniform_density(const Vec3& f_world) {
  const Vec3 f = rotate_in(pose, f_world);
  f1.assign(grid1.node_count(), f);
  f2.assign(grid2.node_count(), f);
}

void Body::transfer_density() {
  f2.resize(grid2.node_count());
  for (int i = 0; i < grid2.node_count(); ++i) {
    const auto [al, be] = chart_coords(ell, Chart::Grid1, geo2.x[i]);
    f2[i] = interpolate_density(grid1, f1, al, be);
  }
}

Vec3 Body::node_point(Chart c, int index) const { return unstandardize(pose, geometry(c).x[index]); }

KernelTerms kernel_terms(const Vec3& x, const Vec3& x_o, const Vec3& f, const Vec3& nJ, double J) {
  const Vec3 xh = x - x_o;
  const double r2 = dot(xh, xh);
  if (r2 == 0.0) throw EvaluationError("kernel evaluated at a coincident point");
  const double inv = 1.0 / std::sqrt(r2), inv3 = inv * inv * inv;
  const double fx = dot(f, xh);
  KernelTerms t;
  t.slp = kSlp * J * (inv * f + (fx * inv3) * xh);
  t.dlp = (kDlp * fx * dot(xh, nJ) * inv3 * inv * inv) * xh;
  return t;
}

TargetPlan plan_target(const Body& body, const Vec3& x_world, const EvalOptions& opt) {
  TargetPlan p;
  const Vec3 x = standardize(body.pose, x_world);
  p.x_std = x;
  const StandardEllipsoid& ell = body.ell;
  const Chart chart = opt.chart.value_or(select_chart(ell, x));
  const ChartGrid& grid = body.grid(chart);
  p.flags.chart = chart;
  p.flags.d_up = distance_upper_bound(ell, x);
  const double thr = 6.0 * ell.max_axis() * grid.h();
  if (!opt.correction || p.flags.d_up > thr) return p;

  const auto [j, k] = nearest_node(ell, grid, x);
  const ProjectionResult pr = project(ell, chart, x, grid.alpha(j), grid.beta(k));
  if (!pr.converged && !(pr.residual < 1e-6))
    throw EvaluationError("projection onto the surface did not converge (residual " + std::to_string(pr.residual) +
                          ")");
  p.flags.d = pr.d;
  if (pr.converged && std::fabs(pr.d) >= thr) return p;
  if (pr.d == 0.0) throw EvaluationError("target lies on the surface; use the on-surface rule");

  const SurfaceJet jet = param_jet(ell, chart, pr.alpha, pr.beta, 2);
  const QuadraticCoeffs quad = quadratic_coeffs(jet, x);
  if (!quad.positive_definite()) throw EvaluationError("local quadratic form is not positive definite");
  if (pr.d < 0.0) {
    const CurvatureData cd = curvature_data(jet);
    if (!is_positive_definite(pr.d, cd.H, cd.K))
      throw EvaluationError("interior target is beyond the osculating sphere");
  }
  p.flags.correct = true;

  const Window win = make_window(grid, pr.alpha, pr.beta, window_half_width(grid.n));
  const double ds = std::max(norm(jet.xa()) * grid.dalpha(), norm(jet.xb()) * grid.dbeta());
  if (opt.force_puncture) {
    p.flags.roundoff = true;
    p.puncture = Puncture{win.j0, win.k0};
  } else if (std::fabs(pr.d) < 0.25 * ds) {
    const Vec3 node = body.geometry(chart).x[grid.node_index(win.j0, win.k0)];
    if (norm(node - pr.xb) < 0.25 * ds) {
      p.flags.roundoff = true;
      p.puncture = Puncture{win.j0, win.k0};
    }
  }
  p.geo = geometry_plan(ell, chart, pr.alpha, pr.beta, x, quad);
  p.stencil = density_stencil(grid, pr.alpha, pr.beta);
  p.errors = basis_errors(quad, win, p.flags.roundoff);
  return p;
}

namespace {

// Closed-surface T4 of both kernels at a standard-frame target, optionally skipping one node.
LayerPair trap_layers(const Body& body, Chart chart, const Vec3& x, std::span<const Vec3> density, int skip) {
  const NodeGeometry& g = body.geometry(chart);
  Vec3 s{}, d{};
  const int count = body.grid(chart).node_count();
  for (int i = 0; i < count; ++i) {
    if (i == skip || g.w[i] == 0.0) continue;
    const Vec3 xh = g.x[i] - x;
    const double r2 = dot(xh, xh);
    const double inv = 1.0 / std::sqrt(r2), inv2 = inv * inv;
    const Vec3& f = density[i];
    const double fx = dot(f, xh);
    s += (g.w[i] * g.J[i] * inv) * (f + (fx * inv2) * xh);
    d += (g.w[i] * fx * dot(xh, g.nJ[i]) * inv2 * inv2 * inv) * xh;
  }
  LayerPair out;
  out.slp = kSlp * s;
  out.dlp = kDlp * d;
  return out;
}

}  // namespace

LayerPair apply_plan(const Body& body, const TargetPlan& plan, std::span<const Vec3> density) {
  const ChartGrid& grid = body.grid(plan.flags.chart);
  const int skip = plan.puncture ? grid.node_index(plan.puncture->j, plan.puncture->k) : -1;
  LayerPair out = trap_layers(body, plan.flags.chart, plan.x_std, density, skip);
  out.flags = plan.flags;
  if (plan.flags.correct) {
    const auto fjet = density_jet(plan.stencil, density);
    out.slp += correction_E6(assemble_plan(Kernel::SLP, plan.geo, fjet), plan.errors);
    out.dlp += correction_E6(assemble_plan(Kernel::DLP, plan.geo, fjet), plan.errors);
  }
  if (!finite(out.slp) || !finite(out.dlp)) throw EvaluationError("layer potential is not finite");
  return out;
}

LayerPair eval_layers(const Body& body, const Vec3& x_world, const EvalOptions& opt) {
  const TargetPlan plan = plan_target(body, x_world, opt);
  LayerPair r = apply_plan(body, plan, body.density(plan.flags.chart));
  r.slp = rotate_back(body.pose, r.slp);
  r.dlp = rotate_back(body.pose, r.dlp);
  return r;
}

LayerResult eval_layer(const Body& body, Kernel kernel, const Vec3& x_world, const EvalOptions& opt) {
  const LayerPair r = eval_layers(body, x_world, opt);
  return {kernel == Kernel::SLP ? r.slp : r.dlp, r.flags};
}

LayerPair onsurface_layers(const Body& body, const Vec3& t, std::span<const Vec3> density1, const OnSurfaceRule& rule) {
  const StandardEllipsoid& e = body.ell;
  const int n_phi = rule.n_phi > 0 ? rule.n_phi : body.grid1.n;
  const int n_theta = rule.n_theta > 0 ? rule.n_theta : body.grid1.m + 1;
  const Vec3 e3 = normalized(Vec3{t.x / e.a, t.y / e.b, t.z / e.c});
  const Vec3 axis = std::fabs(e3.x) < 0.6 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  const Vec3 e1 = normalized(cross(e3, axis));
  const Vec3 e2 = cross(e3, e1);
  const GaussRule& gl = gauss_legendre(n_theta);
  const double abc = e.a * e.b * e.c;
  std::vector<double> cph(n_phi), sph(n_phi);
  for (int i = 0; i < n_phi; ++i) {
    cph[i] = std::cos(2.0 * kPi * i / n_phi);
    sph[i] = std::sin(2.0 * kPi * i / n_phi);
  }
  Vec3 s{}, d{};
  for (int l = 0; l < n_theta; ++l) {
    const double th = 0.5 * kPi * (gl.x[l] + 1.0);
    const double st = std::sin(th), ct = std::cos(th);
    const double wl = 0.5 * kPi * gl.w[l] * (2.0 * kPi / n_phi) * abc * st;
    Vec3 srow{}, drow{};
    for (int i = 0; i < n_phi; ++i) {
      const Vec3 sig = (st * cph[i]) * e1 + (st * sph[i]) * e2 + ct * e3;
      const Vec3 y{e.a * sig.x, e.b * sig.y, e.c * sig.z};
      const Vec3 nJ{sig.x / e.a, sig.y / e.b, sig.z / e.c};
      const double J = norm(nJ);
      const double al = std::atan2(sig.y, sig.x), be = std::asin(std::clamp(sig.z, -1.0, 1.0));
      const Vec3 f = interpolate_density(body.grid1, density1, al, be);
      const Vec3 xh = y - t;
      const double r2 = dot(xh, xh);
      const double inv = 1.0 / std::sqrt(r2), inv2 = inv * inv;
      const double fx = dot(f, xh);
      srow += (J * inv) * (f + (fx * inv2) * xh);
      drow += (fx * dot(xh, nJ) * inv2 * inv2 * inv) * xh;
    }
    s += wl * srow;
    d += wl * drow;
  }
  LayerPair out;
  out.slp = kSlp * s;
  out.dlp = kDlp * d;
  if (!finite(out.slp) || !finite(out.dlp)) throw EvaluationError("on-surface potential is not finite");
  return out;
}

LayerResult eval_onsurface(const Body& body, Kernel kernel, Chart chart, int node, const OnSurfaceRule& rule) {
  const LayerPair r = onsurface_layers(body, body.geometry(chart).x.at(node), body.f1, rule);
  return {rotate_back(body.pose, kernel == Kernel::SLP ? r.slp : r.dlp), EvalFlags{false, false, chart, 0.0, 0.0}};
}

SolveReport gmres(const std::function<void(std::span<const double>, std::span<double>)>& apply,
                  std::span<const double> rhs, std::span<double> x, double tol, int restart, int max_iter,
                  const std::function<void(int, double)>& on_iteration) {
  const std::size_t n = rhs.size();
  auto nrm = [](std::span<const double> v) {
    double s = 0.0;
    for (double a : v) s += a * a;
    return std::sqrt(s);
  };
  SolveReport rep;
  const double bnorm = nrm(rhs);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return rep;
  }
  std::vector<double> r(n), w(n);
  std::vector<std::vector<double>> V;
  std::vector<std::vector<double>> H;
  double res_prev_cycle = std::numeric_limits<double>::infinity();
  while (true) {
    apply(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    double beta = nrm(r);
    rep.residual = beta / bnorm;
    if (rep.history.empty()) rep.history.push_back(rep.residual);
    if (rep.residual <= tol) return rep;
    if (rep.iterations >= max_iter)
      throw SolverError("GMRES reached the iteration limit at relative residual " + std::to_string(rep.residual));
    if (!(rep.residual < res_prev_cycle * (1.0 - 1e-12)))
      throw SolverError("GMRES stagnated at relative residual " + std::to_string(rep.residual));
    res_prev_cycle = rep.residual;

    V.assign(1, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    H.assign(restart + 1, std::vector<double>(restart, 0.0));
    std::vector<double> cs(restart), sn(restart), g(restart + 1, 0.0);
    g[0] = beta;
    int kdone = 0;
    for (int k = 0; k < restart && rep.iterations < max_iter; ++k) {
      apply(V[k], w);
      for (int i = 0; i <= k; ++i) {
        double h = 0.0;
        for (std::size_t t = 0; t < n; ++t) h += w[t] * V[i][t];
        H[i][k] = h;
        for (std::size_t t = 0; t < n; ++t) w[t] -= h * V[i][t];
      }
      const double hn = nrm(w);
      H[k + 1][k] = hn;
      for (int i = 0; i < k; ++i) {
        const double a = H[i][k], b = H[i + 1][k];
        H[i][k] = cs[i] * a + sn[i] * b;
        H[i + 1][k] = -sn[i] * a + cs[i] * b;
      }
      const double den = std::hypot(H[k][k], H[k + 1][k]);
      cs[k] = H[k][k] / den;
      sn[k] = H[k + 1][k] / den;
      H[k][k] = den;
      H[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      ++rep.iterations;
      kdone = k + 1;
      const double est = std::fabs(g[k + 1]) / bnorm;
      rep.history.push_back(est);
      if (on_iteration) on_iteration(rep.iterations, est);
      if (est <= tol || hn == 0.0) break;
      V.emplace_back(n);
      for (std::size_t t = 0; t < n; ++t) V[k + 1][t] = w[t] / hn;
    }
    std::vector<double> y(kdone);
    for (int i = kdone - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < kdone; ++j) s -= H[i][j] * y[j];
      y[i] = s / H[i][i];
    }
    for (int j = 0; j < kdone; ++j)
      for (std::size_t t = 0; t < n; ++t) x[t] += y[j] * V[j][t];
  }
}

namespace {

// Off-body interaction of one target with one source body; only corrected plans are kept.
struct Interaction {
  Vec3 x_std;
  Chart chart = Chart::Grid1;
  int plan = -1;
};

}  // namespace

SolveReport solve_densities(std::vector<Body>& bodies, const Vec3& u_inf, const SolveOptions& opt) {
  const int nb = static_cast<int>(bodies.size());
  std::vector<int> offset(nb + 1, 0);
  for (int k = 0; k < nb; ++k) offset[k + 1] = offset[k] + bodies[k].grid1.node_count();
  const std::size_t total = static_cast<std::size_t>(offset[nb]) * 3;

  // links[k][kk][i]: node i of body k as a target of body kk
  std::vector<std::vector<std::vector<Interaction>>> links(nb);
  std::vector<TargetPlan> plans;
  for (int k = 0; k < nb; ++k) {
    links[k].resize(nb);
    for (int kk = 0; kk < nb; ++kk) {
      if (kk == k) continue;
      auto& v = links[k][kk];
      v.reserve(bodies[k].grid1.node_count());
      for (int i = 0; i < bodies[k].grid1.node_count(); ++i) {
        TargetPlan p = plan_target(bodies[kk], bodies[k].node_point(Chart::Grid1, i), opt.eval);
        Interaction link{p.x_std, p.flags.chart, -1};
        if (p.flags.correct) {
          link.plan = static_cast<int>(plans.size());
          plans.push_back(std::move(p));
        }
        v.push_back(link);
      }
    }
  }

  std::vector<Body> work = bodies;
  auto load = [&](std::span<const double> v) {
    for (int k = 0; k < nb; ++k) {
      for (int i = 0; i < work[k].grid1.node_count(); ++i) {
        const std::size_t o = 3 * static_cast<std::size_t>(offset[k] + i);
        work[k].f1[i] = Vec3{v[o], v[o + 1], v[o + 2]};
      }
      work[k].transfer_density();
    }
  };
  auto apply = [&](std::span<const double> v, std::span<double> out) {
    load(v);
    for (int k = 0; k < nb; ++k) {
      const Mat3 rk = work[k].pose.rotation();
      for (int i = 0; i < work[k].grid1.node_count(); ++i) {
        Vec3 acc = 0.5 * work[k].f1[i] + onsurface_layers(work[k], work[k].geo1.x[i], work[k].f1, opt.rule).sum();
        Vec3 other{};
        for (int kk = 0; kk < nb; ++kk) {
          if (kk == k) continue;
          const Interaction& link = links[k][kk][i];
          const auto dens = work[kk].density(link.chart);
          const LayerPair lp = link.plan >= 0 ? apply_plan(work[kk], plans[link.plan], dens)
                                             : trap_layers(work[kk], link.chart, link.x_std, dens, -1);
          other += work[kk].pose.rotation() * lp.sum();
        }
        acc += rk.transposed() * other;
        const std::size_t o = 3 * static_cast<std::size_t>(offset[k] + i);
        out[o] = acc.x;
        out[o + 1] = acc.y;
        out[o + 2] = acc.z;
      }
    }
  };

  std::vector<double> rhs(total), x(total, 0.0);
  for (int k = 0; k < nb; ++k) {
    const Vec3 u = rotate_in(bodies[k].pose, -1.0 * u_inf);
    for (int i = 0; i < bodies[k].grid1.node_count(); ++i) {
      const std::size_t o = 3 * static_cast<std::size_t>(offset[k] + i);
      rhs[o] = u.x;
      rhs[o + 1] = u.y;
      rhs[o + 2] = u.z;
    }
  }
  SolveReport rep = gmres(apply, rhs, x, opt.tol, opt.restart, opt.max_iter, opt.on_iteration);
  load(x);
  for (int k = 0; k < nb; ++k) {
    bodies[k].f1 = work[k].f1;
    bodies[k].f2 = work[k].f2;
  }
  return rep;
}

namespace {

constexpr char kMagic[8] = {'C', 'T', 'R', 'A', 'P', 'D', 'E', 'N'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& o, T v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint is truncated");
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const std::vector<Body>& bodies) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw std::runtime_error("cannot open " + path + " for writing");
  o.write(kMagic, 8);
  put<std::uint32_t>(o, kVersion);
  put<std::uint32_t>(o, static_cast<std::uint32_t>(bodies.size()));
  for (const Body& b : bodies) {
    for (double v : {b.ell.a, b.ell.b, b.ell.c, b.pose.phi, b.pose.theta, b.pose.psi, b.pose.s.x, b.pose.s.y,
                     b.pose.s.z})
      put<double>(o, v);
    for (Chart c : {Chart::Grid1, Chart::Grid2}) {
      const ChartGrid& g = b.grid(c);
      put<std::uint32_t>(o, static_cast<std::uint32_t>(g.n));
      put<std::uint32_t>(o, static_cast<std::uint32_t>(g.m));
      for (const Vec3& f : b.density(c)) {
        put<double>(o, f.x);
        put<double>(o, f.y);
        put<double>(o, f.z);
      }
    }
  }
  if (!o) throw std::runtime_error("failed writing " + path);
}

std::vector<Body> read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error(path + " is not a density checkpoint");
  if (get<std::uint32_t>(in) != kVersion) throw std::runtime_error("unsupported checkpoint version");
  const std::uint32_t nb = get<std::uint32_t>(in);
  std::vector<Body> bodies;
  for (std::uint32_t k = 0; k < nb; ++k) {
    double h[9];
    for (double& v : h) v = get<double>(in);
    std::uint32_t dims[4];
    std::vector<Vec3> f[2];
    for (int c = 0; c < 2; ++c) {
      dims[2 * c] = get<std::uint32_t>(in);
      dims[2 * c + 1] = get<std::uint32_t>(in);
      f[c].resize(static_cast<std::size_t>(dims[2 * c]) * (dims[2 * c + 1] + 1));
      for (Vec3& v : f[c]) {
        v.x = get<double>(in);
        v.y = get<double>(in);
        v.z = get<double>(in);
      }
    }
    Body b(StandardEllipsoid{h[0], h[1], h[2]}, Pose{h[3], h[4], h[5], Vec3{h[6], h[7], h[8]}},
           static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2]), static_cast<int>(dims[3]));
    b.f1 = std::move(f[0]);
    b.f2 = std::move(f[1]);
    bodies.push_back(std::move(b));
  }
  return bodies;
}

}  // namespace ctrap
