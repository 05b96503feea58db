#include "ctrap/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace ctrap {

std::vector<Vec3> patch_targets(const Body& body, int samples, double d, bool interior) {
  if (samples < 2) throw std::invalid_argument("patch needs at least 2 samples per side");
  const double q = std::numbers::pi / 4;
  std::vector<Vec3> out;
  out.reserve(static_cast<size_t>(samples * samples));
  for (int i = 0; i < samples; ++i)
    for (int j = 0; j < samples; ++j) {
      const double al = q * i / (samples - 1), be = q * j / (samples - 1);
      const Vec3 x = param_point(body.ell, Chart::Grid1, al, be);
      const Vec3 n = normalized(surface_element(body.ell, Chart::Grid1, al, be).nJ);
      out.push_back(unstandardize(body.pose, x + (interior ? -d : d) * n));
    }
  return out;
}

std::optional<VelocityField> exact_velocity(const Scene& scene) {
  if (scene.bodies.size() != 1) return std::nullopt;
  const Body& b = scene.bodies[0];
  if (scene.density == DensityMode::AnalyticSphere && scene.use_slp && b.pose.is_identity()) {
    const Vec3 U = scene.u_inf;
    return [U](const Vec3& x) {
      const double r = norm(x), ux = dot(U, x);
      if (r < 1.0) return Vec3{};
      return U - 0.75 * (U / r + (ux / (r * r * r)) * x) - 0.25 * (U / (r * r * r) - (3.0 * ux / std::pow(r, 5)) * x);
    };
  }
  if (scene.density == DensityMode::Uniform && scene.use_dlp && !scene.use_slp) {
    const Vec3 U = scene.u_inf, f = scene.uniform_density;
    const StandardEllipsoid ell = b.ell;
    const Pose pose = b.pose;
    return [U, f, ell, pose](const Vec3& x) { return ell.level(standardize(pose, x)) < 1.0 ? U - f : U; };
  }
  return std::nullopt;
}

std::optional<SolveReport> prepare_densities(Scene& scene, const std::optional<std::string>& checkpoint,
                                             const SolveOptions& opt) {
  if (scene.density != DensityMode::Solve) return std::nullopt;
  if (checkpoint) {
    std::vector<Body> loaded = read_checkpoint(*checkpoint);
    if (loaded.size() != scene.bodies.size()) throw std::runtime_error("checkpoint body count differs from the scene");
    for (size_t i = 0; i < loaded.size(); ++i) {
      const Body& a = loaded[i];
      const Body& b = scene.bodies[i];
      if (a.grid1.n != b.grid1.n || a.grid1.m != b.grid1.m || a.grid2.n != b.grid2.n || a.grid2.m != b.grid2.m)
        throw std::runtime_error("checkpoint mesh differs from the scene mesh");
    }
    scene.bodies = std::move(loaded);
    return std::nullopt;
  }
  return solve_densities(scene.bodies, scene.u_inf, opt);
}

ConvergenceRow velocity_error(const Scene& scene, const std::vector<Vec3>& targets, const VelocityField& exact,
                              bool correction) {
  ConvergenceRow row;
  for (const Vec3& x : targets) {
    const Vec3 ex = exact(x);
    const double eu = max_abs(velocity(scene, x, EvalOptions{false, {}}) - ex);
    row.err_uncorrected = std::max(row.err_uncorrected, eu);
    row.err_corrected = std::max(row.err_corrected, correction ? max_abs(velocity(scene, x) - ex) : eu);
  }
  return row;
}

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "n,d,err_corrected,err_uncorrected\n";
  for (const ConvergenceRow& r : rows)
    f << fmt17(r.n) << ',' << fmt17(r.d) << ',' << fmt17(r.err_corrected) << ',' << fmt17(r.err_uncorrected) << '\n';
}

std::vector<Vec3> streamline_seeds(const Scene& scene) {
  std::vector<Vec3> seeds;
  const int k = scene.seeds_per_line;
  for (const auto& [a, b] : scene.seed_lines) {
    if (k == 1) {
      seeds.push_back(0.5 * (a + b));
      continue;
    }
    for (int i = 0; i < k; ++i) seeds.push_back(a + (static_cast<double>(i) / (k - 1)) * (b - a));
  }
  return seeds;
}

std::vector<Streamline> trace_streamlines(const Scene& scene, const std::vector<Vec3>& seeds, double dt, double t_max,
                                          const EvalOptions& opt) {
  const VelocityField u = [&](const Vec3& x) { return velocity(scene, x, opt); };
  const InsideTest inside = [&](const Vec3& x) { return inside_any(scene, x); };
  std::vector<Streamline> out;
  for (const Vec3& s : seeds) {
    TraceResult r = rk4_trace(u, s, dt, std::nullopt, t_max, inside, true);
    Streamline line;
    line.status = r.status;
    line.points = std::move(r.path);
    for (size_t i = 0; i < line.points.size(); ++i) line.times.push_back(std::min(i * dt, r.t));
    out.push_back(std::move(line));
  }
  return out;
}

void write_streamlines_csv(const std::string& path, const std::vector<Streamline>& lines) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "line,step,t,x,y,z,entered\n";
  for (size_t l = 0; l < lines.size(); ++l) {
    const int entered = lines[l].status == TraceStatus::EnteredBody ? 1 : 0;
    for (size_t i = 0; i < lines[l].points.size(); ++i) {
      const Vec3& p = lines[l].points[i];
      f << l << ',' << i << ',' << fmt17(lines[l].times[i]) << ',' << fmt17(p.x) << ',' << fmt17(p.y) << ','
        << fmt17(p.z) << ',' << entered << '\n';
    }
  }
}

}  // namespace ctrap
