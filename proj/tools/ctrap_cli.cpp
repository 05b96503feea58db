#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ctrap/experiments.hpp"

using namespace ctrap;

namespace {

struct Common {
  std::string scene;
  std::string out;
  std::vector<double> resolution;
  bool no_correction = false;
  double tol = 1e-10;
  std::optional<std::string> checkpoint;
};

std::optional<double> single_resolution(const Common& c) {
  if (c.resolution.empty()) return std::nullopt;
  if (c.resolution.size() > 1) throw std::invalid_argument("this command takes one --resolution value");
  return c.resolution.front();
}

SolveOptions solve_options(const Common& c, bool uncorrected_solve) {
  SolveOptions o;
  o.tol = c.tol;
  o.eval.correction = !uncorrected_solve;
  return o;
}

void report_solve(const std::optional<SolveReport>& r) {
  if (r) std::fprintf(stderr, "solve: %d iterations, relative residual %.3e\n", r->iterations, r->residual);
}

int cmd_solve(const Common& c, const std::string& log_path) {
  Scene scene = load_scene(c.scene, single_resolution(c));
  if (scene.density != DensityMode::Solve) throw std::invalid_argument("scene density is not 'solve'");
  SolveOptions opt = solve_options(c, c.no_correction);
  std::ofstream log(log_path.empty() ? c.out + ".log" : log_path);
  log << "iteration,residual\n";
  opt.on_iteration = [&log](int it, double res) { log << it << ',' << fmt17(res) << '\n' << std::flush; };
  try {
    const SolveReport r = solve_densities(scene.bodies, scene.u_inf, opt);
    report_solve(r);
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solve failed: %s (history in the log)\n", e.what());
    return 2;
  }
  write_checkpoint(c.out, scene.bodies);
  return 0;
}

int cmd_convergence(const Common& c, const std::vector<double>& ds, int samples, const std::string& side, int body,
                    const std::optional<std::string>& reference) {
  if (c.resolution.empty()) throw std::invalid_argument("convergence needs --resolution values");
  for (double d : ds)
    if (!(d > 0)) throw std::invalid_argument("d values must be positive");
  std::optional<Scene> ref_scene;
  if (reference) {
    ref_scene = load_scene(c.scene, c.resolution.front());
    ref_scene->bodies = read_checkpoint(*reference);
  }
  std::vector<ConvergenceRow> rows;
  for (double res : c.resolution) {
    Scene scene = load_scene(c.scene, res);
    if (body < 0 || body >= static_cast<int>(scene.bodies.size())) throw std::invalid_argument("no such body");
    VelocityField exact;
    if (auto ex = exact_velocity(scene)) {
      exact = *ex;
    } else if (ref_scene) {
      exact = [&ref_scene](const Vec3& x) { return velocity(*ref_scene, x); };
    } else {
      throw std::invalid_argument("this scene has no closed-form velocity; pass --reference with a fine-mesh checkpoint");
    }
    report_solve(prepare_densities(scene, std::nullopt, solve_options(c, false)));
    for (double d : ds) {
      ConvergenceRow row =
          velocity_error(scene, patch_targets(scene.bodies[body], samples, d, side == "interior"), exact, !c.no_correction);
      row.n = res;
      row.d = d;
      std::fprintf(stderr, "n=%g d=%g corrected %.3e uncorrected %.3e\n", res, d, row.err_corrected,
                   row.err_uncorrected);
      rows.push_back(row);
    }
  }
  write_convergence_csv(c.out, rows);
  return 0;
}

int cmd_streamlines(const Common& c, double dt, double t_max) {
  Scene scene = load_scene(c.scene, single_resolution(c));
  report_solve(prepare_densities(scene, c.checkpoint, solve_options(c, false)));
  const auto seeds = streamline_seeds(scene);
  if (seeds.empty()) throw std::invalid_argument("scene has no seed_line entries");
  const auto lines = trace_streamlines(scene, seeds, dt, t_max, EvalOptions{!c.no_correction, {}});
  int entered = 0;
  for (const auto& l : lines) entered += l.status == TraceStatus::EnteredBody;
  std::fprintf(stderr, "%zu streamlines, %d entered a body\n", lines.size(), entered);
  write_streamlines_csv(c.out, lines);
  return 0;
}

int cmd_shadow(const Common& c, double dt, double t_max, int count, const std::optional<std::string>& reference) {
  Scene scene = load_scene(c.scene, single_resolution(c));
  if (!scene.shadow) throw std::invalid_argument("scene has no shadow_* entries");
  ShadowSpec spec = *scene.shadow;
  if (count > 0) spec.count = count;
  report_solve(prepare_densities(scene, c.checkpoint, solve_options(c, false)));
  std::vector<TraceRecord> ref;
  if (reference) ref = read_traces_csv(*reference);
  const EvalOptions opt{!c.no_correction, {}};
  const VelocityField u = [&](const Vec3& x) { return velocity(scene, x, opt); };
  const InsideTest inside = [&](const Vec3& x) { return inside_any(scene, x); };
  const auto recs = shadow_experiment(u, inside, spec, dt, t_max, reference ? &ref : nullptr);
  int crossed = 0;
  double worst = 0.0;
  for (const auto& r : recs) {
    crossed += r.status == TraceStatus::Crossed;
    if (r.error) worst = std::max(worst, *r.error);
  }
  std::fprintf(stderr, "%d of %zu particles crossed; max position error %.3e\n", crossed, recs.size(), worst);
  write_traces_csv(c.out, recs);
  return 0;
}

int cmd_eval(const Common& c, const std::vector<double>& point, std::optional<std::string> chart, bool puncture) {
  Scene scene = load_scene(c.scene, single_resolution(c));
  report_solve(prepare_densities(scene, c.checkpoint, solve_options(c, false)));
  const Vec3 x{point[0], point[1], point[2]};
  EvalOptions opt{!c.no_correction, {}, puncture};
  if (chart) opt.chart = *chart == "grid2" ? Chart::Grid2 : Chart::Grid1;
  Vec3 u = scene.u_inf;
  for (size_t k = 0; k < scene.bodies.size(); ++k) {
    const LayerPair p = eval_layers(scene.bodies[k], x, opt);
    std::printf("body %zu: chart=%s d=%.17g d_up=%.17g correct=%d roundoff=%d\n", k + 1,
                to_string(p.flags.chart).c_str(), p.flags.d, p.flags.d_up, p.flags.correct, p.flags.roundoff);
    std::printf("  slp = %.17g %.17g %.17g\n  dlp = %.17g %.17g %.17g\n", p.slp.x, p.slp.y, p.slp.z, p.dlp.x, p.dlp.y,
                p.dlp.z);
    if (scene.use_slp) u += p.slp;
    if (scene.use_dlp) u += p.dlp;
  }
  std::printf("velocity = %.17g %.17g %.17g\n", u.x, u.y, u.z);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corrected trapezoidal layer potentials for Stokes flow past ellipsoids"};
  app.require_subcommand(1);
  Common c;

  auto add_scene = [&c](CLI::App* s) {
    s->add_option("scene", c.scene, "Scene file")->required()->check(CLI::ExistingFile);
  };
  auto add_res = [&c](CLI::App* s, const char* help) {
    return s->add_option("--resolution", c.resolution, help)->delimiter(',');
  };

  auto* solve = app.add_subcommand("solve", "Solve for the densities and write a checkpoint");
  std::string log_path;
  add_scene(solve);
  add_res(solve, "Mesh parameter (n, m or scale, per the scene's mesh line)");
  solve->add_option("--tol", c.tol, "GMRES relative tolerance");
  solve->add_flag("--no-correction", c.no_correction, "Solve with the uncorrected rule");
  solve->add_option("--out", c.out, "Checkpoint path")->required();
  solve->add_option("--log", log_path, "Residual log (default: <out>.log)");

  auto* conv = app.add_subcommand("convergence", "Max velocity error over a surface patch versus n and d");
  std::vector<double> ds{1e-4, 1e-3, 1e-2, 1e-1};
  int samples = 64, body = 1;
  std::string side = "exterior";
  std::optional<std::string> reference;
  add_scene(conv);
  add_res(conv, "Comma-separated mesh parameters")->required();
  conv->add_option("--d", ds, "Comma-separated distances")->delimiter(',');
  conv->add_option("--samples", samples, "Targets per side of the patch");
  conv->add_option("--side", side, "exterior or interior")->check(CLI::IsMember({"exterior", "interior"}));
  conv->add_option("--body", body, "Body whose patch is sampled (1-based)");
  conv->add_option("--tol", c.tol, "GMRES relative tolerance");
  conv->add_option("--reference", reference, "Fine-mesh checkpoint for scenes without a closed form")
      ->check(CLI::ExistingFile);
  conv->add_flag("--no-correction", c.no_correction, "Report uncorrected errors in both columns");
  conv->add_option("--out", c.out, "CSV path")->required();

  auto* stream = app.add_subcommand("streamlines", "Trace the scene's seed lines");
  double dt_stream = 0.1, tmax_stream = 10.0;
  add_scene(stream);
  add_res(stream, "Mesh parameter");
  stream->add_option("--checkpoint", c.checkpoint, "Densities from a solve")->check(CLI::ExistingFile);
  stream->add_option("--dt", dt_stream, "RK4 step")->check(CLI::PositiveNumber);
  stream->add_option("--tmax", tmax_stream, "Trace duration");
  stream->add_option("--tol", c.tol, "GMRES relative tolerance");
  stream->add_flag("--no-correction", c.no_correction, "Uncorrected velocity");
  stream->add_option("--out", c.out, "CSV path")->required();

  auto* shadow = app.add_subcommand("shadow", "Particle traversal between the scene's shadow planes");
  double dt_shadow = 0.02, tmax_shadow = 1e4;
  int count = 0;
  std::optional<std::string> shadow_ref;
  add_scene(shadow);
  add_res(shadow, "Mesh parameter");
  shadow->add_option("--checkpoint", c.checkpoint, "Densities from a solve")->check(CLI::ExistingFile);
  shadow->add_option("--dt", dt_shadow, "RK4 step")->check(CLI::PositiveNumber);
  shadow->add_option("--tmax", tmax_shadow, "Time limit per particle");
  shadow->add_option("--count", count, "Particles per side (overrides the scene)");
  shadow->add_option("--reference", shadow_ref, "Trace CSV of a fine-mesh run for the error column")
      ->check(CLI::ExistingFile);
  shadow->add_option("--tol", c.tol, "GMRES relative tolerance");
  shadow->add_flag("--no-correction", c.no_correction, "Uncorrected velocity");
  shadow->add_option("--out", c.out, "CSV path")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate one target and print the correction flags");
  std::vector<double> point;
  std::optional<std::string> chart;
  bool puncture = false;
  add_scene(eval);
  add_res(eval, "Mesh parameter");
  eval->add_option("point", point, "x y z")->required()->expected(3)->allow_extra_args(false);
  eval->add_option("--checkpoint", c.checkpoint, "Densities from a solve")->check(CLI::ExistingFile);
  eval->add_option("--chart", chart, "Force grid1 or grid2")->check(CLI::IsMember({"grid1", "grid2"}));
  eval->add_flag("--puncture", puncture, "Drop the nearest node whenever the target is corrected");
  eval->add_option("--tol", c.tol, "GMRES relative tolerance");
  eval->add_flag("--no-correction", c.no_correction, "Uncorrected rule");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*solve) return cmd_solve(c, log_path);
    if (*conv) return cmd_convergence(c, ds, samples, side, body - 1, reference);
    if (*stream) return cmd_streamlines(c, dt_stream, tmax_stream);
    if (*shadow) return cmd_shadow(c, dt_shadow, tmax_shadow, count, shadow_ref);
    if (*eval) return cmd_eval(c, point, chart, puncture);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
