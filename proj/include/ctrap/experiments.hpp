#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctrap/flowsim.hpp"

namespace ctrap {

/// Targets x(alpha, beta) +- d n on a samples x samples lattice over [0, pi/4]^2
/// of the body's Grid1 chart, endpoints included.
std::vector<Vec3> patch_targets(const Body& body, int samples, double d, bool interior);

/// Closed-form velocity when the scene has one: the unit sphere with its known density,
/// or the double layer of a uniform density on a single body.
std::optional<VelocityField> exact_velocity(const Scene& scene);

/// Solve for the densities when the scene needs it, or load them from a checkpoint.
/// Returns the solve report when a solve ran.
std::optional<SolveReport> prepare_densities(Scene& scene, const std::optional<std::string>& checkpoint,
                                             const SolveOptions& opt);

struct ConvergenceRow {
  double n = 0, d = 0;
  double err_corrected = 0, err_uncorrected = 0;
};

/// Max-norm velocity error over the targets, corrected and uncorrected, against `exact`.
/// With correction off both columns hold the uncorrected error.
ConvergenceRow velocity_error(const Scene& scene, const std::vector<Vec3>& targets, const VelocityField& exact,
                              bool correction);

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows);

struct Streamline {
  std::vector<Vec3> points;
  std::vector<double> times;
  TraceStatus status = TraceStatus::TimedOut;
};

/// Seeds spread evenly (endpoints included) along every seed line of the scene.
std::vector<Vec3> streamline_seeds(const Scene& scene);

std::vector<Streamline> trace_streamlines(const Scene& scene, const std::vector<Vec3>& seeds, double dt, double t_max,
                                          const EvalOptions& opt = {});

/// Columns: line, step, t, x, y, z, entered.
void write_streamlines_csv(const std::string& path, const std::vector<Streamline>& lines);

}  // namespace ctrap
