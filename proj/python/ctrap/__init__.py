"""Corrected trapezoidal layer potentials for Stokes flow past ellipsoids."""

from ._ctrap import (
    Body,
    Chart,
    EvalOptions,
    EvaluationError,
    GeometryError,
    Kernel,
    Pose,
    Scene,
    ShadowSpec,
    SolverError,
    StandardEllipsoid,
    TraceStatus,
    eval_layer,
    load_scene,
    parse_scene,
    rk4_trace,
    shadow_experiment,
    window_integral,
)

__all__ = [
    "Body",
    "Chart",
    "EvalOptions",
    "EvaluationError",
    "GeometryError",
    "Kernel",
    "Pose",
    "Scene",
    "ShadowSpec",
    "SolverError",
    "StandardEllipsoid",
    "TraceStatus",
    "eval_layer",
    "load_scene",
    "parse_scene",
    "rk4_trace",
    "shadow_experiment",
    "window_integral",
]
