"""rad P at fixed volume on model surfaces."""

import json as _json

from . import _isodiam
from ._isodiam import (
    Backend,
    Error,
    Region,
    chart_ellipse,
    critical_catenoid_T0,
    metric_circle,
    minimal_ratio,
    random_star_region,
    ratio_sweep,
    regular_polygon,
    welzl,
)

__all__ = [
    "Backend", "Error", "Region", "backend", "chart_ellipse", "check_ch", "check_ch_ball",
    "check_euclidean", "check_ricci_ball", "critical_catenoid_T0", "measures", "metric_circle",
    "minimal_ratio", "minimize", "random_star_region", "ratio_sweep", "regular_polygon",
    "run_config", "welzl",
]


def backend(kind, base_dir=".", **params):
    """Backend from keyword parameters, e.g. backend("hyperbolic", K=-1.0)."""
    return _isodiam.make_backend(_json.dumps({"kind": kind, **params}), base_dir)


def measures(region):
    return _json.loads(_isodiam.measures(region))


def check_euclidean(region, tol=1e-6):
    return _json.loads(_isodiam.check_euclidean(region, tol))


def check_ch(region, tol=1e-6):
    return _json.loads(_isodiam.check_ch(region, tol))


def check_ch_ball(backend, center, r, tol=1e-6):
    return _json.loads(_isodiam.check_ch_ball(backend, center, r, tol))


def check_ricci_ball(backend, center, r, tol=1e-9):
    return _json.loads(_isodiam.check_ricci_ball(backend, center, r, tol))


def minimize(V, init, max_iterations=2000):
    """Returns (summary dict, final Region)."""
    summary, region = _isodiam.minimize(V, init, max_iterations)
    return _json.loads(summary), region


def run_config(path, out="results", seed=None, tol_scale=1.0):
    return _json.loads(_isodiam.run_config(str(path), str(out), seed, tol_scale))
