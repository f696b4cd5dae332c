"""Weighted higher order fractional Sobolev toolkit."""

import json

from ._core import (
    ConstraintViolation,
    DegenerateExponent,
    DivergentQuasinorm,
    Error,
    Estimate,
    ExponentMismatch,
    NoConvergence,
    NonIntegrableSingularity,
    NonMonotoneProfile,
    Params,
    RearrangementOnlyFunction,
    TestFunction,
    UnknownName,
    approximation_residual,
    catalog,
    catalog_names,
    critical_exponent,
    elementary_constants,
    gagliardo,
    higher_seminorm,
    homogeneous_norm,
    lorentz_quasinorm,
    lorentz_target,
    mollifier_mass,
    relaxed,
    scale,
    smooth_catalog_names,
    unit_ball_volume,
    validate,
    weighted_lp,
)
from . import _core


def layer_cake_check(f):
    return json.loads(_core.layer_cake_check_json(f))


def hardy_layercake_identity(u, params):
    return json.loads(_core.hardy_layercake_json(u, params))


def sobolev_layercake_identity(u, params):
    return json.loads(_core.sobolev_layercake_json(u, params))


def elementary_bounds_check(dim, q, trials=10000, seed=20240101):
    return json.loads(_core.elementary_bounds_json(dim, q, trials, seed))


def check(kind, u, params, seed=20240101, samples=200000):
    """Runs hardy, rellich, ckn_hardy, ckn_sobolev, ckn_first_order,
    grad_equivalence or lorentz_embedding and returns the report as a dict."""
    return json.loads(_core.check_json(kind, u, params, seed, samples))


def scale_orbit(kind, u, params, lambdas=(0.5, 2.0), kappa=0.0, seed=20240101, samples=200000):
    return json.loads(_core.scale_orbit_json(kind, u, params, list(lambdas), kappa, seed, samples))


def poincare_failure_probe(u, params, lambdas=(0.25, 0.5, 1.0, 2.0, 4.0), gradient=False, seed=20240101,
                           samples=200000):
    return json.loads(_core.poincare_probe_json(u, params, list(lambdas), gradient, seed, samples))


def weak_young_check(d, h, q, seed=20240101, samples=200000):
    return json.loads(_core.weak_young_json(d, h, q, seed, samples))


def run_report(**settings):
    """Runs a batch report; keys follow the config-file spelling (n, s, p, a, seed, samples, suite, ...).

    Returns (report dict, exit code).
    """
    text, code = _core.run_report_json({k: str(v) for k, v in settings.items()})
    return json.loads(text), code
