"""Named verification suites run by the command line front end."""

from __future__ import annotations

import math

import numpy as np

from . import calculus, chaos, montecarlo, wick
from .model import CellModel


def exp_compare(model: CellModel, seed: int = 0, trunc: int = 20, tol: float = 1e-8, cases: int = 100, **_) -> dict:
    """Wick exponential: series at truncation ``trunc`` against the closed form."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        x = model.counts_to_density(montecarlo.sample_counts(model, 1, rng)[0])
        xi = rng.uniform(-0.3, 0.3, model.size)
        # shrink into the series guard for models with large weights
        n1 = model.test_norm(xi, 1)
        if n1 >= 0.9:
            xi *= 0.9 / n1
        series = wick.wick_exp_series(model, x, xi, trunc, tol)
        closed = wick.wick_exp_closed(model, x, xi)
        worst = max(worst, abs(series.value - closed))
    return {"cases": cases, "trunc": trunc, "tol": tol, "max_abs_error": worst, "pass": worst <= tol}


def delta_profile(model: CellModel, seed: int = 0, kappa: float = 0.5, p: int = 1, trunc: int = 40, **_) -> dict:
    """Divergence (kappa < 1) or boundedness (kappa >= 1) of the delta-function norms."""
    rng = np.random.default_rng(seed)
    y = rng.normal(size=model.size)
    R = model.dual_norm(y, p)
    out = {"y": y.tolist(), "kappa": kappa, "p": p, "trunc": trunc}
    if kappa < 1:
        prof = wick.delta_norm_profile(model, y, kappa, p, trunc)
        n0 = wick.divergence_onset(prof)
        out.update(
            onset=n0,
            divergence_detected=n0 is not None and n0 <= 30,
            last_ratio=prof["ratios"][-1],
        )
        out["pass"] = out["divergence_detected"]
    else:
        p1 = wick.p1_selector(model, p, R)
        prof = wick.delta_norm_profile(model, y, kappa, p1, trunc)
        bound = sum(4.0**-n for n in range(trunc + 1))
        out.update(p1=p1, partial_sum=prof["partial_sums"][-1], bound=bound)
        out["pass"] = prof["partial_sums"][-1] <= bound
    return out


def product_bound(model: CellModel, seed: int = 0, trunc: int = 4, p: int = 1, kappa: float = 1.0, cases: int = 100, **_) -> dict:
    rng = np.random.default_rng(seed)
    violations, worst = 0, 0.0
    rep = None
    for _ in range(cases):
        phi = chaos.random_chaos(model, int(rng.integers(0, trunc + 1)), rng)
        psi = chaos.random_chaos(model, int(rng.integers(0, trunc + 1)), rng)
        rep = calculus.product_bound(phi, psi, p, kappa)
        violations += not rep.passed
        worst = max(worst, rep.lhs / rep.rhs)
    return {
        "cases": cases,
        "p": p,
        "kappa": kappa,
        "q": rep.q,
        "y_p": rep.y_p,
        "const": rep.const,
        "max_lhs_over_rhs": worst,
        "violations": violations,
        "pass": violations == 0,
    }


def mc_isometry(model: CellModel, seed: int = 0, trunc: int = 3, samples: int = 200_000, cases: int = 20, **_) -> dict:
    rng = np.random.default_rng(seed)
    zs = []
    for i in range(cases):
        phi = chaos.random_chaos(model, trunc, rng)
        zs.append(montecarlo.isometry_check(phi, model, samples, seed * 1000 + i).z)
    exceed = sum(abs(z) > 4 for z in zs)
    return {"cases": cases, "samples": samples, "z": zs, "exceed_4sigma": exceed, "pass": exceed <= 1}


def growth_bound(model: CellModel, seed: int = 0, p: int = 1, trunc: int = 8, cases: int = 100, **_) -> dict:
    rng = np.random.default_rng(seed)
    violations = derived_violations = 0
    worst = 0.0
    for _ in range(cases):
        x = model.counts_to_density(montecarlo.sample_counts(model, 1, rng)[0])
        rep = wick.growth_bound_check(model, x, p, trunc)
        violations += not rep.passed
        derived_violations += not rep.derived_passed
        worst = max(worst, max(rep.ratios, default=0.0))
    return {
        "cases": cases,
        "p": p,
        "N": trunc,
        "max_ratio": worst,
        "violations": violations,
        "derived_violations": derived_violations,
        "pass": violations == 0,
    }


SUITES = {
    "exp-compare": exp_compare,
    "delta-profile": delta_profile,
    "product-bound": product_bound,
    "mc-isometry": mc_isometry,
    "growth-bound": growth_bound,
}


def run(name: str, model: CellModel, **opts) -> dict:
    opts = {k: v for k, v in opts.items() if v is not None and not (isinstance(v, float) and math.isnan(v))}
    return SUITES[name](model, **opts)
