"""
Poisson sampling on the cell model and Monte-Carlo checks of the chaos isometry.

Sampling is split into a fixed number of independent streams spawned from
one seed; partial sums are reduced in stream order, so results are bit-stable
whatever the number of worker threads (capped by ``PWN_THREADS``).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chaos import ChaosVector, fock_norm
from .model import CellModel
from .wick import evaluate

N_STREAMS = 8


@dataclass(frozen=True)
class Configuration:
    """Point counts per cell."""

    counts: tuple[int, ...]

    def density(self, model: CellModel) -> np.ndarray:
        return model.counts_to_density(self.counts)


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    n_samples: int
    seed: int


def _poisson_inverse(nu: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inversion sampling: smallest k with F(k) >= u, column-wise per cell."""
    kmax = int(np.max(nu) + 12.0 * np.sqrt(np.max(nu)) + 30)
    k = np.arange(kmax + 1)
    # pmf via log-space to stay finite for any desk-scale nu
    logpmf = k[:, None] * np.log(nu)[None, :] - nu[None, :] - np.array(
        [math.lgamma(i + 1) for i in k]
    )[:, None]
    cdf = np.cumsum(np.exp(logpmf), axis=0)
    cdf[-1] = 1.0
    out = np.empty(u.shape, dtype=np.int64)
    for c in range(nu.size):
        out[:, c] = np.searchsorted(cdf[:, c], u[:, c], side="left")
    return out


def sample_counts(model: CellModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """Array of shape (n, cells) of independent Poisson(nu_c) counts."""
    u = rng.random((n, model.size))
    return _poisson_inverse(model.nu, u)


def sample_configuration(model: CellModel, seed: int) -> Configuration:
    rng = np.random.default_rng(seed)
    return Configuration(tuple(int(k) for k in sample_counts(model, 1, rng)[0]))


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("PWN_THREADS", "1")))
    except ValueError:
        return 1


def _stream_sizes(n_samples: int) -> list[int]:
    base, extra = divmod(n_samples, N_STREAMS)
    return [base + (i < extra) for i in range(N_STREAMS)]


def _products(fns, model: CellModel, counts: np.ndarray) -> np.ndarray:
    # configurations repeat heavily at desk scale; evaluate each distinct one once
    uniq, inv = np.unique(counts, axis=0, return_inverse=True)
    vals = np.ones(len(uniq))
    for fn in fns:
        vals *= np.array([fn(model.counts_to_density(row)) for row in uniq])
    return vals[np.ravel(inv)]


def _stream_sums(fns, model, size, seed_seq) -> tuple[float, float]:
    rng = np.random.default_rng(seed_seq)
    counts = sample_counts(model, size, rng)
    v = _products(fns, model, counts)
    return float(np.sum(v)), float(np.sum(v * v))


def estimate_expectation(fns, model: CellModel, n_samples: int, seed: int) -> Estimate:
    """Monte-Carlo mean of prod(fn(x) for fn in fns) over Poisson configurations."""
    if n_samples < 2:
        raise ValueError("need at least 2 samples")
    streams = np.random.SeedSequence(seed).spawn(N_STREAMS)
    sizes = _stream_sizes(n_samples)
    jobs = [(s, ss) for s, ss in zip(sizes, streams) if s > 0]
    threads = min(_threads(), len(jobs))
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda j: _stream_sums(fns, model, *j), jobs))
    else:
        parts = [_stream_sums(fns, model, *j) for j in jobs]
    s1 = s2 = 0.0
    for a, b in parts:
        s1 += a
        s2 += b
    mean = s1 / n_samples
    var = max(s2 / n_samples - mean * mean, 0.0) * n_samples / (n_samples - 1)
    return Estimate(mean, math.sqrt(var / n_samples), n_samples, seed)


def estimate_inner(
    phi: ChaosVector, psi: ChaosVector, model: CellModel, n_samples: int, seed: int
) -> Estimate:
    """Estimate of E[phi(X) psi(X)] with phi, psi evaluated by the Wick recursion."""
    return estimate_expectation(
        [lambda x: evaluate(phi, x), lambda x: evaluate(psi, x)], model, n_samples, seed
    )


@dataclass(frozen=True)
class IsometryReport:
    estimate: Estimate
    target: float
    z: float

    @property
    def passed(self) -> bool:
        return abs(self.z) <= 4.0

    def to_dict(self) -> dict:
        return {
            "mean": self.estimate.mean,
            "stderr": self.estimate.stderr,
            "n_samples": self.estimate.n_samples,
            "seed": self.estimate.seed,
            "target": self.target,
            "z": self.z,
            "pass": self.passed,
        }


def isometry_check(phi: ChaosVector, model: CellModel, n_samples: int, seed: int) -> IsometryReport:
    """z-score of the Monte-Carlo E[phi^2] against sum_n n! |f^(n)|_0^2."""
    est = estimate_inner(phi, phi, model, n_samples, seed)
    target = fock_norm(phi, 0.0, 0, 1) ** 2
    diff = est.mean - target
    if est.stderr > 0:
        z = diff / est.stderr
    else:
        z = 0.0 if abs(diff) <= 1e-12 * max(1.0, abs(target)) else math.inf
    return IsometryReport(est, target, z)
