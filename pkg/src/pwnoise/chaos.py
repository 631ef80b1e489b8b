"""
Truncated chaos vectors, weighted Fock norms and the dual pairing.

A :class:`ChaosVector` holds kernels F^(0), ..., F^(N). The same type is used
for test functions (kernels in function coordinates) and generalized
functions (density coordinates); the side is picked per call through the
``kappa``, ``p`` and ``sign`` arguments of :func:`fock_norm`.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from itertools import product as cartesian
from pathlib import Path
from typing import Sequence

import numpy as np

from . import charlier as _ch
from .model import CellModel
from .symtensor import (
    KernelError,
    SymKernel,
    inner,
    multiplicity,
    norm,
    power,
    random_kernel,
)


class ChaosVector:
    """Finite sequence of symmetric kernels indexed by chaos degree.

    Parameters
    ----------
    model : CellModel
    kernels : sequence of SymKernel or None
        ``kernels[n]`` must have degree ``n``; ``None`` entries are zero.
    """

    __slots__ = ("model", "kernels")

    def __init__(self, model: CellModel, kernels: Sequence[SymKernel | None]):
        if len(kernels) == 0:
            raise KernelError("a chaos vector needs at least the degree-0 kernel")
        ks = []
        for n, k in enumerate(kernels):
            if k is None:
                k = SymKernel.zero(model, n)
            if k.degree != n:
                raise KernelError(f"kernel at position {n} has degree {k.degree}")
            if k.model != model:
                raise KernelError("kernel lives on a different model")
            ks.append(k)
        self.model = model
        self.kernels = tuple(ks)

    @property
    def trunc(self) -> int:
        return len(self.kernels) - 1

    def __getitem__(self, n: int) -> SymKernel:
        if 0 <= n <= self.trunc:
            return self.kernels[n]
        return SymKernel.zero(self.model, n)

    def __len__(self):
        return len(self.kernels)

    def __repr__(self):
        return f"ChaosVector(trunc={self.trunc})"

    @classmethod
    def vacuum(cls, model: CellModel, value: float = 1.0) -> "ChaosVector":
        return cls(model, [SymKernel.scalar(model, value)])

    @classmethod
    def monomial(cls, kernel: SymKernel) -> "ChaosVector":
        """Vector whose only nonzero kernel is ``kernel``."""
        ks: list = [None] * kernel.degree + [kernel]
        return cls(kernel.model, ks)

    def padded(self, trunc: int) -> "ChaosVector":
        if trunc < self.trunc:
            raise ValueError("padding cannot reduce the truncation")
        return ChaosVector(self.model, [self[n] for n in range(trunc + 1)])

    def __add__(self, other: "ChaosVector") -> "ChaosVector":
        if other.model != self.model:
            raise KernelError("chaos vectors live on different models")
        N = max(self.trunc, other.trunc)
        return ChaosVector(self.model, [self[n] + other[n] for n in range(N + 1)])

    def __sub__(self, other: "ChaosVector") -> "ChaosVector":
        return self + (-1.0) * other

    def __mul__(self, a: float) -> "ChaosVector":
        return ChaosVector(self.model, [a * k for k in self.kernels])

    __rmul__ = __mul__

    def allclose(self, other: "ChaosVector", rtol=1e-9, atol=1e-12) -> bool:
        N = max(self.trunc, other.trunc)
        return all(self[n].allclose(other[n], rtol, atol) for n in range(N + 1))

    def to_dict(self) -> dict:
        return {"trunc": self.trunc, "kernels": [k.to_dict() for k in self.kernels]}

    @classmethod
    def from_dict(cls, model: CellModel, data: dict) -> "ChaosVector":
        try:
            trunc = int(data["trunc"])
            raw = data["kernels"]
        except (KeyError, TypeError, ValueError) as exc:
            raise KernelError(f"malformed chaos object: {exc!r}") from exc
        if len(raw) > trunc + 1:
            raise KernelError(f"{len(raw)} kernels exceed trunc {trunc}")
        ks: list = [None] * (trunc + 1)
        for obj in raw:
            k = SymKernel.from_dict(model, obj)
            if k.degree > trunc:
                raise KernelError(f"kernel degree {k.degree} exceeds trunc {trunc}")
            if ks[k.degree] is not None:
                raise KernelError(f"two kernels of degree {k.degree}")
            ks[k.degree] = k
        return cls(model, ks)


def load_chaos(model: CellModel, path: str | Path) -> ChaosVector:
    with open(path) as fh:
        return ChaosVector.from_dict(model, json.load(fh))


def random_chaos(
    model: CellModel, trunc: int, rng: np.random.Generator, density: float = 1.0, scale: float = 1.0
) -> ChaosVector:
    return ChaosVector(
        model, [random_kernel(model, n, rng, density, scale) for n in range(trunc + 1)]
    )


# Norms and pairings ---------------------------------------------------------


def fock_norm(v: ChaosVector, kappa: float = 0.0, p: float = 0, sign=1) -> float:
    """(sum_n |F^(n)|_{+-p}^2 (n!)^{1+kappa})^{1/2}."""
    total = 0.0
    for n, k in enumerate(v.kernels):
        total += norm(k, p, sign) ** 2 * math.factorial(n) ** (1.0 + kappa)
    return math.sqrt(total)


def dual_pair(Phi: ChaosVector, phi: ChaosVector) -> float:
    """<<Phi, phi>> = sum_n n! <F^(n), f^(n)>."""
    if Phi.model != phi.model:
        raise KernelError("chaos vectors live on different models")
    N = min(Phi.trunc, phi.trunc)
    return sum(math.factorial(n) * inner(Phi[n], phi[n]) for n in range(N + 1))


def s_transform(Phi: ChaosVector, xi) -> float:
    """S-transform: pairing with the Wick exponential, sum_n <F^(n), xi^{(x)n}>."""
    return sum(inner(F, power(Phi.model, xi, n)) for n, F in enumerate(Phi.kernels))


# Monomial <-> Wick basis --------------------------------------------------------


def _counts(m: tuple, size: int) -> list[int]:
    out = [0] * size
    for i in m:
        out[i] += 1
    return out


def _from_counts(counts) -> tuple:
    return tuple(i for i, k in enumerate(counts) for _ in range(k))


def _convert(v: ChaosVector, table) -> ChaosVector:
    model = v.model
    nu = model.nu
    tabs = [table(v.trunc, nu[c]) for c in range(model.size)]
    out = [defaultdict(float) for _ in range(v.trunc + 1)]
    for kern in v.kernels:
        for m, val in kern.coeffs.items():
            cnt = _counts(m, model.size)
            weight = multiplicity(m) * val
            for js in cartesian(*(range(k + 1) for k in cnt)):
                coef = weight
                for c, (k, j) in enumerate(zip(cnt, js)):
                    coef *= tabs[c][k, j]
                if coef == 0.0:
                    continue
                target = _from_counts(js)
                out[len(target)][target] += coef / multiplicity(target)
    return ChaosVector(model, [SymKernel._raw(model, n, dict(d)) for n, d in enumerate(out)])


def monomial_to_wick(v: ChaosVector) -> ChaosVector:
    """Kernels of sum_n <x^{(x)n}, g^(n)> re-expressed in Wick monomials.

    Both representations define the same polynomial of x; per cell the change
    of basis is u^k -> Charlier polynomials with tau = nu_c.
    """
    return _convert(v, _ch.monomial_to_charlier)


def wick_to_monomial(v: ChaosVector) -> ChaosVector:
    """Inverse of :func:`monomial_to_wick`."""
    return _convert(v, _ch.charlier_to_monomial)


def eval_monomial(v: ChaosVector, x) -> float:
    """sum_n <x^{(x)n}, g^(n)> for a density vector ``x``."""
    x = np.asarray(x, dtype=float)
    return sum(inner(power(v.model, x, n), g) for n, g in enumerate(v.kernels))
