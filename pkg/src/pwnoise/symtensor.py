"""
Sparse symmetric kernels over the cell index set.

A degree-``n`` kernel is stored as a map from sorted index tuples (multisets
of cell positions) to the common value of the symmetric function on every
ordering of that multiset. Pairings and norms over ordered tuples are
recovered with multinomial weights, so storage and work stay combinatorial
in the number of cells instead of growing like ``|C|^n``.
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from functools import lru_cache
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .model import CellModel

Multiset = tuple


class KernelError(ValueError):
    """Degree or model mismatch between kernels."""


@lru_cache(maxsize=None)
def multiplicity(m: Multiset) -> int:
    """Number of ordered tuples with the multiset ``m``: n! / prod mult!."""
    out = math.factorial(len(m))
    for k in Counter(m).values():
        out //= math.factorial(k)
    return out


def _merge(a: Multiset, b: Multiset) -> Multiset:
    return tuple(sorted(a + b))


def _remove(m: Multiset, c: int) -> Multiset:
    i = m.index(c)
    return m[:i] + m[i + 1 :]


def multisets(size: int, degree: int):
    return combinations_with_replacement(range(size), degree)


def _parse_sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "−", "minus"):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


class SymKernel:
    """Symmetric kernel of fixed degree on the cells of a model.

    Instances are treated as immutable values; arithmetic returns new kernels.

    Parameters
    ----------
    model : CellModel
    degree : int
    coeffs : mapping
        Multiset (sorted tuple of cell positions) to coefficient. Unsorted
        keys are sorted; repeated keys after sorting are rejected.
    """

    __slots__ = ("model", "degree", "coeffs")

    def __init__(self, model: CellModel, degree: int, coeffs: Mapping | None = None):
        if degree < 0:
            raise KernelError("degree must be >= 0")
        self.model = model
        self.degree = int(degree)
        clean: dict = {}
        for key, val in (coeffs or {}).items():
            key = tuple(sorted(int(k) for k in key))
            if len(key) != degree:
                raise KernelError(f"key {key} has length {len(key)} != degree {degree}")
            if any(k < 0 or k >= model.size for k in key):
                raise KernelError(f"key {key} references a cell outside the model")
            if key in clean:
                raise KernelError(f"duplicate multiset {key}")
            clean[key] = float(val)
        self.coeffs = clean

    # Construction -------------------------------------------------------

    @classmethod
    def scalar(cls, model: CellModel, value: float) -> "SymKernel":
        return cls(model, 0, {(): value})

    @classmethod
    def zero(cls, model: CellModel, degree: int) -> "SymKernel":
        return cls(model, degree, {})

    @classmethod
    def vector(cls, model: CellModel, values) -> "SymKernel":
        values = np.asarray(values, dtype=float)
        if values.shape != (model.size,):
            raise KernelError(f"vector has shape {values.shape}, model has {model.size} cells")
        return cls(model, 1, {(i,): v for i, v in enumerate(values) if v != 0})

    @classmethod
    def _raw(cls, model, degree, coeffs) -> "SymKernel":
        out = cls.__new__(cls)
        out.model = model
        out.degree = degree
        out.coeffs = coeffs
        return out

    # Access -------------------------------------------------------------

    def __getitem__(self, key) -> float:
        return self.coeffs.get(tuple(sorted(key)), 0.0)

    def to_vector(self) -> np.ndarray:
        if self.degree != 1:
            raise KernelError("only degree-1 kernels convert to vectors")
        v = np.zeros(self.model.size)
        for (i,), c in self.coeffs.items():
            v[i] = c
        return v

    @property
    def value(self) -> float:
        if self.degree != 0:
            raise KernelError("only degree-0 kernels have a scalar value")
        return self.coeffs.get((), 0.0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(v) <= tol for v in self.coeffs.values())

    def __repr__(self):
        return f"SymKernel(degree={self.degree}, terms={len(self.coeffs)})"

    # Arithmetic ---------------------------------------------------------

    def _check(self, other: "SymKernel"):
        if other.model != self.model:
            raise KernelError("kernels live on different models")
        if other.degree != self.degree:
            raise KernelError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other: "SymKernel") -> "SymKernel":
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) + v
        return SymKernel._raw(self.model, self.degree, out)

    def __sub__(self, other: "SymKernel") -> "SymKernel":
        return self + (-1.0) * other

    def __mul__(self, a: float) -> "SymKernel":
        return SymKernel._raw(self.model, self.degree, {k: a * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, a: float) -> "SymKernel":
        return self * (1.0 / a)

    def __neg__(self) -> "SymKernel":
        return self * -1.0

    def allclose(self, other: "SymKernel", rtol: float = 1e-9, atol: float = 1e-12) -> bool:
        self._check(other)
        for k in set(self.coeffs) | set(other.coeffs):
            a, b = self.coeffs.get(k, 0.0), other.coeffs.get(k, 0.0)
            if abs(a - b) > atol + rtol * max(abs(a), abs(b)):
                return False
        return True

    # Serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        ids = self.model.ids
        return {
            "degree": self.degree,
            "terms": [
                {"cells": [ids[i] for i in k], "coeff": v}
                for k, v in sorted(self.coeffs.items())
            ],
        }

    @classmethod
    def from_dict(cls, model: CellModel, data: dict) -> "SymKernel":
        try:
            degree = int(data["degree"])
            terms = data.get("terms", [])
            coeffs: dict = {}
            for t in terms:
                key = tuple(sorted(model.index(c) for c in t["cells"]))
                if key in coeffs:
                    raise KernelError(f"duplicate multiset {t['cells']}")
                coeffs[key] = float(t["coeff"])
        except KeyError as exc:
            raise KernelError(f"malformed kernel object or unknown cell: {exc}") from exc
        return cls(model, degree, coeffs)


def load_kernel(model: CellModel, path: str | Path) -> SymKernel:
    with open(path) as fh:
        return SymKernel.from_dict(model, json.load(fh))


# Products and tensor powers ---------------------------------------------


def sym_product(f: SymKernel, g: SymKernel) -> SymKernel:
    """Symmetric tensor product f (x)^ g.

    The coefficient at a multiset ``u`` is the average over orderings of
    ``u`` of f(first slots) * g(last slots), i.e. a sum over splits
    ``u = a + b`` weighted by ``mult(a) mult(b) / mult(u)``.
    """
    if f.model != g.model:
        raise KernelError("kernels live on different models")
    out: dict = defaultdict(float)
    for a, fa in f.coeffs.items():
        ma = multiplicity(a)
        for b, gb in g.coeffs.items():
            u = _merge(a, b)
            out[u] += ma * multiplicity(b) / multiplicity(u) * fa * gb
    return SymKernel._raw(f.model, f.degree + g.degree, dict(out))


def power(model: CellModel, xi, n: int) -> SymKernel:
    """Tensor power xi^{(x)n}; power(xi, 0) is the scalar 1."""
    if n < 0:
        raise KernelError("n must be >= 0")
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (model.size,):
        raise KernelError(f"vector has shape {xi.shape}, model has {model.size} cells")
    support = [i for i in range(model.size) if xi[i] != 0]
    coeffs = {}
    for m in combinations_with_replacement(support, n):
        coeffs[m] = float(np.prod(xi[list(m)])) if m else 1.0
    return SymKernel._raw(model, n, coeffs)


# Pairings and norms ---------------------------------------------------------


def _weighted_sum(F: SymKernel, f: SymKernel, slot: np.ndarray) -> float:
    total = 0.0
    small, big = (F, f) if len(F.coeffs) <= len(f.coeffs) else (f, F)
    for m, a in small.coeffs.items():
        b = big.coeffs.get(m)
        if b is None:
            continue
        wgt = float(multiplicity(m))
        for i in m:
            wgt *= slot[i]
        total += wgt * a * b
    return total


def inner(F: SymKernel, f: SymKernel, p: float = 0, sign=1) -> float:
    """Weighted pairing sum over ordered tuples of prod(nu w^{+-2p}) F f.

    With ``p = 0`` this is the dual pairing <F, f> between a kernel in
    density coordinates and one in function coordinates.
    """
    if F.model != f.model:
        raise KernelError("kernels live on different models")
    if F.degree != f.degree:
        raise KernelError(f"degree mismatch: {F.degree} vs {f.degree}")
    s = _parse_sign(sign)
    slot = f.model.nu * f.model.w ** (2.0 * s * p)
    return _weighted_sum(F, f, slot)


def norm(f: SymKernel, p: float = 0, sign=1) -> float:
    """|f|_{+-p}."""
    return math.sqrt(max(inner(f, f, p, sign), 0.0))


# Diagonal operators ---------------------------------------------------------


def diagonal_D(f: SymKernel) -> SymKernel:
    """(D f)(t) = f(t, t) for a degree-2 kernel."""
    if f.degree != 2:
        raise KernelError(f"diagonal_D needs degree 2, got {f.degree}")
    return SymKernel._raw(
        f.model, 1, {(a,): v for (a, b), v in f.coeffs.items() if a == b}
    )


def diagonal_Dn(f: SymKernel) -> SymKernel:
    """Sum of the diagonalizations of adjacent slot pairs, degree n+1 -> n.

    On symmetric input every summand symmetrizes to the same kernel, and the
    result at a multiset ``u`` is ``sum_c mult_u(c) f(u + c)``.
    """
    if f.degree < 2:
        raise KernelError(f"diagonal_Dn needs degree >= 2, got {f.degree}")
    out: dict = defaultdict(float)
    for v, val in f.coeffs.items():
        cnt = Counter(v)
        for c, k in cnt.items():
            if k >= 2:
                u = _remove(v, c)
                # mult of c in u is k - 1
                out[u] += (k - 1) * val
    return SymKernel._raw(f.model, f.degree - 1, dict(out))


def diagonal_Dn_adjoint(F: SymKernel) -> SymKernel:
    """Adjoint of :func:`diagonal_Dn` for the p = 0 pairing, degree n -> n+1.

    Kernels are in density coordinates; the diagonal insertion divides by the
    cell mass, ``G(v) = sum_c k_c (k_c - 1) / (n + 1) * F(v - c) / nu_c``
    where ``k_c`` is the multiplicity of ``c`` in ``v``.
    """
    n = F.degree
    if n < 1:
        raise KernelError("adjoint needs degree >= 1")
    nu = F.model.nu
    out: dict = defaultdict(float)
    for u, val in F.coeffs.items():
        cnt = Counter(u)
        for c, j in cnt.items():
            v = _merge(u, (c,))
            k = j + 1
            out[v] += k * (k - 1) / (n + 1) * val / nu[c]
    return SymKernel._raw(F.model, n + 1, dict(out))


def trace_tau(model: CellModel) -> SymKernel:
    """Kernel with <tau, f> = sum_c nu_c f(c, c): density 1/nu_c on the diagonal."""
    return SymKernel._raw(model, 2, {(i, i): 1.0 / c.nu for i, c in enumerate(model.cells)})


def slice(f: SymKernel, cell) -> SymKernel:
    """g(c_1..c_{n-1}) = f(c_1..c_{n-1}, cell)."""
    if f.degree < 1:
        raise KernelError("cannot slice a degree-0 kernel")
    c = f.model.index(cell)
    out = {}
    for v, val in f.coeffs.items():
        if c in v:
            out[_remove(v, c)] = val
    return SymKernel._raw(f.model, f.degree - 1, out)


def contract(f: SymKernel, y) -> SymKernel:
    """Pair the last slot of ``f`` with a density vector: sum_c nu_c y_c f(., c)."""
    if f.degree < 1:
        raise KernelError("cannot contract a degree-0 kernel")
    wt = f.model.nu * np.asarray(y, dtype=float)
    out: dict = defaultdict(float)
    for v, val in f.coeffs.items():
        for c in set(v):
            out[_remove(v, c)] += wt[c] * val
    return SymKernel._raw(f.model, f.degree - 1, dict(out))


def contract_trace(f: SymKernel) -> SymKernel:
    """Pair the last two slots of ``f`` with tau: sum_c nu_c f(., c, c)."""
    if f.degree < 2:
        raise KernelError("trace contraction needs degree >= 2")
    nu = f.model.nu
    out: dict = defaultdict(float)
    for v, val in f.coeffs.items():
        for c, k in Counter(v).items():
            if k >= 2:
                out[_remove(_remove(v, c), c)] += nu[c] * val
    return SymKernel._raw(f.model, f.degree - 2, dict(out))


def random_kernel(
    model: CellModel, degree: int, rng: np.random.Generator, density: float = 1.0, scale: float = 1.0
) -> SymKernel:
    """Kernel with standard normal coefficients on a random subset of multisets."""
    coeffs = {}
    for m in multisets(model.size, degree):
        if degree == 0 or rng.random() < density:
            coeffs[m] = scale * rng.standard_normal()
    return SymKernel._raw(model, degree, coeffs)
