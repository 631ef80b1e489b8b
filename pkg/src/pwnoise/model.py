"""
Finite cell model of the intensity measure and its weighted Hilbert chain.

The non-atomic intensity measure of the continuum theory is replaced by a
finite list of cells. Each cell ``c`` carries a mass ``nu_c`` and a chain
weight ``w_c``; the norm of the ``p``-th space of the chain is

    |xi|_p^2 = sum_c nu_c * w_c^(2p) * xi_c^2

for a test vector in function coordinates, and

    |y|_{-p}^2 = sum_c nu_c * w_c^(-2p) * y_c^2

for a dual vector in density coordinates (densities relative to ``nu``).
Every identity of the Poisson white-noise calculus is polynomial per cell,
so it closes exactly on this model.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class ModelError(ValueError):
    """Raised for structurally malformed cell models."""

    def __init__(self, message: str, offending: Sequence[str] = ()):
        super().__init__(message)
        self.offending = list(offending)


@dataclass(frozen=True)
class Cell:
    id: str
    nu: float
    w: float


@dataclass(frozen=True)
class CellModel:
    """Ordered list of cells; cell order is the canonical coordinate order.

    Construction only rejects structural defects (no cells, duplicate ids,
    nonpositive or non-finite masses, nonpositive weights). The chain
    inequalities ``w_c > 1`` and ``sum w_c^-2 < 1`` are checked by
    :func:`validate_assumptions`, so failing models can still be probed.
    """

    cells: tuple[Cell, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        cells = tuple(Cell(str(c.id), float(c.nu), float(c.w)) for c in self.cells)
        object.__setattr__(self, "cells", cells)
        if not cells:
            raise ModelError("model has no cells")
        ids = [c.id for c in cells]
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        if dupes:
            raise ModelError(f"duplicate cell ids: {dupes}", dupes)
        bad = [c.id for c in cells if not (math.isfinite(c.nu) and c.nu > 0)]
        if bad:
            raise ModelError(f"cells with nonpositive or non-finite nu: {bad}", bad)
        bad = [c.id for c in cells if not (math.isfinite(c.w) and c.w > 0)]
        if bad:
            raise ModelError(f"cells with nonpositive or non-finite w: {bad}", bad)
        object.__setattr__(self, "_index", {c.id: i for i, c in enumerate(cells)})

    @classmethod
    def from_cells(cls, cells: Iterable[tuple[str, float, float]]) -> "CellModel":
        return cls(tuple(Cell(*c) for c in cells))

    @classmethod
    def from_dict(cls, data: dict) -> "CellModel":
        try:
            raw = data["cells"]
            cells = tuple(Cell(str(c["id"]), float(c["nu"]), float(c["w"])) for c in raw)
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelError(f"malformed model object: {exc!r}") from exc
        return cls(cells)

    def to_dict(self) -> dict:
        return {"cells": [{"id": c.id, "nu": c.nu, "w": c.w} for c in self.cells]}

    @property
    def size(self) -> int:
        return len(self.cells)

    @property
    def ids(self) -> list[str]:
        return [c.id for c in self.cells]

    @property
    def nu(self) -> np.ndarray:
        return np.array([c.nu for c in self.cells])

    @property
    def w(self) -> np.ndarray:
        return np.array([c.w for c in self.cells])

    def index(self, cell: str | int) -> int:
        """Position of a cell given its id (ints are taken as positions)."""
        if isinstance(cell, (int, np.integer)) and not isinstance(cell, bool):
            if 0 <= cell < self.size:
                return int(cell)
            raise KeyError(f"cell position {cell} out of range")
        try:
            return self._index[cell]
        except KeyError:
            raise KeyError(f"unknown cell id {cell!r}") from None

    # Norms and pairings of vectors -------------------------------------

    def test_norm(self, xi, p: float = 0) -> float:
        """|xi|_p for a test vector in function coordinates."""
        xi = np.asarray(xi, dtype=float)
        return float(np.sqrt(np.sum(self.nu * self.w ** (2 * p) * xi**2)))

    def dual_norm(self, y, p: float = 0) -> float:
        """|y|_{-p} for a dual vector in density coordinates."""
        y = np.asarray(y, dtype=float)
        return float(np.sqrt(np.sum(self.nu * self.w ** (-2 * p) * y**2)))

    def pair(self, y, xi) -> float:
        """<y, xi> = sum_c nu_c y_c xi_c."""
        return float(np.sum(self.nu * np.asarray(y, dtype=float) * np.asarray(xi, dtype=float)))

    def delta(self, cell) -> np.ndarray:
        """Density coordinates of the point mass at ``cell``."""
        i = self.index(cell)
        y = np.zeros(self.size)
        y[i] = 1.0 / self.cells[i].nu
        return y

    def indicator(self, cell) -> np.ndarray:
        xi = np.zeros(self.size)
        xi[self.index(cell)] = 1.0
        return xi

    def counts_to_density(self, counts) -> np.ndarray:
        """Density coordinates X_c / nu_c of a point configuration."""
        return np.asarray(counts, dtype=float) / self.nu


def load_model(path: str | Path) -> CellModel:
    with open(path) as fh:
        return CellModel.from_dict(json.load(fh))


# Chain constants ---------------------------------------------------------


@dataclass(frozen=True)
class ChainConstants:
    rho: float
    c_p: dict
    delta_sq: float
    delta_inf: float


def rho(model: CellModel) -> float:
    """Smallest rho with rho |xi|_{p+1} >= |xi|_p for all xi."""
    return float(np.max(1.0 / model.w))


def c_p(model: CellModel, p: float) -> float:
    """Operator norm of the diagonalization f(s, t) -> f(t, t) on E_p^{(x)2}.

    Attained on kernels supported on a single diagonal point.
    """
    return float(np.max(1.0 / (np.sqrt(model.nu) * model.w**p)))


def delta_sq(model: CellModel) -> float:
    """Squared Hilbert-Schmidt norm of E_1 -> E_0, i.e. sum_c nu_c |delta_c|_{-1}^2."""
    return float(np.sum(model.w**-2.0))


def delta_inf(model: CellModel) -> float:
    """sum_c nu_c |delta_c|_{-1} + max_c |delta_c|_{-1}."""
    d = 1.0 / (np.sqrt(model.nu) * model.w)
    return float(np.sum(model.nu * d) + np.max(d))


def chain_constants(model: CellModel, ps: Iterable[float] = (1, 2, 3)) -> ChainConstants:
    return ChainConstants(
        rho=rho(model),
        c_p={p: c_p(model, p) for p in ps},
        delta_sq=delta_sq(model),
        delta_inf=delta_inf(model),
    )


def delta_dual_norm(model: CellModel, cell, p: float) -> float:
    """|delta_c|_{-p} = (sqrt(nu_c) w_c^p)^-1."""
    c = model.cells[model.index(cell)]
    return 1.0 / (math.sqrt(c.nu) * c.w**p)


# Assumption validation ---------------------------------------------------


@dataclass(frozen=True)
class AssumptionCheck:
    name: str
    passed: bool
    witness: dict


@dataclass(frozen=True)
class AssumptionReport:
    checks: tuple[AssumptionCheck, ...]
    constants: ChainConstants

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> AssumptionCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        k = self.constants
        return {
            "pass": self.passed,
            "assumptions": {c.name: {"pass": c.passed, **c.witness} for c in self.checks},
            "constants": {
                "rho": k.rho,
                "c_p": {str(p): v for p, v in k.c_p.items()},
                "delta_sq": k.delta_sq,
                "delta_inf": k.delta_inf,
            },
        }


def validate_assumptions(model: CellModel, ps: Iterable[float] = (1, 2, 3)) -> AssumptionReport:
    """Check the five standing assumptions on the chain of a cell model.

    Raises
    ------
    ModelError
        If ``model`` is not a structurally valid :class:`CellModel`.
    """
    if not isinstance(model, CellModel):
        raise ModelError(f"expected CellModel, got {type(model).__name__}")
    consts = chain_constants(model, ps)
    small_w = [c.id for c in model.cells if not c.w > 1]
    a1 = AssumptionCheck(
        "A.1",
        consts.delta_sq < 1,
        {"delta_sq": consts.delta_sq, "bound": 1.0},
    )
    a2 = AssumptionCheck(
        "A.2", math.isfinite(consts.delta_inf), {"delta_inf": consts.delta_inf}
    )
    a3 = AssumptionCheck(
        "A.3",
        not small_w and consts.rho < 1,
        {"rho": consts.rho, "offending_cells": small_w},
    )
    a4 = AssumptionCheck(
        "A.4",
        all(math.isfinite(v) and v > 0 for v in consts.c_p.values()),
        {"c_p": {str(p): v for p, v in consts.c_p.items()}},
    )
    # every vector of a finite model has finite-measure support
    a5 = AssumptionCheck("A.5", True, {"trivial": True})
    return AssumptionReport((a1, a2, a3, a4, a5), consts)


# Hermite diagnostic --------------------------------------------------------


def hermite_functions(t: float, J: int) -> np.ndarray:
    """Normalized Hermite functions e_0(t), ..., e_{J-1}(t) by the stable recurrence."""
    if J < 1:
        raise ValueError("J must be >= 1")
    e = np.zeros(J)
    # e_0(t)^2 underflows near |t| ~ 38; the recurrence then stays at zero
    e[0] = math.pi**-0.25 * math.exp(-0.5 * t * t)
    if J > 1:
        e[1] = math.sqrt(2.0) * t * e[0]
    for j in range(1, J - 1):
        e[j + 1] = t * math.sqrt(2.0 / (j + 1)) * e[j] - math.sqrt(j / (j + 1)) * e[j - 1]
    return e


def hermite_delta_norm(t: float, p: float, J: int) -> float:
    """Truncated norm of delta_t in the Hermite scale, (sum_{j<J} e_j(t)^2 (2j+2)^{-2p})^{1/2}."""
    if J < 1:
        raise ValueError("J must be >= 1")
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    e = hermite_functions(t, J)
    j = np.arange(J)
    return float(np.sqrt(np.sum(e**2 * (2.0 * j + 2.0) ** (-2.0 * p))))
