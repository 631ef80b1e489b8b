import itertools

import numpy as np
import pytest

from pwnoise.model import CellModel
from pwnoise.symtensor import SymKernel


def model_a():
    return CellModel.from_cells([("c1", 0.5, 2.0), ("c2", 0.3, 4.0)])


def model_b():
    return CellModel.from_cells([("a", 0.7, 1.5), ("b", 0.25, 3.0), ("c", 1.1, 2.5)])


def model_one():
    return CellModel.from_cells([("only", 0.8, 2.0)])


MODELS = {"A": model_a, "B": model_b, "one": model_one}


@pytest.fixture
def A():
    return model_a()


@pytest.fixture
def B():
    return model_b()


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def dense(f: SymKernel) -> np.ndarray:
    """Ordered-tuple array of a symmetric kernel."""
    C = f.model.size
    out = np.zeros((C,) * f.degree)
    for idx in itertools.product(range(C), repeat=f.degree):
        out[idx] = f[idx]
    return out


def dense_pair(F: np.ndarray, f: np.ndarray, slot: np.ndarray) -> float:
    """sum over ordered tuples of prod(slot) F f."""
    total = 0.0
    for idx in itertools.product(range(len(slot)), repeat=F.ndim):
        total += np.prod([slot[i] for i in idx]) * F[idx] * f[idx]
    return float(total)


def symmetrize(a: np.ndarray) -> np.ndarray:
    perms = list(itertools.permutations(range(a.ndim)))
    return sum(np.transpose(a, p) for p in perms) / len(perms)


# one line per acceptance criterion, shown at the end of every run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
