"""
Poisson Wick powers and the objects built from them.

Wick powers are defined by the recursion

    :x^0: = 1,   :x^1: = x - 1,
    <:x^(n+1):, f> = <:x^n: (x)^ :x^1:, f> - <:x^n:, D^(n+1) f>
                     - n <:x^(n-1): (x)^ tau, f>,

with coefficient 1 on the diagonal term. This is the coefficient that makes
the single-cell recursion coincide with the Charlier three-term recurrence,
so every Wick monomial over indicator kernels factorizes into Charlier
polynomials of the cell counts.

Dual vectors ``x`` are density coordinates: a configuration with counts X_c
has ``x_c = X_c / nu_c``, and ``<x, chi_c> = X_c``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np

from . import model as _model
from .chaos import ChaosVector
from .charlier import charlier, charlier_all, charlier_linearize  # noqa: F401
from .model import CellModel
from .symtensor import (
    SymKernel,
    contract,
    contract_trace,
    diagonal_Dn,
    diagonal_Dn_adjoint,
    inner,
    multiplicity,
    norm,
    power,
    sym_product,
    trace_tau,
)


class DomainError(ValueError):
    """Argument outside the domain where a formula is valid."""


def _density(model: CellModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.size,):
        raise ValueError(f"dual vector has shape {x.shape}, model has {model.size} cells")
    if not np.all(np.isfinite(x)):
        raise ValueError("dual vector has non-finite entries")
    return x


# Evaluation of Wick monomials --------------------------------------------------


def wick_eval(x, f: SymKernel) -> float:
    """<:x^n:, f> by the Wick recursion, for ``f`` of degree n.

    Each step pairs one slot of ``f`` with ``x - 1``, applies the diagonal
    operator and contracts two slots with the trace kernel, so no Wick power
    kernel is ever formed.
    """
    model = f.model
    x = _density(model, x)
    xm1 = x - 1.0

    def rec(g: SymKernel) -> float:
        n = g.degree
        if n == 0:
            return g.value
        if n == 1:
            return inner(SymKernel.vector(model, xm1), g)
        # g has degree n = k + 1 with k >= 1
        k = n - 1
        head = contract(g, xm1) - diagonal_Dn(g)
        out = rec(head)
        if g.coeffs:
            out -= k * rec(contract_trace(g))
        return out

    return rec(f)


def wick_eval_factorized(x, f: SymKernel) -> float:
    """<:x^n:, f> through the product of per-cell Charlier polynomials.

    ``f`` is expanded in symmetrized indicator products; the Wick monomial
    over chi_{c1}^{(x)n1} (x)^ ... factorizes as prod_c C_{n_c}(X_c, nu_c)
    with X_c = nu_c x_c. Independent of the recursion in :func:`wick_eval`.
    """
    model = f.model
    x = _density(model, x)
    nu = model.nu
    u = nu * x
    n = f.degree
    tables = [charlier_all(n, u[c], nu[c]) for c in range(model.size)]
    total = 0.0
    for m, val in f.coeffs.items():
        term = multiplicity(m) * val
        for c in set(m):
            term *= tables[c][m.count(c)]
        total += term
    return float(total)


def evaluate(phi: ChaosVector, x) -> float:
    """phi(x) = sum_n <:x^n:, f^(n)> via the recursion."""
    return sum(wick_eval(x, f) for f in phi.kernels)


def evaluate_factorized(phi: ChaosVector, x) -> float:
    return sum(wick_eval_factorized(x, f) for f in phi.kernels)


# Wick power kernels -----------------------------------------------------------


def wick_power_kernels(model: CellModel, y, N: int) -> list[SymKernel]:
    """Kernels :y^0:, ..., :y^N: in density coordinates.

    Uses the operator form of the recursion,
    :y^(n+1): = :y^n: (x)^ :y^1: - D^(n+1)* :y^n: - n :y^(n-1): (x)^ tau.
    """
    y = _density(model, y)
    out = [SymKernel.scalar(model, 1.0)]
    if N == 0:
        return out
    one = SymKernel.vector(model, y - 1.0)
    out.append(one)
    tau = trace_tau(model)
    for n in range(1, N):
        nxt = sym_product(out[n], one) - diagonal_Dn_adjoint(out[n])
        nxt = nxt - n * sym_product(out[n - 1], tau)
        out.append(nxt)
    return out


def wick_power_kernel(model: CellModel, y, n: int) -> SymKernel:
    """The kernel :y^{(x)n}: itself; inner(kernel, f) equals wick_eval(y, f)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return wick_power_kernels(model, y, n)[n]


def delta_distribution(model: CellModel, y, N: int) -> ChaosVector:
    """Truncated white-noise delta at ``y``: kernels :y^n: / n!, n <= N."""
    ks = wick_power_kernels(model, y, N)
    return ChaosVector(model, [k / math.factorial(n) for n, k in enumerate(ks)])


# Wick exponential ------------------------------------------------------------


@dataclass
class SeriesReport:
    value: float
    partial_sums: list[float]
    last_terms: list[float]
    converged: bool
    tol: float
    guard: dict = field(default_factory=dict)


def _exp_guard(model: CellModel, xi, p: float) -> dict:
    sup = float(np.max(np.abs(xi))) if xi.size else 0.0
    pn = model.test_norm(xi, p)
    c1 = _model.c_p(model, 1)
    return {
        "sup_abs": sup,
        "p": p,
        "norm_p": pn,
        "ok": sup < 1 and pn < 1,
        # the hypothesis as printed, |xi|_1 < max{1, C_1}; informational only
        "printed_condition": model.test_norm(xi, 1) < max(1.0, c1),
    }


def wick_exp_series(
    model: CellModel, x, xi, N: int = 20, tol: float = 1e-10, p: float = 1
) -> SeriesReport:
    """Partial sums of sum_n (n!)^{-1} <:x^n:, xi^{(x)n}> up to n = N.

    Raises
    ------
    DomainError
        Unless sup_c |xi_c| < 1 and |xi|_p < 1.
    """
    x = _density(model, x)
    xi = np.asarray(xi, dtype=float)
    guard = _exp_guard(model, xi, p)
    if not guard["ok"]:
        raise DomainError(
            f"wick exponential needs sup|xi| < 1 and |xi|_{p} < 1, got "
            f"{guard['sup_abs']:.6g} and {guard['norm_p']:.6g}"
        )
    ks = wick_power_kernels(model, x, N)
    sums, terms = [], []
    total = 0.0
    for n, K in enumerate(ks):
        t = inner(K, power(model, xi, n)) / math.factorial(n)
        total += t
        sums.append(total)
        terms.append(t)
    tail = [abs(t) for t in terms[-3:]]
    converged = all(t <= tol * max(1.0, abs(total)) for t in tail)
    return SeriesReport(total, sums, terms, converged, tol, guard)


def wick_exp_closed(model: CellModel, x, xi) -> float:
    """exp[<x, log(1 + xi)> - sum_c nu_c xi_c].

    Raises
    ------
    DomainError
        If some xi_c <= -1.
    """
    x = _density(model, x)
    xi = np.asarray(xi, dtype=float)
    if np.any(xi <= -1):
        raise DomainError("wick_exp_closed needs 1 + xi_c > 0 for every cell")
    nu = model.nu
    return float(np.exp(np.sum(nu * x * np.log1p(xi)) - np.sum(nu * xi)))


# Growth bounds -------------------------------------------------------------------


def growth_constants(model: CellModel, p: float, R: float) -> tuple[float, float]:
    """(Y_{p,R}, Z_{p,R}) with Y = R + |delta|_inf + C_p + |delta|^2, Z = max(1, Y)."""
    Y = R + _model.delta_inf(model) + _model.c_p(model, p) + _model.delta_sq(model)
    return Y, max(1.0, Y)


@dataclass
class GrowthReport:
    p: float
    R: float
    Y: float
    Z: float
    norms: list[float]
    bounds: list[float]
    ratios: list[float]
    passed: bool
    derived_ratios: list[float]
    derived_passed: bool

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["pass"] = d.pop("passed")
        return d


def growth_bound_check(model: CellModel, x, p: float = 1, N: int = 8) -> GrowthReport:
    """Compare |:x^(n+1):|_{-p} with n! Z_{p,R}^n for 1 <= n < N, R = |x|_{-p}.

    ``norms[n]`` is |:x^n:|_{-p} for n <= N and ``ratios`` lists
    norm/bound for degrees n + 1 = 2..N. The chain
    |:x^(n+1):| <= n Y max(|:x^n:|, |:x^(n-1):|) started from
    |:x^1:| <= Y only guarantees n! Z^(n+1); ``derived_ratios`` checks that
    bound for 0 <= n < N.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    x = _density(model, x)
    R = model.dual_norm(x, p)
    Y, Z = growth_constants(model, p, R)
    ks = wick_power_kernels(model, x, N)
    norms = [norm(K, p, -1) for K in ks]
    bounds, ratios = [], []
    for n in range(1, N):
        b = math.factorial(n) * Z**n
        bounds.append(b)
        ratios.append(norms[n + 1] / b)
    derived = [norms[n + 1] / (math.factorial(n) * Z ** (n + 1)) for n in range(N)]
    return GrowthReport(
        p,
        R,
        Y,
        Z,
        norms,
        bounds,
        ratios,
        all(r <= 1.0 + 1e-12 for r in ratios),
        derived,
        all(r <= 1.0 + 1e-12 for r in derived),
    )


def p1_selector(model: CellModel, p: int, R: float) -> int:
    """Smallest p1 = p + m with rho^m Z_{p,R} <= 1/2.

    On the ball |x|_{-p} <= R this yields |:x^n:|_{-p1} <= n! 2^{-n}.
    """
    if not R > 0:
        raise ValueError("R must be > 0")
    rho = _model.rho(model)
    if not rho < 1:
        raise DomainError("p1_selector needs rho < 1")
    _, Z = growth_constants(model, p, R)
    m = 0
    while rho**m * Z > 0.5:
        m += 1
    return int(p) + m


def _log_fraction(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


def wick_power_norms_exact(model: CellModel, y, p: int, N: int) -> list[Fraction]:
    """Squared norms |:y^n:|_{-p}^2, n <= N, in exact rational arithmetic.

    By the Charlier factorization the Wick power kernel at a multiset with
    cell counts (k_c) is prod_c C_{k_c}(nu_c y_c, nu_c) / nu_c^{k_c}, hence

        |:y^n:|_{-p}^2 / n! = sum_{sum k_c = n} prod_c C_{k_c}^2 / (k_c! (nu_c w_c^{2p})^{k_c}),

    a convolution over cells. Float inputs are exact binary rationals, so no
    rounding enters until the caller converts. The float kernel recursion
    loses all accuracy past n ~ 15 when some nu_c y_c is a nonnegative
    integer (the Charlier values are then tiny differences of huge terms).
    """
    y = _density(model, y)
    conv = [Fraction(1)] + [Fraction(0)] * N
    for c, cell in enumerate(model.cells):
        nu = Fraction(cell.nu)
        u = nu * Fraction(y[c])
        if float(p).is_integer():
            scale = nu * Fraction(cell.w) ** (2 * int(p))
        else:
            scale = Fraction(cell.nu * cell.w ** (2 * p))
        C = [Fraction(1), u - nu]
        for k in range(1, N):
            C.append((u - k - nu) * C[k] - k * nu * C[k - 1])
        seq = [C[k] ** 2 / (math.factorial(k) * scale**k) for k in range(N + 1)]
        conv = [sum(conv[i] * seq[n - i] for i in range(n + 1)) for n in range(N + 1)]
    return [math.factorial(n) * conv[n] for n in range(N + 1)]


def delta_norm_profile(
    model: CellModel, y, kappa: float, p: float, N: int, method: str = "exact"
) -> dict:
    """Terms and partial sums of sum_n (n!)^{1-kappa} (n!)^{-2} |:y^n:|_{-p}^2.

    ``method="exact"`` takes the norms from :func:`wick_power_norms_exact`;
    ``method="kernel"`` from float kernels of :func:`wick_power_kernels`.
    Terms are combined in log space so large n does not overflow.
    """
    if method == "exact":
        sq = wick_power_norms_exact(model, y, p, N)
        logs = [_log_fraction(q) if q > 0 else -math.inf for q in sq]
    elif method == "kernel":
        ks = wick_power_kernels(model, y, N)
        logs = []
        for K in ks:
            nk = norm(K, p, -1)
            logs.append(2.0 * math.log(nk) if nk > 0 else -math.inf)
    else:
        raise ValueError(f"unknown method {method!r}")
    terms, sums, norms = [], [], []
    total = 0.0
    for n, lg in enumerate(logs):
        norms.append(math.exp(0.5 * lg) if lg < 1400 else math.inf)
        if lg == -math.inf:
            t = 0.0
        else:
            lt = (1.0 - kappa) * math.lgamma(n + 1) - 2.0 * math.lgamma(n + 1) + lg
            t = math.exp(lt) if lt < 700 else math.inf
        total += t
        terms.append(t)
        sums.append(total)
    ratios = [terms[n + 1] / terms[n] if terms[n] > 0 else math.inf for n in range(N)]
    return {
        "kappa": kappa,
        "p": p,
        "norms": norms,
        "terms": terms,
        "partial_sums": sums,
        "ratios": ratios,
    }


def divergence_onset(profile: dict) -> int | None:
    """Smallest n0 such that term ratios exceed 1 for every n >= n0 in the profile."""
    ratios = profile["ratios"]
    n0 = None
    for n in range(len(ratios) - 1, -1, -1):
        if ratios[n] > 1.0:
            n0 = n
        else:
            break
    return n0
