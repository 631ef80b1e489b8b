"""
Hida calculus on chaos vectors: differentiation, its adjoint, coordinate
multiplication and pointwise products.

Products are computed per cell by Charlier linearization: a Wick monomial
over a kernel is a combination of products prod_c C_{k_c}(X_c, nu_c), and
C_a C_b expands back into Charlier polynomials exactly.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from itertools import product as cartesian

from . import model as _model
from .chaos import ChaosVector, fock_norm
from .charlier import charlier_linearize
from .symtensor import SymKernel, multiplicity, slice, sym_product

__all__ = [
    "hida_derivative",
    "hida_adjoint",
    "coord_mult",
    "coordinate_distribution",
    "charlier_linearize",
    "pointwise_product",
    "product_bound",
    "ProductBoundReport",
]


def hida_derivative(phi: ChaosVector, cell) -> ChaosVector:
    """Kernels n * f^(n)(., ..., ., cell) of the derivative at ``cell``.

    The truncation drops by one; the derivative of a constant is the zero
    vector of truncation 0.
    """
    model = phi.model
    model.index(cell)
    if phi.trunc == 0:
        return ChaosVector.vacuum(model, 0.0)
    return ChaosVector(
        model, [n * slice(phi[n], cell) for n in range(1, phi.trunc + 1)]
    )


def hida_adjoint(Phi: ChaosVector, cell) -> ChaosVector:
    """(d*_c F)^(n+1) = F^(n) (x)^ delta_c, with delta_c in density coordinates."""
    model = Phi.model
    delta = SymKernel.vector(model, model.delta(cell))
    ks: list = [SymKernel.zero(model, 0)]
    ks += [sym_product(F, delta) for F in Phi.kernels]
    return ChaosVector(model, ks)


def coord_mult(phi: ChaosVector, cell) -> ChaosVector:
    """x(cell) . phi = d*d phi + d phi + d* phi + phi."""
    d = hida_derivative(phi, cell)
    return hida_adjoint(d, cell) + d + hida_adjoint(phi, cell) + phi


def coordinate_distribution(model, cell) -> ChaosVector:
    """x(cell) = <:x^1:, delta_cell> + 1 as a chaos vector."""
    return ChaosVector(model, [SymKernel.scalar(model, 1.0), SymKernel.vector(model, model.delta(cell))])


def _counts(m: tuple, size: int) -> tuple:
    out = [0] * size
    for i in m:
        out[i] += 1
    return tuple(out)


def pointwise_product(phi: ChaosVector, psi: ChaosVector) -> ChaosVector:
    """Chaos kernels of the pointwise product, truncation trunc(phi) + trunc(psi).

    Exact: finite inputs give a finite output with no discarded tail.
    """
    if phi.model != psi.model:
        raise ValueError("chaos vectors live on different models")
    model = phi.model
    nu = model.nu
    size = model.size
    N = phi.trunc + psi.trunc
    out = [defaultdict(float) for _ in range(N + 1)]

    def terms(v):
        return [
            (_counts(m, size), multiplicity(m) * val)
            for k in v.kernels
            for m, val in k.coeffs.items()
            if val != 0.0
        ]

    left, right = terms(phi), terms(psi)
    for a, fa in left:
        for b, gb in right:
            lins = [charlier_linearize(a[c], b[c], nu[c]) for c in range(size)]
            for ks in cartesian(*(range(a[c] + b[c] + 1) for c in range(size))):
                coef = fa * gb
                for c in range(size):
                    coef *= lins[c][ks[c]]
                if coef == 0.0:
                    continue
                target = tuple(i for i, k in enumerate(ks) for _ in range(k))
                out[len(target)][target] += coef / multiplicity(target)
    return ChaosVector(model, [SymKernel._raw(model, n, dict(d)) for n, d in enumerate(out)])


# Norm bound for products --------------------------------------------------------------


@dataclass
class ProductBoundReport:
    p: int
    q: int
    y_p: float
    ratio: float
    const: float
    lhs: float
    rhs: float
    kappa: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + 1e-12)

    def to_dict(self) -> dict:
        return dict(self.__dict__, **{"pass": self.passed})


def product_constants(model, p: int) -> tuple[int, float, float, float]:
    """(q, Y_p, r, const) for the product estimate at level ``p``.

    ``q`` is the smallest positive integer with rho^q < (1 - rho)^2 / Y_p,
    ``r = (1 - rho)^-2 Y_p rho^q`` and
    ``const = 1/2 (1 - rho)^-2 (sum_n (n+1)^2 (n+2)^2 r^(2n))^(1/2)``.
    """
    rho = _model.rho(model)
    if not rho < 1:
        raise ValueError("product bound needs rho < 1")
    y_p = max(1.0, _model.c_p(model, p)) * max(1.0, _model.delta_inf(model))
    target = (1.0 - rho) ** 2 / y_p
    q = 1
    while not rho**q < target:
        q += 1
    r = y_p * rho**q / (1.0 - rho) ** 2
    assert r < 1.0, "series for the product constant diverges"
    total, n = 0.0, 0
    while True:
        t = (n + 1) ** 2 * (n + 2) ** 2 * r ** (2 * n)
        total += t
        if t < 1e-18 * total and n > 4:
            break
        n += 1
    const = 0.5 * (1.0 - rho) ** -2 * math.sqrt(total)
    return q, y_p, r, const


def product_bound(phi: ChaosVector, psi: ChaosVector, p: int = 1, kappa: float = 1.0) -> ProductBoundReport:
    """Compare ||phi psi||_{kappa,p} with const ||phi||_{kappa,p+1} ||psi||_{kappa,p+q}."""
    if p < 1:
        raise ValueError("p must be >= 1")
    q, y_p, r, const = product_constants(phi.model, p)
    prod = pointwise_product(phi, psi)
    lhs = fock_norm(prod, kappa, p, 1)
    rhs = const * fock_norm(phi, kappa, p + 1, 1) * fock_norm(psi, kappa, p + q, 1)
    return ProductBoundReport(p, q, y_p, r, const, lhs, rhs, kappa)
