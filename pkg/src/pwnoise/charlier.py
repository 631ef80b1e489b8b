"""
Charlier polynomials C_n(u, tau) of the Poisson(tau) law.

Normalization follows the generating function

    sum_n w^n / n! C_n(u, tau) = exp(u log(1 + w) - w tau),

so C_0 = 1, C_1 = u - tau and C_{n+1} = (u - n - tau) C_n - n tau C_{n-1}.
Basis changes between monomials u^k and Charlier polynomials use only this
three-term recurrence (triangular, no matrix inversion).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def _check_tau(tau: float):
    if not tau > 0:
        raise ValueError(f"tau must be > 0, got {tau}")


def charlier(n: int, u, tau: float):
    """C_n(u, tau); ``u`` may be a scalar or an array."""
    if n < 0:
        raise ValueError("n must be >= 0")
    _check_tau(tau)
    u = np.asarray(u, dtype=float)
    prev = np.ones_like(u)
    if n == 0:
        return prev[()] if prev.ndim == 0 else prev
    cur = u - tau
    for k in range(1, n):
        prev, cur = cur, (u - k - tau) * cur - k * tau * prev
    return cur[()] if cur.ndim == 0 else cur


def charlier_all(n: int, u, tau: float) -> np.ndarray:
    """Stack C_0(u), ..., C_n(u) along the first axis."""
    _check_tau(tau)
    u = np.asarray(u, dtype=float)
    out = np.empty((n + 1,) + u.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = u - tau
    for k in range(1, n):
        out[k + 1] = (u - k - tau) * out[k] - k * tau * out[k - 1]
    return out


@lru_cache(maxsize=256)
def _monomial_table(n: int, tau: float) -> np.ndarray:
    # row k: coefficients of C_k in powers of u
    tab = np.zeros((n + 1, n + 1))
    tab[0, 0] = 1.0
    if n >= 1:
        tab[1, 1] = 1.0
        tab[1, 0] = -tau
    for k in range(1, n):
        tab[k + 1, 1:] += tab[k, :-1]
        tab[k + 1] -= (k + tau) * tab[k]
        tab[k + 1] -= k * tau * tab[k - 1]
    tab.setflags(write=False)
    return tab


@lru_cache(maxsize=256)
def _charlier_table(n: int, tau: float) -> np.ndarray:
    # row k: coefficients of u^k in the Charlier basis, from
    # u C_j = C_{j+1} + (j + tau) C_j + j tau C_{j-1}
    tab = np.zeros((n + 1, n + 1))
    tab[0, 0] = 1.0
    for k in range(n):
        row = tab[k]
        nxt = tab[k + 1]
        for j in range(k + 1):
            a = row[j]
            if a == 0.0:
                continue
            nxt[j + 1] += a
            nxt[j] += (j + tau) * a
            if j:
                nxt[j - 1] += j * tau * a
    tab.setflags(write=False)
    return tab


def charlier_to_monomial(n: int, tau: float) -> np.ndarray:
    """Matrix whose row k holds the power-basis coefficients of C_k(., tau), k <= n."""
    _check_tau(tau)
    return _monomial_table(int(n), float(tau))


def monomial_to_charlier(n: int, tau: float) -> np.ndarray:
    """Matrix whose row k holds the Charlier coefficients of u^k, k <= n."""
    _check_tau(tau)
    return _charlier_table(int(n), float(tau))


@lru_cache(maxsize=4096)
def _linearize(m: int, n: int, tau: float) -> np.ndarray:
    A = _monomial_table(max(m, n), tau)
    prod = np.convolve(A[m, : m + 1], A[n, : n + 1])
    B = _charlier_table(m + n, tau)
    out = prod @ B
    out.setflags(write=False)
    return out


def charlier_linearize(m: int, n: int, tau: float) -> np.ndarray:
    """Coefficients a_0..a_{m+n} with C_m C_n = sum_k a_k C_k (parameter tau)."""
    if m < 0 or n < 0:
        raise ValueError("degrees must be >= 0")
    _check_tau(tau)
    return _linearize(int(m), int(n), float(tau))
