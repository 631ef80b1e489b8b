import math

import numpy as np
import pytest

from pwnoise.charlier import (
    charlier,
    charlier_all,
    charlier_linearize,
    charlier_to_monomial,
    monomial_to_charlier,
)


def falling(u, k):
    out = 1.0
    for i in range(k):
        out *= u - i
    return out


def charlier_gf(n, u, tau):
    # product of the expansions of (1+w)^u and exp(-w tau)
    return sum(math.comb(n, k) * falling(u, k) * (-tau) ** (n - k) for k in range(n + 1))


def test_low_orders():
    assert charlier(0, 2.7, 0.4) == 1.0
    assert charlier(1, 2.7, 0.4) == pytest.approx(2.3)
    assert charlier(2, 3, 0.5) == pytest.approx(3.25)
    assert charlier(2, 4, 0.5) - charlier(2, 3, 0.5) == pytest.approx(5.0)
    assert 2 * charlier(1, 3, 0.5) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        charlier(2, 1.0, 0.0)


@pytest.mark.parametrize("tau", [0.3, 0.5, 1.0, 2.2])
def test_recurrence_matches_generating_function(tau):
    for u in np.linspace(-2, 7, 13):
        for n in range(10):
            assert charlier(n, u, tau) == pytest.approx(charlier_gf(n, u, tau), rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("tau", [0.3, 0.5, 1.0])
@pytest.mark.parametrize("u", range(7))
def test_generating_function_partial_sums(u, tau):
    for w in (-0.5, -0.2, 0.3, 0.5):
        exact = math.exp(u * math.log1p(w) - w * tau)
        errs = []
        s = 0.0
        for n in range(40):
            s += w**n / math.factorial(n) * charlier(n, u, tau)
            errs.append(abs(s - exact))
        tail = errs[u + 2 :]
        # monotone up to rounding at the converged end
        assert all(b <= a + 1e-14 for a, b in zip(tail, tail[1:]))
        assert errs[-1] < 1e-12


def test_zero_argument():
    for n in range(8):
        assert charlier(n, 0.0, 0.7) == pytest.approx((-0.7) ** n)


def test_orthogonality_series():
    for tau in (0.3, 1.0):
        k = np.arange(120)
        logw = -tau + k * math.log(tau) - np.array([math.lgamma(i + 1) for i in k])
        wts = np.exp(logw)
        table = charlier_all(6, k, tau)
        for m in range(7):
            for n in range(7):
                val = float(np.sum(wts * table[m] * table[n]))
                exp = math.factorial(n) * tau**n if m == n else 0.0
                assert abs(val - exp) <= 1e-10 * max(1.0, exp)


def test_forward_difference():
    for tau in (0.3, 1.3):
        for u in np.linspace(-1, 5, 7):
            for n in range(1, 9):
                lhs = charlier(n, u + 1, tau) - charlier(n, u, tau)
                assert lhs == pytest.approx(n * charlier(n - 1, u, tau), rel=1e-9, abs=1e-9)


def test_basis_tables_are_inverse():
    for tau in (0.2, 0.9, 2.5):
        A = charlier_to_monomial(8, tau)
        B = monomial_to_charlier(8, tau)
        assert np.allclose(A @ B, np.eye(9), atol=1e-9)
        assert np.allclose(np.tril(A), A) and np.allclose(np.tril(B), B)


def test_linearization(rng):
    tau = 0.6
    assert np.allclose(charlier_linearize(0, 3, tau), [0, 0, 0, 1])
    # C_1^2 = C_2 + C_1 + tau C_0
    assert np.allclose(charlier_linearize(1, 1, tau), [tau, 1, 1])
    for m in range(5):
        for n in range(5):
            a = charlier_linearize(m, n, tau)
            for u in rng.uniform(-2, 6, 20):
                lhs = charlier(m, u, tau) * charlier(n, u, tau)
                rhs = sum(a[k] * charlier(k, u, tau) for k in range(m + n + 1))
                assert rhs == pytest.approx(lhs, rel=1e-9, abs=1e-9)
