import math

import numpy as np
import pytest

from conftest import MODELS
from pwnoise import chaos as ch
from pwnoise import model as mdl
from pwnoise import symtensor as sym
from pwnoise import wick as wk
from pwnoise.charlier import charlier
from pwnoise.montecarlo import sample_counts
from pwnoise.symtensor import SymKernel


def counts(model, *X):
    return model.counts_to_density(np.array(X, dtype=float))


def test_degree_one_example(A):
    f = SymKernel.vector(A, A.indicator("c1"))
    assert wk.wick_eval(counts(A, 3, 0), f) == pytest.approx(2.5)
    assert wk.wick_eval(counts(A, 3, 7), f) == pytest.approx(2.5)


def test_degree_two_single_cell(A):
    f = sym.power(A, A.indicator("c1"), 2)
    x = counts(A, 3, 0)
    assert wk.wick_eval(x, f) == pytest.approx(3.25)
    assert wk.wick_eval_factorized(x, f) == pytest.approx(3.25)


def test_degree_zero(A, rng):
    for _ in range(5):
        x = rng.normal(size=2)
        assert wk.wick_eval(x, SymKernel.scalar(A, 1.0)) == 1.0


def test_mixed_product_factorizes(A, rng):
    f = sym.sym_product(SymKernel.vector(A, A.indicator("c1")), SymKernel.vector(A, A.indicator("c2")))
    for _ in range(10):
        x = rng.normal(size=2) * 3
        u = A.nu * x
        expected = charlier(1, u[0], 0.5) * charlier(1, u[1], 0.3)
        assert wk.wick_eval(x, f) == pytest.approx(expected, rel=1e-12)
        assert wk.wick_eval_factorized(x, f) == pytest.approx(expected, rel=1e-12)


def test_empty_configuration(B):
    for n in range(6):
        for c in range(3):
            f = sym.power(B, B.indicator(c), n)
            assert wk.wick_eval_factorized(np.zeros(3), f) == pytest.approx((-B.nu[c]) ** n, rel=1e-12)
            assert wk.wick_eval(np.zeros(3), f) == pytest.approx((-B.nu[c]) ** n, rel=1e-12)


@pytest.mark.parametrize("name", ["A", "B", "one"])
def test_recursion_kernel_and_oracle_agree(name, rng):
    m = MODELS[name]()
    for _ in range(60):
        n = int(rng.integers(0, 6))
        f = sym.random_kernel(m, n, rng)
        if rng.random() < 0.5:
            x = m.counts_to_density(rng.poisson(2.0, m.size))
        else:
            x = rng.normal(size=m.size) * 2
        ref = wk.wick_eval_factorized(x, f)
        assert abs(wk.wick_eval(x, f) - ref) <= 1e-9 * (1 + abs(ref))
        K = wk.wick_power_kernel(m, x, n)
        assert abs(sym.inner(K, f) - ref) <= 1e-9 * (1 + abs(ref))


def test_wick_power_kernel_degree_one(B, rng):
    y = rng.normal(size=3)
    assert np.allclose(wk.wick_power_kernel(B, y, 1).to_vector(), y - 1)
    assert wk.wick_power_kernel(B, y, 0).value == 1.0


def test_p1_selector(A):
    rho = mdl.rho(A)
    Z = 2 + mdl.delta_inf(A) + mdl.c_p(A, 1) + mdl.delta_sq(A)
    expected = 1 + math.ceil(math.log(2 * Z) / math.log(1 / rho))
    assert wk.p1_selector(A, 1, 2.0) == expected
    Rs = [0.1, 0.5, 1, 2, 5, 20, 100]
    p1s = [wk.p1_selector(A, 1, R) for R in Rs]
    assert p1s == sorted(p1s)
    with pytest.raises(ValueError):
        wk.p1_selector(A, 1, 0.0)


@pytest.mark.parametrize("name", ["A", "B"])
def test_wick_power_norms_below_factorial_halves(name, rng):
    m = MODELS[name]()
    for _ in range(20):
        y = m.counts_to_density(rng.poisson(m.nu * 3))
        p = 1
        p1 = wk.p1_selector(m, p, max(m.dual_norm(y, p), 1e-12))
        for n, K in enumerate(wk.wick_power_kernels(m, y, 8)):
            assert sym.norm(K, p1, -1) <= math.factorial(n) * 2.0**-n * (1 + 1e-12)


def test_exp_series_examples(A):
    x = counts(A, 1, 0)
    assert wk.wick_exp_series(A, x, [0.0, 0.0]).value == 1.0
    xi = np.array([0.2, -0.1])
    exact = 1.2 * math.exp(-(0.5 * 0.2 - 0.3 * 0.1))
    assert exact == pytest.approx(1.11887258389, abs=1e-11)
    rep = wk.wick_exp_series(A, x, xi, N=20)
    assert rep.converged
    assert rep.value == pytest.approx(exact, abs=1e-10)
    assert wk.wick_exp_closed(A, x, xi) == pytest.approx(exact, rel=1e-15)


def test_exp_series_is_product_of_cell_generating_functions(B, rng):
    for _ in range(10):
        X = rng.poisson(B.nu * 2)
        xi = rng.uniform(-0.25, 0.25, 3)
        per_cell = 1.0
        for c in range(3):
            per_cell *= sum(xi[c] ** n / math.factorial(n) * charlier(n, X[c], B.nu[c]) for n in range(30))
        assert wk.wick_exp_series(B, B.counts_to_density(X), xi, N=20).value == pytest.approx(per_cell, rel=1e-10)


def test_exp_domain_errors(A):
    with pytest.raises(wk.DomainError):
        wk.wick_exp_series(A, np.zeros(2), [1.0, 0.0])
    with pytest.raises(wk.DomainError):
        # pointwise small but |xi|_1 = sqrt(0.3*16)*0.5 > 1
        wk.wick_exp_series(A, np.zeros(2), [0.0, 0.5])
    with pytest.raises(wk.DomainError):
        wk.wick_exp_closed(A, np.zeros(2), [-1.0, 0.0])


def test_exp_closed_empty_configuration(B, rng):
    xi = rng.uniform(-0.5, 0.5, 3)
    assert wk.wick_exp_closed(B, np.zeros(3), xi) == pytest.approx(math.exp(-np.sum(B.nu * xi)))


def test_delta_distribution_evaluates(B, rng):
    for _ in range(10):
        y = rng.normal(size=3)
        N = int(rng.integers(0, 6))
        phi = ch.random_chaos(B, N, rng)
        d = wk.delta_distribution(B, y, N)
        ref = wk.evaluate_factorized(phi, y)
        assert ch.dual_pair(d, phi) == pytest.approx(ref, rel=1e-10, abs=1e-10)
        assert ch.dual_pair(d, phi) == pytest.approx(wk.evaluate(phi, y), rel=1e-10, abs=1e-10)


def test_delta_at_zero(A):
    d = wk.delta_distribution(A, np.zeros(2), 3)
    assert np.allclose(d[1].to_vector(), [-1.0, -1.0])
    assert d[0].value == 1.0


def test_delta_norm_within_geometric_bound(A, rng):
    for _ in range(10):
        y = rng.normal(size=2) * 2
        p1 = wk.p1_selector(A, 1, A.dual_norm(y, 1))
        d = wk.delta_distribution(A, y, 15)
        assert ch.fock_norm(d, -1, p1, -1) ** 2 <= sum(4.0**-n for n in range(16))


def test_growth_bound_empty_configuration(A):
    rep = wk.growth_bound_check(A, np.zeros(2), 1, 8)
    assert rep.norms[1] == pytest.approx(A.dual_norm(np.ones(2), 1))
    assert rep.norms[1] <= mdl.delta_inf(A)
    assert rep.passed and rep.derived_passed


def test_growth_bound_derived_form_holds_for_large_counts(B, rng):
    for _ in range(40):
        X = rng.integers(0, 15, size=3)
        rep = wk.growth_bound_check(B, B.counts_to_density(X), int(rng.integers(1, 3)), 7)
        assert rep.derived_passed


def test_growth_bound_printed_form_can_fail(A):
    # |:x^2:|_{-1} exceeds Z for a cell holding 5 points
    rep = wk.growth_bound_check(A, counts(A, 5, 0), 1, 4)
    assert rep.ratios[0] > 1
    assert not rep.passed and rep.derived_passed


def test_growth_ratios_permutation_invariant(A, rng):
    swapped = mdl.CellModel.from_cells([("c2", 0.3, 4.0), ("c1", 0.5, 2.0)])
    for X in sample_counts(A, 10, rng):
        r1 = wk.growth_bound_check(A, A.counts_to_density(X), 1, 6)
        r2 = wk.growth_bound_check(swapped, swapped.counts_to_density(X[::-1]), 1, 6)
        assert np.allclose(r1.ratios, r2.ratios, rtol=1e-12)


def test_growth_bound_on_poisson_samples(A, rng):
    for X in sample_counts(A, 100, rng):
        assert wk.growth_bound_check(A, A.counts_to_density(X), 1, 8).passed


def test_exact_norms_match_kernels(B, rng):
    for _ in range(5):
        y = rng.normal(size=3)
        exact = wk.wick_power_norms_exact(B, y, 1, 10)
        ks = wk.wick_power_kernels(B, y, 10)
        for q, K in zip(exact, ks):
            assert math.sqrt(q) == pytest.approx(sym.norm(K, 1, -1), rel=1e-9)


def test_profile_dichotomy(A):
    y = np.array([1.0, 1.0])
    prof = wk.delta_norm_profile(A, y, 0.5, 1, 40)
    n0 = wk.divergence_onset(prof)
    assert n0 is not None and n0 <= 30
    p1 = wk.p1_selector(A, 1, A.dual_norm(y, 1))
    bounded = wk.delta_norm_profile(A, y, 1.0, p1, 40)
    assert bounded["partial_sums"][-1] <= 4 / 3


def test_profile_integer_masses_converges(A):
    # nu_c y_c = (1, 0): the Charlier values stay geometric and no divergence appears
    prof = wk.delta_norm_profile(A, counts(A, 1, 0), 0.5, 1, 40)
    assert wk.divergence_onset(prof) is None
    assert prof["terms"][-1] < 1e-20


def test_profile_at_zero_is_finite(A):
    prof = wk.delta_norm_profile(A, np.zeros(2), 0.5, 1, 20)
    assert math.isfinite(prof["partial_sums"][-1])
    with pytest.raises(ValueError):
        wk.delta_norm_profile(A, np.zeros(2), 0.5, 1, 5, method="bogus")
