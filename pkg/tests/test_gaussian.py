"""Tests for Gaussian-channel mutual information with finite-support signals."""

import math

import numpy as np
import pytest
from scipy.special import logsumexp, roots_hermitenorm

from infogap.discrete import SignalDist
from infogap.errors import BudgetTooSmall, DomainError, ValidationError
from infogap.gaussian import (
    CenteredGram,
    GaussianChannelSpec,
    MonteCarloBudget,
    QuadratureBudget,
    centered_gram,
    gaussian_mi,
    immse_derivative_check,
    joint_gaussian_mi,
    psd_limit_check,
    q1_gaussian_check,
)

HALF = SignalDist(np.array([0.5, 0.5]))
PM_ONE = GaussianChannelSpec(np.array([1.0, -1.0]))
CONSTANT = GaussianChannelSpec(np.array([0.7, 0.7]))

# ten-million-sample seeded estimate from an independent generator, frozen
REFERENCE_MEAN = 0.33655252250586964
REFERENCE_SE = 0.00017804399686055075


def test_spec_validation():
    spec = GaussianChannelSpec([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    assert spec.n_symbols == 3 and spec.dim == 2
    assert not spec.f.flags.writeable
    with pytest.raises(ValidationError):
        GaussianChannelSpec(np.zeros((0, 1)))
    with pytest.raises(ValidationError):
        GaussianChannelSpec(np.array([1.0, np.inf]))
    with pytest.raises(ValidationError):
        gaussian_mi(HALF, spec, 1.0)


def test_zero_time_is_exact_zero():
    assert gaussian_mi(HALF, PM_ONE, 0.0) == (0.0, 0.0)
    assert joint_gaussian_mi(HALF, PM_ONE, PM_ONE, 0.0, 0.0) == (0.0, 0.0)


def test_negative_time_rejected():
    with pytest.raises(DomainError):
        gaussian_mi(HALF, PM_ONE, -1.0)
    with pytest.raises(DomainError):
        joint_gaussian_mi(HALF, PM_ONE, PM_ONE, 1.0, -0.5)
    with pytest.raises(DomainError):
        gaussian_mi(HALF, PM_ONE, math.nan)


def test_small_time_slope():
    v_fine, _ = gaussian_mi(HALF, PM_ONE, 1e-3)
    v_coarse, _ = gaussian_mi(HALF, PM_ONE, 1e-2)
    assert abs(v_fine / 1e-3 - 0.5) <= 0.01
    assert abs(v_fine / 1e-3 - 0.5) < abs(v_coarse / 1e-2 - 0.5)


def test_quadrature_against_sampled_reference():
    value, err = gaussian_mi(HALF, PM_ONE, 1.0)
    assert err <= 1e-10
    assert abs(value - REFERENCE_MEAN) <= 3.0 * REFERENCE_SE


def test_montecarlo_agrees_with_quadrature():
    quad, _ = gaussian_mi(HALF, PM_ONE, 1.0)
    budget = MonteCarloBudget(seed=11, samples=1_000_000)
    mc, se = gaussian_mi(HALF, PM_ONE, 1.0, method="montecarlo", budget=budget)
    assert 1e-4 <= se <= 1e-3
    assert abs(mc - quad) <= 3.0 * se


def test_montecarlo_deterministic():
    budget = MonteCarloBudget(seed=5, samples=20_000)
    first = gaussian_mi(HALF, PM_ONE, 1.0, method="montecarlo", budget=budget)
    second = gaussian_mi(HALF, PM_ONE, 1.0, method="montecarlo", budget=budget)
    assert first == second


def test_budget_caps():
    tiny = MonteCarloBudget(seed=3, samples=1000, error_cap=1e-9)
    with pytest.raises(BudgetTooSmall):
        gaussian_mi(HALF, PM_ONE, 1.0, method="montecarlo", budget=tiny)
    frozen = QuadratureBudget(start_nodes=40, max_nodes=40, error_cap=1e-6)
    with pytest.raises(BudgetTooSmall):
        gaussian_mi(HALF, PM_ONE, 1.0, budget=frozen)


def test_method_validation():
    with pytest.raises(ValidationError):
        gaussian_mi(HALF, PM_ONE, 1.0, method="laplace")
    with pytest.raises(ValidationError):
        gaussian_mi(HALF, PM_ONE, 1.0, method="montecarlo")
    with pytest.raises(ValidationError):
        gaussian_mi(HALF, PM_ONE, 1.0, budget=MonteCarloBudget(seed=1, samples=10))


def test_quadrature_dimension_limit():
    wide = GaussianChannelSpec(np.eye(3)[:2])
    with pytest.raises(ValidationError):
        gaussian_mi(HALF, wide, 1.0)
    assert gaussian_mi(HALF, wide, 1.0, method="montecarlo",
                       budget=MonteCarloBudget(seed=2, samples=5000))[0] >= 0.0


def test_joint_with_uninformative_block():
    single, e1 = gaussian_mi(HALF, PM_ONE, 1.0)
    padded, e2 = joint_gaussian_mi(HALF, PM_ONE, CONSTANT, 1.0, 1.0)
    assert abs(padded - single) <= e1 + e2 + 1e-12


def test_two_copies_match_doubled_time():
    doubled, e1 = gaussian_mi(HALF, PM_ONE, 2.0)
    copies, e2 = joint_gaussian_mi(HALF, PM_ONE, PM_ONE, 1.0, 1.0)
    assert abs(copies - doubled) <= e1 + e2 + 1e-12


def test_q1_margin_equal_specs():
    margin, err = q1_gaussian_check(HALF, PM_ONE, PM_ONE)
    assert abs(margin) <= 3.0 * err + 1e-10


def test_q1_margin_random_scalar_pairs():
    rng = np.random.default_rng(20608)
    for _ in range(6):
        size = int(rng.integers(2, 4))
        sig = SignalDist(rng.dirichlet(np.ones(size)))
        spec_a = GaussianChannelSpec(rng.normal(size=size))
        spec_b = GaussianChannelSpec(rng.normal(size=size))
        margin, err = q1_gaussian_check(sig, spec_a, spec_b)
        assert err <= 1e-3
        assert margin >= -3.0 * err - 1e-10


def test_q1_uninformative_reduces_to_repetition():
    margin, err = q1_gaussian_check(HALF, PM_ONE, CONSTANT)
    once, e1 = gaussian_mi(HALF, PM_ONE, 1.0)
    twice, e2 = gaussian_mi(HALF, PM_ONE, 2.0)
    assert abs(margin - (2.0 * once - twice)) <= 2.0 * err + 2.0 * e1 + e2 + 1e-12


def test_gram_binary_unit():
    gram = centered_gram(HALF, [PM_ONE])
    assert gram.matrix.shape == (1, 1)
    assert gram.matrix[0, 0] == pytest.approx(1.0, abs=1e-15)


def test_gram_constant_spec_gives_zero_row():
    gram = centered_gram(HALF, [PM_ONE, CONSTANT]).matrix
    assert gram[0, 1] == 0.0 and gram[1, 0] == 0.0 and gram[1, 1] == 0.0


def test_gram_validation():
    with pytest.raises(ValidationError):
        CenteredGram(np.array([[1.0, 2.0], [3.0, 4.0]]))
    with pytest.raises(ValidationError):
        CenteredGram(np.array([[-1.0]]))
    with pytest.raises(ValidationError):
        CenteredGram(np.array([[1.0, 2.0, 3.0]]))


def test_gram_random_instances_are_psd():
    rng = np.random.default_rng(929)
    for _ in range(40):
        size = int(rng.integers(2, 6))
        sig = SignalDist(rng.dirichlet(np.ones(size)))
        specs = [
            GaussianChannelSpec(rng.normal(size=(size, int(rng.integers(1, 3)))))
            for _ in range(int(rng.integers(1, 4)))
        ]
        gram = centered_gram(sig, specs)
        assert gram.smallest_eigenvalue >= -1e-10 * max(gram.trace, 1.0)


def test_psd_limit_validation():
    with pytest.raises(ValidationError):
        psd_limit_check(HALF, [PM_ONE], [0.1])
    with pytest.raises(ValidationError):
        psd_limit_check(HALF, [PM_ONE], [0.05, 0.1])
    with pytest.raises(ValidationError):
        psd_limit_check(HALF, [PM_ONE], [0.1, 0.0])


def test_psd_limit_zero_gram_rows():
    rows = psd_limit_check(HALF, [PM_ONE, CONSTANT], [0.1, 0.05])
    degenerate = [r for r in rows if (r.i, r.j) != (0, 0)]
    assert len(degenerate) == 4
    for row in degenerate:
        assert row.gram_entry == 0.0
        assert row.fitted_constant is None
        assert abs(row.scaled_mi) <= 1e-6


def test_psd_limit_scaled_mi_nonnegative():
    rows = psd_limit_check(HALF, [PM_ONE], [0.2, 0.1, 0.05])
    for row in rows:
        assert row.scaled_mi >= -1e-9


def test_psd_limit_constant_stable_across_grids():
    # regression anchor for the measured small-time coefficient
    fine = psd_limit_check(HALF, [PM_ONE], [0.1, 0.05, 0.025])[0].fitted_constant
    coarse = psd_limit_check(HALF, [PM_ONE], [0.2, 0.1, 0.05])[0].fitted_constant
    assert abs(fine - coarse) <= 0.05 * max(abs(fine), abs(coarse))
    assert abs(fine - 0.5) <= 0.05


def test_immse_constant_embedding():
    numeric, analytic = immse_derivative_check(HALF, CONSTANT)
    assert analytic == 0.0
    assert abs(numeric) <= 1e-12


def test_immse_binary_and_ternary():
    numeric, analytic = immse_derivative_check(HALF, PM_ONE)
    assert analytic == pytest.approx(0.5, abs=1e-15)
    assert numeric == pytest.approx(analytic, rel=1e-5)
    ternary = SignalDist(np.full(3, 1.0 / 3.0))
    spec = GaussianChannelSpec(np.array([-1.0, 0.0, 1.0]))
    numeric, analytic = immse_derivative_check(ternary, spec)
    assert analytic == pytest.approx(2.0 / 3.0 * 0.5, abs=1e-15)
    assert numeric == pytest.approx(analytic, rel=1e-5)


def test_time_monotone_and_concave():
    ts = np.linspace(0.0, 3.0, 13)
    vals = np.array([gaussian_mi(HALF, PM_ONE, float(t))[0] for t in ts])
    assert np.all(np.diff(vals) >= -1e-10)
    assert np.all(np.diff(vals, n=2) <= 1e-10)


def _pair_mi_direct(probs, a, b, n_nodes=80):
    """I between two unit-noise observations of the same signal, by a
    two-axis Gauss-Hermite rule over the mixture components."""
    x, w = roots_hermitenorm(n_nodes)
    w = w / w.sum()
    logp = np.log(probs)
    total = 0.0
    for s, ps in enumerate(probs):
        du = (a[s] + x)[:, None] - a[None, :]
        dv = (b[s] + x)[:, None] - b[None, :]
        lx = logsumexp(logp[None, :] - 0.5 * du**2, axis=1)
        ly = logsumexp(logp[None, :] - 0.5 * dv**2, axis=1)
        lxy = logsumexp(
            logp[None, None, :] - 0.5 * du[:, None, :] ** 2 - 0.5 * dv[None, :, :] ** 2,
            axis=2,
        )
        total += ps * float(w @ (lxy - lx[:, None] - ly[None, :]) @ w)
    return total


def test_pair_mi_route_independence():
    # I(X;X') through the three signal MIs must match the direct two-axis
    # integral of the pair density
    rng = np.random.default_rng(7)
    probs = rng.dirichlet(np.ones(3))
    a = rng.normal(size=3)
    b = rng.normal(size=3)
    sig = SignalDist(probs)
    spec_a = GaussianChannelSpec(a)
    spec_b = GaussianChannelSpec(b)
    ia, _ = gaussian_mi(sig, spec_a, 1.0)
    ib, _ = gaussian_mi(sig, spec_b, 1.0)
    pair, _ = joint_gaussian_mi(sig, spec_a, spec_b, 1.0, 1.0)
    assert ia + ib - pair == pytest.approx(_pair_mi_direct(probs, a, b), abs=1e-8)
