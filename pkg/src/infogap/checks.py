"""Named self-verification suites over the computational modules.

Each check measures a worst-case defect for one structural claim and
compares it against a tolerance; a check passes when the defect does not
exceed the tolerance.  All randomness is drawn from generators seeded
inside the check, so any subset of checks reproduces bit-identical
margins run to run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bernoulli_gap import g_function, gap_report
from .community import (
    SbmParams,
    TruncationPolicy,
    hessian_entries,
    limit_hessian_combination,
    nonpositivity_triple,
    phi_function,
    poissonized_mi,
)
from .discrete import DiscreteChannel, SignalDist
from .errors import ValidationError
from .gaussian import GaussianChannelSpec, centered_gram, q1_gaussian_check

CHECK_ORDER = (
    "lemma",
    "g-bound",
    "nonpositivity",
    "psd",
    "q1-gaussian",
    "hessian-consistency",
    "limit-combination",
)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named check.

    ``margin`` is the measured worst-case defect in the check's own units
    and ``passed`` is exactly ``margin <= tolerance``.  Bound-style checks
    report the largest signed excess over the bound, so comfortable passes
    show negative margins.
    """

    name: str
    passed: bool
    margin: float
    tolerance: float


def _result(name: str, margin: float, tolerance: float) -> CheckResult:
    return CheckResult(name, margin <= tolerance, margin, tolerance)


def check_lemma() -> CheckResult:
    """Pairwise-MI decomposition residual over random small experiments."""
    rng = np.random.default_rng(1031)
    worst = 0.0
    for _ in range(200):
        ns = int(rng.integers(2, 5))
        na = int(rng.integers(2, 5))
        nb = int(rng.integers(2, 5))
        signal = SignalDist(rng.dirichlet(np.ones(ns)))
        P1 = DiscreteChannel(rng.dirichlet(np.ones(na), size=ns))
        P2 = DiscreteChannel(rng.dirichlet(np.ones(nb), size=ns))
        worst = max(worst, gap_report(signal, P1, P2).identity_residual)
    return _result("lemma", worst, 1e-10)


def check_g_bound() -> CheckResult:
    """g(t) >= t^3/6 across a dense grid of the unit interval."""
    worst = -math.inf
    for t in np.linspace(0.0, 1.0, 10001):
        t = float(t)
        worst = max(worst, t**3 / 6.0 - g_function(t))
    return _result("g-bound", worst, 0.0)


def check_nonpositivity() -> CheckResult:
    """Second differences of the block MI table stay nonpositive."""
    rng = np.random.default_rng(2207)
    worst = -math.inf
    for _ in range(10):
        n = int(rng.integers(10, 201))
        params = SbmParams(float(rng.uniform(0.0, 3.0)), float(rng.uniform(0.0, 3.0)), n, 0.0, 0.0)
        for L1 in range(8):
            for L2 in range(8):
                worst = max(worst, *nonpositivity_triple(L1, L2, params))
    return _result("nonpositivity", worst, 1e-12)


def check_psd() -> CheckResult:
    """Centered gram matrices of random embedding families have no
    eigenvalue below -1e-10 times their trace."""
    rng = np.random.default_rng(3313)
    worst = 0.0
    for _ in range(100):
        ns = int(rng.integers(2, 5))
        d = int(rng.integers(1, 4))
        k = int(rng.integers(2, 5))
        signal = SignalDist(rng.dirichlet(np.ones(ns)))
        specs = [GaussianChannelSpec(rng.uniform(-2.0, 2.0, (ns, d))) for _ in range(k)]
        gram = centered_gram(signal, specs)
        if gram.trace > 0:
            worst = max(worst, -gram.smallest_eigenvalue / gram.trace)
    return _result("psd", worst, 1e-10)


def check_q1_gaussian() -> CheckResult:
    """Mixing two scalar Gaussian-noise channels never loses to repeating
    one of them, within three combined quadrature errors."""
    rng = np.random.default_rng(4099)
    worst = -math.inf
    for _ in range(20):
        ns = int(rng.integers(2, 5))
        signal = SignalDist(rng.dirichlet(np.ones(ns)))
        spec_a = GaussianChannelSpec(rng.uniform(-2.0, 2.0, ns))
        spec_b = GaussianChannelSpec(rng.uniform(-2.0, 2.0, ns))
        value, err = q1_gaussian_check(signal, spec_a, spec_b)
        worst = max(worst, -value - 3.0 * err)
    return _result("q1-gaussian", worst, 0.0)


def check_hessian_consistency() -> CheckResult:
    """Series Hessian entries against central differences of the series MI."""
    trunc = TruncationPolicy()
    worst = -math.inf
    for params in (
        SbmParams(3.0, 1.0, 100, 0.1, 0.1),
        SbmParams(2.0, 0.5, 60, 0.15, 0.25),
    ):
        h11, h12, h22 = hessian_entries(params, trunc)
        _, bound = poissonized_mi(params, trunc)
        step = 1e-3 / params.n

        def value(a: float, b: float) -> float:
            shifted = SbmParams(params.p0, params.p1, params.n, a, b)
            return poissonized_mi(shifted, trunc)[0]

        t1, t2 = params.t1, params.t2
        center = value(t1, t2)
        fd11 = (value(t1 + step, t2) - 2.0 * center + value(t1 - step, t2)) / step**2
        fd22 = (value(t1, t2 + step) - 2.0 * center + value(t1, t2 - step)) / step**2
        fd12 = (
            value(t1 + step, t2 + step)
            - value(t1 + step, t2 - step)
            - value(t1 - step, t2 + step)
            + value(t1 - step, t2 - step)
        ) / (4.0 * step**2)
        slack = max(1e-6 * params.n**2, 10.0 * bound / step**2)
        worst = max(
            worst,
            abs(h11 - fd11) - slack,
            abs(h12 - fd12) - slack,
            abs(h22 - fd22) - slack,
        )
    return _result("hessian-consistency", worst, 0.0)


def check_limit_combination(perturb_j: bool = False) -> CheckResult:
    """Closed-form curvature combination against the series and its envelope.

    One-sided finite differences of the phi series at the origin, with the
    first-order error removed by step halving, must land within 1% of the
    closed form; the closed form itself must dominate the envelope
    (p0-p1)^6 / (6 (p0+p1)^4) on a rate grid.  Both defects are relative,
    so one tolerance covers them.  ``perturb_j`` negates the series value,
    which by linearity equals flipping the sign of its log-mixture kernel;
    it exists to prove the comparison would catch a broken kernel.
    """
    sign = -1.0 if perturb_j else 1.0
    worst = -math.inf
    for p0, p1 in ((3.0, 1.0), (0.8, 0.2), (1.0, 0.0)):
        lim = limit_hessian_combination(p0, p1)
        quotients = []
        for h in (1e-2, 5e-3):
            on_diag = sign * phi_function(h, h, p0, p1)[0]
            axis_1 = sign * phi_function(2.0 * h, 0.0, p0, p1)[0]
            axis_2 = sign * phi_function(0.0, 2.0 * h, p0, p1)[0]
            quotients.append((2.0 * on_diag - axis_1 - axis_2) / h**2)
        extrapolated = 2.0 * quotients[1] - quotients[0]
        worst = max(worst, abs(extrapolated - lim) / lim)
    for p0 in np.linspace(0.1, 1.0, 10):
        for p1 in np.linspace(0.1, 1.0, 10):
            envelope = (p0 - p1) ** 6 / (6.0 * (p0 + p1) ** 4)
            if envelope > 0:
                value = limit_hessian_combination(float(p0), float(p1))
                worst = max(worst, (envelope - value) / envelope)
    return _result("limit-combination", worst, 0.01)


_CHECKS = {
    "lemma": check_lemma,
    "g-bound": check_g_bound,
    "nonpositivity": check_nonpositivity,
    "psd": check_psd,
    "q1-gaussian": check_q1_gaussian,
    "hessian-consistency": check_hessian_consistency,
    "limit-combination": check_limit_combination,
}


def run_checks(only=None, perturb_j: bool = False) -> list[CheckResult]:
    """Run the named checks (all of them by default), in request order.

    ``only`` takes an iterable of names from :data:`CHECK_ORDER`;
    duplicates collapse to the first occurrence.  ``perturb_j`` threads
    the kernel-negation canary into the limit-combination check.
    """
    names = list(CHECK_ORDER) if only is None else [str(n) for n in only]
    seen: list[str] = []
    for name in names:
        if name not in _CHECKS:
            raise ValidationError(f"unknown check {name!r}; choices: {', '.join(CHECK_ORDER)}")
        if name not in seen:
            seen.append(name)
    results = []
    for name in seen:
        if name == "limit-combination":
            results.append(check_limit_combination(perturb_j))
        else:
            results.append(_CHECKS[name]())
    return results
