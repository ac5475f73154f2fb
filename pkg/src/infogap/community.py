"""Poissonized block-observation model and its curvature diagnostics.

Two Bernoulli channels with mirrored rate pairs are each observed a
Poisson number of times.  The expected mutual information, seen as a
function of the two observation budgets, has nonpositive Hessian entries
everywhere; nevertheless its (1,-1) curvature at the origin is positive
whenever the rates differ.  Both facts are computed here from truncated
series with explicit tail bounds, along with the limit functionals whose
closed form certifies the breakdown.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import stats

from .bernoulli_gap import _mirrored_delta, taylor_gap_closed_form
from .discrete import JointTable, mutual_information
from .errors import (
    DegenerateChannel,
    DomainError,
    HardCapExceeded,
    RateOutOfRange,
    ValidationError,
)

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class SbmParams:
    """Rates, system size and observation budgets for the block model.

    Given the balanced binary signal S = s, each draw through the first
    channel is Ber(p_s/n) and each draw through the second is Ber(q_s/n)
    with (q0, q1) = (p1, p0), so the second channel sees the rates
    mirrored.  The draw counts are Poisson with means n*t1 and n*t2.
    The per-draw rates p0/n and p1/n must be valid probabilities.
    """

    p0: float
    p1: float
    n: int
    t1: float
    t2: float

    def __post_init__(self) -> None:
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        for name in ("p0", "p1"):
            r = getattr(self, name)
            if not (math.isfinite(r) and r >= 0):
                raise RateOutOfRange(f"{name} must be finite and nonnegative")
            if r > self.n:
                raise RateOutOfRange(f"{name}/n exceeds 1")
        for name in ("t1", "t2"):
            t = getattr(self, name)
            if not (math.isfinite(t) and t >= 0):
                raise ValidationError(f"{name} must be finite and nonnegative")
        object.__setattr__(self, "n", int(self.n))
        for name in ("p0", "p1", "t1", "t2"):
            object.__setattr__(self, name, float(getattr(self, name)))


@dataclass(frozen=True)
class TruncationPolicy:
    """Where the Poisson sums stop.

    Each Poisson factor is cut once its remaining tail mass drops below
    ``tail_mass_cap``; ``hard_cap`` bounds the largest admissible count
    per axis regardless of the tail request.
    """

    tail_mass_cap: float = 1e-12
    hard_cap: int = 500

    def __post_init__(self) -> None:
        if not (0.0 < self.tail_mass_cap <= 1e-6):
            raise ValidationError("tail_mass_cap must lie in (0, 1e-6]")
        if not (isinstance(self.hard_cap, (int, np.integer)) and self.hard_cap >= 1):
            raise ValidationError("hard_cap must be a positive integer")
        object.__setattr__(self, "hard_cap", int(self.hard_cap))


def poisson_pmf(t: float, L: int) -> float:
    """The Poisson weight e^{-t} t^L / L!, in log-gamma form.

    Negative counts carry no mass, so any L < 0 returns 0; at t = 0 the
    whole mass sits on L = 0.
    """
    if not (math.isfinite(t) and t >= 0):
        raise DomainError(f"Poisson mean must be finite and nonnegative, got {t!r}")
    L = int(L)
    if L < 0:
        return 0.0
    if t == 0.0:
        return 1.0 if L == 0 else 0.0
    return math.exp(L * math.log(t) - t - math.lgamma(L + 1))


def _poisson_weights(mu: float, m: int) -> np.ndarray:
    return np.array([poisson_pmf(mu, L) for L in range(m + 1)])


def _tail_cutoff(mu: float, cap: float, hard_cap: int) -> int:
    """Smallest count whose Poisson tail beyond it is at most ``cap``."""
    if mu == 0.0:
        return 0
    m = max(int(stats.poisson.isf(cap, mu)), 0)
    while stats.poisson.sf(m, mu) > cap:
        m += 1
    if m > hard_cap:
        raise HardCapExceeded(f"series needs counts up to {m}, policy caps at {hard_cap}")
    return m


@lru_cache(maxsize=4096)
def _pmf_row(draws: int, rate: float) -> np.ndarray:
    row = stats.binom.pmf(np.arange(draws + 1), draws, rate)
    row.setflags(write=False)
    return row


def block_mi(L1: int, L2: int, params: SbmParams) -> float:
    """I(S; observations) after exactly L1 and L2 draws per channel.

    Conditionally on S the draws are exchangeable Bernoulli variables, so
    the pair of success counts is sufficient and the joint law collapses
    to (L1+1)(L2+1) binomial-weighted cells instead of 2^(L1+L2) raw
    outcomes.  The value lies in [0, log 2] and is symmetric in (L1, L2)
    because the mirrored rate pair turns a channel swap into a relabeling
    of the signal.
    """
    L1, L2 = int(L1), int(L2)
    if L1 < 0 or L2 < 0:
        raise ValidationError("draw counts must be nonnegative")
    if L1 == 0 and L2 == 0:
        return 0.0
    r0 = params.p0 / params.n
    r1 = params.p1 / params.n
    mass = 0.5 * np.stack(
        [
            np.outer(_pmf_row(L1, r0), _pmf_row(L2, r1)),
            np.outer(_pmf_row(L1, r1), _pmf_row(L2, r0)),
        ]
    )
    return mutual_information(JointTable(mass), (0,), (1, 2))


@lru_cache(maxsize=32)
def _block_grid(p0: float, p1: float, n: int, l1_max: int, l2_max: int) -> np.ndarray:
    """Table of block_mi values for all count pairs up to the two caps."""
    params = SbmParams(p0, p1, n, 0.0, 0.0)
    out = np.empty((l1_max + 1, l2_max + 1))
    for i in range(l1_max + 1):
        for j in range(l2_max + 1):
            out[i, j] = block_mi(i, j, params)
    out.setflags(write=False)
    return out


def _weighted_fsum(w1: np.ndarray, w2: np.ndarray, table: np.ndarray) -> float:
    return math.fsum(
        float(w1[i]) * float(w2[j]) * float(table[i, j])
        for i in range(w1.size)
        for j in range(w2.size)
    )


def poissonized_mi(
    params: SbmParams, trunc: TruncationPolicy = TruncationPolicy()
) -> tuple[float, float]:
    """Expected MI under Poisson draw counts, with an a-priori tail bound.

    Returns the truncated double series
    sum over (L1, L2) of pi(n t1, L1) pi(n t2, L2) block_mi(L1, L2)
    together with log 2 * (tail1 + tail2), which bounds everything cut
    because every block value lies in [0, log 2].
    """
    mu1 = params.n * params.t1
    mu2 = params.n * params.t2
    m1 = _tail_cutoff(mu1, trunc.tail_mass_cap, trunc.hard_cap)
    m2 = _tail_cutoff(mu2, trunc.tail_mass_cap, trunc.hard_cap)
    w1 = _poisson_weights(mu1, m1)
    w2 = _poisson_weights(mu2, m2)
    grid = _block_grid(params.p0, params.p1, params.n, m1, m2)
    value = _weighted_fsum(w1, w2, grid)
    bound = LOG2 * (float(stats.poisson.sf(m1, mu1)) + float(stats.poisson.sf(m2, mu2)))
    return value, bound


def hessian_entries(
    params: SbmParams,
    trunc: TruncationPolicy = TruncationPolicy(),
    table: np.ndarray | None = None,
) -> tuple[float, float, float]:
    """Second derivatives (h11, h12, h22) of the Poissonized MI in (t1, t2).

    Differentiating the Poisson weights and summing by parts moves each
    derivative onto the block table, so every entry is an n^2-weighted
    Poisson average of a second finite difference of block_mi in the
    counts: h11 averages block(L1+2, L2) - 2 block(L1+1, L2) +
    block(L1, L2), h22 the same along L2, and h12 the mixed difference.
    Fresh draws can only lose ground to conditioning, which makes all
    three nonpositive up to truncation error.

    ``table`` optionally replaces the computed block values; it is indexed
    ``[L1, L2]`` and must cover shape (m1+3, m2+3) for the cutoffs the
    policy implies.
    """
    mu1 = params.n * params.t1
    mu2 = params.n * params.t2
    m1 = _tail_cutoff(mu1, trunc.tail_mass_cap, trunc.hard_cap)
    m2 = _tail_cutoff(mu2, trunc.tail_mass_cap, trunc.hard_cap)
    if table is None:
        table = _block_grid(params.p0, params.p1, params.n, m1 + 2, m2 + 2)
    else:
        table = np.asarray(table, dtype=float)
        if table.ndim != 2 or table.shape[0] < m1 + 3 or table.shape[1] < m2 + 3:
            raise ValidationError(
                f"block table of shape {table.shape} is too small for cutoffs ({m1}, {m2})"
            )
    w1 = _poisson_weights(mu1, m1)
    w2 = _poisson_weights(mu2, m2)
    base = table[: m1 + 1, : m2 + 1]
    d11 = table[2 : m1 + 3, : m2 + 1] - 2.0 * table[1 : m1 + 2, : m2 + 1] + base
    d22 = table[: m1 + 1, 2 : m2 + 3] - 2.0 * table[: m1 + 1, 1 : m2 + 2] + base
    d12 = (
        table[1 : m1 + 2, 1 : m2 + 2]
        - table[1 : m1 + 2, : m2 + 1]
        - table[: m1 + 1, 1 : m2 + 2]
        + base
    )
    n2 = float(params.n) ** 2
    h11 = n2 * _weighted_fsum(w1, w2, d11)
    h12 = n2 * _weighted_fsum(w1, w2, d12)
    h22 = n2 * _weighted_fsum(w1, w2, d22)
    return h11, h12, h22


def nonpositivity_triple(L1: int, L2: int, params: SbmParams) -> tuple[float, float, float]:
    """Second differences of block_mi at (L1, L2): along L1, along L2, mixed.

    Each equals minus a conditional mutual information between fresh draws
    given the earlier ones, hence none can be positive.
    """
    b00 = block_mi(L1, L2, params)
    b10 = block_mi(L1 + 1, L2, params)
    b01 = block_mi(L1, L2 + 1, params)
    d1 = block_mi(L1 + 2, L2, params) - 2.0 * b10 + b00
    d2 = block_mi(L1, L2 + 2, params) - 2.0 * b01 + b00
    d12 = block_mi(L1 + 1, L2 + 1, params) - b10 - b01 + b00
    return d1, d2, d12


def quadratic_form_at_zero(params: SbmParams) -> float:
    """The (1,-1) quadratic form of the MI Hessian at t = (0, 0), exactly.

    At zero budgets only the lowest counts survive the Poisson weights and
    h11 + h22 - 2 h12 collapses to n^2 times the two-channel gap
    2 I(X1;X2) - I(X1;X1') - I(X2;X2') at rate scale 1/n, computed here
    through the pairwise report rather than the series.  A positive value
    witnesses that the MI surface is not concave at the origin.
    """
    return float(params.n) ** 2 * _mirrored_delta(params.p0, params.p1, 1.0 / params.n)


def _check_rates(p0: float, p1: float) -> None:
    if p0 < 0 or p1 < 0 or not (math.isfinite(p0) and math.isfinite(p1)):
        raise RateOutOfRange("rates must be finite and nonnegative")
    if p0 + p1 == 0:
        raise DegenerateChannel("p0 = p1 = 0 leaves no channel")


def j_function(s: float, L1: int, L2: int, p0: float, p1: float) -> float:
    """log[(1/2) e^{-s k} p1^L1 p0^L2 + (1/2) e^{s k} p0^L1 p1^L2], k = (p1-p0)/2.

    Evaluated in log space.  Zero rates follow the convention 0^0 = 1, so
    the value is -inf exactly when a zero rate is raised to a positive
    count in both summands; -inf is returned as a distinguished value, not
    raised, because such terms only ever appear with zero series weight.
    """
    _check_rates(p0, p1)
    L1, L2 = int(L1), int(L2)
    if L1 < 0 or L2 < 0:
        raise ValidationError("counts must be nonnegative")
    kappa = 0.5 * (p1 - p0)
    log_a = -s * kappa + _xlog(L1, p1) + _xlog(L2, p0)
    log_b = s * kappa + _xlog(L1, p0) + _xlog(L2, p1)
    return float(np.logaddexp(log_a, log_b)) - LOG2


def _xlog(L: int, rate: float) -> float:
    if L == 0:
        return 0.0
    return L * math.log(rate) if rate > 0 else -math.inf


def _j_box(s: float, m1: int, m2: int, p0: float, p1: float) -> np.ndarray:
    """j_function on the count box [0, m1] x [0, m2], vectorized."""
    kappa = 0.5 * (p1 - p0)
    L1 = np.arange(m1 + 1)[:, np.newaxis]
    L2 = np.arange(m2 + 1)[np.newaxis, :]

    def xlog(L: np.ndarray, rate: float) -> np.ndarray:
        if rate > 0:
            return L * math.log(rate)
        return np.where(L == 0, 0.0, -np.inf)

    log_a = -s * kappa + xlog(L1, p1) + xlog(L2, p0)
    log_b = s * kappa + xlog(L1, p0) + xlog(L2, p1)
    return np.logaddexp(log_a, log_b) - LOG2


def phi_function(
    t1: float,
    t2: float,
    p0: float,
    p1: float,
    trunc: TruncationPolicy = TruncationPolicy(),
) -> tuple[float, float]:
    """Truncated series for the limit functional phi, plus a tail bound.

    phi(t1, t2) = (1/2) sum over (L1, L2) of
    [pi(p1 t1, L1) pi(p0 t2, L2) + pi(p0 t1, L1) pi(p1 t2, L2)]
    * J(t1 - t2, L1, L2), with J from :func:`j_function`.  The two
    mixture components are summed over their own truncation boxes; a box
    axis whose Poisson mean is zero stops at count 0, which is exactly why
    cells with J = -inf never enter (they need a zero rate raised to a
    positive count, and that rate also drives the matching mean to zero).

    The tail bound combines |J(s, L1, L2)| <= |s (p1-p0)/2| + (L1+L2) M
    + log 2, where M is the largest |log rate| over the positive rates,
    with the identity sum_{L > m} pi(mu, L) L = mu P[Poisson(mu) >= m];
    the two axis tails of each component are added, which double-counts
    the far corner and therefore only loosens the bound.
    """
    _check_rates(p0, p1)
    for name, t in (("t1", t1), ("t2", t2)):
        if not (math.isfinite(t) and t >= 0):
            raise ValidationError(f"{name} must be finite and nonnegative")
    s = t1 - t2
    c0 = abs(s * 0.5 * (p1 - p0)) + LOG2
    c1 = max(abs(math.log(r)) for r in (p0, p1) if r > 0)
    value = 0.0
    bound = 0.0
    for mu_a, mu_b in ((p1 * t1, p0 * t2), (p0 * t1, p1 * t2)):
        m_a = _tail_cutoff(mu_a, trunc.tail_mass_cap, trunc.hard_cap)
        m_b = _tail_cutoff(mu_b, trunc.tail_mass_cap, trunc.hard_cap)
        wa = _poisson_weights(mu_a, m_a)
        wb = _poisson_weights(mu_b, m_b)
        box = _j_box(s, m_a, m_b, p0, p1)
        if np.any(np.isneginf(box) & (np.outer(wa, wb) > 0)):
            raise ValidationError("zero-rate cell carries positive series weight")
        value += 0.5 * _weighted_fsum(wa, wb, box)
        tail_a = float(stats.poisson.sf(m_a, mu_a))
        tail_a_up = float(stats.poisson.sf(m_a - 1, mu_a))
        tail_b = float(stats.poisson.sf(m_b, mu_b))
        tail_b_up = float(stats.poisson.sf(m_b - 1, mu_b))
        bound += 0.5 * (
            (c0 + c1 * mu_b) * tail_a
            + c1 * mu_a * tail_a_up
            + (c0 + c1 * mu_a) * tail_b
            + c1 * mu_b * tail_b_up
        )
    return value, bound


def psi_function(
    t1: float,
    t2: float,
    p0: float,
    p1: float,
    trunc: TruncationPolicy = TruncationPolicy(),
) -> tuple[float, float]:
    """phi shifted by the exact linear drift -(t1 + t2)(p0 + p1)/2.

    The drift is affine in the budgets, so psi and phi share every second
    derivative; the tail bound is phi's unchanged.
    """
    value, bound = phi_function(t1, t2, p0, p1, trunc)
    return value - 0.5 * (t1 + t2) * (p0 + p1), bound


def limit_hessian_combination(p0: float, p1: float) -> float:
    """Closed form for 2 d1 d2 phi - d1^2 phi - d2^2 phi at the origin.

    This is the same function of (p0, p1) as the small-rate limit of the
    two-channel gap, so it delegates to
    :func:`infogap.bernoulli_gap.taylor_gap_closed_form`; it is positive
    whenever p0 differs from p1 and dominates
    (p0-p1)^6 / (6 (p0+p1)^4).  Because the large-system MI surface
    differs from -psi by a term affine in the budgets, this value is also
    the limiting (1,-1) quadratic form of that surface at the origin.
    """
    return taylor_gap_closed_form(p0, p1)
