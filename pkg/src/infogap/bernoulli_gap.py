"""Gap functionals for pairs of Bernoulli channels.

The central quantity is delta = 2 I(X1;X2) - I(X1;X1') - I(X2;X2') for two
channels observed twice each: positive delta certifies that mixing the two
channels conveys more information than averaging the repeated ones, which
is impossible for Gaussian channels.  The small-rate limit delta/eps^2 has
a closed form, implemented here together with its convergence diagnostics
and the parameter sweep that maps the violation region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import highprec
from .discrete import DiscreteChannel, SignalDist, mutual_information, observe_through
from .errors import DegenerateChannel, DomainError, RateOutOfRange, ValidationError

UNIFORM_BINARY = SignalDist(np.array([0.5, 0.5]))


@dataclass(frozen=True)
class BernoulliPairParams:
    """Success rates for the two channels plus the common scale factor."""

    p0: float
    p1: float
    q0: float
    q1: float
    epsilon: float = 1.0

    def __post_init__(self) -> None:
        rates = (self.p0, self.p1, self.q0, self.q1)
        if any(r < 0 or not math.isfinite(r) for r in rates):
            raise RateOutOfRange("rates must be finite and nonnegative")
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ValidationError("epsilon must be positive and finite")
        if any(self.epsilon * r > 1 for r in rates):
            raise RateOutOfRange("epsilon * rate exceeds 1")


@dataclass(frozen=True)
class GapReport:
    """Pairwise mutual informations of the two-channel experiment.

    ``delta_q2`` is 2 I(X1;X2) - I(X1;X1') - I(X2;X2') and ``delta_q1`` is
    I(S;(X1,X1')) + I(S;(X2,X2')) - 2 I(S;(X1,X2)); the two agree
    identically (a consequence of the decomposition behind
    ``identity_residual``), and a positive value certifies that the mixed
    pair is more informative than the averaged repeated pairs.
    """

    i_x1x2: float
    i_x1x1p: float
    i_x2x2p: float
    delta_q2: float
    delta_q1: float
    identity_residual: float
    i_s_x1: float
    i_s_x2: float
    i_s_x1x2: float
    i_s_x1x1p: float
    i_s_x2x2p: float

    def __post_init__(self) -> None:
        if abs(self.delta_q1 - self.delta_q2) > 1e-10:
            raise ValidationError(
                f"delta_q1 and delta_q2 disagree by {abs(self.delta_q1 - self.delta_q2):g}"
            )


def bernoulli_channel(rate0: float, rate1: float) -> DiscreteChannel:
    """Binary-output channel sending s to Ber(rate_s), outputs {0, 1}."""
    for r in (rate0, rate1):
        if not (0.0 <= r <= 1.0):
            raise RateOutOfRange(f"rate {r!r} outside [0, 1]")
    return DiscreteChannel(np.array([[1.0 - rate0, rate0], [1.0 - rate1, rate1]]))


def gap_report(
    signal: SignalDist,
    P1: DiscreteChannel,
    P2: DiscreteChannel,
    precision: str = "double",
) -> GapReport:
    """All mutual informations of the two-channel experiment, plus the gaps.

    X1, X1' are independent draws through P1 given S, likewise X2, X2'
    through P2.  Since X2 and X2' share the conditional law, the joint of
    (S, X1, X2') equals that of (S, X1, X2), so three tables cover every
    pair.  ``identity_residual`` is the largest violation of
    I(S;(Xi,Xj')) = I(S;Xi) + I(S;Xj) - I(Xi;Xj') over the three pairs;
    it vanishes for conditionally independent observations.

    ``precision`` selects "double" (the default f64 kernel) or "extended"
    (60-digit arithmetic for small-rate regimes where the deltas drown in
    rounding).
    """
    if precision == "extended":
        vals = highprec.gap_values(signal.probs, P1.rows, P2.rows)
        return GapReport(**vals)
    if precision != "double":
        raise ValidationError(f"unknown precision {precision!r}")

    t12 = observe_through(signal, [P1, P2])
    t11 = observe_through(signal, [P1, P1])
    t22 = observe_through(signal, [P2, P2])

    i_s_x1 = mutual_information(t12.marginal((0, 1)), (0,), (1,))
    i_s_x2 = mutual_information(t12.marginal((0, 2)), (0,), (1,))
    i_s_x1x2 = mutual_information(t12, (0,), (1, 2))
    i_s_x1x1p = mutual_information(t11, (0,), (1, 2))
    i_s_x2x2p = mutual_information(t22, (0,), (1, 2))
    i_x1x2 = mutual_information(t12.marginal((1, 2)), (0,), (1,))
    i_x1x1p = mutual_information(t11.marginal((1, 2)), (0,), (1,))
    i_x2x2p = mutual_information(t22.marginal((1, 2)), (0,), (1,))

    residual = max(
        abs(i_s_x1x1p - 2.0 * i_s_x1 + i_x1x1p),
        abs(i_s_x1x2 - i_s_x1 - i_s_x2 + i_x1x2),
        abs(i_s_x2x2p - 2.0 * i_s_x2 + i_x2x2p),
    )
    return GapReport(
        i_x1x2=i_x1x2,
        i_x1x1p=i_x1x1p,
        i_x2x2p=i_x2x2p,
        delta_q2=2.0 * i_x1x2 - i_x1x1p - i_x2x2p,
        delta_q1=i_s_x1x1p + i_s_x2x2p - 2.0 * i_s_x1x2,
        identity_residual=residual,
        i_s_x1=i_s_x1,
        i_s_x2=i_s_x2,
        i_s_x1x2=i_s_x1x2,
        i_s_x1x1p=i_s_x1x1p,
        i_s_x2x2p=i_s_x2x2p,
    )


def g_function(t: float) -> float:
    """g(t) = t + ((1-t)/2) log(1-t) - ((1+t)/2) log(1+t) on [0, 1].

    For t below 1/2 the value is taken from the power series
    sum_{j>=1} t^(2j+1) / (2j (2j+1)), whose terms are all positive, so no
    cancellation occurs where the direct formula would subtract three
    near-equal quantities.  At t = 1 the (1-t) log(1-t) factor is 0 by
    continuity.
    """
    if not (0.0 <= t <= 1.0) or not math.isfinite(t):
        raise DomainError(f"g is defined on [0, 1], got {t!r}")
    if t < 0.5:
        acc = 0.0
        power = t * t * t
        j = 1
        while True:
            term = power / (2 * j * (2 * j + 1))
            acc += term
            if term <= 1e-18 * acc or term == 0.0:
                return acc
            power *= t * t
            j += 1
    low = 0.0 if t == 1.0 else 0.5 * (1.0 - t) * math.log1p(-t)
    return t + low - 0.5 * (1.0 + t) * math.log1p(t)


def taylor_gap_closed_form(p0: float, p1: float) -> float:
    """The small-rate limit of delta/eps^2 for the mirrored configuration.

    Equals (p0-p1)^2 + 2 p0 p1 log(1-tau) - (p0^2+p1^2) log(1+tau) with
    tau = (p0-p1)^2/(p0+p1)^2, evaluated as (p0+p1)^2 g(tau) which is the
    algebraically identical but cancellation-free form.
    """
    if p0 < 0 or p1 < 0:
        raise RateOutOfRange("rates must be nonnegative")
    s = p0 + p1
    if s == 0:
        raise DegenerateChannel("p0 = p1 = 0 leaves no channel")
    tau = ((p0 - p1) / s) ** 2
    return s * s * g_function(min(tau, 1.0))


@dataclass(frozen=True)
class ConvergenceRow:
    epsilon: float
    ratio: float
    limit: float
    rel_error: float


def _mirrored_delta(p0: float, p1: float, epsilon: float) -> float:
    """delta_q2 for channels Ber(eps*p_s) and Ber(eps*q_s) with q = (p1, p0).

    Routes through the extended-precision kernel once eps drops below
    1e-2, where the f64 cancellation budget runs out.
    """
    P1 = bernoulli_channel(epsilon * p0, epsilon * p1)
    P2 = bernoulli_channel(epsilon * p1, epsilon * p0)
    precision = "extended" if epsilon < 1e-2 else "double"
    return gap_report(UNIFORM_BINARY, P1, P2, precision=precision).delta_q2


def taylor_convergence_check(p0: float, p1: float, eps_list) -> list[ConvergenceRow]:
    """delta(eps)/eps^2 against the closed-form limit, one row per eps."""
    if p0 == p1:
        raise DegenerateChannel("p0 = p1 gives a zero limit, no relative error")
    limit = taylor_gap_closed_form(p0, p1)
    eps_list = [float(e) for e in eps_list]
    if not eps_list:
        raise ValidationError("eps_list must be nonempty")
    rows = []
    for eps in eps_list:
        delta = _mirrored_delta(p0, p1, eps)
        ratio = delta / (eps * eps)
        rows.append(
            ConvergenceRow(
                epsilon=eps,
                ratio=ratio,
                limit=limit,
                rel_error=abs(ratio - limit) / abs(limit),
            )
        )
    return rows


def _cell_term(p: float, prod: float) -> float:
    if p == 0.0:
        return 0.0
    x = (p - prod) / prod
    if abs(x) <= 0.5:
        return p * math.log1p(x)
    return p * (math.log(p) - math.log(prod))


def taylor_i_terms(p0: float, p1: float, q0: float, q1: float, epsilon: float):
    """The four cell summands of I(X1;X2) and their sum.

    Cell (0,0) gives I1, (1,0) gives I2, (0,1) gives I3, (1,1) gives I4:
    each is joint mass times log of joint over product-of-marginals for
    that output cell, under the uniform binary signal.
    """
    BernoulliPairParams(p0, p1, q0, q1, epsilon)
    e = epsilon
    a0, a1 = e * p0, e * p1
    b0, b1 = e * q0, e * q1

    p00 = 0.5 * ((1 - a0) * (1 - b0) + (1 - a1) * (1 - b1))
    p10 = 0.5 * (a0 * (1 - b0) + a1 * (1 - b1))
    p01 = 0.5 * ((1 - a0) * b0 + (1 - a1) * b1)
    p11 = 0.5 * (a0 * b0 + a1 * b1)

    m1 = 0.5 * (a0 + a1)
    m2 = 0.5 * (b0 + b1)

    i1 = _cell_term(p00, (1 - m1) * (1 - m2))
    i2 = _cell_term(p10, m1 * (1 - m2))
    i3 = _cell_term(p01, (1 - m1) * m2)
    i4 = _cell_term(p11, m1 * m2)
    return i1, i2, i3, i4, i1 + i2 + i3 + i4


@dataclass(frozen=True)
class SweepRow:
    p0: float
    p1: float
    epsilon: float
    delta_q2: float
    contour: float


def sweep_heatmap(grid_p0, grid_p1, epsilon: float) -> list[SweepRow]:
    """delta_q2 over the rate grid for the mirrored configuration.

    Rows are emitted in row-major order, p0 outer and p1 inner.  The
    contour column carries (p0-p1)^6/(p0+p1)^4, the lower-bound envelope
    of the limit surface.
    """
    grid_p0 = [float(v) for v in grid_p0]
    grid_p1 = [float(v) for v in grid_p1]
    if not grid_p0 or not grid_p1:
        raise ValidationError("sweep grids must be nonempty")
    top = max(max(grid_p0), max(grid_p1))
    if epsilon * top > 1:
        raise RateOutOfRange("epsilon times the largest grid rate exceeds 1")
    rows = []
    for p0 in grid_p0:
        for p1 in grid_p1:
            s = p0 + p1
            contour = 0.0 if s == 0 else (p0 - p1) ** 6 / s**4
            rows.append(
                SweepRow(
                    p0=p0,
                    p1=p1,
                    epsilon=epsilon,
                    delta_q2=_mirrored_delta(p0, p1, epsilon),
                    contour=contour,
                )
            )
    return rows


SWEEP_HEADER = "p0,p1,epsilon,delta_q2,contour"


def write_sweep_csv(rows, path) -> None:
    """Serialize sweep rows with 17-significant-digit round-trip decimals."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(SWEEP_HEADER + "\n")
        for r in rows:
            fh.write(
                f"{r.p0:.17g},{r.p1:.17g},{r.epsilon:.17g},{r.delta_q2:.17g},{r.contour:.17g}\n"
            )
