"""Exact probability and information computations over finite alphabets.

Joint laws are dense arrays with one axis per variable.  Mutual information
is computed in nats with a cancellation-safe kernel, because downstream
callers need MI values of order eps^2 for eps down to 1e-4, where the naive
sum of p*log(p/q) terms loses all signal to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AlphabetMismatch, ValidationError, ZeroMarginal

MASS_TOL = 1e-12


def _as_readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SignalDist:
    """A probability vector for the signal over a finite alphabet."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        p = _as_readonly(np.atleast_1d(self.probs))
        if p.ndim != 1 or p.size < 1:
            raise ValidationError("signal distribution must be a nonempty vector")
        if np.any(p < 0):
            raise ValidationError("signal probabilities must be nonnegative")
        if abs(float(p.sum()) - 1.0) > MASS_TOL:
            raise ValidationError(f"signal probabilities sum to {p.sum()!r}, not 1")
        object.__setattr__(self, "probs", p)

    @property
    def size(self) -> int:
        return int(self.probs.size)


@dataclass(frozen=True)
class DiscreteChannel:
    """A row-stochastic conditional law, one output row per signal symbol."""

    rows: np.ndarray

    def __post_init__(self) -> None:
        r = _as_readonly(np.atleast_2d(self.rows))
        if r.ndim != 2 or r.shape[0] < 1 or r.shape[1] < 1:
            raise ValidationError("channel must be a nonempty matrix")
        if np.any(r < 0):
            raise ValidationError("channel rows must be nonnegative")
        bad = np.abs(r.sum(axis=1) - 1.0) > MASS_TOL
        if np.any(bad):
            raise ValidationError(f"channel rows {np.nonzero(bad)[0].tolist()} do not sum to 1")
        object.__setattr__(self, "rows", r)

    @property
    def n_inputs(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n_outputs(self) -> int:
        return int(self.rows.shape[1])


@dataclass(frozen=True)
class JointTable:
    """A dense joint probability table over a product of finite alphabets.

    ``axes`` records the alphabet labels per axis; by default axis ``k`` is
    labeled ``0..n_k-1``.  Labels never enter any computation, they only
    document what each index means.
    """

    mass: np.ndarray
    axes: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self) -> None:
        m = _as_readonly(self.mass)
        if m.ndim < 1:
            raise ValidationError("joint table needs at least one axis")
        if np.any(m < 0):
            raise ValidationError("joint mass must be nonnegative")
        if abs(float(m.sum()) - 1.0) > MASS_TOL:
            raise ValidationError(f"joint mass sums to {m.sum()!r}, not 1")
        ax = self.axes
        if ax is None:
            ax = tuple(tuple(range(n)) for n in m.shape)
        else:
            ax = tuple(tuple(a) for a in ax)
            if len(ax) != m.ndim or any(len(a) != n for a, n in zip(ax, m.shape)):
                raise ValidationError("axis labels do not match the mass shape")
        object.__setattr__(self, "mass", m)
        object.__setattr__(self, "axes", ax)

    @property
    def ndim(self) -> int:
        return int(self.mass.ndim)

    def marginal(self, keep: tuple[int, ...] | list[int]) -> "JointTable":
        """Sum out every axis not listed in ``keep`` (original order kept)."""
        keep_sorted = _check_axes(self.ndim, keep, "keep")
        drop = tuple(i for i in range(self.ndim) if i not in keep_sorted)
        m = self.mass.sum(axis=drop) if drop else self.mass
        return JointTable(np.atleast_1d(m), tuple(self.axes[i] for i in keep_sorted))


def _check_axes(ndim: int, axes, name: str) -> tuple[int, ...]:
    out = tuple(sorted(int(i) for i in axes))
    if len(set(out)) != len(out):
        raise ValidationError(f"duplicate axis in {name}")
    if any(i < 0 or i >= ndim for i in out):
        raise ValidationError(f"axis out of range in {name}")
    return out


def entropy(dist: SignalDist) -> float:
    """Shannon entropy in nats, with the convention 0*log(0) = 0."""
    p = dist.probs[dist.probs > 0]
    return -math.fsum(p * np.log(p))


def _mi_terms(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-cell contributions p*log(p/(a*b)) for positive p, a, b.

    The ratio form log1p((p - a*b)/(a*b)) is exact where it matters, near
    independence, but it is not usable everywhere: for p many orders below
    a*b the ratio rounds to -1, and a*b itself can underflow to 0 while a
    and b are positive.  Far from independence the plain difference of
    logarithms is accurate (each factor is positive, so each log is
    finite), so the kernel switches branch at a ratio of 3/2 resp. 1/2.
    """
    q = a * b
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        x = (p - q) / q
    near = np.isfinite(x) & (np.abs(x) <= 0.5)
    terms = np.empty_like(p)
    terms[near] = p[near] * np.log1p(x[near])
    far = ~near
    terms[far] = p[far] * (np.log(p[far]) - np.log(a[far]) - np.log(b[far]))
    return terms


def mutual_information(joint: JointTable, axes_a, axes_b) -> float:
    """I(A;B) in nats for a bipartition of the table's axes.

    ``axes_a`` and ``axes_b`` must be disjoint and together cover every
    axis.  Cells with zero mass contribute zero.  Raises ZeroMarginal if a
    positive cell sits on a zero marginal, which only a corrupt table can
    produce.
    """
    aa = _check_axes(joint.ndim, axes_a, "axes_a")
    bb = _check_axes(joint.ndim, axes_b, "axes_b")
    if set(aa) & set(bb) or len(aa) + len(bb) != joint.ndim:
        raise ValidationError("axes_a and axes_b must partition the table axes")
    m = joint.mass
    pa = m.sum(axis=bb, keepdims=True)
    pb = m.sum(axis=aa, keepdims=True)
    pos = m > 0
    if not np.any(pos):
        return 0.0
    p = m[pos]
    a = np.broadcast_to(pa, m.shape)[pos]
    b = np.broadcast_to(pb, m.shape)[pos]
    if np.any(a == 0) or np.any(b == 0):
        raise ZeroMarginal("positive mass on a zero marginal")
    return math.fsum(_mi_terms(p, a, b))


def conditional_mi(joint: JointTable, axes_a, axes_b, axes_c) -> float:
    """I(A;B|C) in nats; the three index sets must partition the axes.

    Computed directly from the four marginals as the expectation of
    log(p(a,b,c) p(c) / (p(a,c) p(b,c))), with the same two-branch kernel
    as :func:`mutual_information`.  ``axes_c`` may be empty, in which case
    this reduces to plain mutual information.
    """
    aa = _check_axes(joint.ndim, axes_a, "axes_a")
    bb = _check_axes(joint.ndim, axes_b, "axes_b")
    cc = _check_axes(joint.ndim, axes_c, "axes_c")
    union = set(aa) | set(bb) | set(cc)
    if len(aa) + len(bb) + len(cc) != joint.ndim or len(union) != joint.ndim:
        raise ValidationError("axes_a, axes_b, axes_c must partition the table axes")
    m = joint.mass
    pac = m.sum(axis=bb, keepdims=True)
    pbc = m.sum(axis=aa, keepdims=True)
    pc = m.sum(axis=aa + bb, keepdims=True)
    pos = m > 0
    if not np.any(pos):
        return 0.0
    p = m[pos]
    shape = m.shape
    f_ac = np.broadcast_to(pac, shape)[pos]
    f_bc = np.broadcast_to(pbc, shape)[pos]
    f_c = np.broadcast_to(pc, shape)[pos]
    if np.any(f_ac == 0) or np.any(f_bc == 0):
        raise ZeroMarginal("positive mass on a zero marginal")
    num = p * f_c
    den = f_ac * f_bc
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        x = (num - den) / den
    near = np.isfinite(x) & (np.abs(x) <= 0.5)
    terms = np.empty_like(p)
    terms[near] = p[near] * np.log1p(x[near])
    far = ~near
    terms[far] = p[far] * (
        np.log(p[far]) + np.log(f_c[far]) - np.log(f_ac[far]) - np.log(f_bc[far])
    )
    return math.fsum(terms)


def observe_through(signal: SignalDist, channels) -> JointTable:
    """Joint law of (S, Y_1, ..., Y_k) with conditionally independent Y_i.

    Each Y_i is drawn from channels[i] given S; axis 0 of the result is S.
    """
    chans = list(channels)
    for k, ch in enumerate(chans):
        if not isinstance(ch, DiscreteChannel):
            raise ValidationError(f"channels[{k}] is not a DiscreteChannel")
        if ch.n_inputs != signal.size:
            raise AlphabetMismatch(
                f"channels[{k}] has {ch.n_inputs} rows for a {signal.size}-symbol signal"
            )
    mass = signal.probs.copy()
    for k, ch in enumerate(chans):
        shape = (signal.size,) + (1,) * k + (ch.n_outputs,)
        mass = mass[..., np.newaxis] * ch.rows.reshape(shape)
    return JointTable(mass)
