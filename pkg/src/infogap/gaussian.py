"""Mutual information through additive standard Gaussian noise.

The observation is X = sqrt(t) f(S) + W for a finite-support signal S, an
embedding f into R^d, and W standard normal.  Everything reduces to the
expectation of minus log of a finite Gaussian mixture, which a weighted
Hermite rule integrates to near machine precision for d <= 2; beyond that
a seeded Monte Carlo path takes over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, roots_hermitenorm

from .discrete import SignalDist, entropy
from .errors import BudgetTooSmall, DomainError, ValidationError

SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class GaussianChannelSpec:
    """The signal embedding f as a matrix of shape (alphabet size, d)."""

    f: np.ndarray

    def __post_init__(self) -> None:
        f = np.array(self.f, dtype=float, copy=True)
        if f.ndim == 1:
            f = f[:, np.newaxis]
        if f.ndim != 2 or f.shape[0] < 1 or f.shape[1] < 1:
            raise ValidationError("embedding must be a nonempty matrix")
        if not np.all(np.isfinite(f)):
            raise ValidationError("embedding entries must be finite")
        f.setflags(write=False)
        object.__setattr__(self, "f", f)

    @property
    def n_symbols(self) -> int:
        return int(self.f.shape[0])

    @property
    def dim(self) -> int:
        return int(self.f.shape[1])


@dataclass(frozen=True)
class QuadratureBudget:
    start_nodes: int = 40
    max_nodes: int = 320
    tol: float = 1e-12
    error_cap: float | None = None


@dataclass(frozen=True)
class MonteCarloBudget:
    seed: int
    samples: int
    error_cap: float | None = None
    chunk: int = 1 << 16


def _check_signal_spec(signal: SignalDist, spec: GaussianChannelSpec) -> None:
    if spec.n_symbols != signal.size:
        raise ValidationError(
            f"embedding has {spec.n_symbols} rows for a {signal.size}-symbol signal"
        )


def _log_probs(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(p)


def _mixture_value(probs: np.ndarray, F: np.ndarray, nodes: np.ndarray, weights: np.ndarray) -> float:
    """Integral of -log of the posterior-predictive mixture, one weighted sum per symbol.

    F holds the already scaled embedding, so the displacement between
    symbols s and s2 is F[s] - F[s2] and the integrand for symbol s is
    -log sum_s2 P(s2) exp(-w . D - |D|^2 / 2) over the noise w.
    """
    logp = _log_probs(probs)
    total = 0.0
    for s in range(F.shape[0]):
        if probs[s] == 0.0:
            continue
        D = F[s] - F                       # (n_symbols, d)
        arg = logp[np.newaxis, :] - nodes @ D.T - 0.5 * (D * D).sum(axis=1)[np.newaxis, :]
        total += probs[s] * float(np.dot(weights, logsumexp(arg, axis=1)))
    return -total


def _hermite_nodes(n: int, dim: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_hermitenorm(n)
    w = w / SQRT_TWO_PI
    if dim == 1:
        return x[:, np.newaxis], w
    nodes = np.stack(np.meshgrid(x, x, indexing="ij"), axis=-1).reshape(-1, 2)
    return nodes, np.outer(w, w).ravel()


def _quadrature_mi(probs: np.ndarray, F: np.ndarray, budget: QuadratureBudget) -> tuple[float, float]:
    dim = F.shape[1]
    if dim > 2:
        raise ValidationError("quadrature path supports d <= 2; use montecarlo")
    n = budget.start_nodes
    nodes, weights = _hermite_nodes(n, dim)
    value = _mixture_value(probs, F, nodes, weights)
    err = math.inf
    while 2 * n <= budget.max_nodes:
        n *= 2
        nodes, weights = _hermite_nodes(n, dim)
        refined = _mixture_value(probs, F, nodes, weights)
        err = abs(refined - value)
        value = refined
        if err <= budget.tol:
            break
    return value, err


def _montecarlo_mi(probs: np.ndarray, F: np.ndarray, budget: MonteCarloBudget) -> tuple[float, float]:
    n = int(budget.samples)
    if n < 2:
        raise ValidationError("montecarlo needs at least two samples")
    dim = F.shape[1]
    logp = _log_probs(probs)
    n_chunks = (n + budget.chunk - 1) // budget.chunk
    seeds = np.random.SeedSequence(budget.seed).spawn(n_chunks)
    sums: list[float] = []
    sqsums: list[float] = []
    done = 0
    for child in seeds:
        m = min(budget.chunk, n - done)
        done += m
        rng = np.random.default_rng(child)
        s = rng.choice(probs.size, size=m, p=probs)
        w = rng.standard_normal((m, dim))
        D = F[s][:, np.newaxis, :] - F[np.newaxis, :, :]      # (m, n_symbols, d)
        arg = logp[np.newaxis, :] - np.einsum("md,msd->ms", w, D) - 0.5 * (D * D).sum(axis=2)
        g = -logsumexp(arg, axis=1)
        sums.append(float(g.sum()))
        sqsums.append(float((g * g).sum()))
    mean = math.fsum(sums) / n
    var = max(math.fsum(sqsums) / n - mean * mean, 0.0)
    return mean, math.sqrt(var / n)


def _estimate(signal: SignalDist, F: np.ndarray, method: str, budget) -> tuple[float, float]:
    if method == "quadrature":
        budget = budget if budget is not None else QuadratureBudget()
        if not isinstance(budget, QuadratureBudget):
            raise ValidationError("quadrature method takes a QuadratureBudget")
        value, err = _quadrature_mi(signal.probs, F, budget)
    elif method == "montecarlo":
        if not isinstance(budget, MonteCarloBudget):
            raise ValidationError("montecarlo requires a MonteCarloBudget with seed and samples")
        value, err = _montecarlo_mi(signal.probs, F, budget)
    else:
        raise ValidationError(f"unknown method {method!r}")
    value = min(max(value, 0.0), entropy(signal))
    if budget.error_cap is not None and err > budget.error_cap:
        raise BudgetTooSmall(f"error estimate {err:g} exceeds cap {budget.error_cap:g}")
    return value, err


def gaussian_mi(
    signal: SignalDist,
    spec: GaussianChannelSpec,
    t: float,
    method: str = "quadrature",
    budget=None,
) -> tuple[float, float]:
    """I(S; sqrt(t) f(S) + W) in nats, with an error estimate.

    The estimate is a refinement delta for quadrature and a standard error
    for Monte Carlo.  t = 0 returns exactly (0, 0).
    """
    _check_signal_spec(signal, spec)
    if not (t >= 0.0) or not math.isfinite(t):
        raise DomainError(f"t must be finite and nonnegative, got {t!r}")
    if t == 0.0:
        return 0.0, 0.0
    return _estimate(signal, math.sqrt(t) * spec.f, method, budget)


def joint_gaussian_mi(
    signal: SignalDist,
    spec_a: GaussianChannelSpec,
    spec_b: GaussianChannelSpec,
    t_a: float,
    t_b: float,
    method: str = "quadrature",
    budget=None,
) -> tuple[float, float]:
    """I(S; (X_a(t_a), X_b(t_b))) for independent noise blocks.

    The concatenated observation is itself a Gaussian channel with block
    embedding (sqrt(t_a) f_a, sqrt(t_b) f_b) at unit SNR.
    """
    _check_signal_spec(signal, spec_a)
    _check_signal_spec(signal, spec_b)
    for t in (t_a, t_b):
        if not (t >= 0.0) or not math.isfinite(t):
            raise DomainError(f"t must be finite and nonnegative, got {t!r}")
    if t_a == 0.0 and t_b == 0.0:
        return 0.0, 0.0
    F = np.hstack([math.sqrt(t_a) * spec_a.f, math.sqrt(t_b) * spec_b.f])
    return _estimate(signal, F, method, budget)


def q1_gaussian_check(
    signal: SignalDist,
    spec_a: GaussianChannelSpec,
    spec_b: GaussianChannelSpec,
    method: str = "quadrature",
    budget=None,
) -> tuple[float, float]:
    """Signed margin 2 I(1,1) - I(2,0) - I(0,2) and its combined error.

    Nonnegative margins (up to three times the combined error) witness
    that mixing the channels beats repeating either one.
    """
    mixed, e1 = joint_gaussian_mi(signal, spec_a, spec_b, 1.0, 1.0, method, budget)
    twice_a, e2 = joint_gaussian_mi(signal, spec_a, spec_b, 2.0, 0.0, method, budget)
    twice_b, e3 = joint_gaussian_mi(signal, spec_a, spec_b, 0.0, 2.0, method, budget)
    return 2.0 * mixed - twice_a - twice_b, 2.0 * e1 + e2 + e3


@dataclass(frozen=True)
class CenteredGram:
    """Matrix of squared Frobenius norms of centered cross-moment matrices."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        k = np.array(self.matrix, dtype=float, copy=True)
        if k.ndim != 2 or k.shape[0] != k.shape[1]:
            raise ValidationError("gram matrix must be square")
        if not np.allclose(k, k.T, rtol=0.0, atol=1e-12):
            raise ValidationError("gram matrix must be symmetric")
        if np.any(np.diag(k) < 0):
            raise ValidationError("gram diagonal must be nonnegative")
        k.setflags(write=False)
        object.__setattr__(self, "matrix", k)

    @property
    def smallest_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))


def centered_gram(signal: SignalDist, specs) -> CenteredGram:
    """K[i][j] = |E[fbar_i(S) fbar_j(S)^T]|_F^2 by exact finite sums."""
    specs = list(specs)
    for spec in specs:
        _check_signal_spec(signal, spec)
    p = signal.probs
    centered = [spec.f - p @ spec.f for spec in specs]
    n = len(specs)
    K = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            M = np.einsum("s,si,sj->ij", p, centered[i], centered[j])
            K[i, j] = K[j, i] = float((M * M).sum())
    return CenteredGram(K)


@dataclass(frozen=True)
class PsdLimitRow:
    i: int
    j: int
    t: float
    scaled_mi: float
    gram_entry: float
    fitted_constant: float | None


def _extrapolate(ts: list[float], vs: list[float]) -> float:
    """Linear-in-t extrapolation to t = 0 from the last two points."""
    t1, t2 = ts[-2], ts[-1]
    v1, v2 = vs[-2], vs[-1]
    return v2 + (v1 - v2) * t2 / (t2 - t1)


def psd_limit_check(
    signal: SignalDist,
    specs,
    t_list,
    method: str = "quadrature",
    budget=None,
) -> list[PsdLimitRow]:
    """t^-2 I(X_i(t); X'_j(t)) against the gram entries, per pair and t.

    The pair MI is taken through the identity
    I(X_i;X'_j) = I(S;X_i) + I(S;X_j) - I(S;(X_i,X'_j)), which needs only
    channel MIs.  For gram entries > 0 the fitted constant is the ratio
    extrapolated to t = 0 from the two smallest t; pairs with a zero gram
    entry report the extrapolated scaled MI with no constant.
    """
    specs = list(specs)
    t_list = [float(t) for t in t_list]
    if len(t_list) < 2 or any(t <= 0 for t in t_list) or any(
        a <= b for a, b in zip(t_list, t_list[1:])
    ):
        raise ValidationError("t_list must be decreasing and positive, length >= 2")
    gram = centered_gram(signal, specs).matrix
    rows: list[PsdLimitRow] = []
    for i in range(len(specs)):
        for j in range(i, len(specs)):
            scaled = []
            for t in t_list:
                ia, _ = gaussian_mi(signal, specs[i], t, method, budget)
                ib, _ = gaussian_mi(signal, specs[j], t, method, budget)
                pair, _ = joint_gaussian_mi(signal, specs[i], specs[j], t, t, method, budget)
                scaled.append((ia + ib - pair) / (t * t))
            if gram[i, j] > 0:
                ratios = [v / gram[i, j] for v in scaled]
                fitted = _extrapolate(t_list, ratios)
            else:
                fitted = None
            for t, v in zip(t_list, scaled):
                rows.append(PsdLimitRow(i, j, t, v, float(gram[i, j]), fitted))
    return rows


def immse_derivative_check(
    signal: SignalDist,
    spec: GaussianChannelSpec,
    method: str = "quadrature",
    budget=None,
    h: float = 1e-3,
) -> tuple[float, float]:
    """One-sided derivative of t -> MI at 0 next to half the centered second moment.

    The numeric value extrapolates the forward quotients at h and 2h, so
    the O(h) truncation term cancels and the O(h^2) one remains.
    """
    _check_signal_spec(signal, spec)
    ih, _ = gaussian_mi(signal, spec, h, method, budget)
    i2h, _ = gaussian_mi(signal, spec, 2.0 * h, method, budget)
    numeric = 2.0 * ih / h - i2h / (2.0 * h)
    p = signal.probs
    fbar = spec.f - p @ spec.f
    analytic = 0.5 * float(np.einsum("s,sd,sd->", p, fbar, fbar))
    return numeric, analytic
