"""Extended-precision evaluation path for small-rate gap computations.

The gap functionals subtract mutual informations that agree to within
O(eps^2), so below eps ~ 1e-2 the f64 kernel starts eating the signal.
This module rebuilds the same joint tables with 60-digit arithmetic and
takes the differences there.  Only tiny tables ever pass through here
(eight to sixteen cells), so plain Python loops are fine.
"""

from __future__ import annotations

import itertools

import numpy as np
from mpmath import mp, mpf

from .errors import ZeroMarginal

DPS = 60


def product_table(probs, rowsets) -> np.ndarray:
    """Object-dtype joint table of (S, Y_1, ..., Y_k), exact in mpf.

    ``probs`` is the signal vector, ``rowsets`` a list of row-stochastic
    matrices; floats are converted exactly, products are rounded only at
    the working precision.
    """
    probs = [mpf(p) for p in probs]
    mats = [[[mpf(v) for v in row] for row in rows] for rows in rowsets]
    shape = (len(probs),) + tuple(len(m[0]) for m in mats)
    out = np.empty(shape, dtype=object)
    for idx in itertools.product(*(range(n) for n in shape)):
        s = idx[0]
        v = probs[s]
        for k, y in enumerate(idx[1:]):
            v = v * mats[k][s][y]
        out[idx] = v
    return out


def table_mi(mass: np.ndarray, axes_a, axes_b):
    """Mutual information of an object-dtype table, as an mpf."""
    aa = tuple(sorted(axes_a))
    bb = tuple(sorted(axes_b))
    pa = mass.sum(axis=bb, keepdims=True)
    pb = mass.sum(axis=aa, keepdims=True)
    pa = np.broadcast_to(pa, mass.shape)
    pb = np.broadcast_to(pb, mass.shape)
    total = mpf(0)
    for idx in itertools.product(*(range(n) for n in mass.shape)):
        p = mass[idx]
        if p == 0:
            continue
        a, b = pa[idx], pb[idx]
        if a == 0 or b == 0:
            raise ZeroMarginal("positive mass on a zero marginal")
        total += p * mp.log(p / (a * b))
    return total


def _marginal(mass: np.ndarray, keep) -> np.ndarray:
    drop = tuple(i for i in range(mass.ndim) if i not in set(keep))
    return mass.sum(axis=drop)


def gap_values(signal_probs, rows1, rows2) -> dict[str, float]:
    """All gap-report quantities at 60-digit precision, floated at the end.

    The two deltas and the identity residual are formed while still in
    mpf, so the catastrophic cancellations happen with 60 digits in hand.
    """
    with mp.workdps(DPS):
        t12 = product_table(signal_probs, [rows1, rows2])
        t11 = product_table(signal_probs, [rows1, rows1])
        t22 = product_table(signal_probs, [rows2, rows2])

        i_s_x1 = table_mi(_marginal(t12, (0, 1)), (0,), (1,))
        i_s_x2 = table_mi(_marginal(t12, (0, 2)), (0,), (1,))
        i_s_x1x2 = table_mi(t12, (0,), (1, 2))
        i_s_x1x1p = table_mi(t11, (0,), (1, 2))
        i_s_x2x2p = table_mi(t22, (0,), (1, 2))
        i_x1x2 = table_mi(_marginal(t12, (1, 2)), (0,), (1,))
        i_x1x1p = table_mi(_marginal(t11, (1, 2)), (0,), (1,))
        i_x2x2p = table_mi(_marginal(t22, (1, 2)), (0,), (1,))

        residual = max(
            abs(i_s_x1x1p - 2 * i_s_x1 + i_x1x1p),
            abs(i_s_x1x2 - i_s_x1 - i_s_x2 + i_x1x2),
            abs(i_s_x2x2p - 2 * i_s_x2 + i_x2x2p),
        )
        delta_q2 = 2 * i_x1x2 - i_x1x1p - i_x2x2p
        delta_q1 = i_s_x1x1p + i_s_x2x2p - 2 * i_s_x1x2
        return {
            "i_x1x2": float(i_x1x2),
            "i_x1x1p": float(i_x1x1p),
            "i_x2x2p": float(i_x2x2p),
            "i_s_x1": float(i_s_x1),
            "i_s_x2": float(i_s_x2),
            "i_s_x1x2": float(i_s_x1x2),
            "i_s_x1x1p": float(i_s_x1x1p),
            "i_s_x2x2p": float(i_s_x2x2p),
            "delta_q2": float(delta_q2),
            "delta_q1": float(delta_q1),
            "identity_residual": float(residual),
        }
