"""Tabular views of the files the ``infogap`` command line tool writes.

This package performs no information calculations of its own.  Everything it
renders arrives through two file formats:

* the sweep CSV with columns ``p0,p1,epsilon,delta_q2,contour``, one row per
  grid cell, covering a full Cartesian grid of rate pairs, and
* the convergence JSON with an ``epsilon_series`` list (keys ``epsilon``,
  ``ratio``, ``limit``, ``rel_error``) and a ``system_size_series`` list
  (keys ``n``, ``quadratic_form``, ``limit``, ``rel_error``).

The loaders here validate those contracts and hand back numpy arrays shaped
for plotting.  Any deviation raises :class:`MalformedInput`.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import MalformedInput

SWEEP_COLUMNS = ("p0", "p1", "epsilon", "delta_q2", "contour")


@dataclass(frozen=True)
class SweepFrame:
    """A sweep CSV pivoted onto its rate grid.

    ``delta_q2`` and ``contour`` are arranged with axis 0 running over the
    ascending ``p1`` values and axis 1 over the ascending ``p0`` values, so
    ``delta_q2[i, j]`` belongs to the pair ``(p0[j], p1[i])``.
    """

    p0: np.ndarray
    p1: np.ndarray
    epsilon: float
    delta_q2: np.ndarray
    contour: np.ndarray

    def __post_init__(self):
        for name in ("p0", "p1", "delta_q2", "contour"):
            getattr(self, name).flags.writeable = False


@dataclass(frozen=True)
class ConvergenceSeries:
    """The two error series of a convergence JSON, sorted for plotting.

    The rate series is ordered by ascending ``epsilon`` and the system size
    series by ascending ``n``.  Duplicated abscissas are dropped, keeping the
    first occurrence, with a warning.
    """

    epsilon: np.ndarray
    epsilon_rel_error: np.ndarray
    system_size: np.ndarray
    size_rel_error: np.ndarray

    def __post_init__(self):
        for name in ("epsilon", "epsilon_rel_error", "system_size", "size_rel_error"):
            getattr(self, name).flags.writeable = False


def _parse_float(token, path, line_no):
    try:
        value = float(token)
    except ValueError:
        raise MalformedInput(
            f"{path}:{line_no}: {token!r} is not a number"
        ) from None
    if not math.isfinite(value):
        raise MalformedInput(f"{path}:{line_no}: {token!r} is not finite")
    return value


def load_sweep(path) -> SweepFrame:
    """Read a sweep CSV and pivot it onto its full rate grid.

    The file must carry exactly the header ``p0,p1,epsilon,delta_q2,contour``,
    a single epsilon value throughout, and one row for every pair in the
    Cartesian product of the distinct ``p0`` and ``p1`` values.
    """
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedInput(f"{path}: file is empty") from None
        if tuple(header) != SWEEP_COLUMNS:
            raise MalformedInput(
                f"{path}: header {header!r} does not match {list(SWEEP_COLUMNS)!r}"
            )
        cells = {}
        epsilon = None
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(SWEEP_COLUMNS):
                raise MalformedInput(
                    f"{path}:{line_no}: expected {len(SWEEP_COLUMNS)} fields, "
                    f"got {len(row)}"
                )
            p0, p1, eps, delta, contour = (
                _parse_float(token, path, line_no) for token in row
            )
            if epsilon is None:
                epsilon = eps
            elif eps != epsilon:
                raise MalformedInput(
                    f"{path}:{line_no}: epsilon {eps!r} differs from {epsilon!r}"
                )
            if (p0, p1) in cells:
                raise MalformedInput(
                    f"{path}:{line_no}: duplicate cell for rates ({p0}, {p1})"
                )
            cells[(p0, p1)] = (delta, contour)
    if not cells:
        raise MalformedInput(f"{path}: no data rows")
    p0_values = np.array(sorted({key[0] for key in cells}))
    p1_values = np.array(sorted({key[1] for key in cells}))
    if len(cells) != p0_values.size * p1_values.size:
        raise MalformedInput(
            f"{path}: {len(cells)} rows do not fill the "
            f"{p0_values.size} x {p1_values.size} rate grid"
        )
    delta_q2 = np.empty((p1_values.size, p0_values.size))
    contour = np.empty_like(delta_q2)
    for i, p1 in enumerate(p1_values):
        for j, p0 in enumerate(p0_values):
            try:
                delta_q2[i, j], contour[i, j] = cells[(p0, p1)]
            except KeyError:
                raise MalformedInput(
                    f"{path}: missing cell for rates ({p0}, {p1})"
                ) from None
    return SweepFrame(
        p0=p0_values,
        p1=p1_values,
        epsilon=epsilon,
        delta_q2=delta_q2,
        contour=contour,
    )


def _series_arrays(records, x_key, path, series_name):
    xs, errors = [], []
    if not isinstance(records, list):
        raise MalformedInput(f"{path}: {series_name} is not a list")
    for index, record in enumerate(records):
        if not isinstance(record, dict):
            raise MalformedInput(
                f"{path}: {series_name}[{index}] is not an object"
            )
        try:
            x = record[x_key]
            rel_error = record["rel_error"]
        except KeyError as missing:
            raise MalformedInput(
                f"{path}: {series_name}[{index}] lacks key {missing}"
            ) from None
        x = float(x)
        rel_error = float(rel_error)
        if not (math.isfinite(x) and x > 0):
            raise MalformedInput(
                f"{path}: {series_name}[{index}] has non-positive {x_key} {x!r}"
            )
        if not math.isfinite(rel_error):
            raise MalformedInput(
                f"{path}: {series_name}[{index}] has non-finite rel_error"
            )
        xs.append(x)
        errors.append(rel_error)
    if not xs:
        raise MalformedInput(f"{path}: {series_name} is empty")
    xs = np.array(xs)
    errors = np.array(errors)
    unique, first = np.unique(xs, return_index=True)
    if unique.size != xs.size:
        warnings.warn(
            f"{path}: dropped {xs.size - unique.size} duplicated {x_key} "
            f"entries from {series_name}",
            stacklevel=3,
        )
    order = np.sort(first)
    xs, errors = xs[order], errors[order]
    ascending = np.argsort(xs)
    return xs[ascending], errors[ascending]


def load_convergence(path) -> ConvergenceSeries:
    """Read a convergence JSON into its two plottable error series."""
    with open(path) as handle:
        try:
            payload = json.load(handle)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(payload, dict):
        raise MalformedInput(f"{path}: top level is not an object")
    for key in ("epsilon_series", "system_size_series"):
        if key not in payload:
            raise MalformedInput(f"{path}: missing key {key!r}")
    eps, eps_err = _series_arrays(
        payload["epsilon_series"], "epsilon", path, "epsilon_series"
    )
    sizes, size_err = _series_arrays(
        payload["system_size_series"], "n", path, "system_size_series"
    )
    return ConvergenceSeries(
        epsilon=eps,
        epsilon_rel_error=eps_err,
        system_size=sizes,
        size_rel_error=size_err,
    )
