"""Tests for the paired-Bernoulli gap computations and the small-rate limit."""

import math

import numpy as np
import pytest

from infogap.bernoulli_gap import (
    SWEEP_HEADER,
    UNIFORM_BINARY,
    BernoulliPairParams,
    GapReport,
    bernoulli_channel,
    g_function,
    gap_report,
    sweep_heatmap,
    taylor_convergence_check,
    taylor_gap_closed_form,
    taylor_i_terms,
    write_sweep_csv,
)
from infogap.discrete import (
    DiscreteChannel,
    SignalDist,
    mutual_information,
    observe_through,
)
from infogap.errors import (
    DegenerateChannel,
    DomainError,
    RateOutOfRange,
    ValidationError,
)

LOG2 = math.log(2.0)
LOG3 = math.log(3.0)
LOG5 = math.log(5.0)

I_PAIR = 2.5 * LOG2 - 1.5 * LOG3           # I(X1;X2) for the half/zero pair
I_REPEAT = LOG2 + 0.625 * LOG5 - 1.5 * LOG3  # I(X1;X1') for the same pair

# 60-digit evaluations of the closed form, identical through both of its
# algebraic shapes ((p0+p1)^2 g(tau) and the expanded log differences)
F_08_02 = 0.008098531330292521
F_3_1 = 0.04247205214721688
G_HALF = 0.022614373778890386


def test_bernoulli_channel_rows():
    assert np.array_equal(bernoulli_channel(0.0, 1.0).rows, np.eye(2))
    half_zero = bernoulli_channel(0.5, 0.0)
    assert np.array_equal(half_zero.rows, [[0.5, 0.5], [1.0, 0.0]])
    flat = bernoulli_channel(0.3, 0.3)
    t = observe_through(UNIFORM_BINARY, [flat])
    assert abs(mutual_information(t, (0,), (1,))) <= 1e-15


def test_bernoulli_channel_rate_range():
    with pytest.raises(RateOutOfRange):
        bernoulli_channel(1.2, 0.5)
    with pytest.raises(RateOutOfRange):
        bernoulli_channel(0.5, -0.1)


def test_pair_params_validation():
    with pytest.raises(RateOutOfRange):
        BernoulliPairParams(0.6, 0.2, 0.2, 0.6, epsilon=2.0)
    with pytest.raises(ValidationError):
        BernoulliPairParams(0.5, 0.5, 0.5, 0.5, epsilon=0.0)
    with pytest.raises(RateOutOfRange):
        BernoulliPairParams(-0.5, 0.5, 0.5, 0.5)


def test_gap_report_half_zero_pair():
    rep = gap_report(
        UNIFORM_BINARY, bernoulli_channel(0.5, 0.0), bernoulli_channel(0.0, 0.5)
    )
    assert rep.i_x1x2 == pytest.approx(I_PAIR, abs=1e-12)
    assert rep.i_x1x1p == pytest.approx(I_REPEAT, abs=1e-12)
    assert rep.i_x2x2p == pytest.approx(I_REPEAT, abs=1e-12)
    assert rep.delta_q2 == pytest.approx(2 * I_PAIR - 2 * I_REPEAT, abs=1e-12)
    assert rep.delta_q2 > 0
    assert abs(rep.delta_q1 - rep.delta_q2) <= 1e-10
    assert rep.identity_residual <= 1e-12


def test_gap_report_extended_matches_double():
    P1 = bernoulli_channel(0.5, 0.0)
    P2 = bernoulli_channel(0.0, 0.5)
    d = gap_report(UNIFORM_BINARY, P1, P2)
    e = gap_report(UNIFORM_BINARY, P1, P2, precision="extended")
    for field in (
        "i_x1x2",
        "i_x1x1p",
        "i_x2x2p",
        "delta_q2",
        "delta_q1",
        "i_s_x1",
        "i_s_x2",
        "i_s_x1x2",
        "i_s_x1x1p",
        "i_s_x2x2p",
    ):
        assert getattr(d, field) == pytest.approx(getattr(e, field), abs=1e-13)


def test_gap_report_equal_channels():
    ch = bernoulli_channel(0.37, 0.81)
    rep = gap_report(UNIFORM_BINARY, ch, ch)
    assert abs(rep.delta_q2) <= 1e-12


def test_gap_report_point_mass_signal():
    rep = gap_report(
        SignalDist(np.array([1.0, 0.0])),
        bernoulli_channel(0.5, 0.0),
        bernoulli_channel(0.0, 0.5),
    )
    for field in rep.__dataclass_fields__:
        assert abs(getattr(rep, field)) <= 1e-12


def test_gap_report_unknown_precision():
    ch = bernoulli_channel(0.4, 0.2)
    with pytest.raises(ValidationError):
        gap_report(UNIFORM_BINARY, ch, ch, precision="quad")


def test_gap_report_delta_guard():
    with pytest.raises(ValidationError):
        GapReport(
            i_x1x2=0.1,
            i_x1x1p=0.05,
            i_x2x2p=0.05,
            delta_q2=0.1,
            delta_q1=0.2,
            identity_residual=0.0,
            i_s_x1=0.1,
            i_s_x2=0.1,
            i_s_x1x2=0.2,
            i_s_x1x1p=0.2,
            i_s_x2x2p=0.2,
        )


def test_decomposition_residual_random_triples():
    rng = np.random.default_rng(515)
    for _ in range(50):
        ns = int(rng.integers(2, 5))
        sig = SignalDist(rng.dirichlet(np.ones(ns)))
        P1 = DiscreteChannel(rng.dirichlet(np.ones(int(rng.integers(2, 5))), size=ns))
        P2 = DiscreteChannel(rng.dirichlet(np.ones(int(rng.integers(2, 5))), size=ns))
        rep = gap_report(sig, P1, P2)
        assert rep.identity_residual <= 1e-10
        assert abs(rep.delta_q1 - rep.delta_q2) <= 1e-10


def test_relabeling_invariance():
    rng = np.random.default_rng(66)
    sig = SignalDist(rng.dirichlet(np.ones(3)))
    P1 = DiscreteChannel(rng.dirichlet(np.ones(3), size=3))
    P2 = DiscreteChannel(rng.dirichlet(np.ones(3), size=3))
    perm1, perm2 = (2, 0, 1), (1, 2, 0)
    base = gap_report(sig, P1, P2)
    shuffled = gap_report(
        sig,
        DiscreteChannel(P1.rows[:, perm1]),
        DiscreteChannel(P2.rows[:, perm2]),
    )
    for field in base.__dataclass_fields__:
        assert getattr(base, field) == pytest.approx(getattr(shuffled, field), abs=1e-12)


def test_output_flip_makes_channels_equivalent():
    # with q = (1-p0, 1-p1) the second channel is the first one with its
    # output bits swapped, so all three pairwise MIs coincide up to rounding
    rep = gap_report(
        UNIFORM_BINARY, bernoulli_channel(0.2, 0.8), bernoulli_channel(0.8, 0.2)
    )
    assert rep.i_x1x2 == pytest.approx(rep.i_x1x1p, abs=1e-14)
    assert rep.i_x1x1p == rep.i_x2x2p
    assert abs(rep.delta_q2) <= 1e-14


def test_g_function_endpoints():
    assert g_function(0.0) == 0.0
    assert g_function(1.0) == pytest.approx(1.0 - LOG2, abs=1e-15)
    assert g_function(0.5) == pytest.approx(G_HALF, abs=1e-15)
    assert g_function(0.5) >= 0.125 / 6.0


def test_g_function_domain():
    with pytest.raises(DomainError):
        g_function(-0.01)
    with pytest.raises(DomainError):
        g_function(1.01)


def test_g_function_branches_agree():
    # series branch against the direct formula just below the switch point
    for t in (0.2, 0.35, 0.49):
        direct = t + 0.5 * (1 - t) * math.log1p(-t) - 0.5 * (1 + t) * math.log1p(t)
        assert g_function(t) == pytest.approx(direct, abs=1e-15)


def test_g_function_grid_bound():
    ts = np.linspace(0.0, 1.0, 10001)
    vals = np.array([g_function(float(t)) for t in ts])
    assert np.all(vals >= ts**3 / 6.0 - 1e-16)


def test_taylor_closed_form_values():
    assert taylor_gap_closed_form(0.4, 0.4) == 0.0
    assert taylor_gap_closed_form(1.0, 0.0) == pytest.approx(1.0 - LOG2, abs=1e-15)
    assert taylor_gap_closed_form(0.8, 0.2) == pytest.approx(F_08_02, abs=1e-15)
    assert taylor_gap_closed_form(3.0, 1.0) == pytest.approx(F_3_1, abs=1e-15)
    with pytest.raises(DegenerateChannel):
        taylor_gap_closed_form(0.0, 0.0)


def test_taylor_closed_form_expanded_shape():
    # the expanded algebraic form, cancellation-prone but fine at these taus
    for p0, p1 in ((0.8, 0.2), (3.0, 1.0), (0.9, 0.1)):
        tau = ((p0 - p1) / (p0 + p1)) ** 2
        direct = (
            (p0 - p1) ** 2
            + 2 * p0 * p1 * math.log1p(-tau)
            - (p0**2 + p1**2) * math.log1p(tau)
        )
        assert taylor_gap_closed_form(p0, p1) == pytest.approx(direct, abs=1e-13)


def test_convergence_decreasing_and_tight():
    rows = taylor_convergence_check(0.8, 0.2, [1e-1, 1e-2, 1e-3])
    rels = [r.rel_error for r in rows]
    assert rels[0] > rels[1] > rels[2]
    assert rels[-1] <= 0.02
    assert rows[0].limit == pytest.approx(F_08_02, abs=1e-15)


def test_convergence_saturated_rate():
    rows = taylor_convergence_check(1.0, 0.0, [1e-2, 1e-3])
    assert rows[-1].rel_error <= 0.02


def test_convergence_validation():
    with pytest.raises(DegenerateChannel):
        taylor_convergence_check(0.4, 0.4, [1e-2])
    with pytest.raises(ValidationError):
        taylor_convergence_check(0.8, 0.2, [])


def test_envelope_bound_with_vanishing_slack():
    # delta(eps) dominates eps^2 (p0-p1)^6 / (6 (p0+p1)^4) up to a slack
    # that dies out relative to eps^2; at eps <= 1e-2 no slack is needed
    for p0, p1 in ((0.8, 0.2), (1.0, 0.0), (3.0, 1.0)):
        env = (p0 - p1) ** 6 / (6.0 * (p0 + p1) ** 4)
        limit = taylor_gap_closed_form(p0, p1)
        rows = taylor_convergence_check(p0, p1, [1e-1, 1e-2, 1e-3])
        deficits = [max(0.0, env - r.ratio) for r in rows]
        assert deficits[0] <= 0.15 * limit
        assert deficits[0] >= deficits[1] >= deficits[2]
        for r in rows:
            if r.epsilon <= 1e-2:
                assert r.ratio >= env


def test_i_terms_flat_is_zero():
    _, _, _, _, total = taylor_i_terms(0.4, 0.4, 0.7, 0.7, 0.5)
    assert abs(total) <= 1e-12


def test_i_terms_match_table_mi():
    i1, i2, i3, i4, total = taylor_i_terms(0.8, 0.2, 0.2, 0.8, 0.1)
    P1 = bernoulli_channel(0.08, 0.02)
    P2 = bernoulli_channel(0.02, 0.08)
    pair = observe_through(UNIFORM_BINARY, [P1, P2]).marginal((1, 2))
    assert total == pytest.approx(mutual_information(pair, (0,), (1,)), abs=1e-10)
    assert total == pytest.approx(i1 + i2 + i3 + i4, abs=1e-16)


def test_i_terms_mirror_symmetry():
    for p0, p1, eps in ((0.8, 0.2, 0.1), (3.0, 1.0, 0.2), (0.5, 0.0, 1.0)):
        _, i2, i3, _, _ = taylor_i_terms(p0, p1, p1, p0, eps)
        assert abs(i2 - i3) <= 1e-15


def test_i_terms_validation():
    with pytest.raises(RateOutOfRange):
        taylor_i_terms(3.0, 1.0, 1.0, 3.0, 0.5)


def test_sweep_rows_and_diagonal():
    grid = [0.0, 0.25, 0.5]
    rows = sweep_heatmap(grid, grid, 1.0)
    assert len(rows) == 9
    assert [(r.p0, r.p1) for r in rows[:4]] == [
        (0.0, 0.0),
        (0.0, 0.25),
        (0.0, 0.5),
        (0.25, 0.0),
    ]
    for r in rows:
        if r.p0 == r.p1:
            assert abs(r.delta_q2) <= 1e-10
        s = r.p0 + r.p1
        expected = 0.0 if s == 0 else (r.p0 - r.p1) ** 6 / s**4
        assert r.contour == pytest.approx(expected, abs=1e-16)
    by_rate = {(r.p0, r.p1): r.delta_q2 for r in rows}
    ref = gap_report(
        UNIFORM_BINARY, bernoulli_channel(0.5, 0.0), bernoulli_channel(0.0, 0.5)
    )
    assert by_rate[(0.5, 0.0)] == pytest.approx(ref.delta_q2, abs=1e-12)
    assert by_rate[(0.5, 0.0)] > 0 and by_rate[(0.0, 0.25)] > 0


def test_sweep_deterministic():
    grid = [0.1, 0.4, 0.7]
    assert sweep_heatmap(grid, grid, 0.9) == sweep_heatmap(grid, grid, 0.9)


def test_sweep_validation():
    with pytest.raises(ValidationError):
        sweep_heatmap([], [0.1], 1.0)
    with pytest.raises(RateOutOfRange):
        sweep_heatmap([0.5, 1.0], [0.5], 1.5)


def test_sweep_csv_round_trip(tmp_path):
    grid = [0.0, 1.0 / 3.0, 0.5]
    rows = sweep_heatmap(grid, grid, 1.0)
    path = tmp_path / "sweep.csv"
    write_sweep_csv(rows, path)
    text = path.read_text(encoding="ascii")
    lines = text.strip().split("\n")
    assert lines[0] == SWEEP_HEADER
    assert len(lines) == len(rows) + 1
    for line, row in zip(lines[1:], rows):
        p0, p1, eps, delta, contour = (float(tok) for tok in line.split(","))
        assert (p0, p1, eps) == (row.p0, row.p1, row.epsilon)
        assert delta == row.delta_q2 and contour == row.contour
    write_sweep_csv(rows, tmp_path / "again.csv")
    assert (tmp_path / "again.csv").read_bytes() == path.read_bytes()
