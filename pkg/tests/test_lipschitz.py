# tests/test_lipschitz.py
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from core.errors import DisagreementError, DomainError, GridPointError, ScheduleError, SpecError
from core.funcspec import (
    Abs, Affine, AffineReparam, CantorStaircase, Constant, PiecewiseLinear, Polynomial,
)
from core.interval import Interval
from core.lipschitz import (
    LipEstimate, ScaleSchedule, check_equivalence, estimate_pointwise, exceptional_points, no_isolated_check,
    profile, seminorm_estimate, window_samples,
)
from core.pl import exact_pointwise_lipschitz_pl

from corpus import fine_schedule

UNIT = Interval(0.0, 1.0)
DEFAULT = ScaleSchedule(h0=0.0625, shrink_factor=0.5, window_count=8, samples_per_window=8)
SLOPES_1_M3 = PiecewiseLinear(breakpoints=(0.0, 1.0, 2.0), values=(0.0, 1.0, -2.0))
SLOPES_0_2 = PiecewiseLinear(breakpoints=(0.0, 1.0, 2.0), values=(0.0, 0.0, 2.0))
SLOPES_1_M3_2 = PiecewiseLinear(breakpoints=(0.0, 1.0, 2.0, 3.0), values=(0.0, 1.0, -2.0, 0.0))


# ---------- ScaleSchedule ----------

def test_schedule_validation():
    with pytest.raises(SpecError):
        ScaleSchedule(h0=0.0)
    with pytest.raises(SpecError):
        ScaleSchedule(h0=0.1, shrink_factor=1.0)
    with pytest.raises(SpecError):
        ScaleSchedule(h0=0.1, window_count=2)
    with pytest.raises(SpecError):
        ScaleSchedule(h0=0.1, samples_per_window=3)
    with pytest.raises(SpecError):
        ScaleSchedule.from_scales([0.1, 0.2, 0.05])
    with pytest.raises(SpecError):
        ScaleSchedule.from_scales([0.1, 0.05])


def test_schedule_half_widths():
    s = ScaleSchedule(h0=1.0, shrink_factor=0.5, window_count=4)
    assert s.half_widths() == (1.0, 0.5, 0.25, 0.125)
    e = ScaleSchedule.from_scales([0.3, 0.2, 0.1])
    assert e.half_widths() == (0.3, 0.2, 0.1)
    assert e.window_count == 3 and e.h0 == 0.3


def test_window_samples_stay_inside_domain():
    xs = window_samples(0.0, UNIT, 0.5, 8)
    assert np.all(xs > 0.0) and np.all(xs <= 1.0)
    assert xs.min() == 0.25 and xs.max() == 0.5
    xs = window_samples(0.1, UNIT, 0.5, 8)
    assert np.all(xs >= 0.0) and np.all(xs <= 1.0) and 0.0 in xs


# ---------- estimate_pointwise ----------

def test_affine_estimate():
    e = estimate_pointwise(Affine(slope=3.0), 0.5, UNIT, DEFAULT)
    assert e.value == pytest.approx(3.0, rel=1e-10)
    assert not e.divergent
    assert e.sided == "two-sided"
    assert len(e.window_maxima) == 8


def test_abs_at_kink():
    e = estimate_pointwise(Abs(), 0.0, Interval(-1.0, 1.0), DEFAULT)
    assert e.value == 1.0


def test_sidedness_at_endpoints():
    assert estimate_pointwise(Affine(slope=1.0), 0.0, UNIT, DEFAULT).sided == "right"
    assert estimate_pointwise(Affine(slope=1.0), 1.0, UNIT, DEFAULT).sided == "left"


def test_one_sided_endpoint_ignores_outside():
    # на [1, 2] в точке 1 виден только наклон -3
    e = estimate_pointwise(SLOPES_1_M3, 1.0, Interval(1.0, 2.0), DEFAULT)
    assert e.value == pytest.approx(3.0, rel=1e-9)
    e = estimate_pointwise(SLOPES_1_M3, 1.0, Interval(0.0, 1.0), DEFAULT)
    assert e.value == pytest.approx(1.0, rel=1e-9)


def test_estimate_errors():
    with pytest.raises(DomainError):
        estimate_pointwise(Abs(), 2.0, UNIT, DEFAULT)
    with pytest.raises(DomainError):
        estimate_pointwise(CantorStaircase(ratio=0.25, digit_depth=10), 0.5, Interval(0.0, 2.0), DEFAULT)
    # окно на масштабе ниже разрешения float у x0 = 1: x0 - d == x0
    tiny = ScaleSchedule(h0=1e-17, shrink_factor=0.5, window_count=3, samples_per_window=4)
    with pytest.raises(ScheduleError):
        estimate_pointwise(Affine(slope=1.0), 1.0, UNIT, tiny)


def test_cantor_divergence_at_zero(staircase):
    scales = [3.0 ** -n for n in range(1, 13)]
    e = estimate_pointwise(staircase, 0.0, UNIT, ScaleSchedule.from_scales(scales))
    assert e.divergent
    assert math.isinf(e.value)
    for n, w in enumerate(e.window_maxima, start=1):
        assert w == pytest.approx(1.5 ** n, rel=1e-6)


def test_zero_derivative_bound():
    # x^2 в нуле: L = 0; оценка - максимум хвоста, т.е. не больше M * h на крупнейшем окне хвоста
    K = DEFAULT.window_count
    bound = 1.0 * DEFAULT.h0 * DEFAULT.shrink_factor ** (K - (K + 1) // 2)
    e = estimate_pointwise(Polynomial(coefficients=(0.0, 0.0, 1.0)), 0.0, Interval(-1.0, 1.0), DEFAULT)
    assert not e.divergent
    assert e.value <= bound * (1.0 + 1e-12)


@given(
    st.sampled_from([0.5, 2.0, -3.0]),
    st.sampled_from([1.0, -4.0, 0.25]),
    st.floats(min_value=0.1, max_value=0.9, allow_nan=False),
)
@settings(max_examples=60, deadline=None)
def test_estimator_covariance(s, t, u):
    # g(x) = t * f(s*x + c) на прообразе [0, 1]: L(g) = |t| |s| L(f)
    f = PiecewiseLinear(breakpoints=(0.0, 0.5, 1.0), values=(0.0, 1.0, 0.0))
    c = 0.0 if s > 0 else 1.0
    g = AffineReparam(inner=f, pre_scale=s, pre_shift=c, post_scale=t)
    lo, hi = sorted(((0.0 - c) / s, (1.0 - c) / s))
    x = (u - c) / s
    sched = ScaleSchedule(h0=0.01, shrink_factor=0.5, window_count=6, samples_per_window=8)
    sched_g = ScaleSchedule(h0=0.01 / abs(s), shrink_factor=0.5, window_count=6, samples_per_window=8)
    ef = estimate_pointwise(f, u, UNIT, sched)
    eg = estimate_pointwise(g, x, Interval(lo, hi), sched_g)
    assert eg.value == pytest.approx(abs(t) * abs(s) * ef.value, rel=1e-6)


@given(st.floats(min_value=0.0, max_value=3.0, allow_nan=False), st.floats(min_value=0.0, max_value=3.0, allow_nan=False))
@settings(max_examples=30, deadline=None)
def test_exceptional_set_monotone_in_level(c1, c2):
    lo, hi = sorted((c1, c2))
    p = profile(SLOPES_1_M3_2, Interval(0.0, 3.0), 31, DEFAULT, workers=1)
    high = {x for x, _e in exceptional_points(p, hi)}
    low = {x for x, _e in exceptional_points(p, lo)}
    assert high <= low


# ---------- profile ----------

def test_profile_constant_and_abs():
    p = profile(Constant(value=5.0), UNIT, 11, DEFAULT)
    assert all(e.value == 0.0 for e in p.estimates)
    p = profile(Abs(), Interval(-1.0, 1.0), 11, DEFAULT)
    assert len(p.grid_points) == 11
    assert p.grid_points[0] == -1.0 and p.grid_points[-1] == 1.0
    assert all(e.value == pytest.approx(1.0, rel=1e-12) for e in p.estimates)
    assert p.estimates[0].sided == "right" and p.estimates[-1].sided == "left"


def test_profile_matches_pl_oracle_on_breakpoint_grid():
    p = profile(SLOPES_1_M3, Interval(0.0, 2.0), 21, DEFAULT)
    for x, e in zip(p.grid_points, p.estimates):
        assert e.value == pytest.approx(exact_pointwise_lipschitz_pl(SLOPES_1_M3, x), rel=1e-9)


def test_profile_parallel_matches_sequential(staircase):
    a = profile(staircase, UNIT, 41, DEFAULT, workers=1)
    b = profile(staircase, UNIT, 41, DEFAULT, workers=4)
    assert a.grid_points == b.grid_points
    assert a.estimates == b.estimates


def test_profile_errors():
    with pytest.raises(SpecError):
        profile(Abs(), UNIT, 1, DEFAULT)
    tiny = ScaleSchedule(h0=1e-17, shrink_factor=0.5, window_count=3, samples_per_window=4)
    with pytest.raises(GridPointError) as ei:
        profile(Affine(slope=1.0), Interval(1.0, 2.0), 3, tiny)
    assert isinstance(ei.value.__cause__, ScheduleError)


# ---------- exceptional points ----------

def test_exceptional_points_examples():
    p = profile(Affine(slope=2.0), UNIT, 11, DEFAULT)
    assert exceptional_points(p, 3.0) == []
    assert [x for x, _e in exceptional_points(p, 1.0)] == list(p.grid_points)

    p = profile(SLOPES_0_2, Interval(0.0, 2.0), 21, DEFAULT)
    xs = [x for x, _e in exceptional_points(p, 1.0)]
    assert xs == [x for x in p.grid_points if x >= 1.0]
    with pytest.raises(SpecError):
        exceptional_points(p, -1.0)


# ---------- seminorm / equivalence ----------

def test_seminorm_examples(staircase):
    assert seminorm_estimate(Affine(slope=-2.0), UNIT, 17) == pytest.approx(2.0)
    assert seminorm_estimate(SLOPES_1_M3_2, Interval(0.0, 3.0), 31) == pytest.approx(3.0)
    growth = [seminorm_estimate(staircase, UNIT, 3 ** n + 1) for n in range(1, 8)]
    assert all(hi > lo for lo, hi in zip(growth, growth[1:]))
    assert growth[-1] == pytest.approx(1.5 ** 7, rel=1e-6)


def test_check_equivalence_examples():
    r = check_equivalence(Affine(slope=2.0), UNIT, 2.0, 11, DEFAULT)
    assert r.pointwise_holds and r.pairwise_holds
    assert r.max_pointwise == pytest.approx(2.0) and r.max_pairwise == pytest.approx(2.0)

    r = check_equivalence(SLOPES_1_M3_2, Interval(0.0, 3.0), 2.5, 31, DEFAULT)
    assert not r.pointwise_holds and not r.pairwise_holds
    assert r.breakpoint_aligned
    assert r.max_pointwise == pytest.approx(3.0) and r.max_pairwise == pytest.approx(3.0)

    r = check_equivalence(Constant(value=1.0), UNIT, 0.0, 11, DEFAULT)
    assert r.pointwise_holds and r.pairwise_holds and r.max_pointwise == 0.0


def test_check_equivalence_reports_misconfiguration():
    # окна шире всей функции: точечная оценка занижена, а соседние узлы видят крутизну
    f = PiecewiseLinear(breakpoints=(0.0, 0.5, 0.51, 1.0), values=(0.0, 0.0, 1.0, 1.0))
    coarse = ScaleSchedule(h0=8.0, shrink_factor=0.9, window_count=3, samples_per_window=4)
    with pytest.raises(DisagreementError) as ei:
        check_equivalence(f, UNIT, 50.0, 101, coarse)
    assert ei.value.max_pairwise > 50.0 >= ei.value.max_pointwise


# ---------- no isolated points ----------

def test_no_isolated_examples():
    p = profile(SLOPES_0_2, Interval(0.0, 2.0), 21, DEFAULT)
    r = no_isolated_check(exceptional_points(p, 1.0), p.grid_step)
    assert r.ok and not r.flagged
    assert no_isolated_check([], 0.1).ok
    p = profile(Abs(), Interval(-1.0, 1.0), 21, DEFAULT)
    pts = exceptional_points(p, 0.5)
    assert len(pts) == 21
    assert no_isolated_check(pts, p.grid_step).ok


def test_no_isolated_flags_divergent_singletons():
    div = LipEstimate(value=math.inf, window_maxima=(1.0, 2.0, 4.0), divergent=True, sided="two-sided")
    fin = LipEstimate(value=5.0, window_maxima=(5.0, 5.0, 5.0), divergent=False, sided="two-sided")
    r = no_isolated_check([(0.1, div), (0.5, fin), (0.52, fin), (0.9, fin)], 0.01)
    assert r.flagged == [0.1]
    assert r.violations == [0.9]
    assert not r.ok
    with pytest.raises(SpecError):
        no_isolated_check([0.1], 0.0)


# ---------- corpus properties ----------

def test_corpus_estimates_match_oracle(pl_corpus):
    for f in pl_corpus:
        sched = fine_schedule(f)
        bps = f.breakpoints
        mids = [0.5 * (a + b) for a, b in zip(bps, bps[1:])]
        for x in (*bps, *mids):
            e = estimate_pointwise(f, x, UNIT, sched)
            assert e.value == pytest.approx(exact_pointwise_lipschitz_pl(f, x), rel=1e-6, abs=1e-6)


def test_corpus_equivalence_on_aligned_grids(pl_corpus):
    grid_count = 2 * 64 + 1
    for f in pl_corpus:
        sched = fine_schedule(f)
        max_slope = max(abs(s) for s in f.slopes())
        p = profile(f, UNIT, grid_count, sched)
        assert p.max_value() == pytest.approx(max_slope, rel=1e-9, abs=1e-9)
        assert seminorm_estimate(f, UNIT, grid_count) == pytest.approx(max_slope, rel=1e-9, abs=1e-9)
        for C in (0.9 * max_slope, max_slope, 1.1 * max_slope):
            r = check_equivalence(f, UNIT, C, grid_count, sched)
            assert r.breakpoint_aligned
            assert r.pointwise_holds == r.pairwise_holds == (C >= max_slope)


def test_corpus_exceptional_sets_have_no_isolated_points(pl_corpus):
    xs = np.linspace(0.0, 1.0, 2 * 64 + 1)
    step = xs[1] - xs[0]
    for f in pl_corpus:
        slopes = sorted(abs(s) for s in f.slopes())
        levels = [0.0, *np.quantile(slopes, [0.25, 0.5, 0.75]), 0.95 * slopes[-1]]
        oracle = [exact_pointwise_lipschitz_pl(f, float(x)) for x in xs]
        for C in levels:
            pts = [float(x) for x, L in zip(xs, oracle) if L > C]
            r = no_isolated_check(pts, step)
            assert r.violations == []
