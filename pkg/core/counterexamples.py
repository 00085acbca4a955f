# core/counterexamples.py
"""
Контрпримеры к устранимости: канторова лестница непостоянна, но L = 0 вне
совершенного множества. Плюс отчёты, связывающие обе стороны теории.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from core.errors import SpecError, StepTooLarge
from core.func_registry import cantor_value, get_function
from core.funcspec import CantorSpec, CantorStaircase
from core.interval import Interval
from core.lipschitz import ScaleSchedule, estimate_pointwise, grid, profile, seminorm_estimate
from core.telemetry import send_event
from core.witness import build_tree, verify_tree
from core.witness_io import certificate_document

log = logging.getLogger(__name__)

MAX_GAP_LEVEL = 40


@dataclass(frozen=True)
class GapSample:
    level: int
    gaps: Tuple[Interval, ...]
    midpoints: Tuple[float, ...]
    gap_width: float  # ширина исходной (не сжатой) лакуны

    def sampled_width(self) -> float:
        return self.gaps[0].length()


def gap_intervals(spec: CantorSpec, level: int, shrink: Optional[float] = None) -> GapSample:
    """
    2^(level-1) лакун, удаляемых на шаге level, каждая сжата внутрь на shrink*ширина с обеих сторон.
    Уровни до 40: на верхнем уровне это 2^39 отрезков, память - забота вызывающего.
    """
    if not isinstance(level, int) or not (1 <= level <= MAX_GAP_LEVEL):
        raise SpecError(f"level must be an integer in [1, {MAX_GAP_LEVEL}], got {level!r}")
    s = config.GAP_SHRINK if shrink is None else shrink
    if not (0.0 <= s < 0.5):
        raise SpecError(f"gap shrink must lie in [0, 1/2), got {s!r}")

    r = spec.ratio
    lefts = np.array([0.0])
    length = 1.0
    for _ in range(level - 1):
        lefts = np.stack([lefts, lefts + (1.0 - r) * length], axis=1).ravel()
        length *= r

    width = (1.0 - 2.0 * r) * length
    lo = lefts + r * length
    hi = lefts + (1.0 - r) * length
    gaps = tuple(Interval(float(a + s * width), float(b - s * width)) for a, b in zip(lo, hi))
    mids = tuple(float(x) for x in lefts + 0.5 * length)
    return GapSample(level=level, gaps=gaps, midpoints=mids, gap_width=width)


@dataclass
class FlatnessReport:
    ratio: float
    level: int
    h: float
    points_checked: int
    max_quotient: float

    @property
    def flat(self) -> bool:
        return self.max_quotient == 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ratio": self.ratio,
            "level": self.level,
            "h": self.h,
            "pointsChecked": self.points_checked,
            "maxQuotient": self.max_quotient,
            "flat": self.flat,
        }


def flatness_check(spec: CantorSpec, level: int, h: float, shrink: Optional[float] = None) -> FlatnessReport:
    """Лестница постоянна на лакунах уровней 1..level: |F(m±h) - F(m)| / h обязаны быть ровно 0."""
    samples = [gap_intervals(spec, k, shrink) for k in range(1, level + 1)]
    narrowest = samples[-1].sampled_width()
    if not (0.0 < h < narrowest / 4.0):
        raise StepTooLarge(f"h={h!r} must lie in (0, {narrowest / 4.0!r}) (a quarter of the narrowest sampled gap)")

    worst = 0.0
    count = 0
    for sample in samples:
        for m in sample.midpoints:
            v = cantor_value(m, spec)
            for x in (m - h, m + h):
                worst = max(worst, abs(cantor_value(x, spec) - v) / h)
            count += 1
    return FlatnessReport(ratio=spec.ratio, level=level, h=h, points_checked=count, max_quotient=worst)


@dataclass
class DemoReport:
    spec: CantorSpec
    C: float
    f0: float
    f1: float
    flatness: FlatnessReport
    gap_lipschitz_max: float
    verify: Dict[str, Any]
    certificate: Dict[str, Any]

    @property
    def non_constant(self) -> bool:
        return self.f1 - self.f0 == 1.0

    @property
    def passed(self) -> bool:
        return self.non_constant and self.flatness.flat and self.gap_lipschitz_max == 0.0 and self.verify["valid"]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cantor": {"ratio": self.spec.ratio, "digitDepth": self.spec.digit_depth},
            "C": self.C,
            "nonConstant": {"f0": self.f0, "f1": self.f1, "holds": self.non_constant},
            "flatness": {**self.flatness.to_dict(), "gapLipschitzMax": self.gap_lipschitz_max},
            "witness": {"verify": self.verify, "certificate": self.certificate},
            "passed": self.passed,
        }


def nonremovability_demo(spec: CantorSpec, C: float, depth: int, search_depth: Optional[int] = None,
                         resolution_depth: Optional[int] = None, flatness_level: Optional[int] = None,
                         guard: Optional[float] = None) -> DemoReport:
    """
    (i) F(1) - F(0) = 1; (ii) F плоская на лакунах (L = 0 там);
    (iii) дерево свидетелей уровня C строится и проходит проверку.
    Непостоянная непрерывная функция с нулевой производной вне совершенного множества.
    """
    level = config.FLATNESS_LEVEL if flatness_level is None else flatness_level
    f = CantorStaircase.of(spec)

    f0, f1 = cantor_value(0.0, spec), cantor_value(1.0, spec)

    finest = gap_intervals(spec, level)
    flat = flatness_check(spec, level, finest.sampled_width() / 8.0)

    # окна оценщика целиком внутри сжатых лакун
    gap_schedule = ScaleSchedule(h0=finest.sampled_width() / 4.0, shrink_factor=0.5,
                                 window_count=3, samples_per_window=4)
    J = Interval(0.0, 1.0)
    gap_max = 0.0
    for k in range(1, level + 1):
        for m in gap_intervals(spec, k).midpoints:
            gap_max = max(gap_max, estimate_pointwise(f, m, J, gap_schedule).value)

    tree = build_tree(f, J, C, depth, search_depth, resolution_depth, guard)
    report = verify_tree(tree, guard)

    demo = DemoReport(spec=spec, C=C, f0=f0, f1=f1, flatness=flat, gap_lipschitz_max=gap_max,
                      verify=report.to_dict(), certificate=certificate_document(tree))
    log.info(f"[DEMO] ratio={spec.ratio!r} C={C!r} depth={depth} passed={demo.passed}")
    send_event("demo_done", f"passed={demo.passed}", {"ratio": spec.ratio, "C": C, "depth": depth})
    return demo


def total_variation(f: Any, domain: Interval, partition_count: int) -> float:
    """Σ |f(x_{i+1}) - f(x_i)| по равномерному разбиению (для монотонной f - ровно |f(b) - f(a)|)."""
    fn = get_function(f)
    xs = grid(domain, partition_count + 1)
    return float(np.sum(np.abs(np.diff(fn.values(xs)))))


@dataclass
class RemovabilityReport:
    C: float
    points: Tuple[float, ...]
    excluded_grid_points: int
    max_off_set: float
    seminorm: float
    hypothesis_holds: bool
    conclusion_holds: bool
    offending: List[float] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return (not self.hypothesis_holds) or self.conclusion_holds

    def to_dict(self) -> Dict[str, Any]:
        return {
            "C": self.C,
            "points": list(self.points),
            "excludedGridPoints": self.excluded_grid_points,
            "maxOffSet": self.max_off_set,
            "seminorm": self.seminorm,
            "hypothesisHolds": self.hypothesis_holds,
            "conclusionHolds": self.conclusion_holds,
            "consistent": self.consistent,
            "offending": list(self.offending),
        }


def finite_set_removability(f: Any, J: Interval, C: float, points: Sequence[float], grid_count: int,
                            schedule: ScaleSchedule, rel_tol: Optional[float] = None) -> RemovabilityReport:
    """
    Конечные множества устранимы: если L(f, x) <= C вне E = points, то f C-липшицева на J.
    Узлы сетки ближе шага к точкам E исключаются из гипотезы.
    """
    if C < 0:
        raise SpecError(f"C must be >= 0, got {C!r}")
    tol = config.REL_TOL if rel_tol is None else rel_tol
    pts = tuple(sorted(float(x) for x in points))
    for x in pts:
        if not J.contains(x):
            raise SpecError(f"point {x!r} outside [{J.a}, {J.b}]")

    p = profile(f, J, grid_count, schedule)
    step = p.grid_step
    bound = C * (1.0 + tol)
    excluded = 0
    max_off = 0.0
    offending: List[float] = []
    for x, e in zip(p.grid_points, p.estimates):
        if any(abs(x - q) <= step for q in pts):
            excluded += 1
            continue
        max_off = max(max_off, e.value)
        if e.divergent or e.value > bound:
            offending.append(x)

    semi = seminorm_estimate(f, J, grid_count)
    return RemovabilityReport(
        C=C,
        points=pts,
        excluded_grid_points=excluded,
        max_off_set=max_off,
        seminorm=semi,
        hypothesis_holds=not offending,
        conclusion_holds=semi <= bound,
        offending=offending,
    )
