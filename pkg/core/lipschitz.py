# core/lipschitz.py
"""
Оценка поточечной константы Липшица L(f, x0) разностными отношениями на сжимающихся окнах.

Окно k имеет полуширину h_k = h0 * sf**k (или явную шкалу из schedule.scales).
С каждой доступной стороны от x0 берём m расстояний, равномерно на [h_k/2, h_k],
каждое обрезается по границе области; на конце области - только внутренняя сторона.
Оценка = максимум по последним ceil(K/2) окнам; если эти максимумы растут
с коэффициентом >= divergence_ratio - считаем L = +inf.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np

import config
from core.errors import DisagreementError, DomainError, GridPointError, ScheduleError, SpecError
from core.func_base import RealFunction
from core.func_registry import get_function
from core.funcspec import PiecewiseLinear, funcspec_to_json
from core.interval import Interval

log = logging.getLogger(__name__)

Sided = Literal["two-sided", "left", "right"]


# ========== Расписание окон ==========

@dataclass(frozen=True)
class ScaleSchedule:
    h0: float
    shrink_factor: float = 0.5
    window_count: int = 8
    samples_per_window: int = 8
    # явные полуширины окон (строго убывают); если заданы - h0/shrink_factor не используются
    scales: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.scales is not None:
            sc = tuple(float(s) for s in self.scales)
            object.__setattr__(self, "scales", sc)
            if len(sc) < 3:
                raise SpecError("explicit schedule needs at least 3 scales")
            if any(not (s > 0 and math.isfinite(s)) for s in sc):
                raise SpecError("scales must be positive and finite")
            if any(not hi > lo for hi, lo in zip(sc, sc[1:])):
                raise SpecError("scales must be strictly decreasing")
            object.__setattr__(self, "h0", sc[0])
            object.__setattr__(self, "window_count", len(sc))
        if not (self.h0 > 0 and math.isfinite(self.h0)):
            raise SpecError(f"h0 must be > 0, got {self.h0!r}")
        if not (0.0 < self.shrink_factor < 1.0):
            raise SpecError(f"shrinkFactor must lie in (0, 1), got {self.shrink_factor!r}")
        if self.window_count < 3:
            raise SpecError(f"windowCount must be >= 3, got {self.window_count!r}")
        if self.samples_per_window < 4:
            raise SpecError(f"samplesPerWindow must be >= 4, got {self.samples_per_window!r}")

    @classmethod
    def default(cls) -> "ScaleSchedule":
        return cls(
            h0=config.LIP_H0,
            shrink_factor=config.LIP_SHRINK,
            window_count=config.LIP_WINDOWS,
            samples_per_window=config.LIP_SAMPLES,
        )

    @classmethod
    def from_scales(cls, scales: Sequence[float], samples_per_window: int = 8) -> "ScaleSchedule":
        return cls(h0=float(scales[0]), samples_per_window=samples_per_window, scales=tuple(scales))

    def half_widths(self) -> Tuple[float, ...]:
        if self.scales is not None:
            return self.scales
        return tuple(self.h0 * self.shrink_factor ** k for k in range(self.window_count))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "h0": self.h0,
            "shrinkFactor": self.shrink_factor,
            "windowCount": self.window_count,
            "samplesPerWindow": self.samples_per_window,
            "scales": list(self.scales) if self.scales is not None else None,
        }


# ========== Оценки ==========

@dataclass(frozen=True)
class LipEstimate:
    value: float
    window_maxima: Tuple[float, ...]
    divergent: bool
    sided: Sided

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "windowMaxima": list(self.window_maxima),
            "divergent": self.divergent,
            "sided": self.sided,
        }


@dataclass(frozen=True)
class LipschitzProfile:
    grid_points: Tuple[float, ...]
    estimates: Tuple[LipEstimate, ...]
    schedule: ScaleSchedule
    func_ref: Any
    domain: Interval

    @property
    def grid_step(self) -> float:
        return self.domain.length() / (len(self.grid_points) - 1)

    def max_value(self) -> float:
        return max(e.value for e in self.estimates)


def _tail_count(k: int) -> int:
    return (k + 1) // 2


def _is_divergent(tail: Sequence[float], ratio: float) -> bool:
    if len(tail) < 2:
        return False
    return all(lo > 0 and hi >= ratio * lo for lo, hi in zip(tail, tail[1:]))


def _resolve_domain(fn: RealFunction, domain: Interval) -> None:
    lo, hi = fn.domain()
    if domain.a < lo or domain.b > hi:
        raise DomainError(f"{fn.kind()}: domain [{domain.a}, {domain.b}] leaves declared domain [{lo}, {hi}]")


def sidedness(x0: float, domain: Interval) -> Sided:
    if x0 <= domain.a:
        return "right"
    if x0 >= domain.b:
        return "left"
    return "two-sided"


def window_samples(x0: float, domain: Interval, h: float, m: int) -> np.ndarray:
    """Точки окна полуширины h вокруг x0 (без x0, внутри domain)."""
    parts: List[np.ndarray] = []
    for room, sign in ((x0 - domain.a, -1.0), (domain.b - x0, 1.0)):
        if room <= 0:
            continue
        d = np.minimum(h * np.linspace(0.5, 1.0, m), room)
        parts.append(x0 + sign * d)
    if not parts:
        return np.empty(0)
    xs = np.clip(np.concatenate(parts), domain.a, domain.b)
    return xs[xs != x0]


def _estimate(fn: RealFunction, x0: float, domain: Interval, schedule: ScaleSchedule,
              divergence_ratio: float) -> LipEstimate:
    f0 = fn.value(x0)
    maxima: List[float] = []
    for k, h in enumerate(schedule.half_widths()):
        xs = window_samples(x0, domain, h, schedule.samples_per_window)
        if xs.size == 0:
            raise ScheduleError(f"window {k} (h={h!r}) has no usable samples around x0={x0!r}", window=k)
        q = np.abs(fn.values(xs) - f0) / np.abs(xs - x0)
        maxima.append(float(np.max(q)))

    tail = maxima[-_tail_count(len(maxima)):]
    divergent = _is_divergent(tail, divergence_ratio)
    value = math.inf if divergent else max(tail)
    return LipEstimate(value=value, window_maxima=tuple(maxima), divergent=divergent,
                       sided=sidedness(x0, domain))


def estimate_pointwise(f: Any, x0: float, domain: Interval, schedule: ScaleSchedule,
                       divergence_ratio: Optional[float] = None) -> LipEstimate:
    """L(f|domain, x0) по расписанию окон; односторонне на концах domain."""
    if not domain.contains(x0):
        raise DomainError(f"x0={x0!r} outside [{domain.a}, {domain.b}]")
    fn = get_function(f)
    _resolve_domain(fn, domain)
    ratio = config.DIVERGENCE_RATIO if divergence_ratio is None else divergence_ratio
    return _estimate(fn, x0, domain, schedule, ratio)


def grid(domain: Interval, grid_count: int) -> np.ndarray:
    if grid_count < 2:
        raise SpecError(f"gridCount must be >= 2, got {grid_count!r}")
    if not domain.is_finite():
        raise DomainError("grid needs a finite domain")
    xs = np.linspace(domain.a, domain.b, grid_count)
    xs[0], xs[-1] = domain.a, domain.b
    return xs


def profile(f: Any, domain: Interval, grid_count: int, schedule: ScaleSchedule,
            workers: Optional[int] = None, divergence_ratio: Optional[float] = None) -> LipschitzProfile:
    """
    Оценки на равномерной сетке (концы включены).
    workers > 1 - параллельно в пуле потоков; порядок результатов = порядок сетки.
    """
    fn = get_function(f)
    _resolve_domain(fn, domain)
    ratio = config.DIVERGENCE_RATIO if divergence_ratio is None else divergence_ratio
    xs = [float(x) for x in grid(domain, grid_count)]
    workers = config.PROFILE_WORKERS if workers is None else max(1, int(workers))

    def _one(x: float) -> LipEstimate:
        try:
            return _estimate(fn, x, domain, schedule, ratio)
        except Exception as e:
            raise GridPointError(x, e) from e

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="profile") as ex:
            estimates = list(ex.map(_one, xs))
    else:
        estimates = [_one(x) for x in xs]

    log.debug(f"[PROFILE] {fn.kind()} on [{domain.a}, {domain.b}]: {len(xs)} points, workers={workers}")
    return LipschitzProfile(grid_points=tuple(xs), estimates=tuple(estimates),
                            schedule=schedule, func_ref=f, domain=domain)


# ========== C-исключительные точки ==========

def exceeds(value: float, divergent: bool, C: float, rel_tol: float) -> bool:
    return divergent or value > C * (1.0 + rel_tol)


def exceptional_points(p: LipschitzProfile, C: float,
                       rel_tol: Optional[float] = None) -> List[Tuple[float, LipEstimate]]:
    if C < 0:
        raise SpecError(f"C must be >= 0, got {C!r}")
    tol = config.REL_TOL if rel_tol is None else rel_tol
    return [(x, e) for x, e in zip(p.grid_points, p.estimates) if exceeds(e.value, e.divergent, C, tol)]


# ========== Полунорма и эквивалентность ==========

def seminorm_estimate(f: Any, I: Interval, grid_count: int) -> float:
    """max |f(x_{i+1}) - f(x_i)| / (x_{i+1} - x_i) по соседним узлам - нижняя оценка полунормы."""
    fn = get_function(f)
    _resolve_domain(fn, I)
    xs = grid(I, grid_count)
    ys = fn.values(xs)
    return float(np.max(np.abs(np.diff(ys)) / np.diff(xs)))


def _breakpoints_on_grid(f: Any, I: Interval, grid_count: int) -> bool:
    if not isinstance(f, PiecewiseLinear):
        return False
    xs = grid(I, grid_count)
    tol = 1e-12 * I.length()
    inner = [b for b in f.breakpoints if I.a < b < I.b]
    return all(np.min(np.abs(xs - b)) <= tol for b in inner)


@dataclass
class EquivalenceReport:
    C: float
    max_pointwise: float
    max_pairwise: float
    pointwise_holds: bool
    pairwise_holds: bool
    breakpoint_aligned: bool
    rel_tol: float

    @property
    def consistent(self) -> bool:
        return self.pointwise_holds == self.pairwise_holds

    def to_dict(self) -> Dict[str, Any]:
        return {
            "C": self.C,
            "maxPointwise": self.max_pointwise,
            "maxPairwise": self.max_pairwise,
            "pointwiseHolds": self.pointwise_holds,
            "pairwiseHolds": self.pairwise_holds,
            "breakpointAligned": self.breakpoint_aligned,
            "relTol": self.rel_tol,
            "consistent": self.consistent,
        }


def check_equivalence(f: Any, I: Interval, C: float, grid_count: int, schedule: ScaleSchedule,
                      rel_tol: Optional[float] = None, workers: Optional[int] = None) -> EquivalenceReport:
    """
    (a) L(f, x) <= C для всех x  <=>  (b) |f(y) - f(x)| <= C|y - x|, в дискретной форме.
    Расхождение -> DisagreementError (признак плохо настроенного оценщика).
    """
    if C < 0:
        raise SpecError(f"C must be >= 0, got {C!r}")
    tol = config.REL_TOL if rel_tol is None else rel_tol
    p = profile(f, I, grid_count, schedule, workers=workers)
    max_pointwise = p.max_value()
    max_pairwise = seminorm_estimate(f, I, grid_count)
    bound = C * (1.0 + tol)
    report = EquivalenceReport(
        C=C,
        max_pointwise=max_pointwise,
        max_pairwise=max_pairwise,
        pointwise_holds=max_pointwise <= bound,
        pairwise_holds=max_pairwise <= bound,
        breakpoint_aligned=_breakpoints_on_grid(f, I, grid_count),
        rel_tol=tol,
    )
    if not report.consistent:
        raise DisagreementError(max_pointwise, max_pairwise, C)
    if report.breakpoint_aligned and not math.isclose(max_pointwise, max_pairwise, rel_tol=tol, abs_tol=tol):
        raise DisagreementError(max_pointwise, max_pairwise, C)
    return report


# ========== Нет изолированных точек ==========

@dataclass
class IsolationReport:
    grid_step: float
    checked: int
    violations: List[float] = field(default_factory=list)
    flagged: List[float] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gridStep": self.grid_step,
            "checked": self.checked,
            "violations": list(self.violations),
            "flagged": list(self.flagged),
            "ok": self.ok,
        }


PointLike = Union[float, Tuple[float, LipEstimate]]


def no_isolated_check(points: Sequence[PointLike], grid_step: float) -> IsolationReport:
    """
    Каждой исключительной точке нужен исключительный сосед ближе 2*grid_step.
    Одиночка с расходящейся оценкой - помечается (тонкое множество ниже разрешения сетки),
    одиночка с конечной оценкой - нарушение.
    """
    if not grid_step > 0:
        raise SpecError(f"gridStep must be > 0, got {grid_step!r}")
    xs: List[float] = []
    divergent: List[bool] = []
    for p in points:
        if isinstance(p, tuple):
            xs.append(float(p[0]))
            divergent.append(bool(p[1].divergent))
        else:
            xs.append(float(p))
            divergent.append(False)

    report = IsolationReport(grid_step=grid_step, checked=len(xs))
    reach = 2.0 * grid_step * (1.0 + 1e-12)
    for i, x in enumerate(xs):
        near = (i > 0 and x - xs[i - 1] <= reach) or (i + 1 < len(xs) and xs[i + 1] - x <= reach)
        if near:
            continue
        if divergent[i]:
            report.flagged.append(x)
        else:
            report.violations.append(x)
    return report


def profile_summary(p: LipschitzProfile) -> Dict[str, Any]:
    return {
        "func": funcspec_to_json(p.func_ref),
        "domain": p.domain.to_list(),
        "gridCount": len(p.grid_points),
        "schedule": p.schedule.to_dict(),
        "maxValue": p.max_value(),
        "divergentPoints": sum(1 for e in p.estimates if e.divergent),
    }
