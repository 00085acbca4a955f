# core/witness.py
"""
Деревья свидетелей: вложенные крутые отрезки вокруг C-исключительного множества.

Крутой отрезок при пороге C: |f(b) - f(a)| / (b - a) > C.
Корень - seed (крутой при C' > C), у каждого внутреннего узла ровно два
непересекающихся крутых ребёнка длиной <= половины родителя, все листья на глубине depth.
Ветви дерева - вложенные цепочки; их точки пересечения образуют канторово
множество, на котором L(f, x) >= C' > C.

Построение детерминировано: порядок перебора кандидатов фиксирован.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import config
from core.errors import (
    ConstructionError, DomainError, InvalidTree, NoSeedFound, NumericalBreakdown, ResolutionExhausted, SpecError,
)
from core.func_base import RealFunction
from core.func_registry import get_function
from core.funcspec import funcspec_to_json
from core.interval import Interval
from core.telemetry import send_event

log = logging.getLogger(__name__)

# глубина бисекции для точки сгущения при ResolutionExhausted
_CONCENTRATION_DEPTH = 40


# ========== Типы ==========

@dataclass(frozen=True)
class SteepInterval:
    interval: Interval
    slope: float
    threshold: float

    def to_dict(self) -> Dict[str, Any]:
        return {"a": self.interval.a, "b": self.interval.b, "slope": self.slope, "threshold": self.threshold}


@dataclass(frozen=True)
class WitnessNode:
    steep: SteepInterval
    children: Tuple["WitnessNode", ...] = ()

    def __post_init__(self):
        if len(self.children) not in (0, 2):
            raise SpecError(f"witness node must have 0 or 2 children, got {len(self.children)}")

    @property
    def interval(self) -> Interval:
        return self.steep.interval

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class WitnessTree:
    func_ref: Any
    C: float
    c_prime: float
    root: WitnessNode
    depth: int

    def nodes(self) -> Iterator[Tuple[str, WitnessNode]]:
        """(адрес, узел) в ширину; адрес корня - "", детей - addr+"0"/addr+"1"."""
        level: List[Tuple[str, WitnessNode]] = [("", self.root)]
        while level:
            yield from level
            level = [(addr + str(i), ch) for addr, n in level for i, ch in enumerate(n.children)]

    def leaves(self) -> List[Tuple[str, WitnessNode]]:
        return sorted(((a, n) for a, n in self.nodes() if n.is_leaf), key=lambda t: t[0])

    def node_at(self, addr: str) -> WitnessNode:
        node = self.root
        for ch in addr:
            if node.is_leaf or ch not in "01":
                raise KeyError(addr)
            node = node.children[int(ch)]
        return node

    def branch(self, addr: str) -> List[WitnessNode]:
        """Цепочка от корня до узла addr включительно."""
        return [self.node_at(addr[:k]) for k in range(len(addr) + 1)]


@dataclass(frozen=True)
class Violation:
    addr: str
    kind: str
    detail: str

    def to_dict(self) -> Dict[str, Any]:
        return {"addr": self.addr, "kind": self.kind, "detail": self.detail}


@dataclass
class VerifyReport:
    node_count: int
    violations: List[Violation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "valid": self.valid,
            "nodeCount": self.node_count,
            "violations": [v.to_dict() for v in self.violations],
        }


@dataclass(frozen=True)
class CantorCertificate:
    func_ref: Any
    C: float
    c_prime: float
    depth: int
    leaf_intervals: Tuple[Interval, ...]
    leaf_addresses: Tuple[str, ...]
    branch_slope_minima: Tuple[float, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "func": funcspec_to_json(self.func_ref),
            "C": self.C,
            "cPrime": self.c_prime,
            "depth": self.depth,
            "leaves": [
                {"addr": addr, "a": iv.a, "b": iv.b, "branchSlopeMin": m}
                for addr, iv, m in zip(self.leaf_addresses, self.leaf_intervals, self.branch_slope_minima)
            ],
            "semantics": (
                f"every branch is a nested chain of intervals with difference quotients >= {self.c_prime!r}; "
                f"each branch intersection point has L(f, x) >= {self.c_prime!r} > C = {self.C!r}"
            ),
        }


@dataclass(frozen=True)
class NestedBound:
    slopes: Tuple[float, ...]
    nested: bool
    lower_bound: float  # min наклонов по цепочке
    tail_max: float     # max по последним ceil(n/2) - в духе оценщика L

    def to_dict(self) -> Dict[str, Any]:
        return {
            "slopes": list(self.slopes),
            "nested": self.nested,
            "lowerBound": self.lower_bound,
            "tailMax": self.tail_max,
        }


# ========== Вспомогательное ==========

def _is_steep_build(slope: float, threshold: float, guard: float) -> bool:
    return slope > threshold * (1.0 + guard)


def _is_steep_verify(slope: float, threshold: float, guard: float) -> bool:
    return slope > threshold * (1.0 - guard)


class _Slopes:
    """Наклоны с мемоизацией значений f (концы кандидатов многократно повторяются)."""

    def __init__(self, fn: RealFunction):
        self.fn = fn
        self._cache: Dict[float, float] = {}

    def f(self, x: float) -> float:
        v = self._cache.get(x)
        if v is None:
            v = float(self.fn.value(x))
            self._cache[x] = v
        return v

    def __call__(self, iv: Interval) -> float:
        return abs(self.f(iv.b) - self.f(iv.a)) / (iv.b - iv.a)


def _at(iv: Interval, t: float) -> float:
    if t >= 1.0:
        return iv.b
    if t <= 0.0:
        return iv.a
    return min(iv.a + iv.length() * t, iv.b)


def _candidates(iv: Interval, levels: Sequence[int]) -> Iterator[Tuple[int, Interval]]:
    """
    Порядок перебора: уровень по возрастанию; на уровне l сначала выровненные
    куски [i/2^l, (i+1)/2^l] слева направо, затем сдвинутые на полшага.
    """
    for lev in levels:
        n = 2 ** lev
        for i in range(n):
            lo, hi = _at(iv, i / n), _at(iv, (i + 1) / n)
            if lo < hi:
                yield lev, Interval(lo, hi)
        for i in range(n - 1):
            lo, hi = _at(iv, (i + 0.5) / n), _at(iv, (i + 1.5) / n)
            if lo < hi:
                yield lev, Interval(lo, hi)


def _check_domain(fn: RealFunction, iv: Interval) -> None:
    lo, hi = fn.domain()
    if iv.a < lo or iv.b > hi:
        raise DomainError(f"{fn.kind()}: [{iv.a}, {iv.b}] leaves declared domain [{lo}, {hi}]")


def slope_of(f: Any, iv: Interval) -> float:
    fn = get_function(f)
    _check_domain(fn, iv)
    return _Slopes(fn)(iv)


# ========== Операции ==========

def find_seed(f: Any, J: Interval, C: float, resolution_depth: Optional[int] = None,
              guard: Optional[float] = None) -> Tuple[Interval, float]:
    """
    Первый (в порядке перебора, уровни 0..resolution_depth) отрезок с наклоном s > C.
    Возвращает (отрезок, C') с C' = (s + C) / 2, так что C < C' < s.
    """
    if C < 0 or not math.isfinite(C):
        raise SpecError(f"C must be finite and >= 0, got {C!r}")
    depth = config.RESOLUTION_DEPTH if resolution_depth is None else resolution_depth
    if depth < 0:
        raise SpecError(f"resolutionDepth must be >= 0, got {depth!r}")
    g = config.STEEP_GUARD if guard is None else guard

    fn = get_function(f)
    _check_domain(fn, J)
    slope = _Slopes(fn)
    for lev, iv in _candidates(J, range(depth + 1)):
        s = slope(iv)
        if not _is_steep_build(s, C, g):
            continue
        c_prime = 0.5 * (s + C)
        if c_prime > C and _is_steep_build(s, c_prime, g):
            log.debug(f"[SEED] level={lev} [{iv.a}, {iv.b}] slope={s!r} cPrime={c_prime!r}")
            return iv, c_prime

    raise NoSeedFound(
        f"no subinterval of [{J.a}, {J.b}] with difference quotient > {C!r} "
        f"down to resolution depth {depth} (f may be {C!r}-Lipschitz on J)"
    )


def bisect_chain(f: Any, seed: Interval, c_prime: float, max_depth: int) -> List[SteepInterval]:
    """
    Вложенные половинки: на каждом шаге берём крутую половину (левую при равенстве).
    Длины: |seed| / 2^k. Если ни одна половина не крутая или отрезок неразличим
    в float - NumericalBreakdown.
    """
    fn = get_function(f)
    _check_domain(fn, seed)
    slope = _Slopes(fn)
    s0 = slope(seed)
    if not s0 > c_prime:
        raise SpecError(f"seed [{seed.a}, {seed.b}] is not steep: slope {s0!r} <= {c_prime!r}")

    chain = [SteepInterval(seed, s0, c_prime)]
    current = seed
    for k in range(1, max_depth + 1):
        m = current.midpoint()
        if not current.a < m < current.b:
            raise NumericalBreakdown(f"interval [{current.a}, {current.b}] cannot be halved in floating point", depth=k)
        left, right = Interval(current.a, m), Interval(m, current.b)
        sl, sr = slope(left), slope(right)
        if sl > c_prime:
            current, s = left, sl
        elif sr > c_prime:
            current, s = right, sr
        else:
            # для точной арифметики недостижимо: среднее наклонов половин = наклон отрезка
            raise NumericalBreakdown(
                f"neither half of [{current.a}, {current.b}] is steep ({sl!r}, {sr!r} <= {c_prime!r})", depth=k
            )
        chain.append(SteepInterval(current, s, c_prime))
    return chain


def _concentration_point(f: Any, parent: SteepInterval) -> Optional[float]:
    try:
        chain = bisect_chain(f, parent.interval, parent.threshold, _CONCENTRATION_DEPTH)
    except NumericalBreakdown:
        return None
    except SpecError:
        return None
    return chain[-1].interval.midpoint()


def split_steep(f: Any, parent: SteepInterval, search_depth: Optional[int] = None,
                guard: Optional[float] = None) -> Tuple[SteepInterval, SteepInterval]:
    """
    Два непересекающихся крутых подотрезка parent длиной <= |parent|/2.
    Уровни перебираются по возрастанию; на первом уровне, где среди накопленных
    кандидатов есть непересекающаяся пара, берётся пара с наибольшим min(наклон).
    При равенстве побеждает более ранняя в порядке перебора. Пара возвращается
    слева направо.
    """
    depth = config.SEARCH_DEPTH if search_depth is None else search_depth
    if depth < 1:
        raise SpecError(f"searchDepth must be >= 1, got {depth!r}")
    g = config.STEEP_GUARD if guard is None else guard

    fn = get_function(f)
    _check_domain(fn, parent.interval)
    slope = _Slopes(fn)
    half = parent.interval.length() / 2.0
    thr = parent.threshold

    steep: List[SteepInterval] = []
    current_level = 1

    def _pair() -> Optional[Tuple[SteepInterval, SteepInterval]]:
        best: Optional[Tuple[SteepInterval, SteepInterval]] = None
        best_min = -math.inf
        for i, first in enumerate(steep):
            for second in steep[i + 1:]:
                if not first.interval.disjoint(second.interval):
                    continue
                m = min(first.slope, second.slope)
                if best is None or m > best_min:
                    best, best_min = (first, second), m
        return best

    for lev, iv in _candidates(parent.interval, range(1, depth + 1)):
        if lev != current_level:
            found = _pair()
            if found is not None:
                break
            current_level = lev
        if iv.length() > half:
            continue
        s = slope(iv)
        if _is_steep_build(s, thr, g):
            steep.append(SteepInterval(iv, s, thr))
    found = _pair()

    if found is None:
        point = _concentration_point(f, parent)
        raise ResolutionExhausted(
            f"[{parent.interval.a}, {parent.interval.b}] at threshold {thr!r}, search depth {depth}",
            concentration_point=point,
        )
    left, right = sorted(found, key=lambda si: si.interval.a)
    return left, right


def build_tree(f: Any, J: Interval, C: float, depth: Optional[int] = None, search_depth: Optional[int] = None,
               resolution_depth: Optional[int] = None, guard: Optional[float] = None) -> WitnessTree:
    """
    Seed -> C' -> рекурсивный split_steep до полной глубины depth.
    Ошибки ConstructionError несут адрес узла, на котором построение остановилось.
    """
    depth = config.TREE_DEPTH if depth is None else depth
    if depth < 0:
        raise SpecError(f"depth must be >= 0, got {depth!r}")

    try:
        seed, c_prime = find_seed(f, J, C, resolution_depth, guard)
    except ConstructionError as e:
        send_event("tree_failed", f"{e.kind} at root", {"C": C, "domain": J.to_list()})
        raise
    root = SteepInterval(seed, slope_of(f, seed), c_prime)

    def _grow(steep: SteepInterval, level: int, addr: str) -> WitnessNode:
        if level == depth:
            return WitnessNode(steep)
        try:
            left, right = split_steep(f, steep, search_depth, guard)
        except ConstructionError as e:
            raise e.with_path(addr)
        return WitnessNode(steep, (_grow(left, level + 1, addr + "0"), _grow(right, level + 1, addr + "1")))

    try:
        tree_root = _grow(root, 0, "")
    except ConstructionError as e:
        log.warning(f"[TREE] {e.kind} at path={e.path!r}: {e}")
        send_event("tree_failed", f"{e.kind} at path {e.path!r}", {"C": C, "cPrime": c_prime})
        raise

    tree = WitnessTree(func_ref=f, C=C, c_prime=c_prime, root=tree_root, depth=depth)
    log.info(f"[TREE] built depth={depth} C={C!r} cPrime={c_prime!r} seed=[{seed.a}, {seed.b}]")
    send_event("tree_built", f"depth {depth}, {2 ** depth} leaves", {"C": C, "cPrime": c_prime})
    return tree


def verify_tree(t: WitnessTree, guard: Optional[float] = None) -> VerifyReport:
    """
    Независимая проверка: пересчитывает все наклоны по f и отрезкам.
    Нарушения непересекаемости и порядка детей сообщаются по адресу второго ребёнка (…1).
    """
    g = config.STEEP_GUARD if guard is None else guard
    fn = get_function(t.func_ref)
    slope = _Slopes(fn)
    lo, hi = fn.domain()
    nodes = list(t.nodes())
    report = VerifyReport(node_count=len(nodes))
    bad = report.violations.append

    if not t.c_prime > t.C:
        bad(Violation("", "threshold", f"cPrime={t.c_prime!r} must exceed C={t.C!r}"))

    for addr, node in nodes:
        iv = node.interval
        if iv.a < lo or iv.b > hi:
            bad(Violation(addr, "domain", f"[{iv.a}, {iv.b}] leaves declared domain [{lo}, {hi}]"))
            continue

        s = slope(iv)
        if not _is_steep_verify(s, t.c_prime, g):
            bad(Violation(addr, "steepness", f"slope {s!r} <= cPrime {t.c_prime!r}"))
        if not math.isclose(s, node.steep.slope, rel_tol=1e-12, abs_tol=1e-300):
            bad(Violation(addr, "slope", f"recorded slope {node.steep.slope!r} != recomputed {s!r}"))

        if node.is_leaf:
            if len(addr) != t.depth:
                bad(Violation(addr, "balance", f"leaf at depth {len(addr)}, tree depth {t.depth}"))
            continue
        if len(addr) >= t.depth:
            bad(Violation(addr, "balance", f"internal node at depth {len(addr)}, tree depth {t.depth}"))

        left, right = node.children
        for i, ch in enumerate(node.children):
            caddr = addr + str(i)
            if not iv.contains_interval(ch.interval):
                bad(Violation(caddr, "containment", f"[{ch.interval.a}, {ch.interval.b}] not inside [{iv.a}, {iv.b}]"))
            if ch.interval.length() > iv.length() / 2.0:
                bad(Violation(caddr, "length", f"length {ch.interval.length()!r} > half of {iv.length()!r}"))
        if not left.interval.disjoint(right.interval):
            bad(Violation(addr + "1", "disjointness",
                          f"[{right.interval.a}, {right.interval.b}] meets sibling [{left.interval.a}, {left.interval.b}]"))
        elif right.interval.a < left.interval.a:
            bad(Violation(addr + "1", "order",
                          f"[{right.interval.a}, {right.interval.b}] lies left of sibling [{left.interval.a}, {left.interval.b}]"))

    if report.valid:
        send_event("verify_ok", f"{report.node_count} nodes", {"C": t.C, "cPrime": t.c_prime})
    else:
        log.warning(f"[VERIFY] {len(report.violations)} violation(s)")
        send_event("verify_failed", f"{len(report.violations)} violation(s)",
                   {"first": report.violations[0].to_dict()})
    return report


def nested_lower_bound(f: Any, intervals: Sequence[Interval]) -> NestedBound:
    """
    Наклоны вдоль цепочки вложенных отрезков. Для вложенной цепочки с длинами -> 0
    точка пересечения x имеет L(f, x) >= liminf наклонов.
    """
    if not intervals:
        raise SpecError("empty interval chain")
    fn = get_function(f)
    for iv in intervals:
        _check_domain(fn, iv)
    slope = _Slopes(fn)
    slopes = tuple(slope(iv) for iv in intervals)
    nested = all(outer.contains_interval(inner) for outer, inner in zip(intervals, intervals[1:]))
    tail = slopes[-((len(slopes) + 1) // 2):]
    return NestedBound(slopes=slopes, nested=nested, lower_bound=min(slopes), tail_max=max(tail))


def certificate(t: WitnessTree, guard: Optional[float] = None) -> CantorCertificate:
    report = verify_tree(t, guard)
    if not report.valid:
        first = report.violations[0]
        raise InvalidTree(f"{len(report.violations)} violation(s); first at {first.addr!r}: {first.kind}: {first.detail}")

    leaves = t.leaves()
    minima: List[float] = []
    for addr, _node in leaves:
        chain = [n.interval for n in t.branch(addr)]
        minima.append(nested_lower_bound(t.func_ref, chain).lower_bound)
    return CantorCertificate(
        func_ref=t.func_ref,
        C=t.C,
        c_prime=t.c_prime,
        depth=t.depth,
        leaf_intervals=tuple(n.interval for _a, n in leaves),
        leaf_addresses=tuple(a for a, _n in leaves),
        branch_slope_minima=tuple(minima),
    )
