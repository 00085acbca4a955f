# core/pl.py
"""
Точный оракул L(f, x) для кусочно-линейных функций и приведение членов каталога к PL.

Внутри отрезка L = |наклон|; в точке излома двусторонний limsup даёт максимум
модулей соседних наклонов; на конце области - односторонний наклон.
"""
from __future__ import annotations

import bisect
from typing import Any, List, Optional

import numpy as np

from core.errors import DomainError, SpecError
from core.interval import Interval
from core.funcspec import (
    Abs, Affine, AffineReparam, CantorStaircase, Constant, PiecewiseLinear, Polynomial, Sampled, Sum,
)


def exact_pointwise_lipschitz_pl(f: PiecewiseLinear, x: float, domain: Optional[Interval] = None) -> float:
    xs = f.breakpoints
    if domain is None:
        domain = Interval(xs[0], xs[-1])
    if not (xs[0] <= domain.a and domain.b <= xs[-1]):
        raise DomainError(f"domain [{domain.a}, {domain.b}] leaves the breakpoint range [{xs[0]}, {xs[-1]}]")
    if not domain.contains(x):
        raise DomainError(f"x={x!r} outside [{domain.a}, {domain.b}]")

    slopes = f.slopes()
    candidates: List[float] = []
    if x > domain.a:
        # отрезок слева: xs[i] < x <= xs[i+1]
        candidates.append(abs(slopes[bisect.bisect_left(xs, x) - 1]))
    if x < domain.b:
        # отрезок справа: xs[i] <= x < xs[i+1]
        candidates.append(abs(slopes[bisect.bisect_right(xs, x) - 1]))
    return max(candidates)


def _pl(xs: List[float], ys: List[float]) -> PiecewiseLinear:
    return PiecewiseLinear(breakpoints=tuple(float(x) for x in xs), values=tuple(float(y) for y in ys))


def _restrict(xs: np.ndarray, ys: np.ndarray, domain: Interval) -> PiecewiseLinear:
    if not (xs[0] <= domain.a and domain.b <= xs[-1]):
        raise DomainError(f"domain [{domain.a}, {domain.b}] leaves data range [{xs[0]}, {xs[-1]}]")
    inner = [x for x in xs if domain.a < x < domain.b]
    pts = [domain.a, *inner, domain.b]
    return _pl(pts, list(np.interp(pts, xs, ys)))


def to_piecewise_linear(spec: Any, domain: Interval) -> PiecewiseLinear:
    """Точное PL-представление spec на конечном отрезке domain (SpecError, если невозможно)."""
    if not domain.is_finite():
        raise SpecError("piecewise linear conversion needs a finite domain")
    a, b = domain.a, domain.b

    if isinstance(spec, Constant):
        return _pl([a, b], [spec.value, spec.value])
    if isinstance(spec, Affine):
        return _pl([a, b], [spec.slope * a + spec.intercept, spec.slope * b + spec.intercept])
    if isinstance(spec, Abs):
        if a < 0.0 < b:
            return _pl([a, 0.0, b], [abs(a), 0.0, b])
        return _pl([a, b], [abs(a), abs(b)])
    if isinstance(spec, Polynomial):
        c = list(spec.coefficients)
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        if len(c) > 2:
            raise SpecError("polynomial of degree >= 2 is not piecewise linear")
        k = c[1] if len(c) == 2 else 0.0
        return _pl([a, b], [c[0] + k * a, c[0] + k * b])
    if isinstance(spec, PiecewiseLinear):
        return _restrict(np.asarray(spec.breakpoints), np.asarray(spec.values), domain)
    if isinstance(spec, Sampled):
        return _restrict(np.asarray(spec.xs), np.asarray(spec.ys), domain)
    if isinstance(spec, AffineReparam):
        s, c = spec.pre_scale, spec.pre_shift
        u1, u2 = sorted((s * a + c, s * b + c))
        inner = to_piecewise_linear(spec.inner, Interval(u1, u2))
        xs = [(u - c) / s for u in inner.breakpoints]
        ys = [spec.post_scale * y + spec.post_shift for y in inner.values]
        if s < 0:
            xs.reverse()
            ys.reverse()
        # концы - ровно a и b, без ошибки округления
        xs[0], xs[-1] = a, b
        return _pl(xs, ys)
    if isinstance(spec, Sum):
        parts = [to_piecewise_linear(t, domain) for t in spec.terms]
        xs = sorted({x for p in parts for x in p.breakpoints})
        ys = np.zeros(len(xs))
        for p in parts:
            ys = ys + np.interp(xs, p.breakpoints, p.values)
        return _pl(xs, list(ys))
    if isinstance(spec, CantorStaircase):
        raise SpecError("the Cantor staircase is not piecewise linear")
    raise SpecError(f"unknown func spec: {spec!r}")


def exact_pointwise_lipschitz(spec: Any, x: float, domain: Interval) -> float:
    """PL-оракул для любого PL-представимого члена каталога, L считается на domain."""
    return exact_pointwise_lipschitz_pl(to_piecewise_linear(spec, domain), x, domain)
