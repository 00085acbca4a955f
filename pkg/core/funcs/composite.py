# core/funcs/composite.py
from __future__ import annotations

from typing import Callable, Tuple

import numpy as np

from core.func_base import RealFunction
from core.funcspec import AffineReparam, Sum, declared_domain

# Фабрика вложенных вычислителей приходит из реестра (без циклического импорта)
Resolver = Callable[[object], RealFunction]


class AffineReparamFn(RealFunction):
    """x -> t * g(s*x + c) + d"""

    def __init__(self, spec: AffineReparam, resolve: Resolver):
        self._inner = resolve(spec.inner)
        self._s, self._c = float(spec.pre_scale), float(spec.pre_shift)
        self._t, self._d = float(spec.post_scale), float(spec.post_shift)
        self._domain = declared_domain(spec)
        self._inner_lo, self._inner_hi = self._inner.domain()

    def kind(self) -> str:
        return "AffineReparam"

    def domain(self) -> Tuple[float, float]:
        return self._domain

    def _pre(self, x):
        # на границе прообраза округление может вывести за область g - прижимаем
        return np.clip(self._s * x + self._c, self._inner_lo, self._inner_hi)

    def value(self, x: float) -> float:
        return self._t * self._inner.value(float(self._pre(x))) + self._d

    def values(self, xs: np.ndarray) -> np.ndarray:
        return self._t * self._inner.values(self._pre(np.asarray(xs, dtype=float))) + self._d


class SumFn(RealFunction):
    def __init__(self, spec: Sum, resolve: Resolver):
        self._terms = [resolve(t) for t in spec.terms]
        self._domain = declared_domain(spec)

    def kind(self) -> str:
        return "Sum"

    def domain(self) -> Tuple[float, float]:
        return self._domain

    def value(self, x: float) -> float:
        return float(sum(t.value(x) for t in self._terms))

    def values(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        out = np.zeros_like(xs)
        for t in self._terms:
            out = out + t.values(xs)
        return out
