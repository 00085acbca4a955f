# core/funcs/elementary.py
from __future__ import annotations

import math
from typing import Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from core.func_base import RealFunction
from core.funcspec import Abs, Affine, Constant, PiecewiseLinear, Polynomial, Sampled

_REAL_LINE = (-math.inf, math.inf)


class ConstantFn(RealFunction):
    def __init__(self, spec: Constant):
        self._c = float(spec.value)

    def kind(self) -> str:
        return "Constant"

    def domain(self) -> Tuple[float, float]:
        return _REAL_LINE

    def value(self, x: float) -> float:
        return self._c

    def values(self, xs: np.ndarray) -> np.ndarray:
        return np.full(np.shape(xs), self._c, dtype=float)


class AffineFn(RealFunction):
    def __init__(self, spec: Affine):
        self._k = float(spec.slope)
        self._b = float(spec.intercept)

    def kind(self) -> str:
        return "Affine"

    def domain(self) -> Tuple[float, float]:
        return _REAL_LINE

    def value(self, x: float) -> float:
        return self._k * x + self._b

    def values(self, xs: np.ndarray) -> np.ndarray:
        return self._k * np.asarray(xs, dtype=float) + self._b


class AbsFn(RealFunction):
    def __init__(self, spec: Abs):
        pass

    def kind(self) -> str:
        return "Abs"

    def domain(self) -> Tuple[float, float]:
        return _REAL_LINE

    def value(self, x: float) -> float:
        return abs(x)

    def values(self, xs: np.ndarray) -> np.ndarray:
        return np.abs(np.asarray(xs, dtype=float))


class PolynomialFn(RealFunction):
    def __init__(self, spec: Polynomial):
        # коэффициенты по возрастанию степени - как ждёт numpy.polynomial
        self._c = np.asarray(spec.coefficients, dtype=float)

    def kind(self) -> str:
        return "Polynomial"

    def domain(self) -> Tuple[float, float]:
        return _REAL_LINE

    def value(self, x: float) -> float:
        return float(P.polyval(x, self._c))

    def values(self, xs: np.ndarray) -> np.ndarray:
        return P.polyval(np.asarray(xs, dtype=float), self._c)


class _LinearInterpFn(RealFunction):
    """Точная линейная интерполяция между узлами (np.interp)."""
    _kind = ""

    def __init__(self, xs, ys):
        self._xs = np.asarray(xs, dtype=float)
        self._ys = np.asarray(ys, dtype=float)

    def kind(self) -> str:
        return self._kind

    def domain(self) -> Tuple[float, float]:
        return (float(self._xs[0]), float(self._xs[-1]))

    def value(self, x: float) -> float:
        return float(np.interp(x, self._xs, self._ys))

    def values(self, xs: np.ndarray) -> np.ndarray:
        return np.interp(np.asarray(xs, dtype=float), self._xs, self._ys)


class PiecewiseLinearFn(_LinearInterpFn):
    _kind = "PiecewiseLinear"

    def __init__(self, spec: PiecewiseLinear):
        super().__init__(spec.breakpoints, spec.values)


class SampledFn(_LinearInterpFn):
    _kind = "Sampled"

    def __init__(self, spec: Sampled):
        super().__init__(spec.xs, spec.ys)
