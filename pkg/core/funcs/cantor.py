# core/funcs/cantor.py
from __future__ import annotations

import math
from typing import Tuple

from core.errors import DomainError
from core.func_base import RealFunction
from core.funcspec import CantorSpec, CantorStaircase


def cantor_value(x: float, spec: CantorSpec) -> float:
    """
    Обобщённая канторова лестница с отношением ratio, алгоритм по цифрам:
    в левом куске x -> x/r, в правом value += weight и x -> (x-(1-r))/r,
    в лакуне - сразу value + weight (функция там постоянна). weight /= 2 на каждом шаге.
    Погрешность после digit_depth шагов не больше 2**-digit_depth.
    """
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"cantor_value: x={x!r} outside [0, 1]")
    r = spec.ratio
    right = 1.0 - r
    value = 0.0
    weight = 0.5
    for _ in range(spec.digit_depth):
        # концы куска считаем точно: F(0)=0, F(1)=1 на каждом уровне
        if x <= 0.0:
            return value
        if x >= 1.0:
            return value + 2.0 * weight
        if x < r:
            x = x / r
        elif x > right:
            value += weight
            x = (x - right) / r
        else:
            return value + weight
        weight *= 0.5
    return value


class CantorStaircaseFn(RealFunction):
    def __init__(self, spec: CantorStaircase):
        self._spec = spec.cantor_spec

    def kind(self) -> str:
        return "CantorStaircase"

    def domain(self) -> Tuple[float, float]:
        return (0.0, 1.0)

    def value(self, x: float) -> float:
        if math.isnan(x):
            raise DomainError("cantor staircase evaluated at NaN")
        return cantor_value(min(1.0, max(0.0, x)), self._spec)
