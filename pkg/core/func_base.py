# core/func_base.py
from __future__ import annotations
from abc import ABC, abstractmethod
from typing import Tuple

import numpy as np


class RealFunction(ABC):
    """Вычислитель одного члена каталога FuncSpec. Экземпляры неизменяемы и потокобезопасны."""

    # meta
    @abstractmethod
    def kind(self) -> str: ...
    @abstractmethod
    def domain(self) -> Tuple[float, float]: ...

    # values
    @abstractmethod
    def value(self, x: float) -> float: ...

    def values(self, xs: np.ndarray) -> np.ndarray:
        """Векторная версия; по умолчанию поэлементно через value()."""
        xs = np.asarray(xs, dtype=float)
        return np.fromiter((self.value(float(x)) for x in xs), dtype=float, count=xs.size)

    def in_domain(self, x: float) -> bool:
        lo, hi = self.domain()
        return lo <= x <= hi
