# core/interval.py
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

from core.errors import SpecError


@dataclass(frozen=True, order=True)
class Interval:
    """Невырожденный замкнутый отрезок [a, b]."""
    a: float
    b: float

    def __post_init__(self):
        if math.isnan(self.a) or math.isnan(self.b):
            raise SpecError(f"interval endpoints must be numbers: [{self.a}, {self.b}]")
        if not self.a < self.b:
            raise SpecError(f"degenerate interval: [{self.a}, {self.b}] (need a < b)")

    def length(self) -> float:
        return self.b - self.a

    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    def contains(self, x: float) -> bool:
        return self.a <= x <= self.b

    def contains_interval(self, other: "Interval") -> bool:
        return self.a <= other.a and other.b <= self.b

    def disjoint(self, other: "Interval") -> bool:
        # замкнутые отрезки: общий конец = пересечение
        lo, hi = (self, other) if self.a <= other.a else (other, self)
        return lo.b < hi.a

    def halves(self) -> Tuple["Interval", "Interval"]:
        m = self.midpoint()
        return Interval(self.a, m), Interval(m, self.b)

    def is_finite(self) -> bool:
        return math.isfinite(self.a) and math.isfinite(self.b)

    def to_list(self) -> list[float]:
        return [self.a, self.b]

    @classmethod
    def parse(cls, text: str) -> "Interval":
        """'a,b' -> Interval (формат флага --domain)."""
        try:
            lo, hi = (float(p) for p in str(text).split(","))
        except Exception:
            raise SpecError(f"expected 'a,b', got {text!r}")
        return cls(lo, hi)
