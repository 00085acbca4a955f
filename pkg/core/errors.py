# core/errors.py
from __future__ import annotations

from typing import Optional


class LipschitzError(RuntimeError):
    pass


class SpecError(LipschitzError, ValueError):
    """Невалидные параметры FuncSpec / CantorSpec / ScaleSchedule или битый документ."""


class DomainError(LipschitzError, ValueError):
    pass


class ScheduleError(LipschitzError):
    def __init__(self, msg: str, window: Optional[int] = None):
        super().__init__(msg)
        self.window = window


class GridPointError(LipschitzError):
    """Ошибка оценщика на конкретной точке сетки профиля (причина - в __cause__)."""
    def __init__(self, x: float, cause: Exception):
        super().__init__(f"grid point x={x!r}: {cause}")
        self.x = x


class DisagreementError(LipschitzError):
    def __init__(self, max_pointwise: float, max_pairwise: float, C: float):
        super().__init__(
            f"pointwise/pairwise disagreement at C={C!r}: "
            f"max L estimate={max_pointwise!r}, seminorm estimate={max_pairwise!r} "
            f"(estimator misconfiguration, not a failure of the equivalence)"
        )
        self.max_pointwise = max_pointwise
        self.max_pairwise = max_pairwise
        self.C = C


# ---------- построение деревьев ----------

class ConstructionError(LipschitzError):
    kind = "ConstructionError"

    def __init__(self, msg: str, path: str = ""):
        super().__init__(msg)
        self.path = path

    def with_path(self, path: str) -> "ConstructionError":
        self.path = path
        return self


class NoSeedFound(ConstructionError):
    kind = "NoSeedFound"


class ResolutionExhausted(ConstructionError):
    kind = "ResolutionExhausted"

    EXPLANATION = (
        "no disjoint steep pair was found at this search depth. For a continuous "
        "function two such subintervals always exist, so this is a limitation of the "
        "search resolution (or a threshold too close to the actual steepness), "
        "never a counterexample."
    )

    def __init__(self, msg: str, path: str = "", concentration_point: Optional[float] = None):
        super().__init__(f"{msg}: {self.EXPLANATION}", path)
        self.concentration_point = concentration_point


class NumericalBreakdown(ConstructionError):
    kind = "NumericalBreakdown"

    def __init__(self, msg: str, depth: int, path: str = ""):
        super().__init__(msg, path)
        self.depth = depth


class InvalidTree(LipschitzError):
    pass


class StepTooLarge(LipschitzError, ValueError):
    pass
