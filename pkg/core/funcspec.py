# core/funcspec.py
"""
Сериализуемый каталог функций f: J -> R.

Каждый вариант - неизменяемая pydantic-модель с дискриминатором "kind".
JSON: {"kind": "<variant>", ...поля варианта в camelCase...}.
Ошибки валидации (и при конструировании, и при разборе JSON) -> SpecError.
"""
from __future__ import annotations

import csv
import json
import math
from typing import Annotated, Any, Dict, Literal, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, field_validator, model_validator
from pydantic.alias_generators import to_camel

from core.errors import SpecError

_MODEL_CONFIG = ConfigDict(
    frozen=True,
    extra="forbid",
    populate_by_name=True,
    alias_generator=to_camel,
)


def _finite(v: float, name: str) -> float:
    if not math.isfinite(v):
        raise ValueError(f"{name} must be finite, got {v!r}")
    return v


def _strictly_increasing(xs: Tuple[float, ...], name: str) -> Tuple[float, ...]:
    for x in xs:
        _finite(x, name)
    for lo, hi in zip(xs, xs[1:]):
        if not lo < hi:
            raise ValueError(f"{name} must be strictly increasing ({lo!r} >= {hi!r})")
    return xs


class _SpecModel(BaseModel):
    model_config = _MODEL_CONFIG

    def __init__(self, **data: Any):
        try:
            super().__init__(**data)
        except ValidationError as e:
            raise SpecError(f"{type(self).__name__}: {e}") from e


def _check_ratio(v: float) -> float:
    # 1/2 вырождается (нет лакун) - запрещено
    if not (0.0 < v < 0.5):
        raise ValueError(f"ratio must lie in (0, 1/2), got {v!r}")
    return v


def _check_digit_depth(v: int) -> int:
    if v < 1:
        raise ValueError(f"digitDepth must be >= 1, got {v!r}")
    return v


class CantorSpec(_SpecModel):
    ratio: float
    digit_depth: int

    @model_validator(mode="after")
    def _check(self) -> "CantorSpec":
        _check_ratio(self.ratio)
        _check_digit_depth(self.digit_depth)
        return self


class Constant(_SpecModel):
    kind: Literal["Constant"] = "Constant"
    value: float

    @field_validator("value")
    @classmethod
    def _fin(cls, v: float) -> float:
        return _finite(v, "value")


class Affine(_SpecModel):
    kind: Literal["Affine"] = "Affine"
    slope: float
    intercept: float = 0.0

    @field_validator("slope", "intercept")
    @classmethod
    def _fin(cls, v: float) -> float:
        return _finite(v, "affine coefficient")


class Abs(_SpecModel):
    kind: Literal["Abs"] = "Abs"


class Polynomial(_SpecModel):
    kind: Literal["Polynomial"] = "Polynomial"
    coefficients: Tuple[float, ...]  # по возрастанию степени

    @field_validator("coefficients")
    @classmethod
    def _coeffs(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if len(v) < 1:
            raise ValueError("polynomial needs at least one coefficient")
        for c in v:
            _finite(c, "coefficient")
        return v


class PiecewiseLinear(_SpecModel):
    kind: Literal["PiecewiseLinear"] = "PiecewiseLinear"
    breakpoints: Tuple[float, ...]
    values: Tuple[float, ...]

    @model_validator(mode="after")
    def _check(self) -> "PiecewiseLinear":
        if len(self.breakpoints) < 2:
            raise ValueError("piecewise linear needs at least 2 breakpoints")
        if len(self.breakpoints) != len(self.values):
            raise ValueError("breakpoints and values must have the same length")
        _strictly_increasing(self.breakpoints, "breakpoints")
        for y in self.values:
            _finite(y, "values")
        return self

    def slopes(self) -> Tuple[float, ...]:
        xs, ys = self.breakpoints, self.values
        return tuple((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1))


class CantorStaircase(_SpecModel):
    kind: Literal["CantorStaircase"] = "CantorStaircase"
    ratio: float
    digit_depth: int

    @model_validator(mode="after")
    def _check(self) -> "CantorStaircase":
        _check_ratio(self.ratio)
        _check_digit_depth(self.digit_depth)
        return self

    @property
    def cantor_spec(self) -> CantorSpec:
        return CantorSpec(ratio=self.ratio, digit_depth=self.digit_depth)

    @classmethod
    def of(cls, spec: CantorSpec) -> "CantorStaircase":
        return cls(ratio=spec.ratio, digit_depth=spec.digit_depth)


class Sampled(_SpecModel):
    kind: Literal["Sampled"] = "Sampled"
    xs: Tuple[float, ...]
    ys: Tuple[float, ...]
    interpolation: Literal["linear"] = "linear"

    @model_validator(mode="after")
    def _check(self) -> "Sampled":
        if len(self.xs) < 2:
            raise ValueError("sampled data needs at least 2 points")
        if len(self.xs) != len(self.ys):
            raise ValueError("xs and ys must have the same length")
        _strictly_increasing(self.xs, "xs")
        for y in self.ys:
            _finite(y, "ys")
        return self


class AffineReparam(_SpecModel):
    """x -> post_scale * inner(pre_scale * x + pre_shift) + post_shift"""
    kind: Literal["AffineReparam"] = "AffineReparam"
    inner: "FuncSpec"
    pre_scale: float = 1.0
    pre_shift: float = 0.0
    post_scale: float = 1.0
    post_shift: float = 0.0

    @model_validator(mode="after")
    def _check(self) -> "AffineReparam":
        for name in ("pre_scale", "pre_shift", "post_scale", "post_shift"):
            _finite(getattr(self, name), name)
        if self.pre_scale == 0.0:
            raise ValueError("preScale must be non-zero")
        return self


class Sum(_SpecModel):
    kind: Literal["Sum"] = "Sum"
    terms: Tuple["FuncSpec", ...]

    @field_validator("terms")
    @classmethod
    def _terms(cls, v: Tuple[Any, ...]) -> Tuple[Any, ...]:
        if len(v) < 1:
            raise ValueError("sum needs at least one term")
        return v


FuncSpec = Annotated[
    Union[Constant, Affine, Abs, Polynomial, PiecewiseLinear, CantorStaircase, Sampled, AffineReparam, Sum],
    Field(discriminator="kind"),
]

AffineReparam.model_rebuild()
Sum.model_rebuild()

_ADAPTER: TypeAdapter = TypeAdapter(FuncSpec)


# ========== JSON ==========

def funcspec_to_json(spec: Any) -> Dict[str, Any]:
    return spec.model_dump(by_alias=True, mode="json")


def parse_funcspec(obj: Any) -> Any:
    """dict | JSON-строка -> FuncSpec. Любая ошибка формата -> SpecError."""
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as e:
            raise SpecError(f"func spec is not valid JSON: {e}") from e
    if not isinstance(obj, dict):
        raise SpecError(f"func spec must be a JSON object, got {type(obj).__name__}")
    try:
        return _ADAPTER.validate_python(obj)
    except SpecError:
        raise
    except ValidationError as e:
        raise SpecError(f"invalid func spec: {e}") from e


def dumps_funcspec(spec: Any) -> str:
    return json.dumps(funcspec_to_json(spec), sort_keys=True)


# ========== Области определения ==========

def declared_domain(spec: Any) -> Tuple[float, float]:
    """(lo, hi), бесконечности для неограниченных членов каталога."""
    if isinstance(spec, (Constant, Affine, Abs, Polynomial)):
        return (-math.inf, math.inf)
    if isinstance(spec, PiecewiseLinear):
        return (spec.breakpoints[0], spec.breakpoints[-1])
    if isinstance(spec, Sampled):
        return (spec.xs[0], spec.xs[-1])
    if isinstance(spec, CantorStaircase):
        return (0.0, 1.0)
    if isinstance(spec, AffineReparam):
        lo, hi = declared_domain(spec.inner)
        # прообраз [lo, hi] при x -> pre_scale * x + pre_shift
        u = (lo - spec.pre_shift) / spec.pre_scale
        v = (hi - spec.pre_shift) / spec.pre_scale
        return (min(u, v), max(u, v))
    if isinstance(spec, Sum):
        lo, hi = -math.inf, math.inf
        for t in spec.terms:
            tlo, thi = declared_domain(t)
            lo, hi = max(lo, tlo), min(hi, thi)
        if not lo < hi:
            raise SpecError("sum terms have no common non-degenerate domain")
        return (lo, hi)
    raise SpecError(f"unknown func spec: {spec!r}")


# ========== CSV -> Sampled ==========

def load_sampled_csv(path: str) -> Sampled:
    """
    Две колонки x,y. Первая строка может быть заголовком (если не парсится как числа).
    x должны строго возрастать - иначе SpecError.
    """
    xs: list[float] = []
    ys: list[float] = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        for lineno, row in enumerate(csv.reader(f), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise SpecError(f"{path}:{lineno}: expected two columns x,y")
            try:
                x, y = float(row[0]), float(row[1])
            except ValueError:
                if lineno == 1 and not xs:
                    continue  # заголовок
                raise SpecError(f"{path}:{lineno}: not a number: {row!r}")
            xs.append(x)
            ys.append(y)
    return Sampled(xs=tuple(xs), ys=tuple(ys))
