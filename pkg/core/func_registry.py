# core/func_registry.py
from __future__ import annotations

import math
import threading
from collections import OrderedDict
from typing import Any, Callable, Dict, List

import config
from core.errors import DomainError, SpecError
from core.func_base import RealFunction
from core.funcspec import CantorSpec

# === Реестр вычислителей: kind -> фабрика(spec, resolve) + LRU-кэш инстансов по spec ===

Factory = Callable[[Any, Callable[[Any], RealFunction]], RealFunction]

_registry: Dict[str, Factory] = {}
_instances: "OrderedDict[Any, RealFunction]" = OrderedDict()
_lock = threading.Lock()
_defaults_registered: bool = False


class KindNotRegistered(SpecError):
    pass


def register_kind(kind: str, factory: Factory) -> None:
    """
    Регистрирует фабрику вычислителя для kind.
    Повторная регистрация перезапишет фабрику (кэш инстансов сбрасывается).
    """
    with _lock:
        _registry[kind] = factory
        _instances.clear()


def _register_defaults_once() -> None:
    global _defaults_registered
    if _defaults_registered:
        return
    # ленивые импорты: модули вычислителей сами импортируют funcspec
    from core.funcs.elementary import AbsFn, AffineFn, ConstantFn, PiecewiseLinearFn, PolynomialFn, SampledFn
    from core.funcs.cantor import CantorStaircaseFn
    from core.funcs.composite import AffineReparamFn, SumFn

    defaults: Dict[str, Factory] = {
        "Constant": lambda s, _r: ConstantFn(s),
        "Affine": lambda s, _r: AffineFn(s),
        "Abs": lambda s, _r: AbsFn(s),
        "Polynomial": lambda s, _r: PolynomialFn(s),
        "PiecewiseLinear": lambda s, _r: PiecewiseLinearFn(s),
        "CantorStaircase": lambda s, _r: CantorStaircaseFn(s),
        "Sampled": lambda s, _r: SampledFn(s),
        "AffineReparam": lambda s, r: AffineReparamFn(s, r),
        "Sum": lambda s, r: SumFn(s, r),
    }
    with _lock:
        for k, fac in defaults.items():
            _registry.setdefault(k, fac)
    _defaults_registered = True


def get_function(spec: Any) -> RealFunction:
    """
    Возвращает (и кэширует) вычислитель для spec.
    FuncSpec неизменяемы и хэшируемы, кэш по самому spec; не больше FUNC_CACHE_SIZE
    инстансов, вытесняется давно не использованный.
    """
    _register_defaults_once()
    with _lock:
        cached = _instances.get(spec)
        if cached is not None:
            _instances.move_to_end(spec)
            return cached

    kind = getattr(spec, "kind", None)
    factory = _registry.get(kind)
    if factory is None:
        raise KindNotRegistered(f"function kind is not registered: {kind!r}")

    instance = factory(spec, get_function)
    with _lock:
        instance = _instances.setdefault(spec, instance)
        _instances.move_to_end(spec)
        while len(_instances) > config.FUNC_CACHE_SIZE:
            _instances.popitem(last=False)
        return instance


def evaluate(spec: Any, x: float) -> float:
    """f(x) с проверкой области определения."""
    fn = get_function(spec)
    if math.isnan(x) or not fn.in_domain(x):
        lo, hi = fn.domain()
        raise DomainError(f"{fn.kind()}: x={x!r} outside declared domain [{lo}, {hi}]")
    return float(fn.value(x))


def cantor_value(x: float, spec: CantorSpec) -> float:
    from core.funcs.cantor import cantor_value as _cv
    return _cv(x, spec)


def available_kinds() -> List[str]:
    _register_defaults_once()
    return sorted(_registry.keys())

