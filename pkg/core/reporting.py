# core/reporting.py
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Dict, List, Optional

from core.errors import ConstructionError, ResolutionExhausted
from core.funcspec import funcspec_to_json
from core.lipschitz import LipschitzProfile

# ========== CSV профиля ==========

def _num(v: float) -> str:
    # repr -> точный round-trip float; inf/nan как "inf"/"nan"
    return repr(float(v)) if math.isfinite(v) else str(float(v))


def profile_header(window_count: int) -> List[str]:
    return ["x", "value", "divergent", "sided", *[f"w{k}" for k in range(window_count)]]


def write_profile_csv(p: LipschitzProfile, stream: io.TextIOBase) -> None:
    """x,value,divergent,sided,w0..w{K-1} - по строке на узел сетки, в порядке сетки."""
    wr = csv.writer(stream, lineterminator="\n")
    wr.writerow(profile_header(p.schedule.window_count))
    for x, e in zip(p.grid_points, p.estimates):
        wr.writerow([
            _num(x), _num(e.value), "true" if e.divergent else "false", e.sided,
            *[_num(w) for w in e.window_maxima],
        ])


def build_profile_csv(p: LipschitzProfile) -> bytes:
    buf = io.StringIO()
    write_profile_csv(p, buf)
    return buf.getvalue().encode("utf-8")


def profile_json(p: LipschitzProfile) -> Dict[str, Any]:
    return {
        "func": funcspec_to_json(p.func_ref),
        "domain": p.domain.to_list(),
        "schedule": p.schedule.to_dict(),
        "points": [{"x": x, **e.to_dict()} for x, e in zip(p.grid_points, p.estimates)],
    }


# ========== JSON ==========

def _jsonable(obj: Any) -> Any:
    """Строгий JSON: ±inf/nan -> строки "inf"/"-inf"/"nan"."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def report_to_json(report: Any) -> str:
    """Отчёт (dict или объект с to_dict()) -> детерминированная JSON-строка."""
    data = report.to_dict() if hasattr(report, "to_dict") else report
    return json.dumps(_jsonable(data), indent=2, allow_nan=False) + "\n"


def failure_document(e: ConstructionError, func: Any, C: Optional[float]) -> Dict[str, Any]:
    """Документ о неудачном построении: вид ошибки, адрес узла, пояснение."""
    doc: Dict[str, Any] = {
        "version": 1,
        "kind": e.kind,
        "path": e.path,
        "message": str(e),
        "func": funcspec_to_json(func),
        "C": C,
    }
    if isinstance(e, ResolutionExhausted):
        doc["concentrationPoint"] = e.concentration_point
    return doc
