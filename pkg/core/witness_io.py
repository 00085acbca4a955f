# core/witness_io.py
from __future__ import annotations

import json
import math
from typing import Any, Dict, List, Tuple

from core.errors import SpecError
from core.funcspec import funcspec_to_json, parse_funcspec
from core.interval import Interval
from core.witness import SteepInterval, WitnessNode, WitnessTree

CERT_VERSION = 1


def certificate_document(t: WitnessTree) -> Dict[str, Any]:
    """
    {"version":1,"func":{...},"C":..,"cPrime":..,"depth":..,"nodes":[{"addr","a","b","slope"}...]}
    Узлы в ширину, адрес корня "". Без отметок времени: одинаковые входы -> одинаковые байты.
    """
    return {
        "version": CERT_VERSION,
        "func": funcspec_to_json(t.func_ref),
        "C": t.C,
        "cPrime": t.c_prime,
        "depth": t.depth,
        "nodes": [
            {"addr": addr, "a": n.interval.a, "b": n.interval.b, "slope": n.steep.slope}
            for addr, n in t.nodes()
        ],
    }


def dumps_certificate(t: WitnessTree) -> str:
    return json.dumps(certificate_document(t), indent=2) + "\n"


def _num(doc: Dict[str, Any], key: str) -> float:
    v = doc.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecError(f"certificate field {key!r} must be a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise SpecError(f"certificate field {key!r} must be finite")
    return v


def parse_certificate_document(doc: Any) -> WitnessTree:
    """dict | JSON-строка -> WitnessTree. Битая структура -> SpecError (проверку свойств делает verify_tree)."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise SpecError(f"certificate is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise SpecError("certificate must be a JSON object")
    if doc.get("version") != CERT_VERSION:
        raise SpecError(f"unsupported certificate version: {doc.get('version')!r}")

    func = parse_funcspec(doc.get("func"))
    C = _num(doc, "C")
    c_prime = _num(doc, "cPrime")
    depth = doc.get("depth")
    if isinstance(depth, bool) or not isinstance(depth, int) or depth < 0:
        raise SpecError(f"certificate depth must be a non-negative integer, got {depth!r}")

    raw = doc.get("nodes")
    if not isinstance(raw, list) or not raw:
        raise SpecError("certificate has no nodes")

    by_addr: Dict[str, Tuple[Interval, float]] = {}
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise SpecError(f"node #{i} must be an object")
        addr = item.get("addr")
        if not isinstance(addr, str) or any(ch not in "01" for ch in addr):
            raise SpecError(f"node #{i}: bad address {addr!r}")
        if addr in by_addr:
            raise SpecError(f"duplicate node address {addr!r}")
        by_addr[addr] = (Interval(_num(item, "a"), _num(item, "b")), _num(item, "slope"))

    if "" not in by_addr:
        raise SpecError("certificate has no root node")
    for addr in by_addr:
        if addr and addr[:-1] not in by_addr:
            raise SpecError(f"node {addr!r} has no parent")

    # снизу вверх: глубина документа не ограничена стеком
    built: Dict[str, WitnessNode] = {}
    for addr in sorted(by_addr, key=len, reverse=True):
        iv, slope = by_addr[addr]
        kids: List[WitnessNode] = [built.pop(addr + s) for s in "01" if addr + s in built]
        if len(kids) == 1:
            raise SpecError(f"node {addr!r} has exactly one child")
        built[addr] = WitnessNode(SteepInterval(iv, slope, c_prime), tuple(kids))

    return WitnessTree(func_ref=func, C=C, c_prime=c_prime, root=built[""], depth=depth)
