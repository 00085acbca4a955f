# runner.py
"""
CLI: python runner.py <profile|certify|cantor|verify|check> [flags]

Данные - в --out или stdout, всё остальное (логи, ошибки) - в stderr.
Коды выхода: 0 успех, 1 ошибка использования/конфигурации, 2 проверка не прошла,
3 построение не удалось (NoSeedFound / ResolutionExhausted / NumericalBreakdown).
"""
import argparse
import logging
import math
import os
import sys
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

import config
from core.counterexamples import nonremovability_demo
from core.errors import ConstructionError, DisagreementError, LipschitzError, SpecError
from core.funcspec import CantorSpec, CantorStaircase, declared_domain, load_sampled_csv, parse_funcspec
from core.interval import Interval
from core.lipschitz import (
    ScaleSchedule, check_equivalence, exceptional_points, no_isolated_check, profile, profile_summary,
)
from core.reporting import build_profile_csv, failure_document, profile_json, report_to_json
from core.telemetry import send_event
from core.witness import build_tree, verify_tree
from core.witness_io import certificate_document, parse_certificate_document

log = logging.getLogger("runner")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_CONSTRUCTION = 3

Command = Literal["profile", "certify", "cantor", "verify", "check"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse по умолчанию выходит с кодом 2, а 2 у нас - "проверка не прошла"
    def error(self, message: str):
        raise UsageError(message)


# ========== Конфигурация запуска ==========

class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: Command
    func: Optional[str] = None
    domain: Optional[str] = None
    C: Optional[float] = None
    depth: int = config.TREE_DEPTH
    search_depth: int = config.SEARCH_DEPTH
    resolution_depth: int = config.RESOLUTION_DEPTH
    grid: int = config.GRID_COUNT
    h0: float = config.LIP_H0
    shrink: float = config.LIP_SHRINK
    windows: int = config.LIP_WINDOWS
    samples: int = config.LIP_SAMPLES
    out: Optional[str] = None
    format: Optional[Literal["json", "csv"]] = None
    cert: Optional[str] = None

    @field_validator("C")
    @classmethod
    def _c(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and (not math.isfinite(v) or v < 0):
            raise ValueError("C must be a finite real >= 0")
        return v

    @field_validator("depth", "search_depth", "resolution_depth")
    @classmethod
    def _depths(cls, v: int) -> int:
        if v < 0:
            raise ValueError("depths must be >= 0")
        return v

    @field_validator("grid")
    @classmethod
    def _grid(cls, v: int) -> int:
        if v < 2:
            raise ValueError("grid must be >= 2")
        return v

    @model_validator(mode="after")
    def _required(self) -> "RunConfig":
        need = {
            "profile": ("func",),
            "certify": ("func", "C"),
            "check": ("func", "C"),
            "verify": ("cert",),
            "cantor": (),
        }[self.command]
        missing = [n for n in need if getattr(self, n) is None]
        if missing:
            raise ValueError(f"{self.command} requires --{', --'.join(m.replace('_', '-') for m in missing)}")
        if self.format == "csv" and self.command != "profile":
            raise ValueError("--format csv is only available for profile")
        return self

    def schedule(self) -> ScaleSchedule:
        return ScaleSchedule(h0=self.h0, shrink_factor=self.shrink, window_count=self.windows,
                             samples_per_window=self.samples)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="runner.py", description="Pointwise Lipschitz constants, exceptional sets and witness trees")
    p.add_argument("command", choices=["profile", "certify", "cantor", "verify", "check"])
    p.add_argument("--func", help="FuncSpec as inline JSON, a JSON file path, or a two-column CSV path")
    p.add_argument("--domain", help="a,b (default: the function's declared domain)")
    p.add_argument("--C", dest="C", type=float)
    p.add_argument("--depth", type=int, default=config.TREE_DEPTH)
    p.add_argument("--search-depth", dest="search_depth", type=int, default=config.SEARCH_DEPTH)
    p.add_argument("--resolution-depth", dest="resolution_depth", type=int, default=config.RESOLUTION_DEPTH)
    p.add_argument("--grid", type=int, default=config.GRID_COUNT)
    p.add_argument("--h0", type=float, default=config.LIP_H0)
    p.add_argument("--shrink", type=float, default=config.LIP_SHRINK)
    p.add_argument("--windows", type=int, default=config.LIP_WINDOWS)
    p.add_argument("--samples", type=int, default=config.LIP_SAMPLES)
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "csv"])
    p.add_argument("--cert", help="certificate JSON path (verify)")
    return p


# ========== Входы / выходы ==========

def load_func(source: str) -> Any:
    text = source.strip()
    if text.startswith("{"):
        return parse_funcspec(text)
    if not os.path.isfile(text):
        raise SpecError(f"--func: no such file and not inline JSON: {source!r}")
    if text.lower().endswith(".csv"):
        return load_sampled_csv(text)
    with open(text, "r", encoding="utf-8") as f:
        return parse_funcspec(f.read())


def resolve_domain(cfg: RunConfig, func: Any) -> Interval:
    if cfg.domain:
        return Interval.parse(cfg.domain)
    lo, hi = declared_domain(func)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise SpecError(f"{func.kind} has an unbounded domain; pass --domain a,b")
    return Interval(lo, hi)


def emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        log.info(f"[CLI] wrote {out}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


# ========== Команды ==========

def _cmd_profile(cfg: RunConfig) -> int:
    func = load_func(cfg.func)
    J = resolve_domain(cfg, func)
    p = profile(func, J, cfg.grid, cfg.schedule())
    if cfg.format == "json":
        emit(report_to_json(profile_json(p)), cfg.out)
    else:
        emit(build_profile_csv(p).decode("utf-8"), cfg.out)
    send_event("profile_done", f"{len(p.grid_points)} points", profile_summary(p))
    return EXIT_OK


def _cmd_certify(cfg: RunConfig) -> int:
    func = load_func(cfg.func)
    J = resolve_domain(cfg, func)
    try:
        tree = build_tree(func, J, cfg.C, cfg.depth, cfg.search_depth, cfg.resolution_depth)
    except ConstructionError as e:
        log.error(f"[CLI] construction failed ({e.kind}) at path {e.path!r}: {e}")
        emit(report_to_json(failure_document(e, func, cfg.C)), cfg.out)
        return EXIT_CONSTRUCTION

    report = verify_tree(tree)
    if not report.valid:
        # построитель строже проверяющего, так что сюда попадать не должны
        for v in report.violations:
            log.error(f"[CLI] violation at {v.addr!r}: {v.kind}: {v.detail}")
        emit(report_to_json(report), cfg.out)
        return EXIT_VERIFY
    emit(report_to_json(certificate_document(tree)), cfg.out)
    return EXIT_OK


def _cmd_verify(cfg: RunConfig) -> int:
    try:
        with open(cfg.cert, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise SpecError(f"--cert: cannot read {cfg.cert!r}: {e}") from e

    try:
        tree = parse_certificate_document(text)
    except SpecError as e:
        log.error(f"[CLI] malformed certificate: {e}")
        emit(report_to_json({"valid": False, "nodeCount": 0,
                             "violations": [{"addr": "", "kind": "malformed", "detail": str(e)}]}), cfg.out)
        return EXIT_VERIFY

    report = verify_tree(tree)
    for v in report.violations:
        log.error(f"[CLI] violation at {v.addr!r}: {v.kind}: {v.detail}")
    emit(report_to_json(report), cfg.out)
    return EXIT_OK if report.valid else EXIT_VERIFY


def _cmd_cantor(cfg: RunConfig) -> int:
    if cfg.func:
        func = load_func(cfg.func)
        if not isinstance(func, CantorStaircase):
            raise SpecError(f"cantor expects a CantorStaircase, got {func.kind}")
        spec = func.cantor_spec
    else:
        spec = CantorSpec(ratio=config.CANTOR_RATIO, digit_depth=config.CANTOR_DIGIT_DEPTH)
    C = 0.0 if cfg.C is None else cfg.C
    try:
        demo = nonremovability_demo(spec, C, cfg.depth, cfg.search_depth, cfg.resolution_depth)
    except ConstructionError as e:
        log.error(f"[CLI] construction failed ({e.kind}) at path {e.path!r}: {e}")
        emit(report_to_json(failure_document(e, CantorStaircase.of(spec), C)), cfg.out)
        return EXIT_CONSTRUCTION
    emit(report_to_json(demo), cfg.out)
    return EXIT_OK if demo.passed else EXIT_VERIFY


def _cmd_check(cfg: RunConfig) -> int:
    func = load_func(cfg.func)
    J = resolve_domain(cfg, func)
    schedule = cfg.schedule()
    try:
        eq = check_equivalence(func, J, cfg.C, cfg.grid, schedule)
    except DisagreementError as e:
        log.error(f"[CLI] {e}")
        emit(report_to_json({"equivalence": {"C": e.C, "maxPointwise": e.max_pointwise,
                                             "maxPairwise": e.max_pairwise, "consistent": False}}), cfg.out)
        return EXIT_VERIFY

    p = profile(func, J, cfg.grid, schedule)
    points = exceptional_points(p, cfg.C)
    iso = no_isolated_check(points, p.grid_step)
    doc: Dict[str, Any] = {
        "equivalence": eq.to_dict(),
        "exceptionalPoints": [x for x, _e in points],
        "isolation": iso.to_dict(),
    }
    emit(report_to_json(doc), cfg.out)
    send_event("check_done", f"C={cfg.C!r}", {"consistent": eq.consistent, "violations": len(iso.violations)})
    return EXIT_OK if iso.ok else EXIT_VERIFY


_COMMANDS = {
    "profile": _cmd_profile,
    "certify": _cmd_certify,
    "cantor": _cmd_cantor,
    "verify": _cmd_verify,
    "check": _cmd_check,
}


def run(cfg: RunConfig) -> int:
    try:
        return _COMMANDS[cfg.command](cfg)
    except (SpecError, ValidationError, ValueError) as e:
        log.error(f"[CLI] {cfg.command}: {e}")
        return EXIT_USAGE
    except LipschitzError as e:
        log.error(f"[CLI] {cfg.command}: {type(e).__name__}: {e}")
        send_event("error", f"{cfg.command}: {type(e).__name__}", {"message": str(e)})
        return EXIT_USAGE


def _setup_logging() -> None:
    root = logging.getLogger()
    if not root.handlers:
        logging.basicConfig(level=config.LOG_LEVEL, stream=sys.stderr,
                            format="%(asctime)s %(levelname)s %(name)s %(message)s")


def main(argv: Optional[List[str]] = None) -> int:
    _setup_logging()
    try:
        ns = build_parser().parse_args(argv)
        cfg = RunConfig(**vars(ns))
    except UsageError as e:
        log.error(f"[CLI] usage: {e}")
        return EXIT_USAGE
    except ValidationError as e:
        log.error(f"[CLI] invalid arguments: {e}")
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
