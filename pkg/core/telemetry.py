# core/telemetry.py
from __future__ import annotations
import os, json, time, logging
from typing import Any, Dict, Optional

TELEMETRY_ENABLED = os.getenv("TELEMETRY_ENABLED", "true").lower() in ("1","true","yes","y")
APP_NAME  = os.getenv("APP_NAME", "").strip() or "LipschitzWitness"
ENV_NAME  = os.getenv("ENV", "").strip() or "local"

log = logging.getLogger("telemetry")

_EMOJI = {
    # lifecycle
    "tree_built":    "🌳",
    "tree_failed":   "🔴",
    "verify_ok":     "✅",
    "verify_failed": "❗",
    "error":         "❗",

    # reports
    "profile_done":  "📈",
    "check_done":    "🧪",
    "demo_done":     "🪜",
}

_LEVEL = {
    "tree_failed":   logging.WARNING,
    "verify_failed": logging.WARNING,
    "error":         logging.ERROR,
}

def send_event(event: str, msg: str, extra: Optional[Dict[str, Any]] = None) -> None:
    """Одна строка события в лог (stderr у CLI). Никогда не бросает исключений."""
    if not TELEMETRY_ENABLED:
        return
    try:
        ts = int(time.time())
        prefix = _EMOJI.get(event, "ℹ️")
        header = f"{prefix} {APP_NAME} [{ENV_NAME}] - {event}"
        tail = ""
        if extra:
            try:
                tail = "\n" + json.dumps(extra, ensure_ascii=False, indent=2, default=str)
            except Exception:
                pass
        log.log(_LEVEL.get(event, logging.INFO), f"{header}\n{msg}\n🕒 {ts}{tail}")
    except Exception:
        pass
