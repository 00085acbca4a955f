# config.py
import os
from dotenv import load_dotenv

load_dotenv()

# =========================
# Единая конфигурация оценщиков и построителя сертификатов.
# Каждая константа переопределяется переменной окружения с тем же именем.
# Библиотека получает параметры явно; здесь только дефолты
# (ScaleSchedule.default(), флаги CLI).
# =========================

# ---------- Утилиты ----------
def _as_bool(v: str, default: bool = False) -> bool:
    if v is None:
        return default
    return str(v).strip().lower() in ("1", "true", "yes", "y", "on")

def _as_float(name: str, default: float) -> float:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    # допускаем дроби вида "1/3"
    if "/" in raw:
        num, den = raw.split("/", 1)
        return float(num) / float(den)
    return float(raw)

def _as_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    return int(raw) if raw else default

# ---------- Окна оценщика L(f, x) ----------
LIP_H0      = _as_float("LIP_H0", 0.0625)
LIP_SHRINK  = _as_float("LIP_SHRINK", 0.5)
LIP_WINDOWS = _as_int("LIP_WINDOWS", 8)
LIP_SAMPLES = _as_int("LIP_SAMPLES", 8)

# ---------- Допуски ----------
REL_TOL          = _as_float("REL_TOL", 1e-9)           # строгость "> C"
DIVERGENCE_RATIO = _as_float("DIVERGENCE_RATIO", 1.2)   # рост максимумов окон => +inf
STEEP_GUARD      = _as_float("STEEP_GUARD", 1e-9)       # build: *(1+g), verify: *(1-g)

# ---------- Профили ----------
GRID_COUNT      = _as_int("GRID_COUNT", 101)
PROFILE_WORKERS = max(1, _as_int("PROFILE_WORKERS", 1))
FUNC_CACHE_SIZE = max(1, _as_int("FUNC_CACHE_SIZE", 256))   # вычислители в кэше реестра

# ---------- Деревья-свидетели ----------
SEARCH_DEPTH     = _as_int("SEARCH_DEPTH", 6)
RESOLUTION_DEPTH = _as_int("RESOLUTION_DEPTH", 12)
TREE_DEPTH       = _as_int("TREE_DEPTH", 8)

# ---------- Канторова лестница ----------
CANTOR_RATIO       = _as_float("CANTOR_RATIO", 1.0 / 3.0)
CANTOR_DIGIT_DEPTH = _as_int("CANTOR_DIGIT_DEPTH", 40)
GAP_SHRINK         = _as_float("GAP_SHRINK", 0.1)
FLATNESS_LEVEL     = _as_int("FLATNESS_LEVEL", 5)

# ---------- Логи / события ----------
LOG_LEVEL         = os.getenv("LOG_LEVEL", "INFO").strip().upper() or "INFO"
TELEMETRY_ENABLED = _as_bool(os.getenv("TELEMETRY_ENABLED", "true"), True)
APP_NAME          = os.getenv("APP_NAME", "").strip() or "LipschitzWitness"
ENV_NAME          = os.getenv("ENV", "").strip() or "local"
