# conftest.py
# Корень репозитория в sys.path: тесты импортируют core.* и config так же, как runner.py.
import os
import sys

ROOT = os.path.dirname(os.path.abspath(__file__))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

os.environ.setdefault("TELEMETRY_ENABLED", "false")
