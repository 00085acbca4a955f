# tests/corpus.py
from typing import List

import numpy as np

from core.funcspec import PiecewiseLinear
from core.lipschitz import ScaleSchedule

CORPUS_SEED = 20140801
LATTICE = 64


def make_pl_corpus(count: int = 100) -> List[PiecewiseLinear]:
    """Кусочно-линейные функции на [0,1]: изломы на решётке 1/64, <= 20 кусков, наклоны в [-10, 10]."""
    rng = np.random.default_rng(CORPUS_SEED)
    corpus = []
    for _ in range(count):
        segments = int(rng.integers(1, 21))
        inner = np.sort(rng.choice(np.arange(1, LATTICE), size=segments - 1, replace=False))
        xs = np.concatenate([[0], inner, [LATTICE]]) / LATTICE
        slopes = rng.uniform(-10.0, 10.0, size=segments)
        ys = np.concatenate([[rng.uniform(-1.0, 1.0)], np.zeros(segments)])
        for i in range(segments):
            ys[i + 1] = ys[i] + slopes[i] * (xs[i + 1] - xs[i])
        corpus.append(PiecewiseLinear(breakpoints=tuple(float(x) for x in xs), values=tuple(float(y) for y in ys)))
    return corpus


def fine_schedule(f: PiecewiseLinear) -> ScaleSchedule:
    # все окна уже половины кратчайшего куска
    min_seg = min(b - a for a, b in zip(f.breakpoints, f.breakpoints[1:]))
    return ScaleSchedule(h0=0.45 * min_seg, shrink_factor=0.5, window_count=6, samples_per_window=8)
