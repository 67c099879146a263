"""Seeded sample points and the per-sample fan-out"""

from typing import Callable, List, Sequence, TypeVar

import numpy as np
from joblib import Parallel, delayed

from .jet_calculus import Chart, sample_points

T = TypeVar("T")


def draw_points(chart: Chart, count: int, seed: int) -> List[np.ndarray]:
    """count points of chart's box from a generator owned by this call"""
    return sample_points(chart, count, np.random.default_rng(seed))


def _indexed(fn: Callable[[np.ndarray], T], index: int, point: np.ndarray):
    return index, fn(point)


def map_points(fn: Callable[[np.ndarray], T], points: Sequence[np.ndarray], n_jobs: int = 1) -> List[T]:
    """fn over points, in input order whatever the worker scheduling"""
    if n_jobs == 1 or len(points) < 2:
        return [fn(p) for p in points]
    results = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_indexed)(fn, i, p) for i, p in enumerate(points))
    return [r for _, r in sorted(results, key=lambda item: item[0])]
