"""Coordinate charts and seeded sampling"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import InputError

Interval = Tuple[float, float]

ANGLE_NAMES = ("theta", "phi", "psi", "alpha", "varphi")
DEFAULT_INTERVAL: Interval = (-2.0, 2.0)
ANGLE_INTERVAL: Interval = (0.0, 2.0 * math.pi)

# points closer than this to an excluded zero set are redrawn
EXCLUSION_MARGIN = 1e-3
MAX_DRAWS_PER_POINT = 1000


@dataclass(frozen=True)
class Chart:
    """Named coordinates with a sampling box"""

    name: str
    coords: Tuple[str, ...]
    sample_box: Tuple[Interval, ...]
    excluded: Tuple[Callable[[np.ndarray], float], ...] = field(default=(), compare=False)

    def __post_init__(self):
        if len(self.coords) == 0:
            raise InputError(f"Chart {self.name!r} has no coordinates")
        if len(set(self.coords)) != len(self.coords):
            raise InputError(f"Chart {self.name!r} repeats a coordinate: {self.coords}")
        if len(self.sample_box) != len(self.coords):
            raise InputError(f"Chart {self.name!r}: box has {len(self.sample_box)} intervals "
                             f"for {len(self.coords)} coordinates")
        for coord, (lo, hi) in zip(self.coords, self.sample_box):
            if not hi > lo:
                raise InputError(f"Chart {self.name!r}: empty interval for {coord}: [{lo}, {hi}]")

    @classmethod
    def build(cls, name: str, coords: Sequence[str],
              box: Optional[Dict[str, Sequence[float]]] = None,
              excluded: Sequence[Callable[[np.ndarray], float]] = ()) -> "Chart":
        """Chart whose unlisted coordinates get the default interval (angles get [0, 2π))"""
        box = box or {}
        intervals = []
        for coord in coords:
            if coord in box:
                lo, hi = box[coord]
                intervals.append((float(lo), float(hi)))
            else:
                intervals.append(default_interval(coord))
        return cls(name, tuple(coords), tuple(intervals), tuple(excluded))

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def widths(self) -> np.ndarray:
        return np.array([hi - lo for lo, hi in self.sample_box])

    def index(self, coord: str) -> int:
        try:
            return self.coords.index(coord)
        except ValueError:
            raise InputError(f"Chart {self.name!r} has no coordinate {coord!r}") from None

    def same_as(self, other: "Chart") -> bool:
        return self.name == other.name and self.coords == other.coords

    def box_dict(self) -> Dict[str, List[float]]:
        return {c: [lo, hi] for c, (lo, hi) in zip(self.coords, self.sample_box)}


def default_interval(coord: str) -> Interval:
    return ANGLE_INTERVAL if coord in ANGLE_NAMES else DEFAULT_INTERVAL


def sample_points(chart: Chart, count: int, rng: np.random.Generator) -> List[np.ndarray]:
    """Uniform points in the sample box, redrawn near excluded zero sets"""
    lo = np.array([a for a, _ in chart.sample_box])
    hi = np.array([b for _, b in chart.sample_box])
    points = []
    for _ in range(count):
        for _attempt in range(MAX_DRAWS_PER_POINT):
            p = rng.uniform(lo, hi)
            if all(abs(pred(p)) >= EXCLUSION_MARGIN for pred in chart.excluded):
                points.append(p)
                break
        else:
            raise InputError(f"Chart {chart.name!r}: excluded sets cover the sample box")
    return points
