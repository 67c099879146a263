"""Check results: a pass flag, the worst residual and where it occurred"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np


@dataclass
class Witness:
    point: List[float]
    residual: float
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {"point": [float(x) for x in self.point], "residual": float(self.residual),
                "detail": self.detail}


@dataclass
class CheckOutcome:
    ok: bool
    max_residual: float = 0.0
    witness: Optional[Witness] = None
    notes: Dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def passed(cls, **notes) -> "CheckOutcome":
        return cls(True, 0.0, None, dict(notes))

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "max_residual": float(self.max_residual),
                "witness": None if self.witness is None else self.witness.to_dict()}


class ResidualTracker:
    """Accumulates residuals against a threshold; the first failure becomes the witness"""

    def __init__(self, threshold: float):
        self.threshold = threshold
        self.max_residual = 0.0
        self.worst: Optional[Witness] = None
        self.first_failure: Optional[Witness] = None
        self.count = 0

    def record(self, residual: float, point: Sequence[float], detail: str = "") -> bool:
        residual = float(residual)
        self.count += 1
        ok = residual <= self.threshold and np.isfinite(residual)
        if not np.isfinite(residual) or residual > self.max_residual or self.worst is None:
            self.max_residual = residual if np.isfinite(residual) else np.inf
            self.worst = Witness(list(np.asarray(point, dtype=float)), residual, detail)
        if not ok and self.first_failure is None:
            self.first_failure = Witness(list(np.asarray(point, dtype=float)), residual, detail)
        return ok

    def fail(self, point: Sequence[float], detail: str, residual: float = np.inf):
        """Record a failure that has no natural residual (a dimension mismatch, say)"""
        self.record(residual, point, detail)

    def outcome(self) -> CheckOutcome:
        ok = self.first_failure is None
        return CheckOutcome(ok, self.max_residual, None if ok else self.first_failure)

    def merge(self, other: CheckOutcome, point: Sequence[float] = (), detail: str = ""):
        if other.witness is not None:
            self.record(other.max_residual, other.witness.point, other.witness.detail or detail)
        else:
            self.record(other.max_residual, point, detail)
