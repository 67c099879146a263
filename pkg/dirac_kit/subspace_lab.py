"""
Tolerance-aware subspaces of a single fiber.

Ranks use a relative singular-value cutoff: a singular value counts when it exceeds
tol times the largest one (and an absolute floor, so pure round-off spans nothing).
Bases are stored orthonormal, one vector per row.
"""

from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionError

DEFAULT_TOL = 1e-9
# spans of vectors this small are treated as {0}
ZERO_FLOOR = 1e-12
# singular values within this factor above the cutoff are reported as near-threshold
WARNING_DECADES = 1e3


class Subspace:
    """Span of fiber vectors, stored as an orthonormal row basis"""

    __slots__ = ("ambient_dim", "basis", "tol", "margin")

    def __init__(self, ambient_dim: int, vectors: Iterable[Sequence[float]] = (),
                 tol: float = DEFAULT_TOL):
        if ambient_dim < 1:
            raise DimensionError(f"ambient dimension must be positive, got {ambient_dim}")
        rows = [np.asarray(v, dtype=float).ravel() for v in vectors]
        for v in rows:
            if v.size != ambient_dim:
                raise DimensionError(f"vector of length {v.size} in a {ambient_dim}-dim fiber")
        self.ambient_dim = ambient_dim
        self.tol = tol
        self.margin = np.inf
        if not rows:
            self.basis = np.zeros((0, ambient_dim))
            return
        matrix = np.array(rows).T
        u, s, _ = scipy.linalg.svd(matrix, full_matrices=False)
        cutoff = max(tol * s[0], ZERO_FLOOR)
        rank = int(np.sum(s > cutoff))
        self.basis = u[:, :rank].T.copy()
        near = s[(s > cutoff) & (s < WARNING_DECADES * cutoff)]
        if near.size:
            self.margin = float(near.min() / cutoff)

    @classmethod
    def _orthonormal(cls, ambient_dim: int, basis: np.ndarray, tol: float) -> "Subspace":
        out = cls(ambient_dim, (), tol)
        out.basis = np.asarray(basis, dtype=float).reshape(-1, ambient_dim)
        return out

    @classmethod
    def full(cls, ambient_dim: int, tol: float = DEFAULT_TOL) -> "Subspace":
        return cls._orthonormal(ambient_dim, np.eye(ambient_dim), tol)

    @classmethod
    def zero(cls, ambient_dim: int, tol: float = DEFAULT_TOL) -> "Subspace":
        return cls(ambient_dim, (), tol)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def near_threshold(self) -> bool:
        """Some kept singular value sits within three decades of the cutoff"""
        return np.isfinite(self.margin)

    def projector(self) -> np.ndarray:
        return self.basis.T @ self.basis

    def residual(self, vector: Sequence[float]) -> float:
        """‖v − Pv‖ / max(1, ‖v‖)"""
        v = np.asarray(vector, dtype=float).ravel()
        if v.size != self.ambient_dim:
            raise DimensionError(f"vector of length {v.size} in a {self.ambient_dim}-dim fiber")
        rest = v - self.basis.T @ (self.basis @ v)
        return float(np.linalg.norm(rest) / max(1.0, np.linalg.norm(v)))

    def contains(self, vector: Sequence[float], tol: Optional[float] = None) -> bool:
        return self.residual(vector) <= (self.tol if tol is None else tol)

    def max_residual_of(self, other: "Subspace") -> float:
        """Largest residual of other's basis vectors against self"""
        if other.dim == 0:
            return 0.0
        return max(self.residual(v) for v in other.basis)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def _check_ambient(*spaces: Subspace) -> int:
    n = spaces[0].ambient_dim
    for s in spaces[1:]:
        if s.ambient_dim != n:
            raise DimensionError(f"ambient dimensions differ: {n} vs {s.ambient_dim}")
    return n


def span(vectors: Iterable[Sequence[float]], ambient_dim: int, tol: float = DEFAULT_TOL) -> Subspace:
    return Subspace(ambient_dim, vectors, tol)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    n = _check_ambient(a, b)
    return Subspace(n, list(a.basis) + list(b.basis), a.tol)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """A ∩ B from the null space of [U_a, −U_b]; consistent with subspace_sum's rank"""
    n = _check_ambient(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(n, a.tol)
    stacked = np.hstack([a.basis.T, -b.basis.T])
    null = scipy.linalg.null_space(stacked, rcond=max(a.tol, ZERO_FLOOR))
    if null.shape[1] == 0:
        return Subspace.zero(n, a.tol)
    vectors = (a.basis.T @ null[:a.dim]).T
    q, _ = np.linalg.qr(vectors.T)
    return Subspace._orthonormal(n, q.T, a.tol)


def annihilator(a: Subspace) -> Subspace:
    """A° in the dual fiber, dim n − dim A"""
    n = a.ambient_dim
    if a.dim == 0:
        return Subspace.full(n, a.tol)
    null = scipy.linalg.null_space(a.basis)
    return Subspace._orthonormal(n, null.T, a.tol)


def orthogonal_wrt_form(a: Subspace, omega: np.ndarray, within: Subspace) -> Subspace:
    """{v ∈ within : ω(v, a) = 0 for all a ∈ A}, with ω(v, w) = vᵀ Ω w"""
    n = _check_ambient(a, within)
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (n, n):
        raise DimensionError(f"form of shape {omega.shape} on a {n}-dim fiber")
    if a.dim == 0 or within.dim == 0:
        return within
    coupling = a.basis @ omega.T @ within.basis.T        # dim A × dim W
    _, s, vt = scipy.linalg.svd(coupling, full_matrices=True)
    threshold = within.tol * max(np.linalg.norm(omega, 2), ZERO_FLOOR)
    rank = int(np.sum(s > threshold))
    free = vt[rank:]
    if free.shape[0] == 0:
        return Subspace.zero(n, within.tol)
    return Subspace._orthonormal(n, free @ within.basis, within.tol)


def equals(a: Subspace, b: Subspace) -> bool:
    """dim A = dim B = dim(A + B)"""
    _check_ambient(a, b)
    return a.dim == b.dim and subspace_sum(a, b).dim == a.dim


def is_contained(a: Subspace, b: Subspace) -> bool:
    """A ⊆ B"""
    _check_ambient(a, b)
    return subspace_sum(a, b).dim == b.dim


def image(matrix: np.ndarray, a: Subspace) -> Subspace:
    """M(A) for a linear map M from A's fiber"""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape[1] != a.ambient_dim:
        raise DimensionError(f"map of shape {matrix.shape} applied to a {a.ambient_dim}-dim fiber")
    return Subspace(matrix.shape[0], list((matrix @ a.basis.T).T), a.tol)


def preimage(matrix: np.ndarray, a: Subspace) -> Subspace:
    """{x : M x ∈ A}"""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape[0] != a.ambient_dim:
        raise DimensionError(f"map of shape {matrix.shape} into a {a.ambient_dim}-dim fiber")
    m = matrix.shape[1]
    conditions = annihilator(a).basis @ matrix
    if conditions.shape[0] == 0:
        return Subspace.full(m, a.tol)
    scale = max(np.linalg.norm(matrix, 2), ZERO_FLOOR)
    _, s, vt = scipy.linalg.svd(conditions, full_matrices=True)
    rank = int(np.sum(s > a.tol * scale))
    free = vt[rank:]
    return Subspace._orthonormal(m, free, a.tol)


def subspace_gap(a: Subspace, b: Subspace) -> float:
    """Largest basis residual either way; 0 for equal subspaces"""
    _check_ambient(a, b)
    return max(b.max_residual_of(a), a.max_residual_of(b))
