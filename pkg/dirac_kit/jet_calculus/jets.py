"""
Truncated Taylor jets.

A Jet2 carries value, gradient and Hessian of a scalar at one chart point. Derived
quantities drop orders: differentiating a jet leaves value and gradient of the
derivative, so a bracket of two order-2 fields is an order-1 field, and so on.
"""

import math
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from ..errors import DimensionError, JetOrderError

Number = Union[int, float]


class Jet2:
    """Second order jet; grad or hess set to None marks a truncated jet"""

    __slots__ = ("value", "grad", "hess")

    def __init__(self, value: float, grad: Optional[np.ndarray] = None,
                 hess: Optional[np.ndarray] = None):
        self.value = float(value)
        self.grad = grad
        self.hess = hess if grad is not None else None

    @property
    def order(self) -> int:
        if self.grad is None:
            return 0
        return 1 if self.hess is None else 2

    @classmethod
    def constant(cls, value: Number, dim: int) -> "Jet2":
        return cls(value, np.zeros(dim), np.zeros((dim, dim)))

    @classmethod
    def variable(cls, index: int, value: Number, dim: int) -> "Jet2":
        grad = np.zeros(dim)
        grad[index] = 1.0
        return cls(value, grad, np.zeros((dim, dim)))

    def truncate(self, order: int) -> "Jet2":
        if order >= self.order:
            return self
        if order <= 0:
            return Jet2(self.value)
        return Jet2(self.value, self.grad)

    def derivative(self, index: int) -> "Jet2":
        """∂_index of the underlying function, one order lower"""
        if self.grad is None:
            raise JetOrderError(f"no gradient available for ∂_{index}")
        if self.hess is None:
            return Jet2(self.grad[index])
        return Jet2(self.grad[index], self.hess[index].copy())

    def apply(self, f0: float, f1: float, f2: float) -> "Jet2":
        """Chain rule for a unary function with f(a)=f0, f'(a)=f1, f''(a)=f2"""
        if self.grad is None:
            return Jet2(f0)
        grad = f1 * self.grad
        if self.hess is None:
            return Jet2(f0, grad)
        return Jet2(f0, grad, f1 * self.hess + f2 * np.outer(self.grad, self.grad))

    # arithmetic
    def __add__(self, other):
        if isinstance(other, Jet2):
            return _combine(self, other, 1.0, 1.0)
        return Jet2(self.value + other, self.grad, self.hess)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet2):
            return _combine(self, other, 1.0, -1.0)
        return Jet2(self.value - other, self.grad, self.hess)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self.scaled(-1.0)

    def scaled(self, c: float) -> "Jet2":
        return Jet2(c * self.value,
                    None if self.grad is None else c * self.grad,
                    None if self.hess is None else c * self.hess)

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            return self.scaled(float(other))
        value = self.value * other.value
        if self.grad is None or other.grad is None:
            return Jet2(value)
        grad = self.value * other.grad + other.value * self.grad
        if self.hess is None or other.hess is None:
            return Jet2(value, grad)
        cross = np.outer(self.grad, other.grad)
        hess = self.value * other.hess + other.value * self.hess + cross + cross.T
        return Jet2(value, grad, hess)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        a = self.value
        if a == 0.0:
            raise ZeroDivisionError("jet division by zero")
        return self.apply(1.0 / a, -1.0 / a ** 2, 2.0 / a ** 3)

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        return self.scaled(1.0 / float(other))

    def __rtruediv__(self, other):
        return self.reciprocal().scaled(float(other))

    def __pow__(self, exponent: int):
        if int(exponent) != exponent:
            raise ValueError("only integer powers are supported")
        n = int(exponent)
        if n == 0:
            return Jet2(1.0, None if self.grad is None else np.zeros_like(self.grad),
                        None if self.hess is None else np.zeros_like(self.hess))
        a = self.value
        if n < 0 and a == 0.0:
            raise ZeroDivisionError("negative power of zero")
        f0 = a ** n
        f1 = n * a ** (n - 1) if n != 0 else 0.0
        f2 = n * (n - 1) * a ** (n - 2) if n not in (0, 1) else 0.0
        return self.apply(f0, f1, f2)

    def __repr__(self) -> str:
        return f"Jet2(value={self.value!r}, order={self.order})"


def _combine(a: Jet2, b: Jet2, ca: float, cb: float) -> Jet2:
    value = ca * a.value + cb * b.value
    if a.grad is None or b.grad is None:
        return Jet2(value)
    grad = ca * a.grad + cb * b.grad
    if a.hess is None or b.hess is None:
        return Jet2(value, grad)
    return Jet2(value, grad, ca * a.hess + cb * b.hess)


def jsin(a: Jet2) -> Jet2:
    s, c = math.sin(a.value), math.cos(a.value)
    return a.apply(s, c, -s)


def jcos(a: Jet2) -> Jet2:
    s, c = math.sin(a.value), math.cos(a.value)
    return a.apply(c, -s, -c)


def jsqrt(a: Jet2) -> Jet2:
    if a.value <= 0.0:
        if a.value == 0.0 and a.grad is None:
            return Jet2(0.0)
        raise ValueError(f"sqrt of non-positive jet value {a.value}")
    r = math.sqrt(a.value)
    return a.apply(r, 0.5 / r, -0.25 / (r * a.value))


def as_jet(value: Union[Jet2, Number], dim: int) -> Jet2:
    return value if isinstance(value, Jet2) else Jet2.constant(value, dim)


def min_order(jets: Sequence[Jet2]) -> int:
    return min((j.order for j in jets), default=2)


def compose(outer: Jet2, inner: Sequence[Jet2]) -> Jet2:
    """Jet of f∘φ from the jet of f (in the target variables) and the jets of φ's components"""
    if outer.grad is None:
        return Jet2(outer.value)
    if len(inner) != outer.grad.shape[0]:
        raise DimensionError(f"compose: outer has {outer.grad.shape[0]} variables, got {len(inner)}")
    if not inner:
        return Jet2(outer.value)
    if min_order(inner) == 0:
        return Jet2(outer.value)
    jac = np.array([j.grad for j in inner])          # target x source
    grad = jac.T @ outer.grad
    if outer.hess is None or min_order(inner) < 2:
        return Jet2(outer.value, grad)
    hess = jac.T @ outer.hess @ jac
    for coefficient, j in zip(outer.grad, inner):
        if coefficient != 0.0:
            hess = hess + coefficient * j.hess
    return Jet2(outer.value, grad, hess)


def jet_solve(matrix: Sequence[Sequence[Jet2]], rhs: Sequence[Sequence[Jet2]]) -> List[List[Jet2]]:
    """Solve A X = B with jet entries by Gaussian elimination (partial pivoting on values)"""
    size = len(matrix)
    a = [list(row) for row in matrix]
    b = [list(row) for row in rhs]
    if len(b) != size or any(len(row) != size for row in a):
        raise DimensionError("jet_solve needs a square system")
    for col in range(size):
        pivot = max(range(col, size), key=lambda r: abs(a[r][col].value))
        if abs(a[pivot][col].value) == 0.0:
            raise ZeroDivisionError("singular jet system")
        a[col], a[pivot] = a[pivot], a[col]
        b[col], b[pivot] = b[pivot], b[col]
        inv = a[col][col].reciprocal()
        for r in range(col + 1, size):
            factor = a[r][col] * inv
            a[r] = [a[r][c] - factor * a[col][c] for c in range(size)]
            b[r] = [b[r][c] - factor * b[col][c] for c in range(len(b[r]))]
    x: List[List[Jet2]] = [[] for _ in range(size)]
    for r in range(size - 1, -1, -1):
        inv = a[r][r].reciprocal()
        row = []
        for c in range(len(b[r])):
            acc = b[r][c]
            for k in range(r + 1, size):
                acc = acc - a[r][k] * x[k][c]
            row.append(acc * inv)
        x[r] = row
    return x


def pivot_columns(values: np.ndarray, count: int) -> List[int]:
    """Indices of `count` well conditioned columns (QR with column pivoting)"""
    if count == 0:
        return []
    _, _, perm = scipy.linalg.qr(values, mode="economic", pivoting=True)
    return sorted(int(i) for i in perm[:count])


# 四阶中心差分 stencil weights for offsets -2h, -h, +h, +2h
_STENCIL = ((-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0))


def stencil_jets(fn: Callable[[np.ndarray], np.ndarray], point: np.ndarray,
                 steps: np.ndarray) -> List[Jet2]:
    """Order-1 jets of every entry of fn's (flattened) output at point"""
    point = np.asarray(point, dtype=float)
    center = np.asarray(fn(point), dtype=float)
    shape = center.shape
    flat = center.ravel()
    grads = np.zeros((flat.size, point.size))
    for i, h in enumerate(steps):
        acc = np.zeros(flat.size)
        for offset, weight in _STENCIL:
            shifted = point.copy()
            shifted[i] += offset * h
            acc += weight * np.asarray(fn(shifted), dtype=float).reshape(shape).ravel()
        grads[:, i] = acc / (12.0 * h)
    return [Jet2(flat[k], grads[k]) for k in range(flat.size)]
