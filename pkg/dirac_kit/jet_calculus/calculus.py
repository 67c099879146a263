"""
Exterior and Lie calculus on jet-valued fields, plus smooth local frames.

Orders: every derivative taken consumes one jet order, so the bracket of two
order-2 fields is order 1 and can itself be differentiated once more.
"""

import functools
from typing import Callable, List, Sequence, Union

import numpy as np

from ..errors import DimensionError, RankError
from .charts import Chart
from .fields import (ChartMap, OneForm, ScalarField, TwoForm, VectorField,
                     require_same_chart)
from .jets import Jet2, compose, jet_solve, pivot_columns, stencil_jets


def _zero(n: int) -> Jet2:
    return Jet2.constant(0.0, n)


def _is_zero(j: Jet2) -> bool:
    """Zero through second order, so any product with it is zero through second order too"""
    return j.order == 2 and j.value == 0.0 and not np.any(j.grad) and not np.any(j.hess)


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """[X,Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i"""
    chart = require_same_chart(X, Y)
    n = chart.dim

    def fn(p):
        xs, ys = X.jets(p), Y.jets(p)
        out = []
        for i in range(n):
            acc = _zero(n)
            for j in range(n):
                if not _is_zero(xs[j]):
                    acc = acc + xs[j] * ys[i].derivative(j)
                if not _is_zero(ys[j]):
                    acc = acc - ys[j] * xs[i].derivative(j)
            out.append(acc)
        return out

    return VectorField(chart, fn)


def exterior_derivative_one_form(alpha: OneForm) -> TwoForm:
    """(dα)_ij = ∂_i α_j − ∂_j α_i"""
    n = alpha.chart.dim

    def fn(p):
        a = alpha.jets(p)
        w = [[_zero(n) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                entry = a[j].derivative(i) - a[i].derivative(j)
                w[i][j] = entry
                w[j][i] = -entry
        return w

    return TwoForm(alpha.chart, fn)


def d_two_form_components(omega: TwoForm, point) -> np.ndarray:
    """(dω)_ijk = ∂_i ω_jk − ∂_j ω_ik + ∂_k ω_ij at one point"""
    w = omega.jets(point)
    n = omega.chart.dim
    grads = np.zeros((n, n, n))           # grads[i, j, k] = ∂_k ω_ij
    for i in range(n):
        for j in range(n):
            if w[i][j].grad is None:
                raise DimensionError("dω needs a first-order jet of ω")
            grads[i, j] = w[i][j].grad
    return _d_from_grads(grads)


def _d_from_grads(grads: np.ndarray) -> np.ndarray:
    n = grads.shape[0]
    out = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                out[i, j, k] = grads[j, k, i] - grads[i, k, j] + grads[i, j, k]
    return out


def d_two_form_contract(omega: TwoForm, X: VectorField, Y: VectorField, Z: VectorField, point) -> float:
    """dω(X,Y,Z) by the invariant six-term formula"""
    require_same_chart(omega, X, Y, Z)
    p = np.asarray(point, dtype=float)
    terms = (X.apply(omega.evaluate(Y, Z))(p)
             - Y.apply(omega.evaluate(X, Z))(p)
             + Z.apply(omega.evaluate(X, Y))(p))
    w = omega.at(p)
    xy, xz, yz = (lie_bracket(X, Y).at(p), lie_bracket(X, Z).at(p), lie_bracket(Y, Z).at(p))
    x, y, z = X.at(p), Y.at(p), Z.at(p)
    terms -= xy @ w @ z
    terms += xz @ w @ y
    terms -= yz @ w @ x
    return float(terms)


def interior_product(X: VectorField, form: Union[OneForm, TwoForm]) -> Union[ScalarField, OneForm]:
    """i_X α = α(X) for 1-forms; i_X ω = ω(X, ·) for 2-forms"""
    if isinstance(form, TwoForm):
        return form.contract(X)
    if isinstance(form, OneForm):
        return form.pair(X)
    raise TypeError(f"cannot contract a vector field into {type(form).__name__}")


def lie_derivative_one_form(X: VectorField, alpha: OneForm) -> OneForm:
    """£_X α = i_X dα + d(α(X))"""
    require_same_chart(X, alpha)
    return exterior_derivative_one_form(alpha).contract(X) + alpha.pair(X).differential()


def pullback(phi: ChartMap, form: Union[ScalarField, OneForm, TwoForm]):
    """φ*f, φ*α or φ*ω on the source chart of φ"""
    if isinstance(form, ScalarField):
        return phi.pull_scalar(form)
    if not form.chart.same_as(phi.target):
        raise DimensionError(f"form lives on {form.chart.name!r}, map targets {phi.target.name!r}")
    n = phi.source.dim
    N = phi.target.dim

    def composed(p):
        inner = phi.jets(p)
        return inner, np.array([j.value for j in inner])

    if isinstance(form, OneForm):
        def fn(p):
            inner, q = composed(p)
            comps = [compose(a, inner) for a in form.jets(q)]
            out = [_zero(n) for _ in range(n)]
            for i in range(N):
                if _is_zero(comps[i]):
                    continue
                for a in range(n):
                    out[a] = out[a] + comps[i] * inner[i].derivative(a)
            return out

        return OneForm(phi.source, fn)

    if isinstance(form, TwoForm):
        def fn2(p):
            inner, q = composed(p)
            w = form.jets(q)
            partials = [[inner[i].derivative(a) for a in range(n)] for i in range(N)]
            out = [[_zero(n) for _ in range(n)] for _ in range(n)]
            for i in range(N):
                for j in range(N):
                    c = compose(w[i][j], inner)
                    if _is_zero(c):
                        continue
                    for a in range(n):
                        ca = c * partials[i][a]
                        for b in range(n):
                            out[a][b] = out[a][b] + ca * partials[j][b]
            return out

        return TwoForm(phi.source, fn2)

    raise TypeError(f"cannot pull back {type(form).__name__}")


def push_forward(phi: ChartMap, vector: np.ndarray, point) -> np.ndarray:
    """Tφ at a source point"""
    return phi.jacobian(point) @ np.asarray(vector, dtype=float)


def _elimination(chart: Chart, rows_fn: Callable[[np.ndarray], List[List[Jet2]]], count: int,
                 kind: Callable):
    """
    Frame of {x : R(p) x = 0} for count pointwise independent rows R.

    The dependent coordinates are the QR pivots of R at the evaluation point; each
    remaining coordinate gives one frame element with coefficient 1 there.
    """
    n = chart.dim

    def solve(p):
        rows = rows_fn(p)
        if count == 0:
            return [], list(range(n)), []
        values = np.array([[j.value for j in r] for r in rows])
        if np.linalg.matrix_rank(values) < count:
            raise RankError("rows are dependent", stage="kernel_frame", points=[p])
        dependent = pivot_columns(values, count)
        free = [c for c in range(n) if c not in dependent]
        a = [[rows[r][c] for c in dependent] for r in range(count)]
        b = [[rows[r][c] for c in free] for r in range(count)]
        return dependent, free, jet_solve(a, b)

    def element(index):
        def fn(p):
            dependent, free, x = solve(p)
            comps = [_zero(n) for _ in range(n)]
            comps[free[index]] = Jet2.constant(1.0, n)
            for r, d in enumerate(dependent):
                comps[d] = -x[r][index]
            return comps

        return kind(chart, fn)

    return [element(i) for i in range(n - count)]


def kernel_frame(chart: Chart, forms: Sequence[OneForm]) -> List[VectorField]:
    """Smooth local frame of the common kernel of pointwise independent 1-forms"""
    for f in forms:
        if not f.chart.same_as(chart):
            raise DimensionError(f"form on {f.chart.name!r} used on {chart.name!r}")
    forms = list(forms)
    return _elimination(chart, lambda p: [f.jets(p) for f in forms], len(forms), VectorField)


def annihilator_frame(chart: Chart, fields: Sequence[VectorField]) -> List[OneForm]:
    """Smooth local coframe of the annihilator of pointwise independent vector fields"""
    for f in fields:
        if not f.chart.same_as(chart):
            raise DimensionError(f"field on {f.chart.name!r} used on {chart.name!r}")
    fields = list(fields)
    return _elimination(chart, lambda p: [f.jets(p) for f in fields], len(fields), OneForm)


def normalized_frame(fiber_fn: Callable[[np.ndarray], "object"], point, steps: np.ndarray) -> List[List[Jet2]]:
    """
    Order-1 jets of a local frame of a smooth subspace family.

    fiber_fn returns a Subspace at each point. With B the basis at p and I the pivot
    coordinates fixed at `point`, the frame is B (B_I)^-1, which does not depend on
    the basis returned and so varies smoothly; its derivatives come from a stencil.
    """
    point = np.asarray(point, dtype=float)
    basis = fiber_fn(point).basis
    rank = basis.shape[0]
    if rank == 0:
        return []
    pivots = pivot_columns(basis, rank)

    @functools.lru_cache(maxsize=None)
    def normalized(key: bytes) -> np.ndarray:
        p = np.frombuffer(key, dtype=float).copy()
        b = fiber_fn(p).basis
        if b.shape[0] != rank:
            raise RankError(f"rank {b.shape[0]} near a point of rank {rank}",
                            stage="local frame", points=[point, p])
        return np.linalg.solve(b[:, pivots], b)

    jets = stencil_jets(lambda p: normalized(np.asarray(p, dtype=float).tobytes()), point, steps)
    width = basis.shape[1]
    return [jets[k * width:(k + 1) * width] for k in range(rank)]


def frame_steps(chart: Chart, fd_step: float) -> np.ndarray:
    return fd_step * chart.widths
