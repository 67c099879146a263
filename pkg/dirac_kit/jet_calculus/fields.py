"""
Scalar, vector, 1-form, 2-form and bivector fields on a chart, plus maps between charts.

Every field is a pure function from a chart point to jets of its coefficients in the
coordinate (co)frame. Fields are immutable; arithmetic builds new closures.
"""

from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from ..errors import ChartMismatchError, DimensionError
from .charts import Chart
from .jets import Jet2, as_jet, compose

Number = Union[int, float]
JetFn = Callable[[np.ndarray], Jet2]
JetListFn = Callable[[np.ndarray], List[Jet2]]
JetMatrixFn = Callable[[np.ndarray], List[List[Jet2]]]


def _as_point(point) -> np.ndarray:
    return np.asarray(point, dtype=float)


def require_same_chart(*items) -> Chart:
    charts = [item.chart for item in items]
    first = charts[0]
    for other in charts[1:]:
        if not first.same_as(other):
            raise ChartMismatchError(f"fields live on different charts: {first.name!r} vs {other.name!r}")
    return first


class ScalarField:
    """A smooth function on a chart, evaluable to jets"""

    def __init__(self, chart: Chart, fn: JetFn, label: Optional[str] = None):
        self.chart = chart
        self._fn = fn
        self.label = label

    def jet(self, point) -> Jet2:
        return self._fn(_as_point(point))

    def __call__(self, point) -> float:
        return self.jet(point).value

    @classmethod
    def constant(cls, chart: Chart, value: Number) -> "ScalarField":
        dim = chart.dim
        return cls(chart, lambda p: Jet2.constant(value, dim), label=repr(float(value)))

    @classmethod
    def coordinate(cls, chart: Chart, name: str) -> "ScalarField":
        index = chart.index(name)
        dim = chart.dim
        return cls(chart, lambda p: Jet2.variable(index, p[index], dim), label=name)

    def _lift(self, other) -> JetFn:
        if isinstance(other, ScalarField):
            require_same_chart(self, other)
            return other.jet
        value = float(other)
        return lambda p: value

    def __add__(self, other):
        g = self._lift(other)
        return ScalarField(self.chart, lambda p: self.jet(p) + g(p))

    __radd__ = __add__

    def __sub__(self, other):
        g = self._lift(other)
        return ScalarField(self.chart, lambda p: self.jet(p) - g(p))

    def __rsub__(self, other):
        g = self._lift(other)
        return ScalarField(self.chart, lambda p: as_jet(g(p), self.chart.dim) - self.jet(p))

    def __mul__(self, other):
        g = self._lift(other)
        return ScalarField(self.chart, lambda p: self.jet(p) * g(p))

    __rmul__ = __mul__

    def __truediv__(self, other):
        g = self._lift(other)
        return ScalarField(self.chart, lambda p: self.jet(p) / g(p))

    def __neg__(self):
        return ScalarField(self.chart, lambda p: -self.jet(p))

    def __pow__(self, exponent: int):
        return ScalarField(self.chart, lambda p: self.jet(p) ** exponent)

    def differential(self) -> "OneForm":
        """df, one order below f"""
        n = self.chart.dim
        return OneForm(self.chart, lambda p: [self.jet(p).derivative(i) for i in range(n)])


def _component_fn(chart: Chart, comps: Sequence[Union[ScalarField, Number]]) -> JetListFn:
    if len(comps) != chart.dim:
        raise DimensionError(f"expected {chart.dim} components on {chart.name!r}, got {len(comps)}")
    fields = [c if isinstance(c, ScalarField) else ScalarField.constant(chart, c) for c in comps]
    for f in fields:
        require_same_chart(fields[0], f)
    return lambda p: [f.jet(p) for f in fields]


class _ComponentField:
    """Shared plumbing for fields with one coefficient per coordinate"""

    def __init__(self, chart: Chart, fn: JetListFn, label: Optional[str] = None):
        self.chart = chart
        self._fn = fn
        self.label = label

    @classmethod
    def from_components(cls, chart: Chart, comps: Sequence[Union[ScalarField, Number]],
                        label: Optional[str] = None):
        return cls(chart, _component_fn(chart, comps), label)

    @classmethod
    def zero(cls, chart: Chart):
        return cls.from_components(chart, [0.0] * chart.dim, label="0")

    @classmethod
    def basis(cls, chart: Chart, name: str):
        index = chart.index(name)
        return cls.from_components(chart, [1.0 if i == index else 0.0 for i in range(chart.dim)],
                                   label=name)

    def jets(self, point) -> List[Jet2]:
        return self._fn(_as_point(point))

    def at(self, point) -> np.ndarray:
        return np.array([j.value for j in self.jets(point)])

    def component(self, index: int) -> ScalarField:
        return ScalarField(self.chart, lambda p: self.jets(p)[index])

    def _same(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        require_same_chart(self, other)

    def __add__(self, other):
        self._same(other)
        return type(self)(self.chart, lambda p: [a + b for a, b in zip(self.jets(p), other.jets(p))])

    def __sub__(self, other):
        self._same(other)
        return type(self)(self.chart, lambda p: [a - b for a, b in zip(self.jets(p), other.jets(p))])

    def __neg__(self):
        return type(self)(self.chart, lambda p: [-a for a in self.jets(p)])

    def __mul__(self, factor):
        if isinstance(factor, ScalarField):
            require_same_chart(self, factor)
            return type(self)(self.chart, lambda p: [factor.jet(p) * a for a in self.jets(p)])
        c = float(factor)
        return type(self)(self.chart, lambda p: [a.scaled(c) for a in self.jets(p)])

    __rmul__ = __mul__


class VectorField(_ComponentField):
    """Vector field in the coordinate frame"""

    def apply(self, f: ScalarField) -> ScalarField:
        """X[f], one order below the lower of X and f"""
        require_same_chart(self, f)
        n = self.chart.dim

        def fn(p):
            xs = self.jets(p)
            fj = f.jet(p)
            return sum((xs[i] * fj.derivative(i) for i in range(n)), Jet2.constant(0.0, n))

        return ScalarField(self.chart, fn)


class OneForm(_ComponentField):
    """1-form in the coordinate coframe"""

    def pair(self, X: VectorField) -> ScalarField:
        """α(X)"""
        require_same_chart(self, X)
        n = self.chart.dim

        def fn(p):
            return sum((a * x for a, x in zip(self.jets(p), X.jets(p))), Jet2.constant(0.0, n))

        return ScalarField(self.chart, fn)


class _SkewField:
    """Antisymmetric n×n coefficient matrix field"""

    def __init__(self, chart: Chart, fn: JetMatrixFn, label: Optional[str] = None):
        self.chart = chart
        self._fn = fn
        self.label = label

    @classmethod
    def from_components(cls, chart: Chart, matrix: Sequence[Sequence[Union[ScalarField, Number]]],
                        label: Optional[str] = None):
        n = chart.dim
        if len(matrix) != n or any(len(row) != n for row in matrix):
            raise DimensionError(f"expected a {n}x{n} component matrix on {chart.name!r}")
        rows = [_component_fn(chart, row) for row in matrix]
        return cls(chart, lambda p: [row(p) for row in rows], label)

    @classmethod
    def from_upper(cls, chart: Chart, entries: dict, label: Optional[str] = None):
        """Build from {(coord_i, coord_j): coefficient} with ω_ji = −ω_ij filled in"""
        n = chart.dim
        matrix: List[List[Union[ScalarField, Number]]] = [[0.0] * n for _ in range(n)]
        for (a, b), value in entries.items():
            i, j = chart.index(a), chart.index(b)
            matrix[i][j] = value
            matrix[j][i] = -value if isinstance(value, ScalarField) else -float(value)
        return cls.from_components(chart, matrix, label)

    @classmethod
    def zero(cls, chart: Chart):
        return cls.from_components(chart, [[0.0] * chart.dim for _ in range(chart.dim)], "0")

    def jets(self, point) -> List[List[Jet2]]:
        return self._fn(_as_point(point))

    def at(self, point) -> np.ndarray:
        return np.array([[j.value for j in row] for row in self.jets(point)])

    def component(self, i: int, j: int) -> ScalarField:
        return ScalarField(self.chart, lambda p: self.jets(p)[i][j])

    def __add__(self, other):
        require_same_chart(self, other)
        return type(self)(self.chart, lambda p: [[a + b for a, b in zip(r, s)]
                                                 for r, s in zip(self.jets(p), other.jets(p))])

    def __sub__(self, other):
        require_same_chart(self, other)
        return type(self)(self.chart, lambda p: [[a - b for a, b in zip(r, s)]
                                                 for r, s in zip(self.jets(p), other.jets(p))])

    def __mul__(self, factor):
        if isinstance(factor, ScalarField):
            require_same_chart(self, factor)
            return type(self)(self.chart, lambda p: [[factor.jet(p) * a for a in r] for r in self.jets(p)])
        c = float(factor)
        return type(self)(self.chart, lambda p: [[a.scaled(c) for a in r] for r in self.jets(p)])

    __rmul__ = __mul__

    @staticmethod
    def _outer_fn(chart: Chart, u: _ComponentField, v: _ComponentField) -> JetMatrixFn:
        n = chart.dim

        def fn(p):
            a, b = u.jets(p), v.jets(p)
            return [[a[i] * b[j] - a[j] * b[i] for j in range(n)] for i in range(n)]

        return fn


class TwoForm(_SkewField):
    """2-form ω with coefficients ω_ij = ω(∂_i, ∂_j)"""

    @classmethod
    def wedge(cls, alpha: OneForm, beta: OneForm) -> "TwoForm":
        chart = require_same_chart(alpha, beta)
        return cls(chart, cls._outer_fn(chart, alpha, beta))

    def evaluate(self, X: VectorField, Y: VectorField) -> ScalarField:
        """ω(X, Y)"""
        require_same_chart(self, X, Y)
        n = self.chart.dim

        def fn(p):
            w, xs, ys = self.jets(p), X.jets(p), Y.jets(p)
            acc = Jet2.constant(0.0, n)
            for i in range(n):
                for j in range(n):
                    if w[i][j].value != 0.0 or w[i][j].order > 0:
                        acc = acc + xs[i] * ys[j] * w[i][j]
            return acc

        return ScalarField(self.chart, fn)

    def contract(self, X: VectorField) -> OneForm:
        """i_X ω with (i_X ω)_j = Σ_i X^i ω_ij"""
        require_same_chart(self, X)
        n = self.chart.dim

        def fn(p):
            w, xs = self.jets(p), X.jets(p)
            return [sum((xs[i] * w[i][j] for i in range(n)), Jet2.constant(0.0, n)) for j in range(n)]

        return OneForm(self.chart, fn)


class Bivector(_SkewField):
    """Bivector π with coefficients π^{ij} = π(dx^i, dx^j)"""

    @classmethod
    def wedge(cls, X: VectorField, Y: VectorField) -> "Bivector":
        chart = require_same_chart(X, Y)
        return cls(chart, cls._outer_fn(chart, X, Y))

    def sharp(self, alpha: OneForm) -> VectorField:
        """π^♯α = π(α, ·), i.e. (π^♯α)^j = Σ_i α_i π^{ij}"""
        require_same_chart(self, alpha)
        n = self.chart.dim

        def fn(p):
            w, a = self.jets(p), alpha.jets(p)
            return [sum((a[i] * w[i][j] for i in range(n)), Jet2.constant(0.0, n)) for j in range(n)]

        return VectorField(self.chart, fn)


class ChartMap:
    """Smooth map between charts, evaluated as jets of the target coordinates"""

    def __init__(self, source: Chart, target: Chart, fn: JetListFn, label: Optional[str] = None):
        self.source = source
        self.target = target
        self._fn = fn
        self.label = label

    @classmethod
    def from_components(cls, source: Chart, target: Chart, components: Sequence[ScalarField],
                        label: Optional[str] = None) -> "ChartMap":
        if len(components) != target.dim:
            raise DimensionError(f"map into {target.name!r} needs {target.dim} components, "
                                 f"got {len(components)}")
        for c in components:
            if not c.chart.same_as(source):
                raise ChartMismatchError(f"map component lives on {c.chart.name!r}, not {source.name!r}")
        comps = list(components)
        return cls(source, target, lambda p: [c.jet(p) for c in comps], label)

    @classmethod
    def identity(cls, chart: Chart) -> "ChartMap":
        return cls.from_components(chart, chart, [ScalarField.coordinate(chart, c) for c in chart.coords], "id")

    def jets(self, point) -> List[Jet2]:
        return self._fn(_as_point(point))

    def component(self, index: int) -> ScalarField:
        return ScalarField(self.source, lambda p: self.jets(p)[index])

    def __call__(self, point) -> np.ndarray:
        return np.array([j.value for j in self.jets(point)])

    def jacobian(self, point) -> np.ndarray:
        """target.dim × source.dim"""
        return np.array([j.grad for j in self.jets(point)])

    def pull_scalar(self, f: ScalarField) -> ScalarField:
        """f∘φ"""
        if not f.chart.same_as(self.target):
            raise ChartMismatchError(f"{f.chart.name!r} is not the target chart {self.target.name!r}")

        def fn(p):
            inner = self.jets(p)
            return compose(f.jet(np.array([j.value for j in inner])), inner)

        return ScalarField(self.source, fn)
