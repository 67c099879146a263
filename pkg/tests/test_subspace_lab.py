import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirac_kit.errors import DimensionError
from dirac_kit.subspace_lab import (Subspace, annihilator, equals, image, intersect, is_contained,
                                    orthogonal_wrt_form, preimage, span, subspace_gap, subspace_sum)


@st.composite
def subspace_pairs(draw):
    """Two random subspaces of one fiber sharing a drawn number of directions"""
    n = draw(st.integers(min_value=2, max_value=8))
    rng = np.random.default_rng(draw(st.integers(min_value=0, max_value=2 ** 32 - 1)))
    a = Subspace(n, rng.standard_normal((draw(st.integers(0, n)), n)))
    k = draw(st.integers(0, a.dim))
    shared = rng.standard_normal((k, a.dim)) @ a.basis if a.dim else np.zeros((0, n))
    extra = rng.standard_normal((draw(st.integers(0, n - k)), n))
    return a, Subspace(n, list(shared) + list(extra))


@given(subspace_pairs())
@settings(max_examples=200, deadline=None)
def test_grassmann_identity(pair):
    a, b = pair
    assert subspace_sum(a, b).dim + intersect(a, b).dim == a.dim + b.dim


@given(subspace_pairs())
@settings(max_examples=200, deadline=None)
def test_double_annihilator(pair):
    a, _ = pair
    assert annihilator(a).dim == a.ambient_dim - a.dim
    assert equals(annihilator(annihilator(a)), a)


@given(subspace_pairs())
@settings(max_examples=100, deadline=None)
def test_intersection_is_contained_in_both(pair):
    a, b = pair
    both = intersect(a, b)
    assert is_contained(both, a)
    assert is_contained(both, b)


def test_rank_cutoff_is_relative():
    s = span([[1.0, 0.0, 0.0], [1.0, 1e-12, 0.0]], 3)
    assert s.dim == 1
    big = span([[1e6, 0.0], [0.0, 1e-2]], 2)
    assert big.dim == 2


def test_tiny_vectors_span_nothing():
    assert span([[1e-14, 0.0]], 2).dim == 0


def test_full_and_zero():
    assert Subspace.full(4).dim == 4
    assert Subspace.zero(4).dim == 0
    assert equals(annihilator(Subspace.zero(3)), Subspace.full(3))


def test_dimension_errors():
    with pytest.raises(DimensionError):
        Subspace(3, [[1.0, 2.0]])
    with pytest.raises(DimensionError):
        subspace_sum(Subspace.full(2), Subspace.full(3))


def test_symplectic_orthogonal_of_a_line():
    omega = np.array([[0.0, 1.0], [-1.0, 0.0]])
    line = span([[1.0, 0.0]], 2)
    # a line in the plane is its own ω-orthogonal
    assert equals(orthogonal_wrt_form(line, omega, Subspace.full(2)), line)


def test_image_and_preimage():
    projection = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    plane = span([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]], 3)
    assert equals(image(projection, plane), span([[1.0, 0.0]], 2))
    back = preimage(projection, span([[1.0, 0.0]], 2))
    assert equals(back, plane)


def test_gap():
    a = span([[1.0, 0.0]], 2)
    assert subspace_gap(a, span([[2.0, 0.0]], 2)) == pytest.approx(0.0, abs=1e-12)
    assert subspace_gap(a, span([[0.0, 1.0]], 2)) == pytest.approx(1.0)
