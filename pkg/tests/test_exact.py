from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from crnext.errors import NoSeparator
from crnext.exact import (
    PositiveDependence,
    RatMatrix,
    Separator,
    dot,
    nullspace,
    positive_nullvector_or_certificate,
    primitive,
    rank,
    vector_in_span_orthogonal_to,
)

small_matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


def test_goldens():
    assert positive_nullvector_or_certificate(RatMatrix.from_columns([(1, -1, 0), (1, -1, 0), (1, 0, -1)])) == Separator((-1, 1, 1))
    assert positive_nullvector_or_certificate(RatMatrix.from_columns([(-1, 1)])) == Separator((1, -1))
    assert positive_nullvector_or_certificate(RatMatrix.from_columns([(1, -1), (-1, 1)])) == PositiveDependence((1, 1))
    assert nullspace(RatMatrix.from_rows([[1, 1, 1]])) == [(1, -1, 0), (1, 0, -1)]


def test_primitive():
    assert primitive([Fraction(1, 2), Fraction(-3, 4)]) == (2, -3)
    assert primitive([0, 0]) == (0, 0)


@settings(max_examples=200, deadline=None)
@given(small_matrices)
def test_rank_and_nullspace_match_sympy(rows):
    M = RatMatrix.from_rows(rows)
    S = sympy.Matrix(rows)
    assert rank(M) == S.rank()
    ns = nullspace(M)
    assert len(ns) == S.shape[1] - S.rank()
    for v in ns:
        assert not any(M.matvec(v))


@settings(max_examples=200, deadline=None)
@given(small_matrices)
def test_alternative_verifies_and_agrees_with_lp(rows):
    M = RatMatrix.from_rows(rows)
    res = positive_nullvector_or_certificate(M)
    assert res.verify(M)
    # float LP oracle: feasibility of M lam = 0, lam >= 1
    A = np.array(rows, dtype=float)
    lp = linprog(np.zeros(A.shape[1]), A_eq=A, b_eq=np.zeros(A.shape[0]), bounds=[(1, None)] * A.shape[1], method="highs")
    assert isinstance(res, PositiveDependence) == (lp.status == 0)


@settings(max_examples=100, deadline=None)
@given(small_matrices, st.integers(1, 5))
def test_verdict_is_scale_invariant(rows, scale):
    a = positive_nullvector_or_certificate(RatMatrix.from_rows(rows))
    b = positive_nullvector_or_certificate(RatMatrix.from_rows([[scale * v for v in r] for r in rows]))
    assert type(a) is type(b)


def test_orthogonal_vector_golden():
    span = [(1, -1, 0), (1, 0, -1)]
    w = vector_in_span_orthogonal_to(span, [(0, 1, -1)], (1, -1, 0))
    assert w == (-2, 1, 1)
    assert dot(w, (0, 1, -1)) == 0


def test_orthogonal_vector_failures():
    with pytest.raises(NoSeparator):
        vector_in_span_orthogonal_to([(1, 0)], [], (0, 1))
    with pytest.raises(NoSeparator):
        vector_in_span_orthogonal_to([(1, 0)], [(1, 0)], (1, 0))


@settings(max_examples=150, deadline=None)
@given(small_matrices, st.data())
def test_orthogonal_vector_properties(rows, data):
    cols = len(rows[0])
    perp = data.draw(st.lists(st.sampled_from(rows), max_size=len(rows)))
    orient = data.draw(st.sampled_from(rows))
    try:
        w = vector_in_span_orthogonal_to(rows, perp, orient)
    except NoSeparator:
        assert sympy.Matrix(perp + [orient]).rank() == (sympy.Matrix(perp).rank() if perp else 0)
        return
    assert len(w) == cols
    assert all(dot(w, u) == 0 for u in perp)
    assert dot(w, orient) < 0
    assert sympy.Matrix(rows + [list(w)]).rank() == sympy.Matrix(rows).rank()
