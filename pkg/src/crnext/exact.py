"""Exact rational linear algebra and the Stiemke alternative.

Everything here works on :class:`fractions.Fraction` entries so that
certificates can be checked with no rounding at all. Matrices at the scale
of a reaction network (a handful of species and reactions) make dense
Gauss-Jordan elimination and a tableau simplex perfectly adequate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

from .errors import NoSeparator

Vector = tuple[Fraction, ...]


@dataclass(frozen=True)
class RatMatrix:
    """Dense row-major matrix of rationals."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        entries = tuple(Fraction(v) for v in self.entries)
        if len(entries) != self.rows * self.cols:
            raise ValueError(f"{len(entries)} entries for a {self.rows}x{self.cols} matrix")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Rational]], cols: int | None = None) -> "RatMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(v for r in rows for v in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Rational]], rows: int | None = None) -> "RatMatrix":
        columns = [list(c) for c in columns]
        if rows is None:
            rows = len(columns[0]) if columns else 0
        return cls.from_rows(columns, cols=rows).transpose()

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def col(self, j: int) -> Vector:
        return self.entries[j :: self.cols] if self.cols else ()

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list[Vector]:
        return [self.col(j) for j in range(self.cols)]

    def transpose(self) -> "RatMatrix":
        return RatMatrix(self.cols, self.rows, tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def matvec(self, v: Sequence[Rational]) -> Vector:
        return tuple(dot(self.row(i), v) for i in range(self.rows))

    def vecmat(self, w: Sequence[Rational]) -> Vector:
        """Return ``w^T M``."""
        return tuple(dot(w, self.col(j)) for j in range(self.cols))


def dot(u: Iterable[Rational], v: Iterable[Rational]) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def primitive(v: Sequence[Rational]) -> tuple[int, ...]:
    """Positive rescaling of ``v`` to integers with gcd 1 (zero vector is returned as is)."""
    v = [Fraction(x) for x in v]
    den = math.lcm(*(x.denominator for x in v)) if v else 1
    ints = [int(x * den) for x in v]
    g = math.gcd(*ints) if ints else 0
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def _canonical_sign(v: tuple[int, ...]) -> tuple[int, ...]:
    for x in v:
        if x:
            return v if x > 0 else tuple(-y for y in v)
    return v


# -- elimination --------------------------------------------------------------


def rref(M: RatMatrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form. Returns the nonzero rows and pivot columns."""
    A = M.to_rows()
    pivots: list[int] = []
    r = 0
    for c in range(M.cols):
        p = next((i for i in range(r, M.rows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        piv = A[r][c]
        A[r] = [x / piv for x in A[r]]
        for i in range(M.rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == M.rows:
            break
    return A[:r], pivots


def rank(M: RatMatrix) -> int:
    return len(rref(M)[1])


def rank_of(vectors: Sequence[Sequence[Rational]], dim: int) -> int:
    """Rank of a list of vectors of length ``dim`` (an empty list has rank 0)."""
    if not vectors:
        return 0
    return rank(RatMatrix.from_rows(vectors, cols=dim))


def nullspace(M: RatMatrix) -> list[tuple[int, ...]]:
    """Basis of ``{v : M v = 0}``; each vector primitive with first nonzero entry positive."""
    R, pivots = rref(M)
    free = [c for c in range(M.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * M.cols
        v[f] = Fraction(1)
        for row, p in zip(R, pivots):
            v[p] = -row[f]
        basis.append(_canonical_sign(primitive(v)))
    return basis


def solve(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Solve a square nonsingular system exactly."""
    n = len(A)
    aug = RatMatrix.from_rows([list(row) + [bi] for row, bi in zip(A, b)], cols=n + 1)
    R, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular system")
    return [R[i][n] for i in range(n)]


def column_basis(vectors: Sequence[Sequence[Rational]], dim: int) -> list[Vector]:
    """A maximal linearly independent subset of ``vectors`` (first-come order)."""
    if not vectors:
        return []
    _, pivots = rref(RatMatrix.from_columns(vectors, rows=dim))
    return [tuple(Fraction(x) for x in vectors[j]) for j in pivots]


# -- Stiemke alternative ------------------------------------------------------


@dataclass(frozen=True)
class PositiveDependence:
    """``M @ lam == 0`` with every ``lam`` entry a positive integer."""

    lam: tuple[int, ...]

    def verify(self, M: RatMatrix) -> bool:
        return len(self.lam) == M.cols and all(x >= 1 for x in self.lam) and not any(M.matvec(self.lam))


@dataclass(frozen=True)
class Separator:
    """``w @ M <= 0`` componentwise with at least one strict inequality."""

    w: tuple[int, ...]

    def verify(self, M: RatMatrix) -> bool:
        if len(self.w) != M.rows:
            return False
        prods = M.vecmat(self.w)
        return all(p <= 0 for p in prods) and any(p < 0 for p in prods)


StiemkeResult = Union[PositiveDependence, Separator]


def _phase_one(A: list[list[Fraction]], b: list[Fraction]):
    """Minimise the sum of artificials for ``A x + a = b, x, a >= 0`` (``b >= 0``).

    Bland's rule on a dense tableau. Returns ``(value, x, y)`` where ``y`` is
    the optimal dual vector ``c_B^T B^{-1}``.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    # tableau columns: x_0..x_{n-1}, a_0..a_{m-1}, rhs
    T = [list(A[i]) + [Fraction(int(i == r)) for r in range(m)] + [b[i]] for i in range(m)]
    cost = [Fraction(0)] * n + [Fraction(1)] * m
    basis = list(range(n, n + m))
    while True:
        reduced = [cost[j] - sum((cost[basis[i]] * T[i][j] for i in range(m)), Fraction(0)) for j in range(n + m)]
        entering = next((j for j in range(n + m) if reduced[j] < 0), None)
        if entering is None:
            break
        best = None
        for i in range(m):
            if T[i][entering] > 0:
                key = (T[i][-1] / T[i][entering], basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:  # cannot happen: the phase-1 objective is bounded below
            raise ArithmeticError("unbounded phase-1 problem")
        r = best[1]
        piv = T[r][entering]
        T[r] = [v / piv for v in T[r]]
        for i in range(m):
            if i != r and T[i][entering] != 0:
                f = T[i][entering]
                T[i] = [u - f * v for u, v in zip(T[i], T[r])]
        basis[r] = entering
    value = sum((cost[basis[i]] * T[i][-1] for i in range(m)), Fraction(0))
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = T[i][-1]
    # B^{-1} sits in the artificial block of the final tableau.
    y = [sum((cost[basis[i]] * T[i][n + r] for i in range(m)), Fraction(0)) for r in range(m)]
    return value, x, y


def positive_nullvector_or_certificate(M: RatMatrix) -> StiemkeResult:
    """Decide whether the columns of ``M`` admit a strictly positive dependence.

    Solves ``M lam = 0, lam >= 1`` by an exact phase-1 simplex. When it is
    infeasible the optimal phase-1 duals give ``w`` with ``w^T M <= 0`` and
    ``w^T M 1 < 0``, i.e. a separator. Exactly one of the two is returned and
    it is verified before returning.
    """
    if M.cols < 1:
        raise ValueError("matrix must have at least one column")
    # lam = 1 + mu, mu >= 0  =>  M mu = -M 1
    rows = M.to_rows()
    b = [-sum(r, Fraction(0)) for r in rows]
    flip = [bi < 0 for bi in b]
    A = [[-v for v in r] if f else r for r, f in zip(rows, flip)]
    b = [-bi if f else bi for bi, f in zip(b, flip)]
    value, mu, y = _phase_one(A, b)
    if value == 0:
        result: StiemkeResult = PositiveDependence(primitive([1 + v for v in mu]))
    else:
        w = [-yi if f else yi for yi, f in zip(y, flip)]
        result = Separator(primitive(w))
    if not result.verify(M):  # pragma: no cover - guards against regressions
        raise ArithmeticError(f"certificate failed exact verification: {result}")
    return result


# -- orthogonal separation inside a subspace ----------------------------------


def in_span(v: Sequence[Rational], vectors: Sequence[Sequence[Rational]], dim: int) -> bool:
    return rank_of(list(vectors) + [list(v)], dim) == rank_of(vectors, dim)


def vector_in_span_orthogonal_to(
    span_basis: Sequence[Sequence[Rational]],
    perp_set: Sequence[Sequence[Rational]],
    orient: Sequence[Rational],
) -> tuple[int, ...]:
    """Find ``w`` in span(span_basis) with ``w . u = 0`` for ``u`` in perp_set and ``w . orient < 0``.

    The answer is the negated orthogonal projection of ``orient`` onto the
    orthogonal complement of span(perp_set) inside span(span_basis), scaled
    to a primitive integer vector. It is nonzero exactly when ``orient`` lies
    outside span(perp_set).

    Raises:
        NoSeparator: if ``orient`` or ``perp_set`` is not inside the span, or
            ``orient`` lies in span(perp_set).
    """
    dim = len(orient)
    span_basis = [list(v) for v in span_basis]
    perp_set = [list(u) for u in perp_set]
    if any(len(v) != dim for v in span_basis + perp_set):
        raise NoSeparator("vectors of inconsistent length")
    if not in_span(orient, span_basis, dim):
        raise NoSeparator("orient is not in the span")
    if any(not in_span(u, span_basis, dim) for u in perp_set):
        raise NoSeparator("perp_set is not contained in the span")
    if in_span(orient, perp_set, dim):
        raise NoSeparator("orient lies in span(perp_set)")

    B = column_basis(span_basis, dim)
    # coordinates alpha with (P B) alpha = 0 describe the admissible subspace
    if perp_set:
        PB = RatMatrix.from_rows([[dot(u, b) for b in B] for u in perp_set], cols=len(B))
        coords = nullspace(PB)
    else:
        coords = [tuple(int(i == j) for i in range(len(B))) for j in range(len(B))]
    W = [tuple(sum((Fraction(a) * b[k] for a, b in zip(alpha, B)), Fraction(0)) for k in range(dim)) for alpha in coords]
    gram = [[dot(wi, wj) for wj in W] for wi in W]
    beta = solve(gram, [dot(wi, orient) for wi in W])
    proj = [sum((bt * wi[k] for bt, wi in zip(beta, W)), Fraction(0)) for k in range(dim)]
    w = primitive([-p for p in proj])
    if not dot(w, orient) < 0:  # pragma: no cover
        raise ArithmeticError("projection failed to separate")
    return w
