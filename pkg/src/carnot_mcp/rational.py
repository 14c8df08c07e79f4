"""Exact linear algebra over the rationals.

Matrices are tuples of row tuples of :class:`fractions.Fraction`.  Everything
here is small and dense (dimension at most a few dozen), so plain Gauss-Jordan
elimination on fractions is fast enough and keeps the code obvious.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vector = tuple[Fraction, ...]
Matrix = tuple[Vector, ...]


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact arithmetic; pass int, str or Fraction")
    return Fraction(x)


def vector(entries: Iterable) -> Vector:
    return tuple(frac(x) for x in entries)


def matrix(rows: Iterable[Iterable]) -> Matrix:
    out = tuple(vector(r) for r in rows)
    if out and len({len(r) for r in out}) != 1:
        raise ValueError("ragged matrix")
    return out


def zeros(rows: int, cols: int) -> Matrix:
    return tuple((Fraction(0),) * cols for _ in range(rows))


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def shape(M: Matrix, cols: int | None = None) -> tuple[int, int]:
    """Row/column counts; ``cols`` disambiguates matrices with no rows."""
    if not M:
        return 0, (cols or 0)
    return len(M), len(M[0])


def transpose(M: Matrix, cols: int | None = None) -> Matrix:
    r, c = shape(M, cols)
    return tuple(tuple(M[i][j] for i in range(r)) for j in range(c))


def matmul(A: Matrix, B: Matrix) -> Matrix:
    Bt = transpose(B)
    return tuple(tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt) for row in A)


def matvec(A: Matrix, v: Sequence[Fraction]) -> Vector:
    return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in A)


def dot(v: Sequence[Fraction], w: Sequence[Fraction]) -> Fraction:
    if len(v) != len(w):
        raise ValueError("dimension mismatch")
    return sum((a * b for a, b in zip(v, w)), Fraction(0))


def is_zero(v: Iterable[Fraction]) -> bool:
    return all(x == 0 for x in v)


def rref(M: Matrix, cols: int | None = None) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row-echelon form and pivot columns; zero rows are dropped."""
    nrows, ncols = shape(M, cols)
    rows = [list(r) for r in M]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return tuple(tuple(row) for row in rows[:r]), tuple(pivots)


def rank(M: Matrix, cols: int | None = None) -> int:
    return len(rref(M, cols)[1])


def kernel_image(M: Matrix, cols: int | None = None) -> tuple[Matrix, Matrix, int]:
    """Kernel basis, image (column space) basis and rank of ``M``.

    The kernel basis is the standard one read off the RREF (one vector per free
    column, with a 1 in that column), then itself put in RREF.  The image basis
    is the RREF of the transposed matrix, i.e. an echelon basis of the column
    space.
    """
    nrows, ncols = shape(M, cols)
    R, pivots = rref(M, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    ker = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(R, pivots):
            v[p] = -row[f]
        ker.append(tuple(v))
    kernel = rref(tuple(ker), ncols)[0] if ker else ()
    image = rref(transpose(M, ncols), nrows)[0] if nrows and ncols else ()
    return kernel, image, len(pivots)


def span_basis(vectors: Iterable[Sequence[Fraction]], dim: int) -> Matrix:
    """Echelon basis of the span of ``vectors`` in a ``dim``-dimensional space."""
    vs = tuple(vector(v) for v in vectors)
    for v in vs:
        if len(v) != dim:
            raise ValueError("dimension mismatch")
    return rref(vs, dim)[0] if vs else ()


def in_span(v: Sequence[Fraction], basis: Matrix) -> bool:
    """Whether ``v`` lies in the span of an echelon ``basis`` (as produced by :func:`rref`)."""
    if not basis:
        return is_zero(v)
    w = list(v)
    for row in basis:
        p = next(i for i, x in enumerate(row) if x != 0)
        if w[p] != 0:
            f = w[p] / row[p]
            w = [a - f * b for a, b in zip(w, row)]
    return is_zero(w)


def primitive(v: Sequence[Fraction]) -> Vector:
    """Scale a nonzero rational vector to coprime integers, first nonzero entry positive."""
    v = vector(v)
    if is_zero(v):
        raise ValueError("zero vector has no primitive form")
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    sign = 1 if next(x for x in ints if x != 0) > 0 else -1
    return tuple(Fraction(sign * x // g) for x in ints)


def det(M: Matrix) -> Fraction:
    """Determinant by Bareiss fraction-free elimination."""
    n = len(M)
    if n == 0:
        return Fraction(1)
    a = [list(r) for r in M]
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            p = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if p is None:
                return Fraction(0)
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def charpoly(M: Matrix) -> tuple[Fraction, ...]:
    """Coefficients ``(1, p_1, ..., p_n)`` of ``det(xI - M) = x^n + p_1 x^{n-1} + ... + p_n``.

    Faddeev-LeVerrier; the divisions by ``k`` are exact over the rationals.
    """
    n = len(M)
    coeffs = [Fraction(1)]
    Mk = zeros(n, n)
    I = identity(n)
    for k in range(1, n + 1):
        # M_k = M (M_{k-1} + p_{k-1} I)
        inner = tuple(tuple(Mk[i][j] + coeffs[-1] * I[i][j] for j in range(n)) for i in range(n))
        Mk = matmul(M, inner)
        coeffs.append(-sum((Mk[i][i] for i in range(n)), Fraction(0)) / k)
    return tuple(coeffs)


def _check_symmetric(S: Matrix) -> None:
    n = len(S)
    for i in range(n):
        if len(S[i]) != n:
            raise ValueError("matrix is not square")
        for j in range(i):
            if S[i][j] != S[j][i]:
                raise ValueError("matrix is not symmetric")


def is_psd(S: Matrix) -> bool:
    """Exact positive semidefiniteness of a rational symmetric matrix.

    The eigenvalues are real, so ``S`` is PSD iff ``det(xI - S)`` has no
    negative root.  For a real-rooted polynomial that is equivalent to the
    coefficients alternating in sign: ``(-1)^j p_j >= 0`` for every ``j``.
    """
    _check_symmetric(S)
    return all((-1) ** j * p >= 0 for j, p in enumerate(charpoly(S)))


def is_pd(S: Matrix) -> bool:
    """Exact positive definiteness (strict sign alternation of the characteristic polynomial)."""
    _check_symmetric(S)
    return all((-1) ** j * p > 0 for j, p in enumerate(charpoly(S)))
