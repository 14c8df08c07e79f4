"""Stratified Lie algebras given by exact structure constants.

Basis vectors are ordered stratum by stratum, so the stratum of a basis index
is read off the prefix sums of ``strata_dims``.  Coordinate vectors are
0-based Python sequences; the ``relations`` accepted by
:meth:`StratifiedAlgebra.from_brackets` use the 1-based labels ``X_1..X_n``
because that is how algebras are written by hand and in data files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from typing import Iterable, Mapping, Sequence

from .rational import Matrix, Vector, frac, in_span, is_zero, rank, rref, span_basis, vector


class AlgebraError(ValueError):
    """Malformed algebra data (bad indices, dimension mismatch, ...)."""


class QuotientError(AlgebraError):
    pass


@dataclass(frozen=True)
class StratifiedAlgebra:
    name: str
    strata_dims: tuple[int, ...]
    # (i, j) -> ((k, c_ij^k), ...), 0-based, only nonzero entries
    table: Mapping[tuple[int, int], tuple[tuple[int, Fraction], ...]] = field(repr=False, compare=False)

    def __post_init__(self):
        if not self.strata_dims or any(d <= 0 for d in self.strata_dims):
            raise AlgebraError(f"strata dimensions must be positive, got {self.strata_dims}")
        n = self.dim
        for (i, j), row in self.table.items():
            if not (0 <= i < n and 0 <= j < n) or any(not 0 <= k < n for k, _ in row):
                raise AlgebraError(f"structure constant index out of range at ({i + 1}, {j + 1})")

    # -- construction -------------------------------------------------------

    @classmethod
    def from_brackets(cls, name: str, strata_dims: Sequence[int],
                      relations: Mapping[tuple[int, int], Mapping[int, object]]) -> "StratifiedAlgebra":
        """Build from ``{(i, j): {k: c}}`` meaning ``[X_i, X_j] = sum_k c X_k`` (1-based, i < j).

        Omitted brackets are zero and ``[X_j, X_i] = -[X_i, X_j]`` is implied.
        """
        table: dict[tuple[int, int], tuple[tuple[int, Fraction], ...]] = {}
        for (i, j), rhs in relations.items():
            if i >= j:
                raise AlgebraError(f"bracket [X{i}, X{j}] must be given with i < j")
            row = tuple(sorted((k - 1, frac(c)) for k, c in rhs.items() if frac(c) != 0))
            if row:
                table[(i - 1, j - 1)] = row
                table[(j - 1, i - 1)] = tuple((k, -c) for k, c in row)
        return cls(name, tuple(strata_dims), table)

    @classmethod
    def from_table(cls, name: str, strata_dims: Sequence[int], c) -> "StratifiedAlgebra":
        """Build from a full ``c[i][j][k]`` array, without imposing antisymmetry."""
        n = sum(strata_dims)
        if len(c) != n or any(len(ci) != n or any(len(cij) != n for cij in ci) for ci in c):
            raise AlgebraError("structure constant array has the wrong shape")
        table = {}
        for i in range(n):
            for j in range(n):
                row = tuple((k, frac(c[i][j][k])) for k in range(n) if frac(c[i][j][k]) != 0)
                if row:
                    table[(i, j)] = row
        return cls(name, tuple(strata_dims), table)

    # -- shape --------------------------------------------------------------

    @property
    def dim(self) -> int:
        return sum(self.strata_dims)

    @property
    def step(self) -> int:
        return len(self.strata_dims)

    @property
    def rank(self) -> int:
        return self.strata_dims[0]

    @property
    def offsets(self) -> tuple[int, ...]:
        return (0,) + tuple(accumulate(self.strata_dims))

    def stratum_range(self, a: int) -> range:
        """Global indices of stratum ``a`` (strata are numbered from 1)."""
        if not 1 <= a <= self.step:
            return range(0)
        o = self.offsets
        return range(o[a - 1], o[a])

    def stratum_dim(self, a: int) -> int:
        return self.strata_dims[a - 1] if 1 <= a <= self.step else 0

    def stratum_of(self, i: int) -> int:
        o = self.offsets
        for a in range(1, self.step + 1):
            if i < o[a]:
                return a
        raise IndexError(i)

    def c(self, i: int, j: int, k: int) -> Fraction:
        for kk, v in self.table.get((i, j), ()):
            if kk == k:
                return v
        return Fraction(0)

    def basis_vector(self, i: int) -> Vector:
        return tuple(Fraction(int(k == i)) for k in range(self.dim))

    def embed(self, a: int, local: Sequence) -> Vector:
        """Global coordinates of a vector given in the coordinates of stratum ``a``."""
        if len(local) != self.stratum_dim(a):
            raise AlgebraError("dimension mismatch")
        v = [Fraction(0)] * self.dim
        for i, x in zip(self.stratum_range(a), local):
            v[i] = frac(x)
        return tuple(v)

    def restrict(self, a: int, v: Sequence[Fraction]) -> Vector:
        """Coordinates of the stratum-``a`` component of ``v``."""
        return tuple(v[i] for i in self.stratum_range(a))

    def degree(self, v: Sequence[Fraction]) -> int | None:
        """Stratum of a nonzero homogeneous vector; ``None`` for zero.  Raises if inhomogeneous."""
        strata = {self.stratum_of(i) for i, x in enumerate(v) if x != 0}
        if not strata:
            return None
        if len(strata) > 1:
            raise AlgebraError("vector is not homogeneous")
        return strata.pop()

    def bracket(self, v, w) -> Vector:
        return bracket(self, v, w)


def bracket(A: StratifiedAlgebra, v: Sequence, w: Sequence) -> Vector:
    """Bilinear extension of the structure constants: ``sum_ij v_i w_j c_ij^k``."""
    n = A.dim
    if len(v) != n or len(w) != n:
        raise AlgebraError(f"expected vectors of length {n}")
    v = vector(v)
    w = vector(w)
    out = [Fraction(0)] * n
    nz_w = [(j, y) for j, y in enumerate(w) if y != 0]
    for i, x in enumerate(v):
        if x == 0:
            continue
        for j, y in nz_w:
            for k, c in A.table.get((i, j), ()):
                out[k] += x * y * c
    return tuple(out)


@dataclass(frozen=True)
class ValidationReport:
    antisymmetry_ok: bool
    jacobi_ok: bool
    grading_ok: bool
    generation_ok: bool
    # 1-based witness (i, j, k, l) for the first failing check, see violation_kind
    first_violation: tuple[int, ...] | None = None
    violation_kind: str | None = None

    @property
    def ok(self) -> bool:
        return self.antisymmetry_ok and self.jacobi_ok and self.grading_ok and self.generation_ok

    def describe(self) -> str:
        if self.ok:
            return "valid"
        w = self.first_violation
        if self.violation_kind == "antisymmetry":
            return f"antisymmetry fails: c[{w[0]}][{w[1]}][{w[2]}] != -c[{w[1]}][{w[0]}][{w[2]}]"
        if self.violation_kind == "jacobi":
            return (f"Jacobi identity fails for (X{w[0]}, X{w[1]}, X{w[2]}): "
                    f"component X{w[3]} of the cyclic sum is nonzero")
        if self.violation_kind == "grading":
            return f"grading fails: [X{w[0]}, X{w[1]}] has a component along X{w[2]}"
        if self.violation_kind == "generation":
            return f"stratum {w[0]} is not spanned by [g_1, g_{w[0] - 1}]"
        return "invalid"


def validate(A: StratifiedAlgebra) -> ValidationReport:
    """Check antisymmetry, the Jacobi identity, the grading and bracket generation exactly."""
    n = A.dim
    witness = None
    kind = None

    def fail(k, w):
        nonlocal witness, kind
        if witness is None:
            witness, kind = w, k

    anti = True
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if A.c(i, j, k) != -A.c(j, i, k):
                    anti = False
                    fail("antisymmetry", (i + 1, j + 1, k + 1))
                    break
            if not anti:
                break
        if not anti:
            break

    jac = True
    e = [A.basis_vector(i) for i in range(n)]
    triples = ((i, j, k) for i in range(n) for j in range(i + 1, n) for k in range(j + 1, n)) if anti \
        else ((i, j, k) for i in range(n) for j in range(n) for k in range(n))
    for i, j, k in triples:
        s = [a + b + c for a, b, c in zip(bracket(A, bracket(A, e[i], e[j]), e[k]),
                                          bracket(A, bracket(A, e[j], e[k]), e[i]),
                                          bracket(A, bracket(A, e[k], e[i]), e[j]))]
        if not is_zero(s):
            jac = False
            l = next(t for t, x in enumerate(s) if x != 0)
            fail("jacobi", (i + 1, j + 1, k + 1, l + 1))
            break

    graded = True
    for (i, j), row in sorted(A.table.items()):
        target = A.stratum_of(i) + A.stratum_of(j)
        for k, _ in row:
            if A.stratum_of(k) != target:
                graded = False
                fail("grading", (i + 1, j + 1, k + 1))
                break
        if not graded:
            break

    generated = True
    for a in range(1, A.step):
        vecs = [bracket(A, e[i], e[j]) for i in A.stratum_range(1) for j in A.stratum_range(a)]
        sub = [A.restrict(a + 1, v) for v in vecs]
        if rank(tuple(sub), A.stratum_dim(a + 1)) != A.stratum_dim(a + 1):
            generated = False
            fail("generation", (a + 1,))
            break

    return ValidationReport(anti, jac, graded, generated, witness, kind)


# -- graded subspaces ---------------------------------------------------------

@dataclass(frozen=True)
class GradedSubspace:
    """``h = h_1 + ... + h_s`` with each ``h_a`` an RREF basis in stratum-``a`` coordinates."""

    strata_dims: tuple[int, ...]
    basis: tuple[Matrix, ...]

    @classmethod
    def from_strata(cls, A: StratifiedAlgebra, per_stratum: Sequence[Iterable[Sequence]]) -> "GradedSubspace":
        if len(per_stratum) != A.step:
            raise AlgebraError(f"expected {A.step} strata")
        basis = tuple(span_basis(vs, d) for vs, d in zip(per_stratum, A.strata_dims))
        return cls(A.strata_dims, basis)

    @classmethod
    def from_vectors(cls, A: StratifiedAlgebra, vectors: Iterable[Sequence]) -> "GradedSubspace":
        """Span of homogeneous global vectors, sorted into strata."""
        per = [[] for _ in range(A.step)]
        for v in vectors:
            v = vector(v)
            if len(v) != A.dim:
                raise AlgebraError("dimension mismatch")
            a = A.degree(v)
            if a is not None:
                per[a - 1].append(A.restrict(a, v))
        return cls.from_strata(A, per)

    @classmethod
    def zero(cls, A: StratifiedAlgebra) -> "GradedSubspace":
        return cls(A.strata_dims, tuple(() for _ in A.strata_dims))

    @classmethod
    def whole(cls, A: StratifiedAlgebra) -> "GradedSubspace":
        return cls.from_strata(A, [[[int(i == j) for j in range(d)] for i in range(d)] for d in A.strata_dims])

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.basis)

    @property
    def dim(self) -> int:
        return sum(self.dims)

    def stratum(self, a: int) -> Matrix:
        return self.basis[a - 1] if 1 <= a <= len(self.basis) else ()

    def global_basis(self, A: StratifiedAlgebra) -> list[Vector]:
        self._check(A)
        return [A.embed(a, v) for a in range(1, A.step + 1) for v in self.stratum(a)]

    def contains(self, A: StratifiedAlgebra, v: Sequence) -> bool:
        self._check(A)
        v = vector(v)
        return all(in_span(A.restrict(a, v), self.stratum(a)) for a in range(1, A.step + 1))

    def issubset(self, other: "GradedSubspace") -> bool:
        return all(all(in_span(v, ob) for v in sb) for sb, ob in zip(self.basis, other.basis))

    def sum(self, other: "GradedSubspace") -> "GradedSubspace":
        return GradedSubspace(self.strata_dims, tuple(
            span_basis(list(a) + list(b), d) for a, b, d in zip(self.basis, other.basis, self.strata_dims)))

    def _check(self, A: StratifiedAlgebra) -> None:
        if A.strata_dims != self.strata_dims:
            raise AlgebraError("subspace belongs to an algebra with different strata")


GradedIdeal = GradedSubspace


def is_graded_subalgebra(A: StratifiedAlgebra, W: GradedSubspace) -> bool:
    basis = W.global_basis(A)
    return all(W.contains(A, bracket(A, v, w)) for i, v in enumerate(basis) for w in basis[i + 1:])


def is_graded_ideal(A: StratifiedAlgebra, W: GradedSubspace) -> bool:
    basis = W.global_basis(A)
    return all(W.contains(A, bracket(A, A.basis_vector(i), w)) for i in range(A.dim) for w in basis)


def complement_indices(h_a: Matrix, d: int) -> list[int]:
    """Standard basis directions completing an RREF basis: its non-pivot columns."""
    pivots = {next(i for i, x in enumerate(row) if x != 0) for row in h_a}
    return [j for j in range(d) if j not in pivots]


def quotient_algebra(A: StratifiedAlgebra, h: GradedSubspace, name: str | None = None
                     ) -> tuple[StratifiedAlgebra, Matrix]:
    """``A / h`` with the complement spanned by the non-pivot standard basis vectors of each ``h_a``.

    Returns the quotient and the projection matrix (quotient coordinates x
    ``A`` coordinates).  Trailing strata that vanish are dropped; any other
    failure to be a stratified algebra raises :class:`QuotientError`.
    """
    if not is_graded_ideal(A, h):
        raise QuotientError("subspace is not an ideal")
    comp = [complement_indices(h.stratum(a), A.stratum_dim(a)) for a in range(1, A.step + 1)]
    dims = [len(c) for c in comp]
    while dims and dims[-1] == 0:
        dims.pop()
    if not dims:
        raise QuotientError("quotient by the whole algebra is trivial")
    if 0 in dims:
        raise QuotientError(f"quotient has an empty stratum {dims.index(0) + 1} below a nonempty one; "
                            "it is not bracket-generated")

    rows: list[Vector] = []
    kept: list[int] = []  # global index in A of each quotient basis vector
    for a in range(1, len(dims) + 1):
        off = A.offsets[a - 1]
        h_a = h.stratum(a)
        piv = [next(i for i, x in enumerate(r) if x != 0) for r in h_a]
        for j in comp[a - 1]:
            # x -> x_j - sum_p x_p * row_p[j] kills h_a and reads off the coefficient of e_j
            r = [Fraction(0)] * A.dim
            r[off + j] = Fraction(1)
            for row, p in zip(h_a, piv):
                r[off + p] -= row[j]
            rows.append(tuple(r))
            kept.append(off + j)
    P: Matrix = tuple(rows)

    def proj(v):
        return tuple(sum((x * y for x, y in zip(r, v)), Fraction(0)) for r in P)

    relations = {}
    for qa, ia in enumerate(kept):
        for qb in range(qa + 1, len(kept)):
            img = proj(bracket(A, A.basis_vector(ia), A.basis_vector(kept[qb])))
            rhs = {k + 1: c for k, c in enumerate(img) if c != 0}
            if rhs:
                relations[(qa + 1, qb + 1)] = rhs
    B = StratifiedAlgebra.from_brackets(name or f"{A.name}/h", dims, relations)
    report = validate(B)
    if not report.ok:
        raise QuotientError(f"quotient is not a stratified algebra: {report.describe()}")
    return B, P


def ad_matrix(A: StratifiedAlgebra, v: Sequence, src: int, dst: int) -> Matrix:
    """Matrix of ``X -> [v, X]`` from stratum ``src`` to stratum ``dst`` (rows index ``dst``)."""
    v = vector(v)
    a = A.degree(v)
    if a is not None and a + src != dst:
        raise AlgebraError(f"ad of a degree-{a} vector maps stratum {src} to {a + src}, not {dst}")
    cols = [A.restrict(dst, bracket(A, v, A.basis_vector(i))) for i in A.stratum_range(src)]
    return tuple(tuple(col[r] for col in cols) for r in range(A.stratum_dim(dst)))


def is_engel_type(A: StratifiedAlgebra) -> bool:
    """Any valid stratified algebra with strata (2, 1, 1) is the Engel algebra."""
    return A.strata_dims == (2, 1, 1) and validate(A).ok


__all__ = [
    "AlgebraError", "QuotientError", "StratifiedAlgebra", "ValidationReport", "GradedSubspace",
    "GradedIdeal", "bracket", "validate", "is_graded_subalgebra", "is_graded_ideal",
    "quotient_algebra", "ad_matrix", "is_engel_type", "complement_indices",
]
