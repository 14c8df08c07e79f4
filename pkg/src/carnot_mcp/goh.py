"""Goh and generalized Legendre conditions for constant controls.

A constant control ``u`` in ``g_1`` gives the horizontal segment
``exp(t X_u)``.  A covector ``lam0`` (on the whole algebra) is an abnormal
Goh-Legendre lift of it when it annihilates ``Ad_{exp(t X_u)} g_1`` and
``Ad_{exp(t X_u)} g_2`` for all ``t`` and the quadratic form
``X -> lam0([[u, X], X])`` on ``g_1`` is nonnegative.  In step 3 the
conditions reduce to statements about ``lam0`` alone, which is what
:func:`eval_goh_legendre_step3` checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Sequence

from .algebra import AlgebraError, StratifiedAlgebra, bracket
from .quotients import candidate_covectors
from .rational import Matrix, Vector, dot, is_pd, is_psd, is_zero, kernel_image, matmul, transpose, vector


@dataclass(frozen=True)
class GohLegendreReport:
    abnormal_ok: bool
    goh_ok: bool
    legendre_ok: bool
    strong_legendre_ok: bool
    legendre_form: Matrix
    partial: bool = False  # legendre flags only use the t = 0 coefficient

    @property
    def witness(self) -> bool:
        return self.abnormal_ok and self.goh_ok and self.legendre_ok


def _control(A: StratifiedAlgebra, u: Sequence) -> Vector:
    u = vector(u)
    if len(u) != A.rank:
        raise AlgebraError(f"control must have {A.rank} entries")
    return A.embed(1, u)


def _covector(A: StratifiedAlgebra, lam0: Sequence) -> Vector:
    lam0 = vector(lam0)
    if len(lam0) != A.dim:
        raise AlgebraError(f"covector must have {A.dim} entries")
    return lam0


def legendre_form(A: StratifiedAlgebra, lam0: Sequence, u: Sequence) -> Matrix:
    """Symmetrised ``S_ab = (lam0([[u, e_a], e_b]) + lam0([[u, e_b], e_a])) / 2`` on a ``g_1`` basis."""
    lam0 = _covector(A, lam0)
    U = _control(A, u)
    e = A.basis_vector
    g1 = list(A.stratum_range(1))
    T = [[dot(lam0, bracket(A, bracket(A, U, e(a)), e(b))) for b in g1] for a in g1]
    k = len(g1)
    return tuple(tuple((T[a][b] + T[b][a]) / 2 for b in range(k)) for a in range(k))


def perp_basis(u: Sequence[Fraction]) -> Matrix:
    """Columns spanning the coordinate orthogonal complement of ``u`` (as a k x (k-1) matrix)."""
    k = len(u)
    if is_zero(u):
        return tuple(tuple(Fraction(int(i == j)) for j in range(k)) for i in range(k))
    kernel, _, _ = kernel_image((tuple(u),), k)
    return transpose(kernel, k)


def _strong(S: Matrix, u: Vector) -> bool:
    B = perp_basis(u)
    if not B or not B[0]:
        return True
    return is_pd(matmul(transpose(B), matmul(S, B)))


def eval_goh_legendre_step3(A: StratifiedAlgebra, lam0: Sequence, u: Sequence) -> GohLegendreReport:
    if A.step != 3:
        raise AlgebraError(f"{A.name} has step {A.step}, not 3")
    lam0 = _covector(A, lam0)
    U = _control(A, u)
    e = A.basis_vector
    abnormal = all(lam0[i] == 0 for i in A.stratum_range(1))
    goh = all(lam0[j] == 0 for j in A.stratum_range(2)) and \
        all(dot(lam0, bracket(A, U, e(j))) == 0 for j in A.stratum_range(2))
    S = legendre_form(A, lam0, u)
    leg = is_psd(S)
    u1 = A.restrict(1, U)
    # PD on u-perp plus S(u, .) = 0 gives PSD; require both so strong => weak always
    strong = leg and _strong(S, u1)
    return GohLegendreReport(abnormal, goh, leg, strong, S)


def goh_solution_space(A: StratifiedAlgebra, u: Sequence) -> tuple[Vector, ...]:
    """Basis of covectors on ``g_3`` (as full-length vectors) annihilating ``[u, g_2]``."""
    if A.step != 3:
        raise AlgebraError(f"{A.name} has step {A.step}, not 3")
    U = _control(A, u)
    rows = tuple(A.restrict(3, bracket(A, U, A.basis_vector(j))) for j in A.stratum_range(2))
    kernel, _, _ = kernel_image(rows, A.stratum_dim(3))
    return tuple(A.embed(3, v) for v in kernel)


def ad_power_coefficients(A: StratifiedAlgebra, u: Sequence, w: Sequence) -> list[Vector]:
    """``ad_u^k(w) / k!`` for ``k = 0 .. s-1``: the t-coefficients of ``Ad_{exp(t u)} w``."""
    U = _control(A, u)
    out = []
    cur = vector(w)
    for k in range(A.step):
        out.append(tuple(x / factorial(k) for x in cur))
        cur = bracket(A, U, cur)
    return out


def eval_goh_general_constant(A: StratifiedAlgebra, lam0: Sequence, u: Sequence) -> GohLegendreReport:
    """Any step; abnormal/Goh exact through the nilpotent Ad series, Legendre only at ``t = 0``."""
    lam0 = _covector(A, lam0)
    U = _control(A, u)

    def annihilates(stratum):
        return all(dot(lam0, c) == 0 for j in A.stratum_range(stratum)
                   for c in ad_power_coefficients(A, A.restrict(1, U), A.basis_vector(j)))

    abnormal = annihilates(1)
    goh = annihilates(2)
    S = legendre_form(A, lam0, u)
    leg = is_psd(S)
    strong = leg and _strong(S, A.restrict(1, U))
    return GohLegendreReport(abnormal, goh, leg, strong, S, partial=A.step > 3)


def _combinations(basis: Sequence[Vector], bound: int):
    """Nonzero integer combinations of ``basis`` with coefficients in [-bound, bound], unit ones first."""
    n = len(basis)
    if n == 0:
        return
    coeff_sets = sorted((c for c in product(range(-bound, bound + 1), repeat=n) if any(c)),
                        key=lambda c: (sum(x != 0 for x in c), max(abs(x) for x in c), c))
    for c in coeff_sets:
        v = tuple(sum((ci * b[t] for ci, b in zip(c, basis)), Fraction(0)) for t in range(len(basis[0])))
        if not is_zero(v):
            yield v


def _controls(A: StratifiedAlgebra, bound: int):
    for c in candidate_covectors(A.rank, bound):
        yield c.lam


def search_goh_witness(A: StratifiedAlgebra, bound: int = 2) -> tuple[Vector, Vector] | None:
    """First ``(lam0, u)`` satisfying the abnormal and Goh conditions, ignoring Legendre."""
    if A.step != 3:
        raise AlgebraError(f"{A.name} has step {A.step}, not 3")
    for u in _controls(A, bound):
        space = goh_solution_space(A, u)
        if space:
            return space[0], u
    return None


def search_goh_legendre_witness(A: StratifiedAlgebra, bound: int = 2) -> tuple[Vector, Vector] | None:
    """First ``(lam0, u)`` satisfying abnormal, Goh and generalized Legendre conditions.

    Controls run over primitive integer vectors in [-bound, bound]^k (``u`` and
    ``-u`` give opposite Legendre forms, and both signs of ``lam0`` are tried).
    Covectors run over integer combinations of the Goh solution basis with
    coefficients in [-bound, bound].  ``None`` is a bounded-search result,
    not a proof of nonexistence.
    """
    if A.step != 3:
        raise AlgebraError(f"{A.name} has step {A.step}, not 3")
    for u in _controls(A, bound):
        space = goh_solution_space(A, u)
        for lam0 in _combinations(space, bound):
            if is_psd(legendre_form(A, lam0, u)):
                return lam0, u
    return None
