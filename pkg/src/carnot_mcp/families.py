"""Named families of stratified algebras."""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .algebra import AlgebraError, StratifiedAlgebra
from .rational import rref


def heisenberg(n: int = 1) -> StratifiedAlgebra:
    """The (2n+1)-dimensional Heisenberg algebra: [X_i, X_{n+i}] = Z."""
    if n < 1:
        raise AlgebraError("n must be positive")
    z = 2 * n + 1
    rel = {(i, n + i): {z: 1} for i in range(1, n + 1)}
    return StratifiedAlgebra.from_brackets("Heis" if n == 1 else f"Heis_{z}", (2 * n, 1), rel)


def engel() -> StratifiedAlgebra:
    """Basis X1, X2, Y, Z with [X1, X2] = Y and [X1, Y] = Z."""
    return StratifiedAlgebra.from_brackets("N_4_2", (2, 1, 1), {(1, 2): {3: 1}, (1, 3): {4: 1}})


def filiform(step: int) -> StratifiedAlgebra:
    """Standard filiform algebra of the given step: [X1, X2] = X3, [X1, X_k] = X_{k+1}."""
    if step < 2:
        raise AlgebraError("filiform algebras have step >= 2")
    n = step + 1
    rel = {(1, k): {k + 1: 1} for k in range(2, n)}
    return StratifiedAlgebra.from_brackets(f"filiform_{step}", (2,) + (1,) * (step - 1), rel)


def witt_dimension(rank: int, degree: int) -> int:
    """Dimension of the degree-``degree`` part of the free Lie algebra on ``rank`` generators."""
    total = 0
    for d in range(1, degree + 1):
        if degree % d == 0:
            total += _mobius(d) * rank ** (degree // d)
    return total // degree


def _mobius(n: int) -> int:
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def lyndon_words(rank: int, max_len: int) -> list[tuple[int, ...]]:
    """Lyndon words over ``0..rank-1`` of length <= max_len (Duval's algorithm), by length then lex."""
    words = []
    w = [-1]
    while w:
        w[-1] += 1
        words.append(tuple(w))
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == rank - 1:
            w.pop()
    return sorted(words, key=lambda u: (len(u), u))


def _standard_bracketing(word, lyndon_set):
    if len(word) == 1:
        return {word: Fraction(1)}
    # split at the longest proper Lyndon suffix
    for i in range(1, len(word)):
        if word[i:] in lyndon_set:
            u, v = word[:i], word[i:]
            break
    pu = _standard_bracketing(u, lyndon_set)
    pv = _standard_bracketing(v, lyndon_set)
    return _commutator(pu, pv)


def _commutator(p, q):
    out: dict[tuple[int, ...], Fraction] = {}
    for a, x in p.items():
        for b, y in q.items():
            out[a + b] = out.get(a + b, 0) + x * y
            out[b + a] = out.get(b + a, 0) - x * y
    return {k: v for k, v in out.items() if v != 0}


def free_nilpotent(rank: int, step: int) -> StratifiedAlgebra:
    """Free nilpotent Lie algebra of given rank and step, in the Lyndon (Hall-type) basis.

    Elements are realised as non-commutative polynomials, so the brackets
    come out of the associative commutator and are automatically Jacobi.
    """
    if rank < 2 or step < 1:
        raise AlgebraError("need rank >= 2 and step >= 1")
    words = lyndon_words(rank, step)
    lyndon_set = set(words)
    polys = [_standard_bracketing(w, lyndon_set) for w in words]
    degree = [len(w) for w in words]
    by_degree: dict[int, list[int]] = {}
    for idx, d in enumerate(degree):
        by_degree.setdefault(d, []).append(idx)

    # per degree: coordinates of the basis polynomials on the monomials, and a solver
    solvers = {}
    for d, idxs in by_degree.items():
        monos = sorted({m for i in idxs for m in polys[i]})
        B = tuple(tuple(Fraction(polys[i].get(m, 0)) for i in idxs) for m in monos)
        # pick monomial rows giving an invertible square block
        R, piv = rref(tuple(zip(*B)), len(monos))
        rows = list(piv)
        sq = [[B[r][c] for c in range(len(idxs))] for r in rows]
        aug = tuple(tuple(sq[i]) + tuple(Fraction(int(i == j)) for j in range(len(idxs))) for i in range(len(idxs)))
        Rinv, _ = rref(aug)
        inv = [row[len(idxs):] for row in Rinv]
        solvers[d] = ([monos[r] for r in rows], inv, idxs)

    relations = {}
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            d = degree[i] + degree[j]
            if d > step:
                continue
            p = _commutator(polys[i], polys[j])
            if not p:
                continue
            monos, inv, idxs = solvers[d]
            rhs_vec = [Fraction(p.get(m, 0)) for m in monos]
            coeffs = [sum((inv[r][c] * rhs_vec[c] for c in range(len(monos))), Fraction(0)) for r in range(len(idxs))]
            rhs = {idxs[r] + 1: c for r, c in enumerate(coeffs) if c != 0}
            if rhs:
                relations[(i + 1, j + 1)] = rhs
    dims = tuple(len(by_degree[d]) for d in range(1, step + 1))
    return StratifiedAlgebra.from_brackets(f"free_{rank}_{step}", dims, relations)


def free_step3_dimension(rank: int) -> int:
    """k + k(k-1)/2 + (k^3 - k)/3."""
    return rank + comb(rank, 2) + (rank ** 3 - rank) // 3
