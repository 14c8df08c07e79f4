"""Jacobi elliptic functions and elliptic integrals for 0 <= m < 1.

Everything is driven by one arithmetic-geometric mean sequence
``a_{n+1} = (a_n + b_n)/2``, ``b_{n+1} = sqrt(a_n b_n)``, ``c_{n+1} = (a_n - b_n)/2``
started from ``(1, sqrt(1 - m), sqrt(m))``.  The amplitude is recovered with
the backward phase recurrence, and the Jacobi-form second-kind integral uses
the same phases through the Jacobi zeta function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_TOL = 2.0 ** -53
_MAX_AGM = 64


class EllipticDomainError(ValueError):
    pass


@dataclass(frozen=True)
class _AGM:
    a: tuple[float, ...]
    c: tuple[float, ...]  # c[0] = sqrt(m)


def _check_m(m: float) -> float:
    m = float(m)
    if not (0.0 <= m < 1.0) or math.isnan(m):
        raise EllipticDomainError(f"modulus m = {m!r} outside [0, 1)")
    return m


def _agm(m: float) -> _AGM:
    a, b, c = 1.0, math.sqrt(1.0 - m), math.sqrt(m)
    az, cz = [a], [c]
    for _ in range(_MAX_AGM):
        if abs(c) <= _TOL * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        az.append(a)
        cz.append(c)
    else:  # pragma: no cover - quadratic convergence makes this unreachable
        raise ArithmeticError("AGM did not converge")
    return _AGM(tuple(az), tuple(cz))


def complete_K(m: float) -> float:
    """K(m) = pi / (2 AGM(1, sqrt(1 - m)))."""
    m = _check_m(m)
    return math.pi / (2.0 * _agm(m).a[-1])


def complete_E(m: float) -> float:
    """E(m) = K(m) (1 - sum_n 2^(n-1) c_n^2)."""
    m = _check_m(m)
    g = _agm(m)
    s = sum(2.0 ** (n - 1) * c * c for n, c in enumerate(g.c))
    return math.pi / (2.0 * g.a[-1]) * (1.0 - s)


def _phases(xi: float, g: _AGM) -> list[float]:
    n = len(g.a) - 1
    phi = [0.0] * (n + 1)
    phi[n] = 2.0 ** n * g.a[n] * xi
    for k in range(n, 0, -1):
        s = g.c[k] / g.a[k] * math.sin(phi[k])
        phi[k - 1] = 0.5 * (phi[k] + math.asin(max(-1.0, min(1.0, s))))
    return phi


def _guard(xi: float, m: float) -> float:
    xi = float(xi)
    if not math.isfinite(xi) or abs(xi) > 10.0 * complete_K(m) * (1 + 1e-15):
        raise EllipticDomainError(f"|xi| = {abs(xi)!r} exceeds 10 K(m)")
    return xi


def jacobi_sn_cn_dn(xi: float, m: float) -> tuple[float, float, float]:
    m = _check_m(m)
    xi = _guard(xi, m)
    if m == 0.0:
        return math.sin(xi), math.cos(xi), 1.0
    phi0 = _phases(xi, _agm(m))[0]
    sn, cn = math.sin(phi0), math.cos(phi0)
    # cn^2 + (1-m) sn^2 avoids the cancellation in 1 - m sn^2 near m = 1
    return sn, cn, math.sqrt(cn * cn + (1.0 - m) * sn * sn)


def jacobi_E(xi: float, m: float) -> float:
    """Jacobi-form E(xi|m) = int_0^xi dn(u|m)^2 du = (E/K) xi + Z(am xi | m)."""
    m = _check_m(m)
    xi = _guard(xi, m)
    if m == 0.0:
        return xi
    g = _agm(m)
    phi = _phases(xi, g)
    ratio = 1.0 - sum(2.0 ** (n - 1) * c * c for n, c in enumerate(g.c))
    zeta = sum(g.c[n] * math.sin(phi[n]) for n in range(1, len(phi)))
    return ratio * xi + zeta


def ellipj_extended(xi: float, m: float) -> tuple[float, float, float, float]:
    """(sn, cn, dn, E) for any real xi, reducing by the period 4K first.

    Uses sn, cn, dn 4K-periodic and E(xi + 4K) = E(xi) + 4 E(m).
    """
    m = _check_m(m)
    K = complete_K(m)
    k = round(xi / (4.0 * K))
    red = xi - 4.0 * K * k
    sn, cn, dn = jacobi_sn_cn_dn(red, m)
    return sn, cn, dn, jacobi_E(red, m) + 4.0 * k * complete_E(m)
