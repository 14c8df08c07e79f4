"""Normal geodesics of the Martinet structure and the reduced Jacobian.

Coordinates ``(x, y, z)`` with horizontal frame ``X = d_x + (y^2/2) d_z``,
``Y = d_y``; the covector ``(u, v, w)`` is dual to ``(x, y, z)``.  Writing
``h = u + y^2 w / 2`` the Hamiltonian is ``H = (h^2 + v^2)/2`` and along a
geodesic ``u, w`` are constant while ``y`` solves a Duffing equation, giving
the closed forms in :func:`geodesic_closed_form`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .elliptic import complete_K, ellipj_extended, jacobi_E, jacobi_sn_cn_dn


class MartinetDomainError(ValueError):
    pass


@dataclass(frozen=True)
class MartinetCovector:
    r: float
    theta: float
    w0: float

    def __post_init__(self):
        if not (self.r > 0 and math.isfinite(self.r)):
            raise MartinetDomainError("r must be positive")
        if not (0.0 < self.theta < 2 * math.pi) or abs(self.theta - math.pi) < 1e-15:
            raise MartinetDomainError("theta must lie in (0, 2 pi) minus {pi}")
        if self.w0 == 0 or not math.isfinite(self.w0):
            raise MartinetDomainError("w0 must be nonzero")

    @property
    def u0(self) -> float:
        return self.r * math.cos(self.theta)

    @property
    def v0(self) -> float:
        return self.r * math.sin(self.theta)


@dataclass(frozen=True)
class OscParams:
    A: float
    omega: float
    m: float
    phi: float  # K(m)


def _sgn(x: float) -> float:
    return 1.0 if x > 0 else -1.0


def params_from_covector(cov: MartinetCovector) -> OscParams:
    s = _sgn(cov.w0)
    m = (1.0 - s * math.cos(cov.theta)) / 2.0
    omega = s * math.sqrt(cov.r * abs(cov.w0))
    amp = 2.0 * cov.r * math.sqrt(m) / abs(omega)
    A = -_sgn(cov.v0) * _sgn(omega) * amp
    return OscParams(A, omega, m, complete_K(m))


@dataclass(frozen=True)
class GeodesicPoint:
    t: float
    x: float
    y: float
    z: float
    v: float


def geodesic_closed_form(cov: MartinetCovector, t: float) -> GeodesicPoint:
    p = params_from_covector(cov)
    if abs(p.omega * t) > 10.0 * p.phi * (1 + 1e-12):
        raise MartinetDomainError("t exceeds 10 K(m) / |omega|")
    s = _sgn(cov.w0)
    sn, cn, dn, E = ellipj_extended(p.omega * t + p.phi, p.m)
    E0 = jacobi_E(p.phi, p.m)
    y = p.A * cn
    v = -p.A * p.omega * sn * dn
    x = s * (-cov.r * t + 2.0 * cov.r / p.omega * (E - E0))
    z = (cov.r ** 2 * t - cov.u0 * x - y * v) / (3.0 * cov.w0)
    return GeodesicPoint(t, x, y, z, v)


def hamiltonian(state) -> float:
    x, y, z, u, v, w = state
    h = u + y * y * w / 2.0
    return 0.5 * (h * h + v * v)


def _rhs(s):
    x, y, z, u, v, w = s
    h = u + y * y * w / 2.0
    return (h, v, h * y * y / 2.0, 0.0, -h * y * w, 0.0)


def ode_trajectory(cov: MartinetCovector, T: float = 1.0, steps: int = 10_000) -> list[tuple[float, ...]]:
    """Classical RK4 on the 6-dim Hamiltonian system; returns ``steps+1`` states ``(t, x, y, z, u, v, w)``."""
    if steps < 1000:
        raise ValueError("steps must be >= 1000")
    dt = T / steps
    s = (0.0, 0.0, 0.0, cov.u0, cov.v0, cov.w0)
    out = [(0.0,) + s]
    for n in range(steps):
        k1 = _rhs(s)
        k2 = _rhs(tuple(a + 0.5 * dt * b for a, b in zip(s, k1)))
        k3 = _rhs(tuple(a + 0.5 * dt * b for a, b in zip(s, k2)))
        k4 = _rhs(tuple(a + dt * b for a, b in zip(s, k3)))
        s = tuple(a + dt / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4) for a, b1, b2, b3, b4 in zip(s, k1, k2, k3, k4))
        out.append(((n + 1) * dt,) + s)
    return out


def geodesic_ode_oracle(cov: MartinetCovector, t: float = 1.0, steps: int = 10_000) -> GeodesicPoint:
    tt, x, y, z, _, v, _ = ode_trajectory(cov, t, steps)[-1]
    return GeodesicPoint(tt, x, y, z, v)


# -- reduced Jacobian ---------------------------------------------------------

_SERIES_CUTOFF = 0.5
_SERIES_ORDER = 40


def _mul(a, b, n):
    return [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n)]


def _taylor_sn_cn_dn_E(m: float, n: int):
    """Maclaurin coefficients of sn, cn, dn and E(.|m) through degree n-1."""
    sn, cn, dn = [0.0] * n, [0.0] * n, [0.0] * n
    cn[0] = dn[0] = 1.0
    for k in range(n - 1):
        # sn' = cn dn, cn' = -sn dn, dn' = -m sn cn
        cd = sum(cn[i] * dn[k - i] for i in range(k + 1))
        sd = sum(sn[i] * dn[k - i] for i in range(k + 1))
        sc = sum(sn[i] * cn[k - i] for i in range(k + 1))
        sn[k + 1] = cd / (k + 1)
        cn[k + 1] = -sd / (k + 1)
        dn[k + 1] = -m * sc / (k + 1)
    dn2 = _mul(dn, dn, n)
    E = [0.0] + [dn2[k] / (k + 1) for k in range(n - 1)]
    return sn, cn, dn, E


def _numerator_series(m: float, n: int = _SERIES_ORDER):
    """Coefficients of Q = J_R dn^2 with the identically-cancelling orders 0..5 removed."""
    sn, cn, dn, E = _taylor_sn_cn_dn_E(m, n)
    m1 = 1.0 - m
    xi2 = [0.0, 0.0, 1.0] + [0.0] * (n - 3)
    xi1 = [0.0, 1.0] + [0.0] * (n - 2)
    sd = _mul(sn, dn, n)
    Ec = _mul(E, cn, n)
    q = [0.0] * n
    for k, val in enumerate(_mul(xi2, cn, n)):
        q[k] += m1 * val
    for k, val in enumerate(_mul(xi1, [a - 2 * b for a, b in zip(sd, Ec)], n)):
        q[k] += m1 * val
    for k, val in enumerate(_mul(E, [a - b for a, b in zip(Ec, sd)], n)):
        q[k] += val
    for k in range(6):
        q[k] = 0.0
    return q


def _check_jr_domain(xi: float, m: float) -> None:
    if not (0.0 < m < 1.0):
        raise MartinetDomainError("reduced Jacobian needs 0 < m < 1")
    if not (0.0 < xi <= 4.0 * complete_K(m) * (1 + 1e-12)):
        raise MartinetDomainError("reduced Jacobian needs 0 < xi <= 4 K(m)")


def reduced_jacobian(xi: float, m: float) -> float:
    """J_R(xi, m) = [xi^2 c1 + xi c2 + c3] / dn; Maclaurin series below xi = 0.5."""
    _check_jr_domain(xi, m)
    sn, cn, dn = jacobi_sn_cn_dn(xi, m)
    if xi < _SERIES_CUTOFF:
        q = _numerator_series(m)
        acc = 0.0
        for c in reversed(q):
            acc = acc * xi + c
        return acc / (dn * dn)
    E = jacobi_E(xi, m)
    m1 = 1.0 - m
    c1 = m1 * cn / dn
    c2 = m1 * sn - 2.0 * m1 * E * cn / dn
    c3 = E * E * cn / dn - E * sn
    return (xi * xi * c1 + xi * c2 + c3) / dn


def expansion_profile(xi: float) -> float:
    """g(xi) = cosh(xi) [sinh(xi)^2 + xi (tanh(xi) - 2 xi)] / 2, the m -> 1 slope of J_R."""
    return 0.5 * math.cosh(xi) * (math.sinh(xi) ** 2 + xi * (math.tanh(xi) - 2.0 * xi))


def expansion_jr(xi: float, m: float) -> float:
    """First order in (m - 1): J_R ~ (m - 1) g(xi)."""
    return (m - 1.0) * expansion_profile(xi)


def full_jacobian_density(cov: MartinetCovector, t: float) -> float:
    """-(r^4 t / omega^2) sgn(v0) J_R(|omega| t, m), the density against r dr dtheta dw."""
    if t <= 0:
        raise MartinetDomainError("t must be positive")
    p = params_from_covector(cov)
    return -(cov.r ** 4 * t / p.omega ** 2) * _sgn(cov.v0) * reduced_jacobian(abs(p.omega) * t, p.m)


def cut_time(cov: MartinetCovector) -> float:
    p = params_from_covector(cov)
    return 2.0 * p.phi / abs(p.omega)


@dataclass(frozen=True)
class ConjugateTime:
    bracket: tuple[float, float]  # in xi = |omega| t
    xi: float
    t: float
    iterations: int


def first_jr_zero(m: float, tol: float = 1e-10, samples: int = 256) -> tuple[tuple[float, float], float, int]:
    """First sign change of J_R(., m) in (2K, 3K): scan, then bisect to ``tol`` in xi."""
    K = complete_K(m)
    lo, hi = 2.0 * K, 3.0 * K
    f_lo = reduced_jacobian(lo, m)
    grid = [lo + (hi - lo) * k / samples for k in range(1, samples + 1)]
    a, fa = lo, f_lo
    for b in grid:
        fb = reduced_jacobian(b, m)
        if (fa < 0) != (fb < 0):
            break
        a, fa = b, fb
    else:
        raise ArithmeticError(f"no sign change of J_R in (2K, 3K) for m = {m}")
    it = 0
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm = reduced_jacobian(mid, m)
        if (fm < 0) == (fa < 0):
            a, fa = mid, fm
        else:
            b = mid
        it += 1
    return (lo, hi), 0.5 * (a + b), it


def conjugate_time(cov: MartinetCovector, tol: float = 1e-10) -> ConjugateTime:
    p = params_from_covector(cov)
    bracket, xi, it = first_jr_zero(p.m, tol)
    return ConjugateTime(bracket, xi, xi / abs(p.omega), it)


# -- MCP(0, N) violation --------------------------------------------------------

_EXPANSION_M1 = 1e-7
_EXPANSION_GROWTH = 1e-3


@dataclass(frozen=True)
class MCPRatioReport:
    m: float
    omega: float
    t: float
    ratio: float
    violated_up_to_N: int
    path: str  # "full" or "expansion"

    @property
    def t_ratio(self) -> float:
        return self.t * self.ratio


@dataclass(frozen=True)
class MCPSearchResult:
    report: MCPRatioReport
    N: int
    j: int
    history: tuple[MCPRatioReport, ...] = field(repr=False)


def violated_up_to(ratio: float, t: float) -> int:
    """Largest N >= 1 with ratio < t^(N-1), 0 if there is none."""
    if ratio >= 1.0:
        return 0
    if ratio <= 0.0:
        raise ArithmeticError("ratio must be positive")
    N = int(math.floor(1.0 + math.log(ratio) / math.log(t)))
    while N > 1 and not ratio < t ** (N - 1):
        N -= 1
    while ratio < t ** N:
        N += 1
    return N


def use_expansion(xi: float, m: float) -> bool:
    # the first-order expansion is only uniform while (1 - m) cosh(xi)^2 stays small
    m1 = 1.0 - m
    return m1 < _EXPANSION_M1 and m1 * math.cosh(min(xi, 350.0)) ** 2 < _EXPANSION_GROWTH


def mcp_ratio(omega: float, m: float, t: float, path: str = "auto") -> MCPRatioReport:
    """ratio = |J_R(omega t, m)| / |J_R(omega, m)|, with omega in (0, 2K(m)) and t in (0, 1)."""
    if not (0.0 < t < 1.0):
        raise MartinetDomainError("t must lie in (0, 1)")
    if not (0.0 < m < 1.0):
        raise MartinetDomainError("m must lie in (0, 1)")
    if not (0.0 < omega < 2.0 * complete_K(m)):
        raise MartinetDomainError("omega must lie in (0, 2K(m))")
    if path == "auto":
        path = "expansion" if use_expansion(omega, m) else "full"
    if path == "expansion":
        ratio = abs(expansion_profile(omega * t)) / abs(expansion_profile(omega))
    elif path == "full":
        ratio = abs(reduced_jacobian(omega * t, m)) / abs(reduced_jacobian(omega, m))
    else:
        raise ValueError(f"unknown path {path!r}")
    return MCPRatioReport(m, omega, t, ratio, violated_up_to(ratio, t), path)


SCHEDULE_OMEGA_FACTOR = 1.0


def schedule_point(j: int, omega_factor: float = SCHEDULE_OMEGA_FACTOR) -> tuple[float, float]:
    """m_j = 1 - 16 e^(-2j) (so K(m_j) ~ j), omega_j = omega_factor * K(m_j).

    |J_R(., m)| peaks near xi = K(m) and decays towards 2K(m), so factors
    close to 2 make the ratio grow with j; factor 1 drives it to zero.
    """
    if not 0.0 < omega_factor < 2.0:
        raise MartinetDomainError("omega_factor must lie in (0, 2)")
    if j < 2:
        raise MartinetDomainError("schedule starts at j = 2")
    m = 1.0 - 16.0 * math.exp(-2.0 * j)
    if not m < 1.0:
        raise ArithmeticError(f"m_{j} rounds to 1 in double precision")
    return m, omega_factor * complete_K(m)


def mcp_ratio_schedule(t: float, j_max: int, omega_factor: float = SCHEDULE_OMEGA_FACTOR):
    """Reports along the schedule for j = 2 .. j_max."""
    out = []
    for j in range(2, j_max + 1):
        m, omega = schedule_point(j, omega_factor)
        out.append(mcp_ratio(omega, m, t))
    return out


def mcp_violation_search(N: int, t: float, max_iter: int = 16,
                         omega_factor: float = SCHEDULE_OMEGA_FACTOR) -> MCPSearchResult:
    """March the schedule from j = 2 until ratio < t^(N-1)."""
    if N < 2:
        raise MartinetDomainError("N must be >= 2")
    if not (0.0 < t < 1.0):
        raise MartinetDomainError("t must lie in (0, 1)")
    target = t ** (N - 1)
    history = []
    for j in range(2, 2 + max_iter):
        m, omega = schedule_point(j, omega_factor)
        rep = mcp_ratio(omega, m, t)
        history.append(rep)
        if rep.ratio < target:
            return MCPSearchResult(rep, N, j, tuple(history))
    raise ArithmeticError(f"no violation of MCP(0, {N}) within {max_iter} schedule steps")
