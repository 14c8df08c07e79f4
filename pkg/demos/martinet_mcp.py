"""
The Martinet structure fails MCP(0, N)
======================================

The Jacobian ratio |J_R(omega t, m)| / |J_R(omega, m)| has to stay above
t^(N-1) for MCP(0, N). Pushing m toward 1 with omega = K(m) drives it to
zero, so no N survives.
"""

import math

from carnot_mcp.martinet import (MartinetCovector, conjugate_time, cut_time, mcp_ratio, mcp_ratio_schedule,
                                 mcp_violation_search, params_from_covector, reduced_jacobian)

cov = MartinetCovector(1.0, math.pi / 2, 1.0)
p = params_from_covector(cov)
print(f"m = {p.m}, omega = {p.omega}, A = {p.A:.6f}")
print(f"t_cut = {cut_time(cov):.10f}, t_conj = {conjugate_time(cov).t:.10f}")

# J_R is negative up to the conjugate time, largest in size near xi = K
for xi in (0.5, 1.0, p.phi, 2 * p.phi, 2.9 * p.phi):
    print(f"  J_R({xi:.4f}, 1/2) = {reduced_jacobian(xi, p.m): .6e}")

t = 0.5
print()
print(" j   1-m          omega      ratio        t*ratio")
for j, rep in enumerate(mcp_ratio_schedule(t, 14), start=2):
    print(f"{j:2d}  {1 - rep.m:.3e}  {rep.omega:9.5f}  {rep.ratio:.4e}  {rep.t_ratio:.4e}")

for N in (2, 5, 10, 20):
    res = mcp_violation_search(N, t)
    print(f"MCP(0,{N}) fails at j = {res.j}: ratio {res.report.ratio:.3e} < {t ** (N - 1):.3e}")

# Pushing omega to 1.9 K instead lands where |J_R| has already decayed, and the ratio grows.
print()
for j in (4, 6, 8):
    rep = mcp_ratio_schedule(t, j, omega_factor=1.9)[-1]
    print(f"omega = 1.9 K, j = {j}: ratio {rep.ratio:.3f}")
print("m near 1, omega = 0.5:", mcp_ratio(0.5, 1 - 1e-9, t))
