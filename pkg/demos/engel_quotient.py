"""
From a Martinet certificate to an Engel quotient
================================================

Take the free rank-2 step-3 algebra, find a hyperplane of g_3 giving a
rank-one pairing, then quotient by the ideal built from it. What is left
is the Engel algebra, and the tower between {0} and that ideal has normal
steps.
"""

from carnot_mcp import free_nilpotent
from carnot_mcp.algebra import GradedSubspace, is_engel_type
from carnot_mcp.catalog import format_combination
from carnot_mcp.quotients import (build_engel_ideal, build_tower, h2_of_h3, pairing_matrix,
                                  search_martinet_certificate)

A = free_nilpotent(2, 3)
print("strata", A.strata_dims)

cert = search_martinet_certificate(A)
print("certificate lambda =", [str(x) for x in cert.lam])
for row in pairing_matrix(A, cert):
    print("  ", [str(x) for x in row])
print("h2 basis (g_2 coords):", h2_of_h3(A, cert))

w = build_engel_ideal(A, cert)
print("X1 =", format_combination(w.x1), " X2 =", format_combination(w.x2))
print("Y  =", format_combination(w.y), " Z =", format_combination(w.z))
print("ideal:", [format_combination(v) for v in w.h.global_basis(A)])
print("quotient strata", w.quotient.strata_dims, "Engel type:", is_engel_type(w.quotient))

res = build_tower(A, GradedSubspace.zero(A), w.h)
for i, L in enumerate(res.levels):
    print(f"  h_{i}:", [format_combination(v) for v in L.global_basis(A)] or "0")
print("normal flags", res.normal_flags)
