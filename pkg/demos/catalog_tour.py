"""
A tour of the shipped catalog
=============================

Every shipped algebra gets classified. For each red entry we print the
hyperplane that certifies it, and for each green step-3 entry the part of
the Goh search that came back empty.
"""

from carnot_mcp import catalog_get, catalog_list, classify
from carnot_mcp.catalog import format_combination

print(f"{'name':<14}{'strata':<12}{'expected':<10}{'verdict':<20}evidence")
for name, expected in catalog_list():
    rec = catalog_get(name)
    v = classify(rec)
    strata = " ".join(map(str, rec.algebra.strata_dims))
    print(f"{name:<14}{strata:<12}{expected:<10}{v.color:<20}{v.evidence}")

# The red verdicts come with a covector on g_3; its kernel and the induced
# subspace of g_2 are what the Engel quotient is built from.
print()
for name, expected in catalog_list():
    v = classify(catalog_get(name))
    if v.color == "red":
        print(name, "lambda =", [str(x) for x in v.certificate.lam], "|", v.notes[-1])

# The daggered entry has abnormal covectors passing Goh, but every one of
# them fails the Legendre test.
rec = catalog_get("N_6_3_1")
v = classify(rec)
lam0, u = v.goh_only_witness
print()
print("N_6_3_1: Goh-only witness u =", [str(x) for x in u], "lambda0 =", format_combination(lam0).replace("X", "X*"))
for note in v.notes:
    print("  note:", note)
