from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carnot_mcp.algebra import AlgebraError, GradedSubspace, bracket, is_engel_type, is_graded_ideal
from carnot_mcp.catalog import catalog_get, catalog_list
from carnot_mcp.families import engel, filiform, free_nilpotent, free_step3_dimension, heisenberg, witt_dimension
from carnot_mcp.quotients import (CertificateError, HyperplaneCertificate, build_engel_ideal, build_tower,
                                  candidate_covectors, generic_dim_bound, h2_of_h3, h3_of_cert, pairing_matrix,
                                  search_martinet_certificate, verify_martinet_certificate)
from carnot_mcp.rational import span_basis

RED = [n for n, e in catalog_list() if e == "red"]
STEP3_GREEN = [n for n, e in catalog_list() if catalog_get(n).algebra.step == 3 and e != "red"]


def cert(*xs):
    return HyperplaneCertificate.of(xs)


def test_engel_certificate():
    E = engel()
    assert h2_of_h3(E, cert(1)) == ()
    assert verify_martinet_certificate(E, cert(1))
    assert search_martinet_certificate(E) == cert(1)


def test_heisenberg_is_rejected():
    with pytest.raises(AlgebraError):
        verify_martinet_certificate(heisenberg(), cert(1))
    with pytest.raises(AlgebraError):
        h2_of_h3(heisenberg(), cert(1))


def test_n633_h2_is_a_line():
    A = catalog_get("N_6_3_3").algebra
    assert h2_of_h3(A, cert(1)) == ((0, 1),)  # X5 in the shipped basis


def test_free_rank2_step3_h2_has_codimension_one():
    A = catalog_get("N_5_2_3").algebra
    h2 = h2_of_h3(A, cert(1, 0))
    assert A.stratum_dim(2) - len(h2) == 1
    assert h3_of_cert(A, cert(1, 0)) == ((0, 1),)


def test_wrong_length_certificate():
    with pytest.raises(CertificateError):
        verify_martinet_certificate(engel(), cert(1, 0))


@pytest.mark.parametrize("name", STEP3_GREEN)
def test_no_certificate_for_non_red_step3(name):
    A = catalog_get(name).algebra
    assert search_martinet_certificate(A, bound=3) is None
    for c in candidate_covectors(A.stratum_dim(3), 3):
        assert not verify_martinet_certificate(A, c)


@pytest.mark.parametrize("name", RED)
def test_red_search_is_consistent_with_tabulated_subspaces(name):
    rec = catalog_get(name)
    found = search_martinet_certificate(rec.algebra, bound=1)
    assert found is not None
    # any verifying certificate gives h2 of codimension one; the tabulated one gives the tabulated spans
    assert rec.algebra.stratum_dim(2) - len(h2_of_h3(rec.algebra, found)) == 1
    assert h2_of_h3(rec.algebra, rec.certificate) == rec.expected_h2()
    assert h3_of_cert(rec.algebra, rec.certificate) == rec.expected_h3()


def test_candidate_order_starts_with_units():
    first = [c.lam for c in candidate_covectors(3, 1)][:3]
    assert first == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    assert len(list(candidate_covectors(2, 1))) == 4  # (1,0) (0,1) (1,1) (1,-1)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(RED), st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(lambda q: q != 0))
def test_h2_is_scale_invariant(name, q):
    rec = catalog_get(name)
    lam = rec.certificate.lam
    scaled = HyperplaneCertificate(tuple(q * x for x in lam))
    assert h2_of_h3(rec.algebra, scaled) == h2_of_h3(rec.algebra, rec.certificate)


def test_engel_ideal_of_engel_is_zero():
    w = build_engel_ideal(engel(), cert(1))
    assert w.h.dim == 0
    assert w.quotient.table == engel().table or is_engel_type(w.quotient)


def test_filiform_dim5_ideal_is_a_line():
    w = build_engel_ideal(catalog_get("N_5_2_1").algebra, cert(1))
    assert w.h.dim == 1
    assert w.quotient.strata_dims == (2, 1, 1)


def _check_witness(A, c):
    w = build_engel_ideal(A, c)
    assert is_graded_ideal(A, w.h)
    assert is_engel_type(w.quotient)
    h2 = h2_of_h3(A, c)
    for i, a in enumerate(w.kerP):
        for b in w.kerP[i + 1:]:
            v = A.restrict(2, bracket(A, a, b))
            assert len(span_basis(list(h2) + [v], A.stratum_dim(2))) == len(h2)
    yp = bracket(A, w.x1, w.x2)
    assert yp == w.y and bracket(A, w.x1, yp) == w.z
    return w


@pytest.mark.parametrize("name", RED)
def test_engel_ideal_for_red_entries(name):
    rec = catalog_get(name)
    _check_witness(rec.algebra, rec.certificate)


@pytest.mark.parametrize("rank,step", [(2, 3), (2, 4), (3, 3), (2, 5)])
def test_engel_ideal_for_free_algebras(rank, step):
    A = free_nilpotent(rank, step)
    c = search_martinet_certificate(A, bound=1)
    assert c is not None
    _check_witness(A, c)


@pytest.mark.parametrize("step", [3, 4, 5, 6])
def test_filiform_family(step):
    A = filiform(step)
    _check_witness(A, cert(1))


def test_tower_engel_repetitions():
    E = engel()
    h = GradedSubspace.zero(E)
    ht = GradedSubspace.from_vectors(E, [(0, 0, 1, 0)])
    res = build_tower(E, h, ht)
    dims = [L.dim for L in res.levels]
    assert dims == [0, 0, 1, 1]
    assert res.levels[2] == ht and res.levels[3] == ht
    assert res.ok


def test_tower_constant_when_equal():
    A = catalog_get("N_6_3_3").algebra
    h = GradedSubspace.from_vectors(A, [(0, 0, 1, 0, 0, 0), (0, 0, 0, 0, 1, 0)])
    res = build_tower(A, h, h)
    assert all(L == h for L in res.levels)


def test_tower_free_rank2_step3():
    A = free_nilpotent(2, 3)
    w = build_engel_ideal(A, search_martinet_certificate(A))
    res = build_tower(A, GradedSubspace.zero(A), w.h)
    assert res.ok
    assert res.levels[0].dim == 0 and res.levels[-1] == w.h
    dims = [L.dim for L in res.levels]
    assert dims == sorted(dims)


def test_tower_rejects_non_nested():
    E = engel()
    with pytest.raises(AlgebraError):
        build_tower(E, GradedSubspace.from_vectors(E, [(0, 0, 0, 1)]), GradedSubspace.zero(E))


def test_generic_dim_bound_values():
    assert generic_dim_bound(2) == 4
    assert generic_dim_bound(3) == 13
    assert generic_dim_bound(4) == 29
    with pytest.raises(ValueError):
        generic_dim_bound(1)


@pytest.mark.parametrize("k", range(2, 7))
def test_generic_bound_is_free_dimension_minus_one(k):
    witt = sum(witt_dimension(k, d) for d in (1, 2, 3))
    assert generic_dim_bound(k) + 1 == witt == free_step3_dimension(k)


def test_free_nilpotent_dimensions_follow_witt():
    for rank, step in [(2, 4), (3, 3), (2, 5)]:
        A = free_nilpotent(rank, step)
        assert A.strata_dims == tuple(witt_dimension(rank, d) for d in range(1, step + 1))


def test_pairing_matrix_of_engel():
    assert pairing_matrix(engel(), cert(1)) == ((Fraction(1),), (Fraction(0),))
