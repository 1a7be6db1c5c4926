import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import det
from synspec.algebra import (
    AbHom,
    AlgebraError,
    FgAbGroup,
    Lattice,
    eigen_order,
    group_from_presentation,
    hom_parts,
    matmul,
    padic_valuation,
    smith_normal_form,
    subquotient,
)

Z = FgAbGroup((0,))


def cyc(*ds):
    return FgAbGroup(ds)


# ---------------------------------------------------------------- Smith normal form


def test_snf_small_example():
    u, d, v = smith_normal_form([[2, 4], [6, 8]])
    assert d == [[2, 0], [0, 4]]
    assert matmul(matmul(u, [[2, 4], [6, 8]]), v) == d


def test_snf_zero_matrix():
    assert smith_normal_form([[0]])[1] == [[0]]


def minors_gcd(m, k):
    rows, cols = len(m), len(m[0])
    g = 0
    for r in itertools.combinations(range(rows), k):
        for c in itertools.combinations(range(cols), k):
            g = math.gcd(g, det([[m[i][j] for j in c] for i in r]))
    return g


matrices = st.integers(1, 8).flatmap(
    lambda r: st.integers(1, 8).flatmap(
        lambda c: st.lists(st.lists(st.integers(-30, 30), min_size=c, max_size=c), min_size=r, max_size=r)))


@given(matrices)
def test_snf_round_trip(m):
    u, d, v = smith_normal_form(m)
    assert matmul(matmul(u, m), v) == d
    assert abs(det(u)) == 1 and abs(det(v)) == 1
    diag = [d[i][i] for i in range(min(len(m), len(m[0])))]
    assert all(x >= 0 for x in diag)
    assert all(d[i][j] == 0 for i in range(len(m)) for j in range(len(m[0])) if i != j)
    for a, b in zip(diag, diag[1:]):
        assert b % a == 0 if a else b == 0


small = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r)))


@given(small)
def test_snf_matches_determinantal_divisors(m):
    # d_1 ... d_k is the gcd of the k x k minors
    diag = [smith_normal_form(m)[1][i][i] for i in range(min(len(m), len(m[0])))]
    prod = 1
    for k, d in enumerate(diag, start=1):
        prod *= d
        assert prod == minors_gcd(m, k)


# ---------------------------------------------------------------- groups


@pytest.mark.parametrize("rels, n, want", [
    ([], 1, "Z"),
    ([[1]], 1, "0"),
    ([[2, 0]], 2, "Z/2 + Z"),
    ([[2, 4], [6, 8]], 2, "Z/2 + Z/4"),
    ([[0, 0]], 2, "Z + Z"),
])
def test_group_from_presentation(rels, n, want):
    assert str(group_from_presentation(rels, n)) == want


def test_group_parse_round_trip():
    for text in ("0", "Z", "Z/2 + Z/4 + Z", "Z/3"):
        assert str(FgAbGroup.parse(text)) == text
    assert FgAbGroup.parse("(Z/2)^2") == cyc(2, 2)


@pytest.mark.parametrize("bad", [(1,), (4, 2), (0, 2), (-3,)])
def test_group_rejects_non_normal_factors(bad):
    with pytest.raises(AlgebraError):
        FgAbGroup(bad)


def test_group_invariants():
    g = cyc(2, 12, 0)
    assert g.rank == 1 and not g.is_finite() and g.order() == 0
    assert g.torsion_order() == 24
    assert g.p_primary(2) == cyc(2, 4, 0)
    assert g.length() == 4


def test_subquotient_requires_containment():
    with pytest.raises(AlgebraError):
        subquotient(Lattice.span([[2]], 1), Lattice.full(1))


# ---------------------------------------------------------------- homomorphisms


@pytest.mark.parametrize("f, parts", [
    (AbHom(Z, Z, ((2,),)), (0, "Z", "Z/2")),
    (AbHom(cyc(4), cyc(2), ((0,),)), ("Z/4", 0, "Z/2")),
    (AbHom(Z, cyc(4), ((2,),)), ("Z", "Z/2", "Z/2")),
])
def test_hom_parts_examples(f, parts):
    got = hom_parts(f)
    assert tuple(str(got[k]) for k in ("kernel", "image", "cokernel")) == tuple(str(x) for x in parts)


def test_ill_defined_hom_is_rejected():
    with pytest.raises(AlgebraError):
        AbHom(cyc(2), cyc(4), ((1,),))


def elements(g):
    return itertools.product(*(range(d) for d in g.invariant_factors))


finite_groups = st.lists(st.sampled_from([2, 3, 4, 6, 8]), min_size=0, max_size=3).map(
    lambda fs: group_from_presentation([[d if i == j else 0 for j in range(len(fs))] for i, d in enumerate(fs)],
                                       len(fs)))


@given(finite_groups, finite_groups, st.data())
def test_hom_parts_counts_match_enumeration(src, tgt, data):
    # a random well-defined map: each generator goes to an element killed by its order
    rows = []
    for d in src.invariant_factors:
        ok = [x for x in elements(tgt) if tgt.is_zero_element([d * v for v in x])]
        rows.append(data.draw(st.sampled_from(ok)))
    f = AbHom(src, tgt, tuple(tuple(r) for r in rows))
    parts = hom_parts(f)
    images = [f(x) for x in elements(src)]
    zero = tgt.reduce([0] * tgt.ngens)
    assert parts["kernel"].order() == sum(1 for y in images if y == zero)
    assert parts["image"].order() == len(set(images))
    assert parts["cokernel"].order() * parts["image"].order() == tgt.order()
    # the canonical maps are exact at both ends
    assert parts["kernel_inclusion"].compose(f).is_zero()
    assert f.compose(parts["cokernel_projection"]).is_zero()


# ---------------------------------------------------------------- valuations


def test_padic_valuation_example():
    assert padic_valuation(2, 3**16 - 1) == 6


def test_padic_valuation_errors():
    with pytest.raises(AlgebraError):
        padic_valuation(2, 0)
    with pytest.raises(AlgebraError):
        padic_valuation(1, 5)


@given(st.integers(1, 64))
def test_eigen_order_at_two(m):
    # lifting the exponent: ord_2(3^m - 1) is 1 for odd m and ord_2(m) + 2 otherwise
    want = 1 if m % 2 else padic_valuation(2, m) + 2
    assert eigen_order(2, 3, m) == want


@given(st.sampled_from([3, 5]), st.integers(1, 40))
def test_eigen_order_at_odd_primes(p, k):
    assert eigen_order(p, p + 1, k) == padic_valuation(p, k) + 1
