import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from synspec.algebra import FgAbGroup
from synspec.exact_couple import (
    brute_force_exact_couple,
    chart_summary,
    column_to_filtered_complex,
    dictionary_mismatches,
    dictionary_oracle,
    random_column,
)
from synspec.models import BP, FP, build_j, build_ko
from synspec.presentations import ZTAU_RING, PresentedColumn
from synspec.sseq import Relation, check_relation, chart_json, compare_charts, dumps_chart, gamma_ss, page
from synspec.taumod import BigradedModule

Z = FgAbGroup((0,))


def single(col, p=2):
    return BigradedModule(p, FP, (col.stem, col.stem + 1), {col.stem: col})


@pytest.fixture(scope="module")
def two_tau_squared():
    # Z[tau] g with g in filtration 2, modulo 2 tau^2 g
    return PresentedColumn(0, ZTAU_RING, 2, [("g", 2)], [(0, {0: 2})]).column()


def test_tau_torsion_gives_a_long_differential(two_tau_squared):
    c = gamma_ss(single(two_tau_squared), stems=(0, 1))
    assert c.e2.entries == {(0, 2): (Z, FgAbGroup()), (1, -1): (FgAbGroup(), Z)}
    [d] = c.differentials
    assert (d.source, d.target, d.r, d.rank) == ((1, -1), (0, 2), 3, 1)
    assert c.e_infty == {(0, 2): FgAbGroup((2,))}


def test_pages(two_tau_squared):
    c = gamma_ss(single(two_tau_squared), stems=(0, 1))
    assert page(c, 2) == c.e2.entries
    assert page(c, "inf") == {(0, 2): (FgAbGroup((2,)), FgAbGroup())}
    with pytest.raises(ValueError):
        page(c, 1)


def test_filtered_complex_route_on_the_same_column(two_tau_squared):
    oracle = brute_force_exact_couple(column_to_filtered_complex(two_tau_squared), 0, 2)
    assert chart_summary(oracle) == chart_summary(gamma_ss(single(two_tau_squared), stems=(0, 1)))


@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_dictionary_agrees_with_filtered_complexes(seed, p):
    col = random_column(random.Random(seed), p)
    assert dictionary_mismatches(col, p) == []


def test_dictionary_oracle_batch():
    assert dictionary_oracle(seed=7, count=40) == []
    assert dictionary_oracle(seed=7, count=20, p=3) == []


@given(st.integers(0, 10**6))
def test_einfty_orders_multiply_to_the_abutment(seed):
    col = random_column(random.Random(seed), 2)
    stable = col.group(col.s_lo - 1).p_primary(2)  # charts are 2-local
    c = gamma_ss(single(col), stems=(0, 1))
    if stable.is_finite():
        total = 1
        for (n, _), g in c.e_infty.items():
            if n == 0:
                total *= g.order()
        assert total == stable.order()


@given(st.integers(0, 10**6))
def test_differentials_run_from_tau_torsion_to_the_column(seed):
    col = random_column(random.Random(seed), 2)
    c = gamma_ss(single(col), stems=(0, 1))
    for d in c.differentials:
        assert d.source[0] == 1 and d.target == (0, d.source[1] + d.r)
        assert d.r >= 2


# ---------------------------------------------------------------- whole models


def test_ko_charts():
    f2 = gamma_ss(build_ko(FP, (0, 21)), (0, 20), (0, 20))
    assert f2.differentials == []
    bp = gamma_ss(build_ko(BP, (0, 21)), (0, 20), (0, 20))
    got = {(d.source, d.r) for d in bp.differentials}
    assert got == {((8 * k + 4 + i, i), 3) for k in range(3) for i in range(17) if 8 * k + 4 + i <= 20}
    # eta^3 is hit by the first d3 while eta^2 survives
    assert (3, 3) in bp.e2.entries and (3, 3) not in bp.e_infty and (2, 2) in bp.e_infty


def test_eta_relation_is_exotic(cfg):
    w = (0, 13)
    j = build_j(FP, 2, cfg.hints_for("j-Fp-p2", w), w)
    c = gamma_ss(j, (0, 24), (0, 12))
    [rel] = cfg.relations_for("eta-j-Fp-p2", (0, 4))
    ext = check_relation(c, j, rel)
    assert (ext.source, ext.target, ext.op, ext.exotic) == ((2, 2), (3, 6), "eta", True)


def test_relation_errors(cfg):
    w = (0, 13)
    j = build_j(FP, 2, cfg.hints_for("j-Fp-p2", w), w)
    c = gamma_ss(j, (0, 24), (0, 12))
    with pytest.raises(ValueError, match="not detected"):
        check_relation(c, j, Relation("missing", "eta", (5, 5), 1, (6, 6)))
    with pytest.raises(ValueError, match="filtration"):
        check_relation(c, j, Relation("wrong jump", "eta", (2, 2), 4, (3, 4), (3, 5)))


# ---------------------------------------------------------------- chart documents


def test_chart_documents_are_deterministic():
    a = dumps_chart(gamma_ss(build_ko(BP, (0, 13)), (0, 12), (0, 12)))
    b = dumps_chart(gamma_ss(build_ko(BP, (0, 13)), (0, 12), (0, 12)))
    assert a == b


def test_compare_charts_reports_changes():
    doc = chart_json(gamma_ss(build_ko(BP, (0, 13)), (0, 12), (0, 12)))
    assert not compare_charts(doc, dict(doc, provenance="elsewhere"))
    changed = dict(doc, dots=[dict(d, group=[4]) if (d["stem"], d["filtration"]) == (1, 1) else d
                              for d in doc["dots"]])
    report = compare_charts(doc, changed)
    assert report and len(report.entries) == 1 and "(1, 1" in report.entries[0]


def test_compare_charts_can_ignore_colors():
    doc = chart_json(gamma_ss(build_ko(BP, (0, 13)), (0, 12), (0, 12)))
    recolored = dict(doc, dots=[dict(d, color="red") for d in doc["dots"]])
    assert compare_charts(doc, recolored)
    assert not compare_charts(doc, recolored, ignore_colors=True)


# ---------------------------------------------------------------- laws and spec examples


def test_tau_free_modules_have_no_differentials():
    from synspec.models import build_ku

    c = gamma_ss(build_ku(BP, 2, (0, 13)), (0, 12), (0, 12))
    assert c.differentials == []
    assert all(page(c, r) == page(c, 2) for r in (3, 4, 9))


def test_ko_collapses_at_e4():
    c = gamma_ss(build_ko(BP, (0, 21)), (0, 20), (0, 20))
    assert c.max_r == 3 and page(c, 4) == page(c, "inf")


def test_stem_seven_of_j_is_one_tower(cfg):
    from synspec.figures import FIGURES, engine_model, figure_chart

    fig = FIGURES["j-mass-p2-einf"]
    inf = page(figure_chart(fig, engine_model(fig)), "inf")
    assert {k: str(v[0]) for k, v in inf.items() if k[0] == 7} == {(7, s): "Z/2" for s in range(5, 9)}


def test_four_nu_marker_in_the_novikov_chart():
    from synspec.figures import FIGURES, engine_model, figure_chart

    fig = FIGURES["j-manss-p2-einf"]
    c = figure_chart(fig, engine_model(fig))
    assert [(e.source, e.target, e.op, e.exotic) for e in c.extensions if e.source[0] == 3] == [
        ((3, 1), (3, 3), "2", True)]


def test_eta_on_the_unit_is_not_exotic():
    ko = build_ko(FP, (0, 9))
    ext = check_relation(gamma_ss(ko, (0, 8), (0, 8)), ko, Relation("eta 1", "eta", (0, 0), 1, (1, 1)))
    assert not ext.exotic


def killed_mod_tau(col, u, j):
    """Elements of G_u killed by tau^j, modulo tau G_(u+1), as a lattice."""
    return col.kernel_lattice(u, j) + col.image_lattice(u, 1)


@given(st.integers(0, 10**6))
def test_differential_length_law(seed):
    col = random_column(random.Random(seed), 2)
    c = gamma_ss(single(col), stems=(0, 1))
    for d in c.differentials:
        u = d.target[1]
        # some lift of a hit class dies under tau^(r-1), none under tau^(r-2)
        assert not killed_mod_tau(col, u, d.r - 1) <= killed_mod_tau(col, u, d.r - 2)


@given(st.integers(0, 10**6))
def test_permanent_cycles_never_support_differentials(seed):
    col = random_column(random.Random(seed), 2)
    c = gamma_ss(single(col), stems=(0, 1))
    for d in c.differentials:
        coker, ker = c.e2.entries[d.source]
        assert not ker.is_zero() and d.source[0] == 1


def test_oracle_on_a_one_stage_filtration():
    from synspec.exact_couple import FilteredComplexFixture

    c = brute_force_exact_couple(FilteredComplexFixture(((0,), (), ()), ((), (), ())))
    assert c.e2.entries == {(0, 0): (Z, FgAbGroup())} and c.differentials == [] and c.e_infty == {(0, 0): Z}


def test_oracle_on_a_tau_tower():
    # tau multiplies by 2 from filtration 1 to filtration 0
    col = PresentedColumn(0, ZTAU_RING, 2, [("g", 1), ("h", 0)], [(0, {0: 1, 1: -2})]).column()
    assert col.tau(1) == [[2]]
    oracle = brute_force_exact_couple(column_to_filtered_complex(col), 0, 2)
    assert chart_summary(oracle) == chart_summary(gamma_ss(single(col), stems=(0, 1)))
