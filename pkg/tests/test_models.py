import pytest

from synspec.algebra import FgAbGroup
from synspec.figures import load_sphere
from synspec.les import COFIBRE, FIBRE, AmbiguousExtension, ExtensionHint, solve_les
from synspec.models import (
    BP,
    FP,
    build_ell,
    build_j,
    build_ko,
    build_ku,
    build_periodic,
    cover_degree,
    moore,
    psi_minus_one,
    psi_scalar,
    wood_ko,
)
from synspec.taumod import ColumnMap, ModelError, column_to_json, validate_model

G = FgAbGroup.parse


def abutment(m, stems):
    return {n: str(m.tau_invert(n)) for n in stems}


# ---------------------------------------------------------------- long exact sequences


def test_fibre_of_zero_map_splits():
    ku = build_ku(BP, 2, (0, 12))
    f = solve_les(ku, ku, {}, form=FIBRE)
    assert f.stem_window == (0, 11)
    assert set(abutment(f, f.stems()).values()) == {"Z"}


def test_fibre_and_cofibre_of_multiplication_by_two():
    ku = build_ku(BP, 2, (0, 12))
    two = {n: ColumnMap(-5, 5, {s: [[2]] for s in range(-5, 6)}) for n in range(0, 13, 2)}
    fib = solve_les(ku, ku, two, form=FIBRE)
    cof = solve_les(ku, ku, two, form=COFIBRE)
    assert abutment(fib, range(12)) == {n: "Z/2" if n % 2 else "0" for n in range(12)}
    assert abutment(cof, range(13)) == {n: "0" if n % 2 else "Z/2" for n in range(13)}
    # the boundary class sits one filtration up and is tau-periodic below it
    assert [str(fib.group(1, s)) for s in range(-2, 4)] == ["Z/2"] * 4 + ["0"] * 2


def test_les_rejects_unknown_form_and_large_window():
    ku = build_ku(BP, 2, (0, 6))
    with pytest.raises(ModelError):
        solve_les(ku, ku, {}, form="sideways")
    with pytest.raises(ModelError):
        solve_les(ku, ku, {}, stems=(0, 6))


# ---------------------------------------------------------------- connective models


def test_ell_is_ku_with_period_q():
    assert cover_degree(3) == 4 and cover_degree(5) == 8
    e = build_ell(BP, 3, (0, 24))
    assert sorted(e.columns) == list(range(0, 25, 4))
    with pytest.raises(ModelError):
        build_ell(BP, 2)


@pytest.mark.parametrize("theory", [FP, BP])
def test_wood_sequence_recovers_ko(cfg, theory):
    key = "wood-Fp" if theory == FP else "wood-BP"
    derived = wood_ko(theory, cfg.boundaries[key], (0, 20))
    direct = build_ko(theory, (0, 20)).normalized()
    for n in range(21):
        assert column_to_json(derived.column(n)) == column_to_json(direct.column(n)), n


def test_ko_homotopy():
    ko = build_ko(BP, (0, 20))
    want = {0: "Z", 1: "Z/2", 2: "Z/2", 3: "0", 4: "Z", 5: "0", 6: "0", 7: "0", 8: "Z"}
    assert abutment(ko, range(9)) == want


def test_adams_operation_on_ko():
    psi = psi_minus_one(build_ko(BP, (0, 24)))
    assert psi[8].mats[8] == [[3**4 - 1]]
    assert psi_scalar(3, 8) == 80 and psi_scalar(3, 5) == 0 and psi_scalar(3, -4) == 8


# ---------------------------------------------------------------- j and J


def test_j_at_two(cfg):
    w = (0, 25)
    j = build_j(BP, 2, cfg.hints_for("j-BP-p2", w), w)
    want = {0: "Z", 1: "Z/2", 2: "Z/2", 3: "Z/8", 4: "0", 5: "0", 6: "0", 7: "Z/16", 8: "Z/2",
            9: "Z/2 + Z/2", 10: "Z/2", 11: "Z/8", 12: "0", 15: "Z/32", 16: "Z/2", 17: "Z/2 + Z/2", 23: "Z/16"}
    assert {n: str(j.tau_invert(n)) for n in want} == want
    assert validate_model(j) == []


def test_j_at_odd_primes():
    j3 = build_j(BP, 3, (), (0, 40))
    assert {n: str(j3.tau_invert(n)) for n in (3, 7, 11, 35, 36)} == {3: "Z/3", 7: "Z/3", 11: "Z/9", 35: "Z/27", 36: "0"}
    j5 = build_j(BP, 5, (), (0, 40))
    assert [n for n in range(1, 41) if not j5.tau_invert(n).is_zero()] == [7, 15, 23, 31, 39]
    assert j5.tau_invert(39) == G("Z/25")


def test_odd_primary_classes_sit_one_filtration_up():
    col = build_j(BP, 3, (), (0, 12)).column(11)
    assert col.group(1) == G("Z/9") and col.group(2).is_zero()


def test_periodic_j_near_zero(cfg):
    w = (-18, 18)
    j = build_periodic("J", FP, 2, w, cfg.hints_for("J-Fp-p2", w))
    want = {-10: "0", -9: "Z/16", -8: "Z/2", -7: "Z/2 + Z/2", -6: "Z/2", -5: "Z/8", -4: "0", -3: "0",
            -2: "0", -1: "Z", 0: "Z/2 + Z", 1: "Z/2 + Z/2", 2: "Z/2"}
    assert abutment(j, want) == want
    jb = build_periodic("J", BP, 2, w, cfg.hints_for("J-BP-p2", w))
    assert jb.tau_invert(0) == G("Z/2 + Z")


def test_j_needs_its_hints():
    with pytest.raises(AmbiguousExtension):
        build_j(BP, 2, (), (0, 12))


@pytest.mark.parametrize("name, family", [("j-BP-p2", "j"), ("j-Fp-p2", "j")])
def test_each_j_hint_is_needed(cfg, name, family):
    w = (0, 12)
    theory = BP if "BP" in name else FP
    rules = cfg.hints[name]
    for drop in rules:
        kept = [h for r in rules if r is not drop for h in r.expand(w)]
        with pytest.raises(AmbiguousExtension):
            build_j(theory, 2, kept, w)


# ---------------------------------------------------------------- the Moore spectrum


def test_moore_homotopy(cfg):
    for theory, name in ((FP, "moore-Fp-p2"), (BP, "moore-BP-p2")):
        m = moore(load_sphere(theory), cfg.hints_for(name, (0, 8)), (0, 8))
        want = {0: "Z/2", 1: "Z/2", 2: "Z/4", 3: "Z/2 + Z/2", 8: "Z/2 + Z/2 + Z/2"}
        assert abutment(m, want) == want, theory


@pytest.mark.parametrize("theory, name", [(FP, "moore-Fp-p2"), (BP, "moore-BP-p2")])
def test_each_moore_hint_is_needed(cfg, theory, name):
    sphere = load_sphere(theory)
    hints = cfg.hints_for(name, (0, 8))
    for drop in hints:
        with pytest.raises(AmbiguousExtension):
            moore(sphere, [h for h in hints if h is not drop], (0, 8))


def test_contradictory_hint_is_an_error():
    with pytest.raises(ModelError):
        moore(load_sphere(FP), [ExtensionHint(2, tau_invert=G("Z/8"))], (0, 8))
