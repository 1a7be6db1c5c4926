import random
from types import SimpleNamespace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import column_values
from synspec.algebra import FgAbGroup
from synspec.exact_couple import random_column
from synspec.models import BP, FP, build_j, build_ko, build_ku, build_periodic
from synspec.taumod import (
    BigradedModule,
    H0Tower,
    LinearLine,
    ModelError,
    TauColumn,
    WindowUnderflow,
    column_from_json,
    column_to_json,
    column_value_at,
    dumps,
    invert_self_map,
    loads,
    mod_tau,
    suspend,
    tau_invert,
    truncate,
    validate_model,
)

Z, Z2 = FgAbGroup((0,)), FgAbGroup((2,))


def values(col, lo, hi):
    return [(s, str(col.group(s))) for s in range(lo, hi + 1)]


# ---------------------------------------------------------------- columns


def test_ku_f2_stem_two_is_a_tower():
    col = build_ku(FP, 2, (0, 10)).column(2)
    assert column_value_at(col, 1) == Z and column_value_at(col, 5) == Z
    assert col.above == H0Tower(2)
    assert (col.s_lo, col.s_hi) == (0, 2)
    assert tau_invert(col) == Z


def test_ku_bp_stem_two():
    col = build_ku(BP, 2, (0, 10)).column(2)
    assert (col.s_lo, col.s_hi) == (-1, 1)
    assert col.group(0) == Z and col.group(1).is_zero() and col.group(-3) == Z


def test_ku_at_three_has_period_four():
    m = build_ku(FP, 3, (0, 10))
    assert [n for n in range(1, 11) if n in m.columns] == [4, 8]


def test_ko_bp_stem_three():
    col = build_ko(BP, (0, 24)).column(3)
    assert values(col, -1, 5) == [(-1, "0"), (0, "0"), (1, "0"), (2, "Z/2"), (3, "Z/2"), (4, "0"), (5, "0")]


def test_ko_f2_low_stems():
    m = build_ko(FP, (0, 24))
    assert values(m.column(1), -1, 3) == [(-1, "Z/2"), (0, "Z/2"), (1, "Z/2"), (2, "0"), (3, "0")]
    assert 5 not in m.columns


def test_stable_value_below_the_window():
    for col in build_ko(BP, (0, 24)).columns.values():
        for s in range(col.s_lo - 4, col.s_lo):
            assert col.group(s) == col.group(col.s_lo)
            assert col.tau(s + 1) == [[1 if i == j else 0 for j in range(col.ngens(s))] for i in range(col.ngens(s))]


# ---------------------------------------------------------------- mod tau


def test_mod_tau_of_ko_bp():
    assert mod_tau(build_ko(BP, (0, 24))).get(4, 0) == (Z, Z2)


def test_mod_tau_of_ku_bp_is_polynomial():
    e2 = mod_tau(build_ku(BP, 2, (0, 20)))
    assert e2.entries == {(2 * k, 0): (Z, FgAbGroup()) for k in range(11)}


# ---------------------------------------------------------------- covers, suspension, localization


def test_vertical_cover_of_ko_bp():
    ko = build_ko(BP, (0, 24))
    c3, c4 = truncate(ko, LinearLine.vertical(), 3), truncate(ko, LinearLine.vertical(), 4)
    assert 3 not in c4.columns
    assert values(c3.column(3), 0, 4) == [(0, "0"), (1, "0"), (2, "Z/2"), (3, "Z/2"), (4, "0")]
    assert all(column_to_json(c3.column(n)) == column_to_json(c4.column(n)) for n in range(24) if n != 3)


@pytest.mark.parametrize("line", [LinearLine.vertical(), LinearLine(0), LinearLine(1), LinearLine("1/3")])
@pytest.mark.parametrize("a, b", [(0, 2), (2, 5), (3, 3)])
def test_covers_compose(line, a, b):
    ko = build_ko(BP, (0, 24))
    twice = truncate(truncate(ko, line, a), line, b)
    once = truncate(ko, line, max(a, b))
    for n in range(25):
        assert values(twice.column(n), -2, 26) == values(once.column(n), -2, 26)


def test_cover_and_truncation_split_the_groups():
    ko = build_ko(BP, (0, 24))
    line = LinearLine(1)
    cov, tr = truncate(ko, line, 2), truncate(ko, line, 2, "truncation")
    for n in range(25):
        for s in range(-2, 26):
            assert cov.group(n, s).length() + tr.group(n, s).length() == ko.group(n, s).length()


def test_truncation_errors():
    with pytest.raises(ModelError):
        LinearLine(-1)
    with pytest.raises(ModelError):
        truncate(build_ko(BP, (0, 4)), LinearLine.vertical(), 0, "sideways")
    empty = BigradedModule(2, BP, (1, 0), {})
    with pytest.raises(WindowUnderflow):
        truncate(empty, LinearLine.vertical(), 0)


def test_suspension_round_trip():
    ko = build_ko(BP, (0, 12))
    back = suspend(suspend(ko, (3, -2)), (-3, 2))
    assert dumps(back) == dumps(ko)
    moved = suspend(ko, (1, 1))
    assert values(moved.column(5), 0, 8) == [(s, str(ko.group(4, s - 1))) for s in range(0, 9)]


def test_inverting_q1_on_ku():
    m = invert_self_map(build_ku(FP, 2, (0, 40)), "q1", window=(-4, 4))
    assert values(m.column(-2), -4, 1) == [(s, "Z") for s in range(-4, 2)]


def test_invert_unknown_operator():
    with pytest.raises(ModelError):
        invert_self_map(build_ku(FP, 2, (0, 8)), "nonsense")


def test_periodic_ko_agrees_with_ko_in_stem_zero():
    # same module; the two constructions store different filtration windows
    a = build_periodic("KO", FP, 2, (-18, 18)).column(0)
    b = build_ko(FP, (0, 24)).column(0)
    assert column_values(a, -2, 4) == column_values(b, -2, 4)
    assert [str(a.group(s)) for s in range(-2, 5)] == ["Z"] * 7
    assert a.tau(0) == [[1]] and a.tau(1) == [[2]] and a.tau(4) == [[2]]


# ---------------------------------------------------------------- validation and serialization


def test_shipped_models_validate():
    for m in (build_ku(BP, 2, (0, 12)), build_ko(FP, (0, 20)), build_ko(BP, (0, 20)), build_j(BP, 3, (), (0, 12))):
        assert validate_model(m) == []


def test_ill_defined_tau_map_is_one_violation():
    bad = TauColumn(0, 0, 1, {0: FgAbGroup((4,)), 1: Z2}, {1: SimpleNamespace(matrix=((1,),))})
    m = BigradedModule(2, BP, (0, 0), {0: bad})
    problems = validate_model(m)
    assert len(problems) == 1 and "ill-defined" in problems[0]


def test_mislabelled_column_is_reported():
    col = build_ko(BP, (0, 4)).column(0)
    assert any("labelled" in p for p in validate_model(BigradedModule(2, BP, (0, 1), {1: col})))


def test_model_json_round_trip():
    for m in (build_ko(BP, (0, 20)), build_ku(FP, 3, (0, 12)), build_j(BP, 3, (), (0, 16))):
        text = dumps(m)
        assert dumps(loads(text)) == text


def test_loads_rejects_garbage():
    with pytest.raises((ValueError, KeyError)):
        loads('{"format": 99}')


@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_random_column_json_round_trip(seed, p):
    col = random_column(random.Random(seed), p)
    again = column_from_json(column_to_json(col))
    assert column_values(again, col.s_lo - 2, col.s_hi + 2) == column_values(col, col.s_lo - 2, col.s_hi + 2)


@given(st.integers(0, 10**6))
def test_normal_form_keeps_the_groups(seed):
    col = random_column(random.Random(seed), 2)
    norm = col.normalized(2)
    lo, hi = col.s_lo - 2, col.s_hi + 2
    assert values(norm, lo, hi) == values(col, lo, hi)
    assert norm.violations() == []
