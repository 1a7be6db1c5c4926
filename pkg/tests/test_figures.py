import dataclasses
import json
import shutil

import pytest

from synspec import reference
from synspec.figures import (
    FIGURES,
    SPHERE_FIXTURES,
    MissingFixture,
    engine_model,
    figure_json,
    fixtures_dir,
    load_fixture,
    load_sphere,
    reference_model,
    verify_figure,
)
from synspec.models import BP, FP
from synspec.sseq import compare_charts
from synspec.taumod import dumps

KEYS = sorted(FIGURES)


def test_registry():
    assert len(FIGURES) == 16
    assert all((fixtures_dir() / f.fixture_name).exists() for f in FIGURES.values())
    assert {f.page for f in FIGURES.values()} == {"E2", "Einf"}


@pytest.mark.parametrize("key", KEYS)
def test_engine_matches_reference_model(key):
    fig = FIGURES[key]
    eng, ref = engine_model(fig), reference_model(fig)
    lo, hi = fig.filtrations
    for n in range(fig.stems[0], fig.stems[1] + 1):
        a, b = eng.column(n), ref.column(n)
        assert [str(a.group(s)) for s in range(lo - 1, hi + 2)] == [str(b.group(s)) for s in range(lo - 1, hi + 2)], n
        assert eng.tau_invert(n) == ref.tau_invert(n), n


@pytest.mark.parametrize("key", KEYS)
def test_engine_matches_fixture(key):
    report = verify_figure(FIGURES[key])
    assert not report, str(report)


@pytest.mark.parametrize("key", KEYS)
def test_fixture_is_the_reference_chart(key):
    fig = FIGURES[key]
    doc = load_fixture(fig)
    assert "provenance" in doc
    assert not compare_charts(figure_json(fig, reference_model(fig)), doc, fig.stems, fig.filtrations, fig.page)


def without_notes(m):
    return dumps(dataclasses.replace(m, notes=()))


def test_sphere_fixtures_match_reference():
    assert without_notes(load_sphere(FP)) == without_notes(reference.sphere_ass_p2())
    assert without_notes(load_sphere(BP)) == without_notes(reference.sphere_anss_p2())


def test_corrupted_fixture_reports_a_diff(tmp_path):
    fig = FIGURES["ko-anss-p2"]
    doc = load_fixture(fig)
    doc["dots"] = [d for d in doc["dots"] if (d["stem"], d["filtration"]) != (8, 0)]
    doc["differentials"] = doc["differentials"][1:]
    (tmp_path / fig.fixture_name).write_text(json.dumps(doc), encoding="utf-8")
    report = verify_figure(fig, tmp_path)
    assert len(report.entries) == 2
    assert any("(8, 0" in e for e in report.entries)


def test_missing_fixture(tmp_path, monkeypatch):
    shipped = fixtures_dir()
    with pytest.raises(MissingFixture):
        verify_figure(FIGURES["ko-ass-p2"], tmp_path)
    monkeypatch.setenv("SYNSPEC_FIXTURES", str(tmp_path))
    assert fixtures_dir() == tmp_path
    with pytest.raises(MissingFixture):
        load_sphere(FP)
    shutil.copy(shipped / SPHERE_FIXTURES[FP], tmp_path)
    assert without_notes(load_sphere(FP)) == without_notes(reference.sphere_ass_p2())
