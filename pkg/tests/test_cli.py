import json
import shutil

import pytest
from click.testing import CliRunner

from synspec.cli import main
from synspec.figures import FIGURES, fixtures_dir
from synspec.taumod import loads


@pytest.fixture
def run(tmp_path, monkeypatch):
    # verify --fixtures writes the variable; an empty value means the shipped set and is restored afterwards
    monkeypatch.setenv("SYNSPEC_FIXTURES", "")
    monkeypatch.chdir(tmp_path)

    def invoke(*args):
        return CliRunner().invoke(main, [str(a) for a in args])

    return invoke


def test_build_single_stem(run, tmp_path):
    res = run("build", "ku", "--theory", "bp", "--stems", "0..0", "--out", "out")
    assert res.exit_code == 0, res.output
    path = tmp_path / "out" / "ku-bp-p2-stems0..0.json"
    assert res.stdout.strip() == str(path.relative_to(tmp_path))
    m = loads(path.read_text())
    assert sorted(m.columns) == [0]


def test_build_is_byte_deterministic(run, tmp_path):
    for out in ("a", "b"):
        assert run("build", "ko", "--theory", "f2", "--stems", "0..12", "--out", out).exit_code == 0
    name = "ko-f2-p2-stems0..12.json"
    assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_build_j_uses_builtin_hints(run, tmp_path):
    res = run("build", "j", "--prime", "2", "--theory", "bp", "--stems", "0..12", "--out", ".")
    assert res.exit_code == 0, res.output
    m = loads((tmp_path / "j-bp-p2-stems0..12.json").read_text())
    assert str(m.tau_invert(3)) == "Z/8"


@pytest.mark.parametrize("args", [
    ("build", "ko", "--prime", "3"),
    ("build", "ku", "--theory", "f3", "--prime", "2"),
    ("build", "ku", "--stems", "5..1"),
    ("build", "ku", "--stems", "five"),
    ("build", "hfpss_ko", "--theory", "f2"),
])
def test_configuration_problems_exit_2(run, args):
    assert run(*args).exit_code == 2


def test_bad_hint_file_exits_2(run, tmp_path):
    bad = tmp_path / "h.toml"
    bad.write_text('[hints]\nx = [{ stem = 1 }]\n')
    assert run("build", "ku", "--hints", bad).exit_code == 2


def test_missing_sphere_fixture_exits_3(run, tmp_path, monkeypatch):
    (tmp_path / "empty").mkdir()
    monkeypatch.setenv("SYNSPEC_FIXTURES", str(tmp_path / "empty"))
    res = run("build", "moore_sphere", "--theory", "bp")
    assert res.exit_code == 3 and "missing fixture" in res.output


def test_chart_outputs(run, tmp_path):
    assert run("build", "ko", "--theory", "bp", "--stems", "0..9", "--out", ".").exit_code == 0
    model = "ko-bp-p2-stems0..9.json"
    for fmt, ext in (("text", "txt"), ("svg", "svg"), ("json", None)):
        res = run("chart", model, "--stems", "0..8", "--filtrations", "0..6", "--format", fmt, "--out", fmt)
        assert res.exit_code == 0, res.output
        doc = json.loads((tmp_path / fmt / "ko-bp-p2-stems0..9-E2.json").read_text())
        assert doc["window"] == {"stems": [0, 8], "filtrations": [0, 6]}
        if ext:
            assert (tmp_path / fmt / f"ko-bp-p2-stems0..9-E2.{ext}").exists()
    assert (tmp_path / "text" / "ko-bp-p2-stems0..9-E2.json").read_bytes() == \
        (tmp_path / "svg" / "ko-bp-p2-stems0..9-E2.json").read_bytes()


def test_chart_of_an_empty_region(run, tmp_path):
    run("build", "ko", "--theory", "f2", "--stems", "0..8", "--out", ".")
    res = run("chart", "ko-f2-p2-stems0..8.json", "--stems", "5..7", "--page", "Einf")
    assert res.exit_code == 0
    doc = json.loads((tmp_path / "ko-f2-p2-stems0..8-Einf.json").read_text())
    assert doc["dots"] == [] and doc["extensions"] == []


def test_chart_errors(run, tmp_path):
    (tmp_path / "junk.json").write_text("{}")
    assert run("chart", "junk.json").exit_code == 2
    run("build", "ku", "--stems", "0..2", "--out", ".")
    assert run("chart", "ku-bp-p2-stems0..2.json", "--filtrations", "3..2").exit_code == 2


def test_verify_single_check(run):
    res = run("verify", "--only", "detection")
    assert res.exit_code == 0
    assert res.stdout.splitlines()[0] == "PASS detection: detection pipeline"
    again = run("verify", "--only", "detection")
    assert again.stdout == res.stdout


def test_verify_with_missing_fixtures_exits_3(run, tmp_path):
    (tmp_path / "empty").mkdir()
    res = run("verify", "--only", "ko", "--fixtures", tmp_path / "empty")
    assert res.exit_code == 3
    assert res.stdout.startswith("MISSING ko:")


def test_verify_with_a_corrupted_fixture_exits_1(run, tmp_path):
    bad = tmp_path / "bad"
    shutil.copytree(fixtures_dir(), bad)
    fig = FIGURES["ko-ass-p2"]
    doc = json.loads((bad / fig.fixture_name).read_text())
    doc["dots"] = doc["dots"][1:]
    (bad / fig.fixture_name).write_text(json.dumps(doc))
    res = run("verify", "--only", "ko", "--fixtures", bad)
    assert res.exit_code == 1
    assert res.stdout.startswith("FAIL ko:") and "ko-ass-p2" in res.stdout


def test_detect_csv_and_json(run):
    res = run("detect", "--prime", "3", "--stems", "0..12")
    assert res.exit_code == 0, res.output
    lines = res.stdout.splitlines()
    assert lines[0] == "stem,group,family,provenance,checks"
    assert [line.split(",")[0] for line in lines[1:]] == ["0", "3", "7", "11"]
    res = run("detect", "--prime", "2", "--stems", "0..16", "--format", "json")
    assert res.exit_code == 0, res.output
    doc = json.loads(res.stdout)
    assert doc["surjectivity"]["ok"] and [r["stem"] for r in doc["surjectivity"]["stems"]] == [8, 16]
    assert {r["stem"]: r["label"] for r in doc["table"]}[7] == "alpha_1"
