import pytest

from synspec.algebra import FgAbGroup
from synspec.config import ConfigError, builtin_config, load_config, parse_config


def test_builtin_tables_are_present(cfg):
    assert {"wood-Fp", "wood-BP"} <= set(cfg.boundaries)
    assert cfg.operators["psi3"].k == 3
    assert {"j-BP-p2", "moore-BP-p2", "J-Fp-p2"} <= set(cfg.hints)


def test_periodic_hint_expansion(cfg):
    hints = cfg.hints_for("j-BP-p2", (0, 20))
    assert sorted((h.stem, h.tau_invert is not None) for h in hints) == [
        (3, False), (9, True), (11, False), (17, True), (19, False)]
    assert all(h.tau_invert == FgAbGroup((2, 2)) for h in hints if h.tau_invert)
    # without bounds on k the pattern extends to negative stems
    assert [h.stem for h in cfg.hints_for("J-Fp-p2", (-18, 0))] == [-15, -7]


def test_single_stem_hints(cfg):
    assert [h.stem for h in cfg.hints_for("moore-BP-p2", (0, 8))] == [2, 6, 8]
    assert [h.stem for h in cfg.hints_for("moore-BP-p2", (0, 5))] == [2]


def test_relation_expansion(cfg):
    rels = cfg.relations_for("eta-j-Fp-p2", (0, 20))
    assert [(r.x, r.y, r.y_multiple_at, r.c) for r in rels] == [
        ((2, 2), (3, 4), (3, 6), 4), ((10, 6), (11, 8), (11, 10), 4), ((18, 10), (19, 12), (19, 14), 4)]


def test_unknown_and_empty_names(cfg):
    assert cfg.hints_for(None, (0, 8)) == [] and cfg.relations_for(None, (0, 8)) == []
    with pytest.raises(ConfigError):
        cfg.hints_for("no-such-set", (0, 8))
    with pytest.raises(ConfigError):
        cfg.relations_for("no-such-set", (0, 8))


@pytest.mark.parametrize("doc", [
    {"hints": {"x": [{"stem": 1, "modulus": 2, "tau_invert": [2]}]}},
    {"hints": {"x": [{"stem": 1}]}},
    {"hints": {"x": [{"stem": 1, "relation": [1, 2]}]}},
    {"relations": {"x": [{"x": [1, 2, 3], "y": [1, 2, 3, 4]}]}},
    {"relations": {"x": [{"y": [1, 2, 3, 4]}]}},
    {"boundary": {"x": {"theory": "BP", "period": 4}}},
    {"operator": {"x": {"k": "three", "scalars": {}}}},
])
def test_malformed_documents(doc):
    with pytest.raises(ConfigError):
        parse_config(doc)


def test_user_file_is_merged_over_builtin(tmp_path):
    path = tmp_path / "hints.toml"
    path.write_text('[hints]\n"moore-BP-p2" = [{ stem = 2, tau_invert = [4] }]\n', encoding="utf-8")
    cfg = load_config(path)
    assert [h.stem for h in cfg.hints_for("moore-BP-p2", (0, 8))] == [2]
    assert cfg.hints["j-BP-p2"] == builtin_config().hints["j-BP-p2"]
    assert len(builtin_config().hints["moore-BP-p2"]) == 3


def test_unreadable_or_invalid_files(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("[hints\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(bad)
