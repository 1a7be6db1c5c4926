"""Boundary values, Adams operations, extension hints and relations loaded from TOML.

The built-in document ships with the package; a user document given on the
command line is merged over it table by table.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .algebra import FgAbGroup
from .les import ExtensionHint
from .models import BoundaryEntry, BoundarySpec, OperatorSpec, normalize_theory
from .sseq import Relation


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


def _k_range(k_min, k_max, lo_k: int, hi_k: int) -> range:
    a = lo_k if k_min is None else max(lo_k, k_min)
    b = hi_k if k_max is None else min(hi_k, k_max)
    return range(a, b + 1)


@dataclass(frozen=True)
class HintRule:
    label: str
    stem: int | None = None
    modulus: int | None = None
    residue: int = 0
    k_min: int | None = None
    k_max: int | None = None
    tau_invert: tuple | None = None
    relation: tuple | None = None

    def stems(self, window: tuple[int, int]) -> list[int]:
        lo, hi = window
        if self.stem is not None:
            return [self.stem] if lo <= self.stem <= hi else []
        m, r = self.modulus, self.residue
        ks = _k_range(self.k_min, self.k_max, -((r - lo) // m), (hi - r) // m)
        return [m * k + r for k in ks if lo <= m * k + r <= hi]

    def expand(self, window: tuple[int, int]) -> list[ExtensionHint]:
        group = FgAbGroup(tuple(self.tau_invert)) if self.tau_invert is not None else None
        rel = tuple(self.relation) if self.relation is not None else None
        return [ExtensionHint(n, group, rel, self.label) for n in self.stems(window)]


@dataclass(frozen=True)
class RelationRule:
    """``op * x = c * y``; positions are ``[a, b, c, d] -> (a k + b, c k + d)``."""

    label: str
    op: str
    x: tuple
    y: tuple
    c: int = 1
    multiple_at: tuple | None = None
    k_min: int | None = None
    k_max: int | None = None

    @staticmethod
    def _at(form, k: int) -> tuple[int, int]:
        a, b, c, d = form
        return a * k + b, c * k + d

    def expand(self, window: tuple[int, int]) -> list[Relation]:
        a, b = self.x[0], self.x[1]
        lo, hi = window
        out = []
        for k in _k_range(self.k_min, self.k_max, (lo - b) // a - 1, (hi - b) // a + 1):
            x, y = self._at(self.x, k), self._at(self.y, k)
            if not (lo <= x[0] <= hi and lo <= y[0] <= hi):
                continue
            at = self._at(self.multiple_at, k) if self.multiple_at else None
            out.append(Relation(f"{self.label} (k={k})", self.op, x, self.c, y, at))
        return out


@dataclass
class Config:
    boundaries: dict = field(default_factory=dict)
    operators: dict = field(default_factory=dict)
    hints: dict = field(default_factory=dict)
    relations: dict = field(default_factory=dict)

    def hints_for(self, name: str | None, window: tuple[int, int]) -> list[ExtensionHint]:
        if not name:
            return []
        if name not in self.hints:
            raise ConfigError(f"unknown hint set {name!r}")
        return [h for rule in self.hints[name] for h in rule.expand(window)]

    def relations_for(self, name: str | None, window: tuple[int, int]) -> list[Relation]:
        if not name:
            return []
        if name not in self.relations:
            raise ConfigError(f"unknown relation set {name!r}")
        return [r for rule in self.relations[name] for r in rule.expand(window)]


# ---------------------------------------------------------------- parsing


def _boundary(name: str, d: dict) -> BoundarySpec:
    try:
        entries = tuple(
            BoundaryEntry(int(e["residue"]), tuple(e["filtration"]) if "filtration" in e else None,
                          int(e.get("tau_power", 0)), int(e.get("multiplier", 1)))
            for e in d["entries"]
        )
        return BoundarySpec(d["source"], int(d["period"]), entries, normalize_theory(d["theory"]),
                            int(d.get("stem_shift", -2)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"boundary {name}: {exc}") from exc


def _operator(name: str, d: dict) -> OperatorSpec:
    try:
        return OperatorSpec(name, int(d["k"]), {str(k): int(v) for k, v in d["scalars"].items()})
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"operator {name}: {exc}") from exc


def _hint(name: str, d: dict) -> HintRule:
    if ("stem" in d) == ("modulus" in d):
        raise ConfigError(f"hint set {name}: give exactly one of stem or modulus")
    if "tau_invert" not in d and "relation" not in d:
        raise ConfigError(f"hint set {name}: a hint needs tau_invert or relation")
    if "relation" in d and len(d["relation"]) != 3:
        raise ConfigError(f"hint set {name}: relation is [s, j, order]")
    return HintRule(
        d.get("label", ""), d.get("stem"), d.get("modulus"), int(d.get("residue", 0)), d.get("k_min"),
        d.get("k_max"), tuple(d["tau_invert"]) if "tau_invert" in d else None,
        tuple(d["relation"]) if "relation" in d else None,
    )


def _relation(name: str, d: dict) -> RelationRule:
    try:
        forms = [tuple(d["x"]), tuple(d["y"])] + ([tuple(d["multiple_at"])] if "multiple_at" in d else [])
    except KeyError as exc:
        raise ConfigError(f"relation set {name}: missing {exc}") from exc
    if any(len(f) != 4 for f in forms):
        raise ConfigError(f"relation set {name}: positions are [a, b, c, d]")
    return RelationRule(d.get("label", ""), d.get("op", "eta"), forms[0], forms[1], int(d.get("c", 1)),
                        forms[2] if len(forms) > 2 else None, d.get("k_min"), d.get("k_max"))


def parse_config(doc: dict, base: Config | None = None) -> Config:
    cfg = Config(dict(base.boundaries), dict(base.operators), dict(base.hints), dict(base.relations)) if base \
        else Config()
    for name, d in doc.get("boundary", {}).items():
        cfg.boundaries[name] = _boundary(name, d)
    for name, d in doc.get("operator", {}).items():
        cfg.operators[name] = _operator(name, d)
    for name, items in doc.get("hints", {}).items():
        cfg.hints[name] = tuple(_hint(name, d) for d in items)
    for name, items in doc.get("relations", {}).items():
        cfg.relations[name] = tuple(_relation(name, d) for d in items)
    return cfg


@lru_cache(maxsize=None)
def builtin_config() -> Config:
    text = resources.files("synspec").joinpath("data/builtin.toml").read_text(encoding="utf-8")
    return parse_config(tomllib.loads(text))


def load_config(path: str | Path | None = None) -> Config:
    """The built-in tables, overridden by the TOML document at ``path`` if given."""
    if path is None:
        return builtin_config()
    try:
        doc = tomllib.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(doc, builtin_config())
