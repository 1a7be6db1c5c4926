"""Registry of the shipped chart fixtures and the two routes that produce them.

The engine route builds each model through the long exact sequence machinery;
the reference route writes the same module down from closed-form presentations.
Fixtures are generated from the reference route and checked against the engine.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from . import reference
from .config import builtin_config
from .models import BP, FP, build_j, build_ko, build_periodic, moore
from .sseq import Chart, DiffReport, add_relations, chart_json, compare_charts, gamma_ss
from .taumod import BigradedModule, loads

SPHERE_FIXTURES = {FP: "sphere_ass_p2_stems0-8.json", BP: "sphere_anss_p2_stems0-8.json"}


class MissingFixture(FileNotFoundError):
    pass


@dataclass(frozen=True)
class Figure:
    key: str
    title: str
    family: str  # ko, j, J or moore
    theory: str
    prime: int
    stems: tuple[int, int]
    filtrations: tuple[int, int]
    page: str  # "E2" (with differentials) or "Einf" (with extensions)
    hints: str | None = None
    relations: str | None = None

    @property
    def fixture_name(self) -> str:
        return f"{self.key}.json"


def _pair(key, title, family, theory, p, stems, filts, hints=None, relations=None):
    return (
        Figure(f"{key}-e2", f"{title}, all differentials", family, theory, p, stems, filts, "E2", hints, relations),
        Figure(f"{key}-einf", f"{title}, E-infinity page", family, theory, p, stems, filts, "Einf", hints, relations),
    )


FIGURES: dict[str, Figure] = {f.key: f for f in (
    Figure("ko-ass-p2", "Adams spectral sequence for ko", "ko", FP, 2, (0, 20), (0, 20), "E2"),
    Figure("ko-anss-p2", "Adams-Novikov spectral sequence for ko", "ko", BP, 2, (0, 20), (0, 20), "E2"),
    *_pair("j-mass-p2", "Modified Adams spectral sequence for j at 2", "j", FP, 2, (0, 36), (0, 24),
           "j-Fp-p2", "eta-j-Fp-p2"),
    *_pair("j-manss-p2", "Modified Adams-Novikov spectral sequence for j at 2", "j", BP, 2, (0, 36), (0, 20),
           "j-BP-p2"),
    *_pair("j-mass-p3", "Modified Adams spectral sequence for j at 3", "j", FP, 3, (0, 36), (0, 24)),
    Figure("j-manss-p3", "Modified Adams-Novikov spectral sequence for j at 3", "j", BP, 3, (0, 36), (0, 20), "E2"),
    *_pair("J-mass-p2", "Modified Adams spectral sequence for periodic J at 2", "J", FP, 2, (-18, 18), (-10, 20),
           "J-Fp-p2", "eta-J-Fp-p2"),
    *_pair("J-manss-p2", "Modified Adams-Novikov spectral sequence for periodic J at 2", "J", BP, 2, (-18, 18),
           (0, 20), "J-BP-p2"),
    Figure("moore-ass-p2", "Adams spectral sequence for S/2", "moore", FP, 2, (0, 8), (-1, 12), "E2", "moore-Fp-p2"),
    *_pair("moore-anss-p2", "Adams-Novikov spectral sequence for S/2", "moore", BP, 2, (0, 8), (-1, 12),
           "moore-BP-p2"),
)}


# ---------------------------------------------------------------- locations


def fixtures_dir() -> Path:
    env = os.environ.get("SYNSPEC_FIXTURES")
    if env:
        return Path(env)
    return Path(str(resources.files("synspec").joinpath("data/fixtures")))


def _read(name: str, where: Path | None = None) -> str:
    path = (where or fixtures_dir()) / name
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise MissingFixture(f"missing fixture {path}") from exc


def load_sphere(theory: str, where: Path | None = None) -> BigradedModule:
    return loads(_read(SPHERE_FIXTURES[theory], where))


def load_fixture(fig: Figure, where: Path | None = None) -> dict:
    return json.loads(_read(fig.fixture_name, where))


# ---------------------------------------------------------------- routes


def _model_window(fig: Figure) -> tuple[int, int]:
    # columns one stem past the chart feed its top ker parts
    if fig.family in ("ko", "j"):
        return fig.stems[0], fig.stems[1] + 1
    return fig.stems


@lru_cache(maxsize=None)
def _engine(family: str, theory: str, p: int, window: tuple[int, int], hints: str | None) -> BigradedModule:
    hs = builtin_config().hints_for(hints, window)
    if family == "ko":
        return build_ko(theory, window)
    if family == "j":
        return build_j(theory, p, hs, window)
    if family == "J":
        return build_periodic("J", theory, p, window, hs)
    if family == "moore":
        return moore(load_sphere(theory), hs, window)
    raise ValueError(f"unknown family {family}")


def engine_model(fig: Figure) -> BigradedModule:
    """The model built by the engine, with hints from the built-in tables."""
    return _engine(fig.family, fig.theory, fig.prime, _model_window(fig), fig.hints)


@lru_cache(maxsize=None)
def _reference(family: str, theory: str, p: int, window: tuple[int, int]) -> BigradedModule:
    if family == "ko":
        return reference.ko_f2(window) if theory == FP else reference.ko_bp(window)
    if family == "j" and p == 2:
        return reference.j_f2(window) if theory == FP else reference.j_bp(window)
    if family == "j":
        return reference.j_odd(theory, p, window)
    if family == "J":
        return reference.periodic_j_f2(window) if theory == FP else reference.periodic_j_bp(window)
    if family == "moore":
        return reference.moore_f2() if theory == FP else reference.moore_bp()
    raise ValueError(f"unknown family {family}")


def reference_model(fig: Figure) -> BigradedModule:
    """The model written down from closed-form presentations."""
    return _reference(fig.family, fig.theory, fig.prime, _model_window(fig))


def figure_chart(fig: Figure, model: BigradedModule) -> Chart:
    c = gamma_ss(model, fig.filtrations, fig.stems)
    rels = builtin_config().relations_for(fig.relations, fig.stems)
    return add_relations(c, model, rels) if rels else c


def figure_json(fig: Figure, model: BigradedModule) -> dict:
    return chart_json(figure_chart(fig, model), fig.page)


def verify_figure(fig: Figure, where: Path | None = None) -> DiffReport:
    """Engine chart against the shipped fixture; raises :class:`MissingFixture`."""
    expected = load_fixture(fig, where)
    return compare_charts(figure_json(fig, engine_model(fig)), expected, fig.stems, fig.filtrations, fig.page)
