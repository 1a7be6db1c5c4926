"""Command line: build models, draw charts, verify fixtures, print detection tables.

Exit codes: 0 success, 1 verification or computation failure, 2 configuration
error, 3 missing fixture.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import ConfigError, load_config
from .detection import DetectionError, hurewicz_report, verify_surjectivity
from .figures import MissingFixture, load_sphere
from .hfpss import hfpss_c2_ku
from .models import BP, FP, build_ell, build_j, build_ko, build_ku, build_periodic, moore
from .render import render_svg, render_text
from .sseq import chart_json, gamma_ss
from .suite import ACCEPTANCE, CRITERIA, EXTRA, run_check
from .taumod import ModelError, dumps, loads, validate_model

EXIT_FAIL, EXIT_CONFIG, EXIT_MISSING = 1, 2, 3
MODELS = ("ku", "ell", "ko", "j", "J", "KO", "moore_sphere", "hfpss_ko")
DEFAULT_STEMS = {"j": (0, 36), "J": (-18, 18), "KO": (-18, 18), "moore_sphere": (0, 8)}
THEORIES = {"f2": (FP, 2), "f3": (FP, 3), "f5": (FP, 5), "bp": (BP, None)}


class ConfigProblem(click.ClickException):
    exit_code = EXIT_CONFIG


def _window(text: str | None, name: str) -> tuple[int, int] | None:
    if text is None:
        return None
    try:
        a, b = (int(x) for x in text.split(".."))
    except ValueError:
        raise ConfigProblem(f"--{name} expects A..B, got {text!r}") from None
    if a > b:
        raise ConfigProblem(f"--{name} window {text} is empty")
    return a, b


def _theory(theory: str, prime: int | None) -> tuple[str, int]:
    base, fixed = THEORIES[theory]
    if fixed is not None and prime is not None and prime != fixed:
        raise ConfigProblem(f"--theory {theory} is incompatible with --prime {prime}")
    return base, fixed or prime or 2


def _hint_set(cfg, family: str, theory: str, p: int) -> str | None:
    name = f"{family}-{theory}-p{p}"
    return name if name in cfg.hints else None


def build_model(name: str, theory: str, p: int, stems: tuple[int, int], cfg):
    if name in ("ko", "moore_sphere", "hfpss_ko") and p != 2:
        raise ConfigProblem(f"{name} is only defined at p = 2")
    if name == "ku":
        return build_ku(theory, p, stems)
    if name == "ell":
        return build_ell(theory, p, stems)
    if name == "ko":
        return build_ko(theory, stems)
    if name == "j":
        return build_j(theory, p, cfg.hints_for(_hint_set(cfg, "j", theory, p), stems), stems)
    if name in ("J", "KO"):
        return build_periodic(name, theory, p, stems, cfg.hints_for(_hint_set(cfg, "J", theory, p), stems))
    if name == "moore_sphere":
        return moore(load_sphere(theory), cfg.hints_for(_hint_set(cfg, "moore", theory, p), stems), stems)
    if theory != BP:
        raise ConfigProblem("hfpss_ko is a BP-synthetic computation")
    return hfpss_c2_ku(stems)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    click.echo(str(path))


@click.group()
def main() -> None:
    """Exact synthetic spectra: τ-module models and their spectral sequences."""


@main.command()
@click.argument("model", type=click.Choice(MODELS))
@click.option("--prime", type=click.Choice(["2", "3", "5"]), default=None)
@click.option("--theory", type=click.Choice(sorted(THEORIES)), default="bp", show_default=True)
@click.option("--stems", default=None, help="stem window A..B")
@click.option("--hints", "hints_path", type=click.Path(dir_okay=False), default=None, help="TOML hint file")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=".", show_default=True)
def build(model, prime, theory, stems, hints_path, out_dir):
    """Build MODEL and write it as JSON."""
    base, p = _theory(theory, int(prime) if prime else None)
    window = _window(stems, "stems") or DEFAULT_STEMS.get(model, (0, 20))
    try:
        cfg = load_config(hints_path)
        m = build_model(model, base, p, window, cfg)
    except ConfigError as exc:
        raise ConfigProblem(str(exc)) from None
    except MissingFixture as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_MISSING)
    except ModelError as exc:
        click.echo(f"model error: {exc}", err=True)
        sys.exit(EXIT_FAIL)
    problems = validate_model(m)
    if problems:
        click.echo("\n".join(problems), err=True)
        sys.exit(EXIT_FAIL)
    _write(Path(out_dir) / f"{model}-{theory}-p{p}-stems{window[0]}..{window[1]}.json", dumps(m) + "\n")


@main.command()
@click.argument("model_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--stems", default=None, help="stem window A..B (default: the model's)")
@click.option("--filtrations", default=None, help="filtration window A..B")
@click.option("--page", type=click.Choice(["E2", "Einf"]), default="E2", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "svg", "json"]), default="text", show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=".", show_default=True)
def chart(model_file, stems, filtrations, page, fmt, out_dir):
    """Compute the chart of a model file; always writes JSON, plus the chosen rendering."""
    try:
        m = loads(Path(model_file).read_text(encoding="utf-8"))
    except (ValueError, KeyError) as exc:
        raise ConfigProblem(f"{model_file}: not a model file ({exc})") from None
    window = _window(stems, "stems") or m.stem_window
    filts = _window(filtrations, "filtrations")
    try:
        doc = chart_json(gamma_ss(m, filts, window), page)
    except ModelError as exc:
        click.echo(f"chart error: {exc}", err=True)
        sys.exit(EXIT_FAIL)
    base = f"{Path(model_file).name.removesuffix('.json')}-{page}"
    _write(Path(out_dir) / f"{base}.json", json.dumps(doc, sort_keys=True, indent=1) + "\n")
    if fmt == "text":
        _write(Path(out_dir) / f"{base}.txt", render_text(doc))
    elif fmt == "svg":
        _write(Path(out_dir) / f"{base}.svg", render_svg(doc))


@main.command()
@click.option("--only", "only", multiple=True, type=click.Choice(list(CRITERIA) + list(EXTRA)),
              help="run only these checks (repeatable)")
@click.option("--fixtures", type=click.Path(file_okay=False), default=None,
              help="fixture directory (default: $SYNSPEC_FIXTURES or the shipped set)")
def verify(only, fixtures):
    """Run the verification suite against the fixtures."""
    import os

    if fixtures:
        os.environ["SYNSPEC_FIXTURES"] = fixtures
    keys = list(only) or ACCEPTANCE + list(EXTRA)
    missing = failed = False
    for key in keys:
        res = run_check(key)
        click.echo(f"{res.status} {key}: {res.title}")
        for line in res.missing + res.details + res.notes:
            click.echo(f"    {line}")
        missing |= bool(res.missing)
        failed |= not res.ok
    if missing:
        sys.exit(EXIT_MISSING)
    if failed:
        sys.exit(EXIT_FAIL)


@main.command()
@click.option("--prime", type=click.Choice(["2", "3", "5"]), default="2", show_default=True)
@click.option("--stems", default="0..36", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
def detect(prime, stems, fmt):
    """Print the detection table of j over BP, with the surjectivity assertions."""
    p = int(prime)
    lo, hi = _window(stems, "stems")
    cfg = load_config()
    window = (lo, hi + 1)
    j = build_j(BP, p, cfg.hints_for(_hint_set(cfg, "j", BP, p), window), window)
    c = gamma_ss(j, (0, 20), (lo, hi))
    ko = gamma_ss(build_ko(BP, window), (0, 20), (lo, hi)) if p == 2 else None
    try:
        table = hurewicz_report(j, c, ko, (lo, hi))
    except DetectionError as exc:
        click.echo(f"detection error: {exc}", err=True)
        sys.exit(EXIT_FAIL)
    period = 8 if p == 2 else 2 * p - 2
    report = verify_surjectivity(j, hi // period, c)
    if fmt == "csv":
        click.echo(table.to_csv(), nl=False)
    else:
        click.echo(json.dumps({"table": table.to_dicts(), "surjectivity": json.loads(report.to_json())},
                              sort_keys=True, indent=1))
    if not report.ok or any(not all(r.checks.values()) for r in table.rows):
        sys.exit(EXIT_FAIL)


if __name__ == "__main__":
    main()
