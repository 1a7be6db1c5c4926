"""Image-of-J orders, the surjectivity pipeline, and Hurewicz detection tables."""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import asdict, dataclass, field

from .algebra import FgAbGroup, eigen_order, padic_valuation
from .models import BP, build_ku, cover_degree
from .sseq import BLUE, RED, Chart, gamma_ss
from .taumod import BigradedModule, coker_part, mod_tau


class DetectionError(ValueError):
    pass


class ExponentConventionWarning(UserWarning):
    """An odd-primary order differs from the ``ord_p(k) + 2`` exponent convention."""


def _adams_k(p: int) -> int:
    # 3 generates Z_2^x up to sign; p + 1 topologically generates 1 + pZ_p
    return 3 if p == 2 else p + 1


def im_j_order(p: int, stem: int) -> int:
    """Order of the torsion of ``pi_stem j`` at ``p``.

    Stems ``4m - 1`` at ``p = 2`` and ``kq - 1`` at odd ``p`` carry the image
    of J, of order ``p^ord_p(k^d - 1)`` for the eigenvalue ``k^d`` of the Adams
    operation on ``pi_(stem + 1)``; the other non-zero stems at 2 are ``Z/2`` or
    ``(Z/2)^2``.
    """
    if stem <= 0:
        raise DetectionError(f"no family in stem {stem}")
    if p == 2:
        if stem % 4 == 3:
            return 2 ** eigen_order(2, 3, (stem + 1) // 2)
        r = stem % 8
        if r in (0, 2) or stem == 1:
            return 2
        if r == 1:
            return 4
        raise DetectionError(f"no family in stem {stem}")
    q = cover_degree(p)
    if (stem + 1) % q:
        raise DetectionError(f"no family in stem {stem}")
    return p ** eigen_order(p, _adams_k(p), (stem + 1) // 2)


def exponent_flags(p: int, stems: tuple[int, int]) -> list[str]:
    """Stems where ``p^(ord_p(k) + 2)`` disagrees with the computed order; each one is warned about."""
    q = cover_degree(p)
    out = []
    for k in range(1, stems[1] // q + 2):
        n = k * q - 1
        if not stems[0] <= n <= stems[1]:
            continue
        computed, other = im_j_order(p, n), p ** (padic_valuation(p, k) + 2)
        if computed != other:
            msg = f"stem {n}: order {computed}, not {other} as the ord_p(k) + 2 exponent would give"
            warnings.warn(msg, ExponentConventionWarning, stacklevel=2)
            out.append(msg)
    return out


# ---------------------------------------------------------------- surjectivity


@dataclass
class StemAssertions:
    k: int
    stem: int
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


@dataclass
class AssertionReport:
    prime: int
    results: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def failures(self) -> list[str]:
        return [f"stem {r.stem}: {name}" for r in self.results for name, v in r.checks.items() if not v]

    def to_json(self) -> str:
        doc = {"prime": self.prime, "ok": self.ok,
               "stems": [{"k": r.k, "stem": r.stem, "ok": r.ok, "checks": r.checks} for r in self.results]}
        return json.dumps(doc, sort_keys=True, indent=1)


def _period(p: int) -> int:
    return 8 if p == 2 else cover_degree(p)


def verify_surjectivity(j_model: BigradedModule, k_max: int, chart: Chart | None = None,
                        ku_model: BigradedModule | None = None) -> AssertionReport:
    """For each ``1 <= k <= k_max``, with ``N`` the k-th multiple of the period, check that

    (a) ``pi_(N,0)(j/tau) = 0``,
    (b) the power of ``v1`` in degree ``N`` is non-zero in ``pi_(N,0) ku/(p, tau)``,
    (c) its boundary is detected in filtration 1 of stem ``N - 1`` with the image-of-J order.
    """
    p = j_model.prime
    per = _period(p)
    report = AssertionReport(p)
    if k_max < 1:
        return report
    top = per * k_max
    if j_model.stem_window[1] < top:
        raise DetectionError(f"model window {j_model.stem_window} does not reach stem {top}")
    e2 = mod_tau(j_model)
    chart = chart or gamma_ss(j_model, (0, 4), (0, top))
    ku = ku_model or build_ku(BP, p, (0, top))
    for k in range(1, k_max + 1):
        n = per * k
        coker, ker = e2.get(n, 0)
        gens = [g for g in ku.generators if g.bidegree == (n, 0)]
        reduced = coker_part(ku.column(n), 0, p)
        v1_nonzero = (len(gens) == 1 and not reduced.is_zero()
                      and any(x % p for x in gens[0].coords))
        detected = chart.e_infty.get((n - 1, 1), FgAbGroup())
        order_ok = detected.ngens == 1 and detected.invariant_factors[0] == im_j_order(p, n - 1)
        report.results.append(StemAssertions(k, n, {
            "j/tau vanishes in filtration 0": coker.is_zero() and ker.is_zero(),
            "v1 power non-zero mod (p, tau)": v1_nonzero,
            "boundary detected in filtration 1": order_ok,
        }))
    return report


# ---------------------------------------------------------------- Hurewicz table


@dataclass(frozen=True)
class Component:
    family: str
    provenance: str


@dataclass
class DetectionRow:
    stem: int
    group: FgAbGroup
    components: tuple
    checks: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        return " + ".join(c.family for c in self.components)


@dataclass
class DetectionTable:
    rows: list

    def stems(self) -> list[int]:
        return [r.stem for r in self.rows]

    def to_dicts(self) -> list[dict]:
        return [
            {"stem": r.stem, "group": list(r.group.invariant_factors), "label": r.label,
             "components": [asdict(c) for c in r.components], "checks": r.checks}
            for r in self.rows
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_dicts(), sort_keys=True, indent=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["stem", "group", "family", "provenance", "checks"])
        for r in self.rows:
            w.writerow([r.stem, " ".join(map(str, r.group.invariant_factors)), r.label,
                        "; ".join(c.provenance for c in r.components),
                        "; ".join(f"{k}={'pass' if v else 'fail'}" for k, v in sorted(r.checks.items()))])
        return buf.getvalue()


UNIT, BOUNDARY, KO_FACTOR, ETA = "unit", "boundary-of-v1-power", "ko-factorization", "eta-multiplication"


def _components_p2(n: int) -> tuple:
    if n <= 3:
        return (Component(["1", "eta", "eta^2", "nu"][n], UNIT),)
    k, r = divmod(n + 1, 8)
    if r == 0:
        return (Component(f"alpha_{k}", BOUNDARY),)
    k, r = divmod(n, 8)
    if r == 0:
        return (Component(f"eta alpha_{k}", ETA),)
    if r == 1:
        return Component(f"mu_{k}", KO_FACTOR), Component(f"eta^2 alpha_{k}", ETA)
    if r == 2:
        return (Component(f"eta mu_{k}", KO_FACTOR),)
    if r == 3:
        return (Component(f"nu-family_{k}", ETA),)
    return ()


def _components_odd(p: int, n: int) -> tuple:
    if n == 0:
        return (Component("1", UNIT),)
    q = cover_degree(p)
    if (n + 1) % q == 0:
        return (Component(f"alpha_{(n + 1) // q}", BOUNDARY),)
    return ()


def _colors(chart: Chart, n: int) -> set:
    return {c for (m, _), dots in chart.einf_dots.items() if m == n for c in dots}


def hurewicz_report(j_model: BigradedModule, j_chart: Chart, ko_chart: Chart | None,
                    window: tuple[int, int]) -> DetectionTable:
    """Label every non-zero stem of ``pi_* j`` in the window by its detecting family.

    Classes coming from ko (blue) are checked against the ko chart; classes
    coming through the boundary (red) are checked for order where the image of
    J predicts it.
    """
    p = j_model.prime
    rows = []
    for n in range(window[0], window[1] + 1):
        g = j_model.tau_invert(n)
        comps = _components_p2(n) if p == 2 else _components_odd(p, n)
        if g.is_zero():
            if comps and n > 0:
                raise DetectionError(f"stem {n}: family {comps[0].family} expected but the group is zero")
            continue
        if not comps:
            raise DetectionError(f"stem {n}: non-zero group {g} has no family")
        colors = _colors(j_chart, n)
        checks = {}
        for c in comps:
            if c.provenance == KO_FACTOR:
                blue = [pos for pos, dots in j_chart.einf_dots.items() if pos[0] == n and BLUE in dots]
                checks[f"{c.family} blue"] = bool(blue)
                checks[f"{c.family} detected in ko"] = ko_chart is not None and any(
                    pos in ko_chart.e_infty for pos in blue)
            elif c.provenance in (BOUNDARY, ETA):
                checks[f"{c.family} red"] = RED in colors
        if comps[0].provenance == BOUNDARY or (p == 2 and n > 3 and n % 8 == 3):
            checks["order"] = g.torsion_order() == im_j_order(p, n)
        rows.append(DetectionRow(n, g, comps, checks))
    labels = [r.label for r in rows]
    if len(set(labels)) != len(labels):
        raise DetectionError("family labels are not unique")
    return DetectionTable(rows)


# ---------------------------------------------------------------- E-infinity split check


def _is_quotient(big: FgAbGroup, small: FgAbGroup) -> bool:
    """Whether ``small`` is a quotient of ``big`` (Z counts as larger than any finite cyclic group)."""
    def key(d):
        return float("inf") if d == 0 else d

    a = sorted((key(d) for d in big.invariant_factors), reverse=True)
    b = sorted((key(d) for d in small.invariant_factors), reverse=True)
    if len(b) > len(a):
        return False
    for x, y in zip(a, b):
        if y == float("inf"):
            if x != y:
                return False
        elif x != float("inf") and x % y:
            return False
    return True


def split_check(j_chart: Chart, sphere_chart: Chart, stems: tuple[int, int]) -> list[str]:
    """Bidegrees where an E-infinity class of j has no source of the same filtration in the sphere."""
    bad = []
    for (n, s), g in sorted(j_chart.e_infty.items()):
        if not stems[0] <= n <= stems[1]:
            continue
        src = sphere_chart.e_infty.get((n, s), FgAbGroup())
        if not _is_quotient(src, g):
            bad.append(f"({n}, {s}): {g} is not a quotient of {src}")
    return bad
