"""The verification suite: one check per acceptance criterion.

Every check returns a :class:`CheckResult`; a missing fixture is reported as
such rather than as a failure so that the CLI can give it its own exit code.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

from .algebra import FgAbGroup, eigen_order, padic_valuation
from .config import builtin_config
from .detection import (
    ExponentConventionWarning,
    exponent_flags,
    hurewicz_report,
    im_j_order,
    split_check,
    verify_surjectivity,
)
from .exact_couple import dictionary_oracle
from .figures import FIGURES, MissingFixture, engine_model, figure_chart, load_sphere, verify_figure
from .hfpss import e2_page, hfpss_c2_ku
from .models import BP, FP, build_j, build_ko, build_periodic, wood_ko
from .sseq import compare_charts, gamma_ss
from .taumod import column_to_json


@dataclass
class CheckResult:
    key: str
    title: str
    ok: bool = True
    details: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    missing: list = field(default_factory=list)
    seconds: float = 0.0

    def fail(self, msg: str) -> None:
        self.ok = False
        self.details.append(msg)

    def expect(self, cond: bool, msg: str) -> None:
        if not cond:
            self.fail(msg)

    @property
    def status(self) -> str:
        if self.missing:
            return "MISSING"
        return "PASS" if self.ok else "FAIL"


def _figures(res: CheckResult, keys) -> None:
    for key in keys:
        try:
            report = verify_figure(FIGURES[key])
        except MissingFixture as exc:
            res.missing.append(str(exc))
            res.ok = False
            continue
        if report:
            res.fail(f"{key}: " + "; ".join(report.entries[:5]))


def _time_limit(res: CheckResult, limit: float) -> None:
    if res.seconds > limit:
        res.fail(f"took {res.seconds:.2f} s, limit {limit} s")


def check_ko(res: CheckResult) -> None:
    _figures(res, ["ko-ass-p2", "ko-anss-p2"])
    f2 = figure_chart(FIGURES["ko-ass-p2"], engine_model(FIGURES["ko-ass-p2"]))
    res.expect(not f2.differentials, "the F2 chart of ko has differentials")
    bp = figure_chart(FIGURES["ko-anss-p2"], engine_model(FIGURES["ko-anss-p2"]))
    want = {((8 * k + 4 + i, i), 3) for k in range(3) for i in range(20) if 8 * k + 4 + i <= 20 and i + 3 <= 20}
    got = {(d.source, d.r) for d in bp.differentials}
    res.expect(got == want, f"BP differentials of ko: {sorted(got ^ want)[:6]} differ from the d3 family")


def check_wood(res: CheckResult) -> None:
    cfg = builtin_config()
    for theory, key in ((FP, "wood-Fp"), (BP, "wood-BP")):
        derived = wood_ko(theory, cfg.boundaries[key], (0, 20))
        direct = build_ko(theory, (0, 20)).normalized()
        bad = [n for n in range(21) if column_to_json(derived.column(n)) != column_to_json(direct.column(n))]
        res.expect(not bad, f"{theory}: Wood derivation differs in stems {bad}")


def check_j2(res: CheckResult) -> None:
    _figures(res, ["j-mass-p2-e2", "j-mass-p2-einf", "j-manss-p2-e2", "j-manss-p2-einf"])
    fig = FIGURES["j-mass-p2-einf"]
    m = engine_model(fig)
    for n, order in ((7, 16), (15, 32), (31, 64), (3, 8), (11, 8)):
        res.expect(m.tau_invert(n) == FgAbGroup((order,)), f"pi_{n} j is {m.tau_invert(n)}, not Z/{order}")
    c = figure_chart(fig, m)
    d = {(x.source[0], x.r) for x in c.differentials if x.source[0] % 4 == 0 and x.source[0] > 0}
    for k in range(1, 5):
        res.expect((8 * k, padic_valuation(2, k) + 5) in d, f"no d_{padic_valuation(2, k) + 5} from stem {8 * k}")
        res.expect((8 * k - 4, 4) in d, f"no d4 from stem {8 * k - 4}")
    res.expect((36, 4) in d, "no d4 from stem 36")
    exotic = {(e.source[0], e.target[0]) for e in c.extensions if e.exotic and e.op == "eta"}
    res.expect(exotic == {(8 * k + 2, 8 * k + 3) for k in range(5)}, f"exotic eta-extensions {sorted(exotic)}")
    bp = engine_model(FIGURES["j-manss-p2-einf"])
    res.expect(bp.tau_invert(3) == FgAbGroup((8,)), f"BP: pi_3 j is {bp.tau_invert(3)}")
    cb = figure_chart(FIGURES["j-manss-p2-einf"], bp)
    res.expect((3, 1) in cb.e_infty and (3, 3) in cb.e_infty, "BP: 4 nu is not detected by tau^2 eta^3")


def check_orders(res: CheckResult) -> None:
    for m in range(1, 17):
        got = im_j_order(2, 8 * m - 1)
        oracle = 2 ** eigen_order(2, 3, 4 * m)
        closed = 2 ** (padic_valuation(2, m) + 4)
        res.expect(got == oracle == closed, f"stem {8 * m - 1}: {got}, {oracle}, {closed}")


def check_odd(res: CheckResult) -> None:
    j = build_j(BP, 3, (), (0, 36))
    support = [n for n in range(37) if not j.tau_invert(n).is_zero()]
    res.expect(support == [0] + [4 * k - 1 for k in range(1, 10)], f"support {support}")
    for k in range(1, 10):
        n = 4 * k - 1
        want = 3 ** (padic_valuation(3, k) + 1)
        res.expect(want == 3 ** eigen_order(3, 4, 2 * k), f"stem {n}: oracle disagrees")
        res.expect(j.tau_invert(n) == FgAbGroup((want,)), f"stem {n}: {j.tau_invert(n)}, not Z/{want}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExponentConventionWarning)
        res.notes.extend(f"flag: {f}" for f in exponent_flags(3, (0, 36)))
    _figures(res, ["j-mass-p3-e2", "j-mass-p3-einf", "j-manss-p3"])


def check_moore(res: CheckResult) -> None:
    _figures(res, ["moore-ass-p2", "moore-anss-p2-e2", "moore-anss-p2-einf"])
    if res.missing:
        return
    for fig in (FIGURES["moore-ass-p2"], FIGURES["moore-anss-p2-einf"]):
        m = engine_model(fig)
        res.expect(m.tau_invert(2) == FgAbGroup((4,)), f"{fig.theory}: pi_2 S/2 is {m.tau_invert(2)}")
        res.expect(all(d == 2 for d in m.tau_invert(8).invariant_factors), f"{fig.theory}: 2 pi_8 S/2 != 0")
    c = figure_chart(FIGURES["moore-anss-p2-einf"], engine_model(FIGURES["moore-anss-p2-einf"]))
    marks = [e for e in c.extensions if e.source[0] == 2 and e.op == "2"]
    res.expect(len(marks) == 1 and marks[0].exotic, "no extension marker on pi_2 S/2 in the ANSS")


def check_hfpss(res: CheckResult) -> None:
    for (n, s), x in e2_page((0, 20), 20).items():
        if x.u_exponent % 2:
            res.fail(f"E2 class at {(n, s)} has odd u-exponent")
        want = FgAbGroup((0,)) if s == 0 else FgAbGroup((2,))
        res.expect(x.group == want, f"E2 at {(n, s)} is {x.group}")
    count = sum(1 for n in range(21) for s in range(21) if (n - s) % 4 == 0)
    res.expect(len([k for k in e2_page((0, 20), 20) if k[1] <= 20]) == count, "E2 is not Z[h1, u^2]/(2 h1)")
    h = gamma_ss(hfpss_c2_ku((0, 20)), (0, 20), (0, 20))
    ko = gamma_ss(build_periodic("KO", BP, 2, (0, 20)), (0, 20), (0, 20))
    for which in ("E2", "Einf"):
        report = compare_charts(h, ko, which=which, ignore_colors=True)
        res.expect(not report, f"{which}: {report}")


def check_dictionary(res: CheckResult) -> None:
    bad = dictionary_oracle(seed=20240101, count=200)
    res.expect(not bad, "; ".join(bad[:5]))


def check_detection(res: CheckResult) -> None:
    cfg = builtin_config()
    j2 = build_j(BP, 2, cfg.hints_for("j-BP-p2", (0, 37)), (0, 37))
    c2 = gamma_ss(j2, (0, 20), (0, 36))
    rep = verify_surjectivity(j2, 4, c2)
    res.expect(rep.ok and len(rep.results) == 4, f"p=2: {rep.failures()}")
    j3 = build_j(BP, 3, (), (0, 25))
    rep3 = verify_surjectivity(j3, 6)
    res.expect(rep3.ok and len(rep3.results) == 6, f"p=3: {rep3.failures()}")
    ko = gamma_ss(build_ko(BP, (0, 37)), (0, 20), (0, 36))
    table = hurewicz_report(j2, c2, ko, (0, 36))
    support = [n for n in range(37) if not j2.tau_invert(n).is_zero()]
    res.expect(table.stems() == support, "detection table does not cover the support")
    for row in table.rows:
        failed = [k for k, v in row.checks.items() if not v]
        res.expect(not failed, f"stem {row.stem}: {failed}")
    try:
        sphere = gamma_ss(load_sphere(BP), (0, 12), (0, 8))
    except MissingFixture as exc:
        res.missing.append(str(exc))
        res.ok = False
        return
    bad = split_check(c2, sphere, (0, 8))
    res.expect(not bad, f"split check: {bad}")


def check_periodic(res: CheckResult) -> None:
    _figures(res, ["J-mass-p2-e2", "J-mass-p2-einf", "J-manss-p2-e2", "J-manss-p2-einf"])


def check_figures(res: CheckResult) -> None:
    _figures(res, list(FIGURES))


CRITERIA = {
    "ko": ("ko charts", check_ko),
    "wood": ("Wood derivation", check_wood),
    "j2": ("j at p=2", check_j2),
    "orders": ("order law", check_orders),
    "odd": ("odd primes", check_odd),
    "moore": ("Moore spectrum", check_moore),
    "hfpss": ("homotopy fixed points", check_hfpss),
    "dictionary": ("dictionary oracle", check_dictionary),
    "detection": ("detection pipeline", check_detection),
    "periodic": ("periodic J", check_periodic),
}
ACCEPTANCE = list(CRITERIA)
TIME_LIMITS = {"ko": 1.0, "j2": 5.0, "dictionary": 10.0}  # seconds
EXTRA = {"figures": ("all shipped figures", check_figures)}


def run_check(key: str) -> CheckResult:
    title, fn = {**CRITERIA, **EXTRA}[key]
    res = CheckResult(key, title)
    t = time.perf_counter()
    try:
        fn(res)
    except MissingFixture as exc:
        res.missing.append(str(exc))
        res.ok = False
    res.seconds = time.perf_counter() - t
    if key in TIME_LIMITS:
        _time_limit(res, TIME_LIMITS[key])
    return res
