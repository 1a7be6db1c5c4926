"""Spectral sequences read off from τ-modules, plus chart comparison and export.

For a column ``G_*`` at stem ``m`` the signature is determined column by column:

* ``G_s / tau G_{s+1}`` sits at ``(m, s)`` and consists of permanent cycles;
* the τ-torsion ``T_t = ker(tau: G_t -> G_{t-1})`` sits at ``(m+1, t-2)``;
* a torsion class that is ``tau^j``-divisible but not ``tau^(j+1)``-divisible
  supports a ``d_(j+2)`` hitting the class of its ``tau^j``-root.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .algebra import FgAbGroup, Lattice, subquotient
from .taumod import BigradedModule, E2Page, TauColumn, WindowUnderflow, localize

BLACK, BLUE, RED, ORANGE = "black", "blue", "red", "orange"


@dataclass(frozen=True)
class Differential:
    source: tuple[int, int]
    target: tuple[int, int]
    r: int
    rank: int  # composition length of the image, counting each Z once
    image: FgAbGroup = FgAbGroup()


@dataclass(frozen=True)
class Extension:
    source: tuple[int, int]
    target: tuple[int, int]
    op: str
    exotic: bool


@dataclass
class Chart:
    prime: int
    base_theory: str
    stem_window: tuple[int, int]
    filtration_window: tuple[int, int]
    e2: E2Page
    differentials: list = field(default_factory=list)
    pages: dict = field(default_factory=dict)
    e_infty: dict = field(default_factory=dict)
    extensions: list = field(default_factory=list)
    e2_dots: dict = field(default_factory=dict)  # (n,s) -> {color: group}
    einf_dots: dict = field(default_factory=dict)

    @property
    def max_r(self) -> int:
        return max((d.r for d in self.differentials), default=1)


# ---------------------------------------------------------------- dictionary


def _quot(top: Lattice, bottom: Lattice, p: int | None) -> FgAbGroup:
    return localize(subquotient(top, bottom).group, p)


class ColumnAnalysis:
    """Everything the dictionary needs about a single column."""

    def __init__(self, col: TauColumn, p: int | None, red: dict | None = None):
        self.col, self.p, self.red = col, p, red or {}
        self._img, self._ker = {}, {}

    def img(self, s: int, j: int) -> Lattice:
        key = (s, j)
        if key not in self._img:
            self._img[key] = self.col.image_lattice(s, j)
        return self._img[key]

    def ker(self, s: int, j: int) -> Lattice:
        key = (s, j)
        if key not in self._ker:
            self._ker[key] = self.col.kernel_lattice(s, j)
        return self._ker[key]

    def full(self, s: int) -> Lattice:
        return Lattice.full(self.col.ngens(s))

    def red_lattice(self, s: int) -> Lattice | None:
        lat = self.red.get(s)
        if lat is None and self.red and s < min(self.red):
            lat = self.red[min(self.red)]
        if lat is None and self.red and s > max(self.red) and self.col.above:
            lat = self.red[max(self.red)]
        if lat is None:
            return None
        return lat + self.col.rel(s)

    def ker_inf(self, s: int) -> Lattice:
        if s < self.col.s_lo:
            return self.col.rel(s)
        return self.ker(s, s - self.col.s_lo + 1)

    def max_depth(self, t: int) -> int:
        col = self.col
        tail = 0
        if col.above:
            tail = sum(_length(d) for d in col.group(col.s_hi).invariant_factors if d) + 1
        return max(col.s_hi - t, 0) + tail + 2

    def divisibility_chain(self, t: int) -> list[Lattice]:
        """``D^j = T_t cap tau^j G_{t+j}`` for ``j = 0, 1, ...`` down to zero."""
        rel = self.col.rel(t)
        torsion = self.ker(t, 1)
        chain = [torsion]
        j = 0
        while not (chain[-1] <= rel):
            j += 1
            if j > self.max_depth(t):
                raise WindowUnderflow(f"stem {self.col.stem}, filtration {t}")
            chain.append((torsion & self.img(t, j)) + rel)
        return chain


def _length(d: int) -> int:
    from .algebra import _omega

    return _omega(d)


def _split_colors(top: Lattice, bottom: Lattice, red: Lattice | None, p) -> dict:
    """Red (fibre) part is the image of ``red``; the rest is blue."""
    total = _quot(top, bottom, p)
    if total.is_zero():
        return {}
    if red is None:
        return {BLACK: total}
    red_top = (red & top) + bottom
    out = {}
    rg = _quot(red_top, bottom, p)
    bg = _quot(top, red_top, p)
    if not rg.is_zero():
        out[RED] = rg
    if not bg.is_zero():
        out[BLUE] = bg
    return out


def _merge(a: dict, b: dict) -> dict:
    out = dict(a)
    for color, g in b.items():
        out[color] = _sum(out[color], g) if color in out else g
    return out


def _sum(a: FgAbGroup, b: FgAbGroup) -> FgAbGroup:
    from .algebra import direct_sum_factors

    return direct_sum_factors(list(a.invariant_factors) + list(b.invariant_factors))


def gamma_ss(m: BigradedModule, filtrations: tuple[int, int] | None = None,
             stems: tuple[int, int] | None = None) -> Chart:
    """The signature spectral sequence of a model on a stem/filtration window."""
    lo_n, hi_n = stems or m.stem_window
    if filtrations is None:
        cols = [m.column(n) for n in range(lo_n - 1, hi_n + 1)]
        filtrations = (min(c.s_lo for c in cols) - 1, max(c.s_hi for c in cols) + 2)
    f_lo, f_hi = filtrations
    p = m.prime
    chart = Chart(p, m.base_theory, (lo_n, hi_n), (f_lo, f_hi), E2Page({}))
    e2, e2_dots, einf_dots, einf = {}, {}, {}, {}
    pages: dict = {}
    coker_chains: dict = {}
    ker_chains: dict = {}
    reds = m.fibre_parts

    for n in range(lo_n - 1, hi_n + 1):
        col = m.column(n)
        an = ColumnAnalysis(col, p, reds.get(n))
        if n >= lo_n:
            for s in range(f_lo, f_hi + 1):
                full, tg = an.full(s), an.img(s, 1)
                kinf = an.ker_inf(s)
                red = an.red_lattice(s)
                c = _quot(full, tg, p)
                if not c.is_zero():
                    e2.setdefault((n, s), [FgAbGroup(), FgAbGroup()])[0] = c
                    e2_dots[(n, s)] = _merge(e2_dots.get((n, s), {}), _split_colors(full, tg, red, p))
                    coker_chains[(n, s)] = (an, s)
                ei = _quot(full, tg + kinf, p)
                if not ei.is_zero():
                    einf[(n, s)] = ei
                    einf_dots[(n, s)] = _split_colors(full, tg + kinf, red, p)
        # torsion of this column lands in stem n+1
        if n + 1 < lo_n or n + 1 > hi_n:
            continue
        for t in range(f_lo + 2, f_hi + 3):
            torsion = an.ker(t, 1)
            rel = col.rel(t)
            if torsion <= rel:
                continue
            pos = (n + 1, t - 2)
            k = _quot(torsion, rel, p)
            if k.is_zero():
                continue
            e2.setdefault(pos, [FgAbGroup(), FgAbGroup()])[1] = k
            e2_dots[pos] = _merge(e2_dots.get(pos, {}), _split_colors(torsion, rel, an.red_lattice(t), p))
            chain = an.divisibility_chain(t)
            ker_chains[pos] = chain
            for j in range(len(chain) - 1):
                image = _quot(chain[j], chain[j + 1], p)
                if image.is_zero():
                    continue
                r = j + 2
                chart.differentials.append(
                    Differential(pos, (n, t - 2 + r), r, image.length() + image.rank, image)
                )

    chart.e2 = E2Page({k: tuple(v) for k, v in e2.items()})
    chart.e2_dots = e2_dots
    chart.e_infty = einf
    chart.einf_dots = einf_dots
    chart.differentials.sort(key=lambda d: (d.source, d.r))
    # pages E_r for r = 2 .. max_r + 1
    for r in range(2, chart.max_r + 2):
        page_r = {}
        for pos, (an, s) in coker_chains.items():
            bottom = an.img(s, 1) + (an.ker(s, r - 2) if r > 2 else an.col.rel(s))
            g = _quot(an.full(s), bottom, p)
            page_r[pos] = [g, FgAbGroup()]
        for pos, chain in ker_chains.items():
            g = _quot(chain[r - 2], chain[-1], p) if r - 2 < len(chain) else FgAbGroup()
            page_r.setdefault(pos, [FgAbGroup(), FgAbGroup()])[1] = g
        pages[r] = {k: tuple(v) for k, v in page_r.items() if not (v[0].is_zero() and v[1].is_zero())}
    chart.pages = pages
    chart.extensions = order_extensions(m, chart)
    return chart


def page(c: Chart, r) -> dict:
    """Surviving classes ``(n, s) -> (coker_part, ker_part)`` at stage ``r`` (``inf`` allowed)."""
    if r == "inf" or r == float("inf") or r > c.max_r + 1:
        return {k: (g, FgAbGroup()) for k, g in c.e_infty.items()}
    if r < 2:
        raise ValueError("pages start at r = 2")
    return dict(c.pages.get(r, c.e2.entries))


# ---------------------------------------------------------------- extensions


def intrinsic_filtration(base_theory: str, op: str) -> int:
    """Filtration of the class detecting ``op`` (p is h0 over F_p, filtration 0 over BP)."""
    if op in ("2", "3", "5", "p"):
        return 1 if base_theory == "Fp" else 0
    if op in ("eta", "nu", "sigma", "alpha1"):
        return 1
    raise ValueError(f"unknown operator {op}")


def _top_filtration(col: TauColumn) -> int:
    """A filtration beyond which nothing new happens, counting an h0-tower's torsion depth."""
    tail = 0
    if col.above:
        tail = sum(_length(d) for d in col.group(col.s_hi).invariant_factors if d)
    return col.s_hi + 1 + tail


def _filtration_of(col: TauColumn, an: ColumnAnalysis, x) -> int | None:
    """Largest ``s`` whose stable image contains ``x`` (an element of the stable group)."""
    lo = col.s_lo
    target = col.group(lo - 1)
    if target.is_zero_element(x):
        return None
    best = None
    for s in range(lo, _top_filtration(col) + 1):
        img = an.img(lo - 1, s - lo + 1)
        if img.contains(list(x)):
            best = s
        else:
            break
    return best


def order_extensions(m: BigradedModule, chart: Chart) -> list[Extension]:
    """Multiplication by the order of each cyclic E-infinity class, read off the stable filtration."""
    out = []
    f_lo, f_hi = chart.filtration_window
    for n in range(chart.stem_window[0], chart.stem_window[1] + 1):
        col = m.column(n)
        an = ColumnAnalysis(col, m.prime)
        stable = col.group(col.s_lo - 1)
        for s in range(f_lo, f_hi + 1):
            g = chart.e_infty.get((n, s))
            if g is None or g.ngens != 1:
                continue
            q = g.invariant_factors[0]
            if q == 0:
                q = m.prime
            # F^s inside the stable group, and its image under multiplication by q
            fs = an.img(col.s_lo - 1, max(s - col.s_lo + 1, 0)) if s >= col.s_lo else Lattice.full(stable.ngens)
            fs1 = an.img(col.s_lo - 1, max(s + 1 - col.s_lo + 1, 0)) if s + 1 >= col.s_lo else Lattice.full(stable.ngens)
            rel = stable.relation_lattice()
            target_s = None
            qfs = Lattice.span([[q * x for x in b] for b in fs.basis], stable.ngens) + rel
            qfs1 = Lattice.span([[q * x for x in b] for b in fs1.basis], stable.ngens) + rel
            if qfs <= qfs1:
                continue
            for t in range(s + 1, max(_top_filtration(col), s) + 2):
                ft = an.img(col.s_lo - 1, t - col.s_lo + 1) if t >= col.s_lo else Lattice.full(stable.ngens)
                if qfs <= ft + qfs1:
                    target_s = t
                else:
                    break
            if target_s is None or (n, target_s) not in chart.e_infty:
                continue
            op = str(m.prime)
            jump = target_s - s
            out.append(Extension((n, s), (n, target_s), op, jump > intrinsic_filtration(m.base_theory, op)))
    return out


@dataclass(frozen=True)
class Relation:
    """``op * x = c * y`` between named classes given by detecting bidegrees."""

    label: str
    op: str
    x: tuple[int, int]
    c: int
    y: tuple[int, int]
    y_multiple_at: tuple[int, int] | None = None


def check_relation(c: Chart, m: BigradedModule, rel: Relation) -> Extension:
    """Validate a multiplicative relation against the chart and return its marker.

    ``x`` must be detected in E-infinity, ``y`` must be detected, and the class
    ``c * y`` must be non-zero with detecting filtration ``y_multiple_at``; the
    marker is exotic when the filtration jump exceeds the operator's own.
    """
    for name, pos in (("x", rel.x), ("y", rel.y)):
        if pos not in c.e_infty:
            raise ValueError(f"{rel.label}: class {name} at {pos} is not detected")
    target = rel.y_multiple_at or rel.y
    col = m.column(rel.y[0])
    an = ColumnAnalysis(col, m.prime)
    if rel.c != 1:
        lift = _lift_generator(col, an, rel.y[1])
        stable = col.group(col.s_lo - 1)
        multiple = stable.reduce([rel.c * v for v in lift])
        s = _filtration_of(col, an, multiple)
        if s is None:
            raise ValueError(f"{rel.label}: {rel.c} times the class at {rel.y} vanishes")
        if s != target[1]:
            raise ValueError(f"{rel.label}: multiple detected at filtration {s}, not {target[1]}")
    if target not in c.e_infty:
        raise ValueError(f"{rel.label}: target {target} is not detected")
    jump = target[1] - rel.x[1]
    return Extension(rel.x, target, rel.op, jump > intrinsic_filtration(m.base_theory, rel.op))


def _lift_generator(col: TauColumn, an: ColumnAnalysis, s: int) -> list[int]:
    """Image in the stable group of an element generating E-infinity at filtration ``s``."""
    sq = subquotient(an.full(s), an.img(s, 1) + an.ker_inf(s))
    x = sq.lift([1] + [0] * (sq.group.ngens - 1))
    m = col.tau_power(s, s - col.s_lo + 1) if s >= col.s_lo else None
    if m is None:
        return x
    from .algebra import vecmat

    return vecmat(x, m, col.ngens(col.s_lo - 1))


def add_relations(c: Chart, m: BigradedModule, relations) -> Chart:
    for rel in relations:
        c.extensions.append(check_relation(c, m, rel))
    c.extensions.sort(key=lambda e: (e.source, e.target, e.op))
    return c


# ---------------------------------------------------------------- JSON and comparison


def chart_json(c: Chart, which: str = "E2") -> dict:
    """Chart document for the E2 page (with differentials) or E-infinity (with extensions)."""
    f_lo, f_hi = c.filtration_window
    dots_src = c.e2_dots if which == "E2" else c.einf_dots
    dots = []
    for (n, s), colors in sorted(dots_src.items()):
        if not (f_lo <= s <= f_hi):
            continue
        for color in sorted(colors):
            dots.append({"stem": n, "filtration": s, "group": list(colors[color].invariant_factors), "color": color})
    diffs = []
    if which == "E2":
        diffs = [
            {"n": d.source[0], "s": d.source[1], "r": d.r, "rank": d.rank}
            for d in c.differentials
            if f_lo <= d.source[1] <= f_hi
        ]
    exts = []
    if which != "E2":
        exts = [
            {"from": list(e.source), "to": list(e.target), "op": e.op, "exotic": e.exotic}
            for e in sorted(c.extensions, key=lambda e: (e.source, e.target, e.op))
            if f_lo <= e.source[1] <= f_hi and f_lo <= e.target[1] <= f_hi
        ]
    return {
        "page": which,
        "prime": c.prime,
        "theory": c.base_theory,
        "window": {"stems": list(c.stem_window), "filtrations": list(c.filtration_window)},
        "dots": dots,
        "differentials": diffs,
        "extensions": exts,
    }


def dumps_chart(c: Chart, which: str = "E2") -> str:
    return json.dumps(chart_json(c, which), sort_keys=True, indent=1)


@dataclass
class DiffReport:
    entries: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __str__(self) -> str:
        return "\n".join(self.entries) if self.entries else "charts agree"


def _restrict(doc: dict, stems, filts) -> dict:
    def ok(n, s):
        return stems[0] <= n <= stems[1] and filts[0] <= s <= filts[1]

    dots = {(d["stem"], d["filtration"], d["color"]): tuple(d["group"]) for d in doc["dots"] if ok(d["stem"], d["filtration"])}
    diffs = {(d["n"], d["s"], d["r"]): d["rank"] for d in doc["differentials"] if ok(d["n"], d["s"])}
    exts = {
        (tuple(e["from"]), tuple(e["to"]), e["op"]): e["exotic"]
        for e in doc["extensions"]
        if ok(*e["from"]) and ok(*e["to"])
    }
    return {"dots": dots, "differentials": diffs, "extensions": exts}


def compare_charts(a, b, stems=None, filtrations=None, which: str = "E2",
                   ignore_colors: bool = False) -> DiffReport:
    """Per-bidegree differences between two charts (or chart documents) on their overlap."""
    da = a if isinstance(a, dict) else chart_json(a, which)
    db = b if isinstance(b, dict) else chart_json(b, which)
    wa, wb = da["window"], db["window"]
    stems = stems or (max(wa["stems"][0], wb["stems"][0]), min(wa["stems"][1], wb["stems"][1]))
    filts = filtrations or (max(wa["filtrations"][0], wb["filtrations"][0]),
                            min(wa["filtrations"][1], wb["filtrations"][1]))
    ra, rb = _restrict(da, stems, filts), _restrict(db, stems, filts)
    if ignore_colors:
        for r in (ra, rb):
            merged = {}
            for (n, s, _), g in r["dots"].items():
                merged[(n, s)] = tuple(sorted(merged.get((n, s), ()) + g))
            r["dots"] = merged
    report = DiffReport()
    for kind in ("dots", "differentials", "extensions"):
        for key in sorted(set(ra[kind]) | set(rb[kind]), key=repr):
            va, vb = ra[kind].get(key), rb[kind].get(key)
            if va != vb:
                report.entries.append(f"{kind} {key}: {va} != {vb}")
    return report
