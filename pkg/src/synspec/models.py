"""Builders for the named synthetic spectra.

Connective K-theories come from closed-form presentations; everything else is
derived from them through :func:`synspec.les.solve_les`: the Wood sequence for
``ko``, fibres of ``psi^k - 1`` for the image-of-J spectra, cofibres of ``p`` for
Moore spectra.  Columns of closed-form models keep the coordinates of their
presentation, so that operators and generators stay valid.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .algebra import FgAbGroup, padic_valuation, solve_linear, vecmat
from .les import (
    COFIBRE,
    FIBRE,
    AmbiguousExtension,
    ExtensionHint,
    cokernel_column,
    kernel_column,
    shift_column,
    solve_les,
    solve_stem,
)
from .presentations import A_RING, ZTAU_RING, PresentedColumn, presented_map
from .taumod import (
    BigradedModule,
    ColumnMap,
    Generator,
    ModelError,
    Operator,
    TauColumn,
    _cut_column,
    invert_self_map,
    zero_column,
)

FP, BP = "Fp", "BP"
DEFAULT_CAP = 24
SYMBOL_ORDER = ("h0", "h1", "q1", "u", "v1", "alpha", "beta")

__all__ = [
    "AmbiguousExtension",
    "BoundarySpec",
    "ExtensionHint",
    "OperatorSpec",
    "build_j",
    "build_ko",
    "build_ku",
    "build_periodic",
    "moore",
    "psi_minus_one",
    "solve_les",
    "wood_ko",
]


def normalize_theory(theory: str) -> str:
    t = theory.strip().lower()
    if t == "bp":
        return BP
    if t in ("fp", "f2", "f3", "f5", "f_p"):
        return FP
    raise ModelError(f"unknown base theory {theory!r}")


def cover_degree(p: int) -> int:
    """Stem of the first class of the Adams summand above degree zero."""
    return 2 * p - 2


# ---------------------------------------------------------------- monomials


def monomial(**exps: int) -> str:
    """Canonical name of a product of generators, e.g. ``monomial(h1=2, beta=1)``."""
    parts = []
    for sym in SYMBOL_ORDER:
        e = exps.get(sym, 0)
        if e:
            parts.append(sym if e == 1 else f"{sym}^{e}")
    unknown = set(exps) - set(SYMBOL_ORDER)
    if unknown:
        raise ModelError(f"unknown symbols {sorted(unknown)}")
    return " ".join(parts) or "1"


_FACTOR = re.compile(r"^([A-Za-z][A-Za-z0-9]*)(?:\^(-?\d+))?$")


def parse_monomial(name: str) -> dict:
    if name == "1":
        return {}
    out: dict = {}
    for part in name.split():
        m = _FACTOR.match(part)
        if not m:
            raise ModelError(f"cannot parse generator name {name!r}")
        out[m.group(1)] = out.get(m.group(1), 0) + int(m.group(2) or 1)
    return out


def _shift_exponent(name: str, sym: str, by: int) -> str:
    exps = parse_monomial(name)
    exps[sym] = exps.get(sym, 0) + by
    return monomial(**exps)


# ---------------------------------------------------------------- closed forms


@dataclass
class _Presented:
    """Per-stem presentations of a closed-form model, kept for building operators."""

    p: int
    theory: str
    columns: dict = field(default_factory=dict)  # stem -> PresentedColumn

    def model(self, stems, cap=None, notes=()) -> BigradedModule:
        cols, gens = {}, []
        for n, pc in sorted(self.columns.items()):
            col = pc.column()
            if cap is not None:
                col = _cut_column(col, cap, True)
            cols[n] = col
            for name, s in pc.gens:
                if cap is None or s <= cap:
                    gens.append(Generator(name, (n, s), tuple(pc.element({name: 1}, s))))
        return BigradedModule(self.p, self.theory, tuple(stems), cols, tuple(gens), {}, tuple(notes), cap)

    def operator(self, name: str, degree: tuple[int, int], images) -> Operator:
        """``images(stem, generator name)`` returns a dict of target generator names and coefficients."""
        a, b = degree
        maps = {}
        for n, src in self.columns.items():
            tgt = self.columns.get(n + a)
            if tgt is None:
                continue
            imgs = {}
            tnames = {g for g, _ in tgt.gens}
            for g, _ in src.gens:
                img = {t: c for t, c in images(n, g).items() if t in tnames}
                if img:
                    imgs[g] = img
            maps[n] = presented_map(src, tgt, imgs, b)
        return Operator(name, degree, maps)


def build_ku(theory: str, p: int = 2, stems: tuple[int, int] = (0, 48)) -> BigradedModule:
    """Connective complex K-theory at ``p = 2``, its Adams summand at odd ``p``.

    Over F_p this is ``A{q1^d}`` with ``q1`` in bidegree ``(q, 1)``; over BP it is
    ``Z[v1, tau]`` (``v1 = u`` at ``p = 2``) concentrated in filtration 0.
    """
    theory = normalize_theory(theory)
    q = 2 if p == 2 else cover_degree(p)
    sym = "q1" if theory == FP else ("u" if p == 2 else "v1")
    pres = _Presented(p, theory)
    lo, hi = stems
    for d in range(max(lo, 0) // q, hi // q + 1):
        n = d * q
        if n < lo:
            continue
        if theory == FP:
            pres.columns[n] = PresentedColumn(n, A_RING, p, [(monomial(**{sym: d}), d)])
        else:
            pres.columns[n] = PresentedColumn(n, ZTAU_RING, p, [(monomial(**{sym: d}), 0)])
    m = pres.model(stems, notes=(f"{'ku' if p == 2 else 'ell'} over {theory}",))
    ops = {sym: pres.operator(sym, (q, 1 if theory == FP else 0), lambda n, g: {_shift_exponent(g, sym, 1): 1})}
    if theory == FP:
        ops["h0"] = pres.operator("h0", (0, 1), lambda n, g: {g: 1})
    return replace(m, operators=ops)


def build_ell(theory: str, p: int, stems: tuple[int, int] = (0, 48)) -> BigradedModule:
    if p == 2:
        raise ModelError("the Adams summand is built at odd primes; use ku at p = 2")
    return build_ku(theory, p, stems)


def _ko_f2_column(n: int) -> PresentedColumn | None:
    k, r = divmod(n, 8)
    if r == 0:
        return PresentedColumn(n, A_RING, 2, [(monomial(beta=k), 4 * k)])
    if r in (1, 2):
        g = monomial(h1=r, beta=k)
        s = 4 * k + r
        return PresentedColumn(n, A_RING, 2, [(g, s)], [(s + 1, {g: 1})])
    if r == 4:
        return PresentedColumn(n, A_RING, 2, [(monomial(alpha=1, beta=k), 4 * k + 3)])
    return None


def _ko_bp_column(n: int, cap: int) -> PresentedColumn | None:
    k, r = divmod(n, 8)
    gens, rels = [], []
    if r == 0:
        gens.append((monomial(beta=k), 0))
    if r == 4:
        gens.append((monomial(alpha=1, beta=k), 0))
    # eta-multiples: 2-torsion, and tau^2 kills eta^j for j >= 3
    for j in range(1, min(n, cap + 1) + 1):
        if (n - j) % 8:
            continue
        g = monomial(h1=j, beta=(n - j) // 8)
        gens.append((g, j))
        rels.append((j, {g: 2}))
        if j >= 3:
            rels.append((j - 2, {g: 1}))
    if not gens:
        return None
    return PresentedColumn(n, ZTAU_RING, 2, gens, rels)


def _ko_images(theory: str):
    """Products in ``pi_* ko``: the actions of h1, alpha and beta on monomials."""

    def h1(n, g):
        e = parse_monomial(g)
        if e.get("alpha"):
            return {}
        if theory == FP and e.get("h1", 0) >= 2:
            return {}
        e["h1"] = e.get("h1", 0) + 1
        return {monomial(**e): 1}

    def alpha(n, g):
        e = parse_monomial(g)
        if e.get("h1"):
            return {}
        if e.get("alpha"):
            # alpha^2 = 4 beta, detected by h0^2 beta over F_2
            e.pop("alpha")
            e["beta"] = e.get("beta", 0) + 1
            return {monomial(**e): 1 if theory == FP else 4}
        e["alpha"] = 1
        return {monomial(**e): 1}

    def beta(n, g):
        return {_shift_exponent(g, "beta", 1): 1}

    return h1, alpha, beta


def build_ko(theory: str, stems: tuple[int, int] = (0, 48), p: int = 2,
             filtration_cap: int | None = None) -> BigradedModule:
    """Connective real K-theory from its closed-form F_2- or BP-synthetic homotopy.

    Over BP the η-towers are infinite; they are truncated at ``filtration_cap``
    (classes in higher filtration are dropped, so the mod-τ data is exact only a
    few filtrations below the cap).
    """
    if p != 2:
        raise ModelError("ko is only modelled at the prime 2")
    theory = normalize_theory(theory)
    cap = None if theory == FP else (DEFAULT_CAP if filtration_cap is None else filtration_cap)
    pres = _Presented(2, theory)
    for n in range(max(stems[0], 0), stems[1] + 1):
        pc = _ko_f2_column(n) if theory == FP else _ko_bp_column(n, cap)
        if pc is not None:
            pres.columns[n] = pc
    m = pres.model(stems, cap, notes=(f"ko over {theory}",))
    h1, alpha, beta = _ko_images(theory)
    ops = {
        "h1": pres.operator("h1", (1, 1), h1),
        "alpha": pres.operator("alpha", (4, 3 if theory == FP else 0), alpha),
        "beta": pres.operator("beta", (8, 4 if theory == FP else 0), beta),
    }
    if theory == FP:
        ops["h0"] = pres.operator("h0", (0, 1), lambda n, g: {} if parse_monomial(g).get("h1") else {g: 1})
    return replace(m, operators=ops)


# ---------------------------------------------------------------- boundary data


@dataclass(frozen=True)
class BoundaryEntry:
    """``∂(x^n)`` for ``n = period * k + residue``: ``multiplier * tau^tau_power`` times the
    generator of the cyclic target group in filtration ``a * k + b``."""

    residue: int
    filtration: tuple[int, int] | None  # None: the boundary vanishes
    tau_power: int = 0
    multiplier: int = 1


@dataclass(frozen=True)
class BoundarySpec:
    source: str
    period: int
    entries: tuple
    theory: str = FP
    stem_shift: int = -2

    def target(self, power: int) -> tuple[int, int, int] | None:
        k, r = divmod(power, self.period)
        for e in self.entries:
            if e.residue == r:
                if e.filtration is None:
                    return None
                a, b = e.filtration
                return a * k + b, e.tau_power, e.multiplier
        raise ModelError(f"no boundary declared for {self.source}^{power}")


def _generator_element(col: TauColumn, s: int) -> list[int]:
    g = col.group(s)
    if g.ngens != 1:
        raise ModelError(f"stem {col.stem}: group {g} at filtration {s} is not cyclic")
    return [1]


def _solve_tau(col: TauColumn, s: int, y) -> list[int] | None:
    """Some ``x`` in filtration ``s`` with ``tau x = y``."""
    if col.ngens(s) == 0:
        return [] if col.group(s - 1).is_zero_element(y) else None
    return solve_linear(col.tau(s), list(y), col.rel(s - 1))


def boundary_map(spec: BoundarySpec, src_model: BigradedModule, n: int, tgt: TauColumn,
                 source_names: dict) -> ColumnMap:
    """Column map ``∂: (n, s) -> (n + stem_shift, s)`` determined by the image of the generator."""
    src = src_model.column(n)
    if src.is_zero:
        return ColumnMap(0, 0, {}, 0)
    name, s0 = source_names[n]
    power = parse_monomial(name).get(spec.source, 0)
    tgt_spec = spec.target(power)
    lo = min(src.s_lo, tgt.s_lo) - 1
    hi = max(src.s_hi, tgt.s_hi, s0) + 2
    if tgt_spec is None or tgt.is_zero:
        return ColumnMap(lo, hi, {}, 0)
    t, j, mult = tgt_spec
    if t - j != s0:
        raise ModelError(f"boundary of {name} lands in filtration {t - j}, expected {s0}")
    y0 = [mult * x for x in _generator_element(tgt, t)]
    y0 = vecmat(y0, tgt.tau_power(t, j), tgt.ngens(s0)) if j else y0
    x0 = [c for c in src_model_generator_coords(src_model, name, n, s0)]
    if len(x0) != 1 or abs(x0[0]) != 1:
        raise ModelError(f"generator {name} does not generate its group")
    sign = x0[0]
    mats = {s0: [[sign * v for v in y0]]}
    y = y0
    for s in range(s0 - 1, lo - 1, -1):
        y = vecmat(y, tgt.tau(s + 1), tgt.ngens(s))
        mats[s] = [[sign * v for v in tgt.group(s).reduce(y)]]
    y = y0
    p = src_model.prime
    for s in range(s0 + 1, hi + 1):
        if src.group(s).is_zero():
            break
        # tau of the h0-multiple in filtration s is p times the element in s - 1
        y = _solve_tau(tgt, s, [p * v for v in y])
        if y is None:
            raise ModelError(f"boundary of {name} does not extend to filtration {s}")
        mats[s] = [[sign * v for v in y]]
    return ColumnMap(lo, max(mats), mats, 0)


def src_model_generator_coords(m: BigradedModule, name: str, n: int, s: int) -> tuple:
    for g in m.generators:
        if g.name == name and g.bidegree == (n, s):
            return g.coords
    raise ModelError(f"no generator {name} at {(n, s)}")


def wood_ko(theory: str, spec: BoundarySpec, stems: tuple[int, int] = (0, 20),
            filtration_cap: int | None = None, hints=()) -> BigradedModule:
    """Derive ``ko`` from ``ku`` through the Wood sequence, one stem at a time.

    The fibre of ``∂: ku -> Σ^{2,0} ko`` is ``ko``; the kernel part of stem ``n``
    comes from ``ku_n`` and the cokernel part from ``ko_{n-1}`` (η-multiples), so
    every stem only needs stems already derived.
    """
    theory = normalize_theory(theory)
    cap = None if theory == FP else (DEFAULT_CAP if filtration_cap is None else filtration_cap)
    ku = build_ku(theory, 2, (0, stems[1] + 2))
    names = {g.bidegree[0]: (g.name, g.bidegree[1]) for g in ku.generators}
    derived: dict = {}
    parts: dict = {}
    hints_by = {}
    for h in hints:
        hints_by.setdefault(h.stem, []).append(h)
    for n in range(0, stems[1] + 1):
        tgt_n = derived.get(n + spec.stem_shift, zero_column(n + spec.stem_shift))
        tgt_n1 = derived.get(n + 1 + spec.stem_shift, zero_column(n + 1 + spec.stem_shift))
        f_n = boundary_map(spec, ku, n, tgt_n, names)
        f_n1 = boundary_map(spec, ku, n + 1, tgt_n1, names)
        k = kernel_column(f_n, ku.column(n), tgt_n)
        c = shift_column(cokernel_column(f_n1, ku.column(n + 1), tgt_n1), n, 1)
        col, red = solve_stem(shift_column(k, n, 0), c, 2, n, hints_by.get(n, ()), theory == FP)
        if cap is not None:
            col = _cut_column(col, cap, True).normalized(2)
        if not col.is_zero:
            derived[n] = col
            parts[n] = red
    cols = {n: c for n, c in derived.items() if stems[0] <= n <= stems[1]}
    return BigradedModule(2, theory, tuple(stems), cols, (), {}, ("ko from the Wood sequence",), cap).normalized()


# ---------------------------------------------------------------- Adams operations


@dataclass(frozen=True)
class OperatorSpec:
    """Scalars of an Adams operation ``psi^k`` on the named generators."""

    name: str
    k: int
    scalars: dict

    def scalar(self, generator: str) -> Fraction:
        out = Fraction(1)
        for sym, e in parse_monomial(generator).items():
            if sym not in self.scalars:
                raise ModelError(f"{self.name}: no scalar declared for {sym!r} (in {generator!r})")
            out *= Fraction(self.scalars[sym]) ** e
        return out


def default_operator(p: int) -> OperatorSpec:
    """``psi^3`` at ``p = 2``; ``psi^(p+1)`` on the Adams summand at odd ``p``."""
    if p == 2:
        from .config import builtin_config

        return builtin_config().operators["psi3"]
    k = p + 1
    v = k ** (p - 1)
    return OperatorSpec(f"psi{k}", k, {"h0": 1, "q1": v, "v1": v})


def psi_scalar(k: int, n: int) -> int:
    """``psi^k - 1`` on stem ``n``: ``k^(n/2) - 1`` on even stems, zero on odd ones.

    On negative stems the exact scalar ``k^(n/2) - 1`` is a fraction; it agrees
    with ``k^(|n|/2) - 1`` up to a p-local unit, which is what is returned.
    """
    if n % 2:
        return 0
    return k ** (abs(n) // 2) - 1


def _vp(p: int, x: Fraction) -> float:
    if x == 0:
        return float("inf")
    return padic_valuation(p, x.numerator) - padic_valuation(p, x.denominator)


def _element_order(g: FgAbGroup, x) -> int:
    from math import gcd

    order = 1
    for d, c in zip(g.invariant_factors, x):
        if d == 0:
            if c:
                return 0
            continue
        o = d // gcd(c, d)
        order = order * o // gcd(order, o)
    return order


def psi_minus_one(m: BigradedModule, k: int | None = None, spec: OperatorSpec | None = None) -> dict:
    """``psi^k - 1`` as an exact scalar on every column, checked against the generators."""
    p = m.prime
    spec = spec or default_operator(p)
    k = spec.k if k is None else k
    if k != spec.k:
        raise ModelError(f"operator spec {spec.name} is for k={spec.k}, not {k}")
    for g in m.generators:
        n, s = g.bidegree
        c = Fraction(psi_scalar(k, n))
        lam = spec.scalar(g.name) - 1
        order = _element_order(m.group(n, s), g.coords)
        if order == 0:
            ok = _vp(p, lam) == _vp(p, c)
        else:
            cap = padic_valuation(p, order)
            ok = min(_vp(p, lam), cap) == min(_vp(p, c), cap)
        if not ok:
            raise ModelError(f"{spec.name} on {g.name}: scalar {lam} disagrees with {c} on stem {n}")
    maps = {}
    for n, col in m.columns.items():
        c = psi_scalar(k, n)
        lo, hi = col.s_lo - 1, col.s_hi + 1
        mats = {s: [[c * int(i == j) for j in range(col.ngens(s))] for i in range(col.ngens(s))] for s in range(lo, hi + 1)}
        maps[n] = ColumnMap(lo, hi, mats, 0)
    return maps


# ---------------------------------------------------------------- image of J


def _cover(m: BigradedModule, degree: int) -> BigradedModule:
    """Vertical connective cover: keep stems ``>= degree`` without touching coordinates."""
    return replace(m, columns={n: c for n, c in m.columns.items() if n >= degree}, generators=(), operators={})


def build_j(theory: str, p: int = 2, hints=(), stems: tuple[int, int] = (0, 36),
            filtration_cap: int | None = None, op: OperatorSpec | None = None) -> BigradedModule:
    """Fibre of ``psi - 1`` from connective real K-theory (or the Adams summand) to its cover."""
    theory = normalize_theory(theory)
    window = (min(stems[0], 0), stems[1] + 1)
    if p == 2:
        base = build_ko(theory, window, filtration_cap=filtration_cap)
        degree = 4
    else:
        base = build_ku(theory, p, window)
        degree = cover_degree(p)
    target = _cover(base, degree)
    maps = {n: f for n, f in psi_minus_one(base, spec=op).items() if n >= degree}
    j = solve_les(base, target, maps, hints, FIBRE, stems=stems, name="psi - 1")
    return replace(j, notes=j.notes + (f"j over {theory} at p={p}",))


def build_periodic(family: str, theory: str, p: int = 2, stems: tuple[int, int] = (-18, 18), hints=(),
                   filtration_cap: int | None = None, op: OperatorSpec | None = None) -> BigradedModule:
    """``KO`` (β inverted), or ``J``, the fibre of ``psi - 1`` on it.

    At odd primes the periodic generator is ``v1`` (``q1`` over F_p) on the Adams summand.
    """
    theory = normalize_theory(theory)
    family = family.upper()
    if family not in ("KO", "J"):
        raise ModelError(f"unknown periodic family {family}")
    lo, hi = stems[0] - 1, stems[1] + 2
    if p == 2:
        cap = None if theory == FP else (DEFAULT_CAP if filtration_cap is None else filtration_cap)
        conn = build_ko(theory, (0, max(hi, 0) + (cap or 0) + 48), filtration_cap=cap)
        sym = "beta"
    else:
        conn = build_ku(theory, p, (0, max(hi, 0) + 12 * cover_degree(p)))
        sym = "q1" if theory == FP else "v1"
    periodic = invert_self_map(conn, sym, window=(lo, hi), rename=lambda g, j: _shift_exponent(g, sym, -j))
    periodic = replace(periodic, notes=(f"{family} over {theory} at p={p}",))
    if family == "KO":
        return replace(periodic, stem_window=tuple(stems), columns={
            n: c for n, c in periodic.columns.items() if stems[0] <= n <= stems[1]})
    maps = psi_minus_one(periodic, spec=op)
    return solve_les(periodic, periodic, maps, hints, FIBRE, stems=stems, name="psi - 1 on the periodic theory")


# ---------------------------------------------------------------- Moore spectra


def _h0_map(col: TauColumn, shifted: TauColumn, p: int) -> ColumnMap:
    """``h0 = tau^-1 * p`` from ``Σ^{0,1}`` of a τ-torsion-free column to the column itself."""
    lo, hi = col.s_lo - 1, col.s_hi + 2
    mats = {}
    for s in range(lo, hi + 1):
        rows = []
        for e in range(shifted.ngens(s)):
            x = [p * int(i == e) for i in range(col.ngens(s - 1))]
            y = _solve_tau(col, s, x)
            if y is None:
                raise ModelError(f"stem {col.stem}: p is not divisible by tau at filtration {s}")
            rows.append(y)
        mats[s] = rows
    return ColumnMap(lo, hi, mats, 0)


def moore(sphere: BigradedModule, hints=(), stems: tuple[int, int] | None = None) -> BigradedModule:
    """The Moore spectrum ``S/p`` as a cofibre: of ``h0`` over F_p, of ``p`` over BP."""
    from .taumod import suspend

    p = sphere.prime
    stems = stems or sphere.stem_window
    if stems[1] > sphere.stem_window[1] or stems[0] < sphere.stem_window[0]:
        raise ModelError(f"sphere fixture covers stems {sphere.stem_window}, not {stems}")
    if sphere.base_theory == FP:
        source = suspend(sphere, (0, 1))
        maps = {n: _h0_map(col, source.column(n), p) for n, col in sphere.columns.items()}
    else:
        source = sphere
        maps = {}
        for n, col in sphere.columns.items():
            lo, hi = col.s_lo - 1, col.s_hi + 1
            maps[n] = ColumnMap(lo, hi, {s: [[p * int(i == j) for j in range(col.ngens(s))]
                                             for i in range(col.ngens(s))] for s in range(lo, hi + 1)}, 0)
    # E2 is Ext over BP_*/p, an F_p-vector space, so the elementary filter applies to both theories
    return solve_les(source, sphere, maps, hints, COFIBRE, stems=stems, base_theory=sphere.base_theory,
                     name=f"multiplication by {p} on the sphere", elementary_e2=True)
