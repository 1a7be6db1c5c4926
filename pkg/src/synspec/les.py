"""Solving a three-term long exact sequence of τ-modules, one stem at a time.

Each stem of the unknown term is an extension ``0 -> C -> F -> K -> 0`` of
graded ``Z[tau]``-modules, where ``K`` is a kernel and ``C`` a cokernel of the
supplied maps.  Extensions are classified by ``Ext^1(K, C)``, computed from a
graded free resolution of ``K``; every class is assembled into a candidate
column and the candidates are filtered by automatic constraints and hints.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .algebra import FgAbGroup, Lattice, matmul, present, subquotient, vecmat
from .exact_couple import free_resolution
from .taumod import (
    BigradedModule,
    ColumnMap,
    H0Tower,
    ModelError,
    TauColumn,
    column_from_data,
    coker_part,
    ker_part,
    localize_column,
    zero_column,
)

FIBRE, COFIBRE = "fibre", "cofibre"
MAX_CANDIDATES = 4096


class AmbiguousExtension(ModelError):
    """Several non-isomorphic extensions survive every constraint."""

    def __init__(self, stem: int, candidates: list):
        self.stem = stem
        self.candidates = candidates
        shown = "; ".join(candidates[:4])
        super().__init__(f"stem {stem}: {len(candidates)} possible extensions ({shown})")


@dataclass(frozen=True)
class ExtensionHint:
    """External input pinning down the extension in one stem.

    ``tau_invert`` asserts the abutment group.  ``relation`` is
    ``(s, j, order)``: the image of ``tau^j`` on the group in filtration ``s``
    has the given order, which is how a relation such as ``4x = tau^2 y``
    shows up in the module.
    """

    stem: int
    tau_invert: FgAbGroup | None = None
    relation: tuple[int, int, int] | None = None
    label: str = ""

    def accepts(self, col: TauColumn) -> bool:
        if self.tau_invert is not None and col.stable_group() != self.tau_invert:
            return False
        if self.relation is not None:
            s, j, order = self.relation
            img = col.image_lattice(s - j, j)
            if subquotient(img, col.rel(s - j)).group.order() != order:
                return False
        return True


# ---------------------------------------------------------------- kernels and cokernels


def subquotient_column(col: TauColumn, tops: dict, bottoms: dict, stem: int, above: H0Tower | None) -> TauColumn:
    """The column ``s -> tops[s] / bottoms[s]`` of τ-stable lattices in ``col``."""
    lo, hi = min(tops), max(tops)
    sqs = {s: subquotient(tops[s], bottoms[s]) for s in range(lo, hi + 1)}
    groups = {s: sq.group for s, sq in sqs.items()}
    taus = {}
    for s in range(lo + 1, hi + 1):
        rows = []
        tmat = col.tau(s)
        for k in range(groups[s].ngens):
            x = sqs[s].lift([int(i == k) for i in range(groups[s].ngens)])
            y = vecmat(x, tmat, col.ngens(s - 1))
            img = sqs[s - 1].project(y)
            if img is None:
                raise ModelError(f"stem {stem}: lattice is not τ-stable at filtration {s}")
            rows.append(list(img))
        taus[s] = rows
    if above is not None and groups[hi].is_zero():
        above = None
    return column_from_data(stem, lo, hi, groups, taus, above)


def _map_window(f: ColumnMap, src: TauColumn, tgt: TauColumn) -> tuple[int, int]:
    lo = min(src.s_lo, tgt.s_lo - f.shift, f.lo) - 1
    hi = max(src.s_hi, tgt.s_hi - f.shift, f.hi) + 1
    return lo, hi


def kernel_column(f: ColumnMap, src: TauColumn, tgt: TauColumn) -> TauColumn:
    lo, hi = _map_window(f, src, tgt)
    tops, bottoms = {}, {}
    for s in range(lo, hi + 1):
        m = f.at(s, src, tgt)
        bottoms[s] = src.rel(s)
        tops[s] = tgt.rel(s + f.shift).preimage(m, src.ngens(s)) + bottoms[s]
    return subquotient_column(src, tops, bottoms, src.stem, src.above)


def cokernel_column(f: ColumnMap, src: TauColumn, tgt: TauColumn) -> TauColumn:
    """Cokernel, indexed by the target's filtration."""
    lo, hi = _map_window(f, src, tgt)
    tops, bottoms = {}, {}
    for s in range(lo, hi + 1):
        t = s + f.shift
        m = f.at(s, src, tgt)
        tops[t] = Lattice.full(tgt.ngens(t))
        bottoms[t] = Lattice.span(m, tgt.ngens(t)) + tgt.rel(t)
    return subquotient_column(tgt, tops, bottoms, tgt.stem, tgt.above)


def shift_column(col: TauColumn, stem: int, ds: int) -> TauColumn:
    return TauColumn(
        stem,
        col.s_lo + ds,
        col.s_hi + ds,
        {s + ds: g for s, g in col.groups.items()},
        {s + ds: h for s, h in col.tau_maps.items()},
        col.above,
    )


# ---------------------------------------------------------------- Ext^1


def _blocks(col: TauColumn, degrees) -> tuple[list[int], int]:
    offsets, n = [], 0
    for d in degrees:
        offsets.append(n)
        n += col.ngens(d)
    return offsets, n


def _block_relations(col: TauColumn, degrees, offsets, n) -> Lattice:
    rows = []
    for d, off in zip(degrees, offsets):
        for r in col.group(d).relations():
            row = [0] * n
            row[off:off + len(r)] = r
            rows.append(row)
    return Lattice.span(rows, n)


def _coboundary(col: TauColumn, src_deg, tgt_gens, src_off, n_src, tgt_off, n_tgt):
    """Matrix of ``Hom(P_i, C) -> Hom(P_(i+1), C)``, precomposition with the boundary."""
    rows = []
    for i, d in enumerate(src_deg):
        for e in range(col.ngens(d)):
            row = [0] * n_tgt
            for r, (dr, vec) in enumerate(tgt_gens):
                c = vec[i] if i < len(vec) else 0
                if not c:
                    continue
                img = vecmat([int(k == e) for k in range(col.ngens(d))], col.tau_power(d, d - dr), col.ngens(dr))
                for k, x in enumerate(img):
                    row[tgt_off[r] + k] += c * x
            rows.append(row)
    return rows


@dataclass
class ExtData:
    res: object
    p1_offsets: list
    n1: int
    classes: list = field(default_factory=list)  # cocycles in Hom(P1, C), one per p-primary class


def ext_classes(k: TauColumn, c: TauColumn, p: int) -> ExtData:
    """Representatives of the p-primary classes of ``Ext^1(K, C)`` (graded, degree-preserving)."""
    res = free_resolution(k)
    d0 = [d for d, _ in res.p0]
    d1 = [d for d, _ in res.p1]
    d2 = [d for d, _ in res.p2]
    off0, n0 = _blocks(c, d0)
    off1, n1 = _blocks(c, d1)
    off2, n2 = _blocks(c, d2)
    delta0 = _coboundary(c, d0, list(res.p1), off0, n0, off1, n1)
    delta1 = _coboundary(c, d1, list(res.p2), off1, n1, off2, n2)
    rel1 = _block_relations(c, d1, off1, n1)
    rel2 = _block_relations(c, d2, off2, n2)
    cocycles = (rel2.preimage(delta1, n1) if n2 else Lattice.full(n1)) + rel1
    cobounds = Lattice.span(delta0, n1) + rel1 if n0 else rel1
    sq = subquotient(cocycles, cobounds)
    data = ExtData(res, off1, n1)
    factors = sq.group.invariant_factors
    if any(d == 0 for d in factors):
        raise AmbiguousExtension(k.stem, ["infinitely many extension classes"])
    ranges = []
    for d in factors:
        q = 1
        while d % p == 0:
            d //= p
            q *= p
        ranges.append([i * d for i in range(q)])
    total = 1
    for r in ranges:
        total *= len(r)
    if total > MAX_CANDIDATES:
        raise AmbiguousExtension(k.stem, [f"{total} extension classes"])
    for y in itertools.product(*ranges):
        data.classes.append(sq.lift(list(y)) if y else [0] * n1)
    return data


def assemble_extension(k: TauColumn, c: TauColumn, data: ExtData, cocycle, lo: int, hi: int,
                       stem: int, above: H0Tower | None) -> tuple[TauColumn, dict]:
    """The middle term of the extension classified by ``cocycle``, with the sublattice of ``C``."""
    res = data.res
    p0 = res.p0
    groups, pres, alive = {}, {}, {}
    for s in range(lo, hi + 1):
        idx = [i for i, (d, _) in enumerate(p0) if d >= s]
        nc = c.ngens(s)
        n = nc + len(idx)
        rows = []
        for r in c.group(s).relations():
            rows.append(list(r) + [0] * len(idx))
        for r, (dr, vec) in enumerate(res.p1):
            if dr < s:
                continue
            off = data.p1_offsets[r]
            psi = cocycle[off:off + c.ngens(dr)]
            moved = vecmat(psi, c.tau_power(dr, dr - s), nc) if nc else []
            rows.append([-x for x in moved] + [vec[i] for i in idx])
        pr = present(rows, n)
        groups[s], pres[s], alive[s] = pr.group, pr, idx
    taus = {}
    for s in range(lo + 1, hi + 1):
        nc, nc1 = c.ngens(s), c.ngens(s - 1)
        pos = {i: k2 for k2, i in enumerate(alive[s - 1])}
        tm = c.tau(s)
        rows = []
        for y in range(groups[s].ngens):
            free = pres[s].lift_element([int(i == y) for i in range(groups[s].ngens)])
            cpart = vecmat(free[:nc], tm, nc1) if nc and nc1 else [0] * nc1
            ppart = [0] * len(alive[s - 1])
            for k2, i in enumerate(alive[s]):
                ppart[pos[i]] += free[nc + k2]
            rows.append(list(pres[s - 1].project(cpart + ppart)))
        taus[s] = rows
    red = {}
    for s in range(lo, hi + 1):
        nc = c.ngens(s)
        n = nc + len(alive[s])
        imgs = [pres[s].project([int(i == e) for i in range(n)]) for e in range(nc)]
        red[s] = Lattice.span([list(v) for v in imgs], groups[s].ngens)
    if above is not None and groups[hi].is_zero():
        above = None
    return column_from_data(stem, lo, hi, groups, taus, above), red


# ---------------------------------------------------------------- filtering


def _fingerprint(col: TauColumn) -> tuple:
    """Isomorphism invariants: each group with the images and kernels of all τ-powers on it."""
    lo, hi = col.s_lo - 1, col.s_hi + 1
    out = []
    for s in range(lo, hi + 1):
        row = [col.group(s).invariant_factors]
        n = col.ngens(s)
        power = [[int(i == k) for k in range(n)] for i in range(n)]
        for j in range(1, hi - lo + 2):
            power = [list(col.group(s - j).reduce(r)) for r in matmul(power, col.tau(s - j + 1), col.ngens(s - j + 1), col.ngens(s - j))]
            rel = col.rel(s - j)
            img = Lattice.span(power, col.ngens(s - j)) + rel
            ker = rel.preimage(power, n) + col.rel(s)
            row.append(subquotient(img, rel).group.invariant_factors)
            row.append(subquotient(ker, col.rel(s)).group.invariant_factors)
        out.append(tuple(row))
    return tuple(out)


def is_fp_elementary(col: TauColumn, p: int) -> bool:
    """Mod-τ homotopy of an F_p-synthetic spectrum is an F_p-vector space."""
    for s in range(col.s_lo - 1, col.s_hi + 3):
        for g in (coker_part(col, s, p), ker_part(col, s, p)):
            if any(d == 0 or d != p for d in g.invariant_factors):
                return False
    return True


def describe(col: TauColumn) -> str:
    parts = [f"s={s}:{col.group(s)}" for s in range(col.s_lo, col.s_hi + 1) if not col.group(s).is_zero()]
    return f"π={col.stable_group()} [" + ", ".join(parts) + "]"


def solve_stem(k: TauColumn, c: TauColumn, p: int, stem: int, hints=(), fp: bool = False):
    """All admissible extensions ``0 -> C -> F -> K -> 0`` in one stem.

    Returns the column together with the lattices of ``C`` inside it.  Raises
    :class:`AmbiguousExtension` when several survive and :class:`ModelError`
    when none does.
    """
    k = localize_column(k, p).normalized(p)
    c = localize_column(c, p).normalized(p)
    if k.is_zero and c.is_zero:
        return zero_column(stem), {}
    if k.above and c.above:
        raise ModelError(f"stem {stem}: both kernel and cokernel carry an h0-tower")
    h = max(k.s_hi, c.s_hi) + 1
    lo = min(k.s_lo, c.s_lo) - 1
    kt = k
    if k.above:
        kt = TauColumn(stem, k.s_lo, h, {s: k.group(s) for s in range(k.s_lo, h + 1)},
                       {s: k.tau_hom(s) for s in range(k.s_lo + 1, h + 1)}, None)
    above = k.above or c.above
    if k.is_zero:
        cand = [(shift_column(c, stem, 0), {s: Lattice.full(c.ngens(s)) for s in range(c.s_lo, c.s_hi + 1)})]
    else:
        data = ext_classes(kt, c, p)
        cand = [assemble_extension(kt, c, data, e, lo, h, stem, above) for e in data.classes]
    survivors = [(col, red) for col, red in cand
                 if not (fp and not is_fp_elementary(col, p)) and all(hint.accepts(col) for hint in hints)]
    if len(survivors) == 1:
        return survivors[0]
    seen = {}
    for col, red in survivors:
        seen.setdefault(_fingerprint(col), (col, red))
    if not seen:
        raise ModelError(f"stem {stem}: no extension is consistent with the constraints")
    if len(seen) > 1:
        raise AmbiguousExtension(stem, sorted(describe(col) for col, _ in seen.values()))
    return next(iter(seen.values()))


# ---------------------------------------------------------------- the solver


def solve_les(known_a: BigradedModule, known_b: BigradedModule, maps: dict, hints=(),
              form: str = FIBRE, stems: tuple[int, int] | None = None, base_theory: str | None = None,
              name: str = "", elementary_e2: bool | None = None) -> BigradedModule:
    """Third term of a long exact sequence, stem by stem.

    ``maps[n]`` is a :class:`ColumnMap` from column ``n`` of ``known_a`` to column
    ``n`` of ``known_b`` (missing stems mean the zero map).  With
    ``form="fibre"`` the result is the fibre of ``a -> b``; with ``"cofibre"``
    the cofibre.  Only stems whose neighbours lie inside both windows are
    computed, so a fibre's window shrinks by one stem.  ``elementary_e2``
    discards candidates whose mod-τ groups are not F_p-vector spaces; it
    defaults to on over F_p.
    """
    p = known_a.prime
    theory = base_theory or known_a.base_theory
    fp = theory == "Fp" if elementary_e2 is None else elementary_e2
    lo_a, hi_a = known_a.stem_window
    lo_b, hi_b = known_b.stem_window
    # stems below both windows are zero, stems above are unknown
    if form == FIBRE:
        window = (min(lo_a, lo_b), min(hi_a, hi_b) - 1)
    elif form == COFIBRE:
        window = (min(lo_a, lo_b), min(hi_a, hi_b))
    else:
        raise ModelError(f"unknown sequence form {form}")
    if stems is not None:
        if stems[0] < window[0] or stems[1] > window[1]:
            raise ModelError(f"requested stems {stems} exceed the solvable window {window}")
        window = stems
    by_stem: dict = {}
    for hint in sorted(hints, key=lambda h: (h.stem, h.label)):
        by_stem.setdefault(hint.stem, []).append(hint)
    cols, parts = {}, {}
    for n in range(window[0], window[1] + 1):
        kc, cc = les_terms(known_a, known_b, maps, n, form)
        col, red = solve_stem(kc, cc, p, n, by_stem.get(n, ()), fp)
        if not col.is_zero:
            cols[n] = col
            parts[n] = red
    notes = (f"{form} of {name}",) if name else ()
    m = BigradedModule(p, theory, window, cols, (), {}, notes, known_a.filtration_cap, parts)
    return m.normalized()


def les_terms(known_a: BigradedModule, known_b: BigradedModule, maps: dict, n: int,
              form: str) -> tuple[TauColumn, TauColumn]:
    """Kernel and cokernel contributions to stem ``n``, already placed in its filtrations."""

    def map_at(m):
        f = maps.get(m)
        if f is None:
            return ColumnMap(0, 0, {}, 0)
        return f

    if form == FIBRE:
        a, b = known_a.column(n), known_b.column(n)
        k = kernel_column(map_at(n), a, b)
        a1, b1 = known_a.column(n + 1), known_b.column(n + 1)
        c = shift_column(cokernel_column(map_at(n + 1), a1, b1), n, 1)
        return shift_column(k, n, 0), c
    a, b = known_a.column(n), known_b.column(n)
    c = shift_column(cokernel_column(map_at(n), a, b), n, 0)
    a1, b1 = known_a.column(n - 1), known_b.column(n - 1)
    k = shift_column(kernel_column(map_at(n - 1), a1, b1), n, -1)
    return k, c
