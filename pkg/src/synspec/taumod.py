"""Bigraded τ-modules: per-stem columns of groups linked by τ, and whole models.

A column at stem ``n`` records ``pi_{n,s}`` for ``s`` in a finite window.  Below
the window the groups are constant with τ an identity; above it they are either
zero or an h0-tower, where the top group repeats and τ is multiplication by p.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .algebra import (
    AbHom,
    AlgebraError,
    FgAbGroup,
    Lattice,
    Matrix,
    hom_parts,
    identity,
    matmul,
    subquotient,
    vecmat,
)

FORMAT_VERSION = 1


class ModelError(ValueError):
    pass


class WindowUnderflow(ModelError):
    def __init__(self, where: str = ""):
        super().__init__("window underflow" + (f" at {where}" if where else ""))


class InsufficientWindow(ModelError):
    def __init__(self, where: str = ""):
        super().__init__("insufficient window" + (f" at {where}" if where else ""))


@dataclass(frozen=True)
class H0Tower:
    p: int


def _mat(m) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in r) for r in m)


def localize(g: FgAbGroup, p: int | None) -> FgAbGroup:
    return g if not p else g.p_primary(p)


# ---------------------------------------------------------------- columns


@dataclass(frozen=True)
class TauColumn:
    stem: int
    s_lo: int
    s_hi: int
    groups: dict = field(hash=False)
    tau_maps: dict = field(hash=False)
    above: H0Tower | None = None

    # ------------------------------------------------------------ access

    def group(self, s: int) -> FgAbGroup:
        if s < self.s_lo:
            return self.groups[self.s_lo]
        if s > self.s_hi:
            return self.groups[self.s_hi] if self.above else FgAbGroup()
        return self.groups[s]

    def ngens(self, s: int) -> int:
        return self.group(s).ngens

    def tau(self, s: int) -> Matrix:
        """Integer matrix of τ: G_s -> G_{s-1}."""
        src, tgt = self.group(s), self.group(s - 1)
        if s <= self.s_lo:
            return identity(src.ngens)
        if s > self.s_hi:
            if not self.above:
                return [[0] * tgt.ngens for _ in range(src.ngens)]
            return [[self.above.p * x for x in r] for r in identity(src.ngens)]
        return [list(r) for r in self.tau_maps[s].matrix]

    def tau_hom(self, s: int) -> AbHom:
        return AbHom(self.group(s), self.group(s - 1), _mat(self.tau(s)))

    def tau_power(self, s: int, j: int) -> Matrix:
        """Matrix of τ^j: G_s -> G_{s-j}."""
        m = identity(self.ngens(s))
        for k in range(j):
            m = matmul(m, self.tau(s - k), self.ngens(s - k), self.ngens(s - k - 1))
            g = self.group(s - k - 1)
            m = [list(g.reduce(r)) for r in m]
        return m

    def rel(self, s: int) -> Lattice:
        return self.group(s).relation_lattice()

    def image_lattice(self, s: int, j: int) -> Lattice:
        """τ^j(G_{s+j}) inside G_s, as a lattice containing the relations."""
        n = self.ngens(s)
        if j == 0:
            return Lattice.full(n)
        return Lattice.span(self.tau_power(s + j, j), n) + self.rel(s)

    def kernel_lattice(self, s: int, j: int) -> Lattice:
        """ker(τ^j: G_s -> G_{s-j}), as a lattice containing the relations."""
        n = self.ngens(s)
        if j == 0:
            return self.rel(s)
        return self.rel(s - j).preimage(self.tau_power(s, j), n) + self.rel(s)

    @property
    def is_zero(self) -> bool:
        return all(g.is_zero() for g in self.groups.values())

    def stable_group(self) -> FgAbGroup:
        return self.groups[self.s_lo]

    # ------------------------------------------------------------ checks

    def violations(self) -> list[str]:
        out = []
        where = f"stem {self.stem}"
        if self.s_hi < self.s_lo:
            return [f"{where}: empty window"]
        for s in range(self.s_lo, self.s_hi + 1):
            if s not in self.groups:
                out.append(f"{where}: missing group at s={s}")
        for s in range(self.s_lo + 1, self.s_hi + 1):
            hom = self.tau_maps.get(s)
            if hom is None:
                out.append(f"{where}: missing tau map at s={s}")
                continue
            try:
                AbHom(self.groups[s], self.groups[s - 1], hom.matrix)
            except AlgebraError as exc:
                out.append(f"{where}: tau map at s={s} ill-defined ({exc})")
        if self.above:
            top = self.groups[self.s_hi]
            try:
                AbHom.scalar(top, self.above.p)
            except AlgebraError:
                out.append(f"{where}: tower tail ill-defined")
        return out

    # ------------------------------------------------------------ normal form

    def normalized(self, p: int | None = None) -> TauColumn:
        """Shrink the window to its essential part and make cyclic τ-maps canonical."""
        return self.normalized_with_units(p)[0]

    def normalized_with_units(self, p: int | None = None) -> tuple[TauColumn, dict]:
        """As :meth:`normalized`, also returning ``{s: u}`` with new generator = ``u`` * old one."""
        col = self
        groups, taus = dict(col.groups), dict(col.tau_maps)
        lo, hi, above = col.s_lo, col.s_hi, col.above
        if above is None:
            while hi > lo and groups[hi].is_zero():
                del groups[hi]
                taus.pop(hi, None)
                hi -= 1
            if groups[hi].is_zero():
                return zero_column(col.stem), {}
        else:
            while hi > lo and groups[hi] == groups[hi - 1] and taus[hi].matrix == AbHom.scalar(groups[hi], above.p).matrix:
                del groups[hi]
                del taus[hi]
                hi -= 1
        while lo < hi and _is_iso(taus[lo + 1]):
            del groups[lo]
            del taus[lo + 1]
            lo += 1
        col = TauColumn(self.stem, lo, hi, groups, taus, above)
        return _canonical_cyclic(col, p)


def _is_iso(h: AbHom) -> bool:
    if h.source != h.target:
        return False
    parts = hom_parts(h)
    return parts["kernel"].is_zero() and parts["cokernel"].is_zero()


def _canonical_cyclic(col: TauColumn, p: int | None) -> tuple[TauColumn, dict]:
    """When every group is cyclic, rescale generators so τ acts by ``gcd``-type scalars.

    Generators are rescaled from the top down; each τ-map then multiplies by the
    p-part of its original scalar (or by its gcd with the target order when no
    prime is given).  Multiplications by units are isomorphisms, so the column
    changes only up to isomorphism.
    """
    if any(g.ngens > 1 for g in col.groups.values()) or col.above and col.groups[col.s_hi].ngens != 1:
        return col, {}
    taus = {}
    unit = {col.s_hi: 1}  # new generator at s = unit[s] * old generator
    for s in range(col.s_hi, col.s_lo, -1):
        src, tgt = col.groups[s], col.groups[s - 1]
        if tgt.is_zero() or src.is_zero():
            taus[s] = AbHom.zero(src, tgt)
            unit[s - 1] = 1
            continue
        d = tgt.invariant_factors[0]
        c = col.tau_maps[s].matrix[0][0] * unit[s]
        c = c % d if d else c
        if c == 0:
            taus[s] = AbHom.zero(src, tgt)
            unit[s - 1] = 1
            continue
        target_scalar = _canonical_scalar(c, d, p)
        # choose u with c = target_scalar * u (u a unit modulo d, or +-1 over Z)
        u = _unit_quotient(c, target_scalar, d, p)
        if u is None:
            return col, {}
        unit[s - 1] = u
        taus[s] = AbHom(src, tgt, ((target_scalar,),))
    return replace(col, tau_maps=taus), unit


def _canonical_scalar(c: int, d: int, p: int | None) -> int:
    from math import gcd

    if d:
        return gcd(c, d)
    if p:
        v, c = 1, abs(c)
        while c % p == 0:
            c //= p
            v *= p
        return v
    return abs(c)


def _unit_quotient(c: int, t: int, d: int, p: int | None) -> int | None:
    """A unit ``u`` of the target group's endomorphism ring with ``c == t * u``."""
    from math import gcd

    if d:
        # c = t * u mod d with u a unit mod d
        m = d // t
        base = (c // t) % m if c % t == 0 else None
        if base is None:
            return None
        for k in range(t + 1):
            u = base + k * m
            if gcd(u, d) == 1:
                return u % d
        return None
    if c % t:
        return None
    u = c // t
    # over Z only signs can be undone integrally
    return u if abs(u) == 1 else None


def zero_column(stem: int) -> TauColumn:
    return TauColumn(stem, 0, 0, {0: FgAbGroup()}, {}, None)


def column_from_data(stem, s_lo, s_hi, groups, taus, above=None) -> TauColumn:
    """Build a column from invariant factors and τ matrices keyed by filtration."""
    gs = {s: g if isinstance(g, FgAbGroup) else FgAbGroup(tuple(g)) for s, g in groups.items()}
    ts = {s: AbHom(gs[s], gs[s - 1], _mat(m)) for s, m in taus.items()}
    return TauColumn(stem, s_lo, s_hi, gs, ts, above)


def column_value_at(c: TauColumn, s: int) -> FgAbGroup:
    return c.group(s)


def tau_invert(c: TauColumn) -> FgAbGroup:
    return c.stable_group()


def localize_column(col: TauColumn, p: int) -> TauColumn:
    """Tensor a column with the p-local integers (drop torsion prime to p)."""
    keep, groups = {}, {}
    for s, g in col.groups.items():
        idx, fs = [], []
        for i, d in enumerate(g.invariant_factors):
            q = d
            if d:
                q = 1
                while d % p == 0:
                    d //= p
                    q *= p
            if q != 1:
                idx.append(i)
                fs.append(q)
        keep[s] = idx
        groups[s] = FgAbGroup(tuple(fs))
    taus = {}
    for s, h in col.tau_maps.items():
        rows = [[h.matrix[i][j] for j in keep[s - 1]] for i in keep[s]]
        taus[s] = AbHom(groups[s], groups[s - 1], _mat(rows))
    return TauColumn(col.stem, col.s_lo, col.s_hi, groups, taus, col.above)


# ---------------------------------------------------------------- column maps


@dataclass(frozen=True)
class ColumnMap:
    """A τ-compatible family ``G_{n,s} -> G'_{n+a,s+shift}``.

    Matrices are stored for ``s`` in ``[lo, hi]``; below ``lo`` the ``lo`` matrix
    is reused and above ``hi`` the ``hi`` matrix (or zero once either side
    vanishes).
    """

    lo: int
    hi: int
    mats: dict = field(hash=False)
    shift: int = 0

    def at(self, s: int, src: TauColumn, tgt: TauColumn) -> Matrix:
        a, b = src.ngens(s), tgt.ngens(s + self.shift)
        if a == 0 or b == 0:
            return [[0] * b for _ in range(a)]
        key = min(max(s, self.lo), self.hi)
        m = self.mats.get(key)
        if m is None:
            return [[0] * b for _ in range(a)]
        g = tgt.group(s + self.shift)
        return [list(g.reduce(r)) for r in m]


def column_map_violations(f: ColumnMap, src: TauColumn, tgt: TauColumn, lo: int, hi: int, label: str) -> list[str]:
    """Check well-definedness and τ-commutation on ``[lo, hi]``."""
    out = []
    for s in range(lo, hi + 1):
        m = f.at(s, src, tgt)
        try:
            AbHom(src.group(s), tgt.group(s + f.shift), _mat(m))
        except AlgebraError:
            out.append(f"{label}: ill-defined at s={s}")
            continue
        left = matmul(src.tau(s), f.at(s - 1, src, tgt), src.ngens(s - 1), tgt.ngens(s - 1 + f.shift))
        right = matmul(m, tgt.tau(s + f.shift), tgt.ngens(s + f.shift), tgt.ngens(s - 1 + f.shift))
        g = tgt.group(s - 1 + f.shift)
        if any(not g.is_zero_element([x - y for x, y in zip(r1, r2)]) for r1, r2 in zip(left, right)):
            out.append(f"{label}: does not commute with tau at s={s}")
    return out


@dataclass(frozen=True)
class Operator:
    name: str
    degree: tuple[int, int]
    maps: dict = field(hash=False)  # stem -> ColumnMap


@dataclass(frozen=True)
class Generator:
    name: str
    bidegree: tuple[int, int]
    coords: tuple[int, ...]


# ---------------------------------------------------------------- models


@dataclass(frozen=True)
class BigradedModule:
    prime: int
    base_theory: str  # "Fp" or "BP"
    stem_window: tuple[int, int]
    columns: dict = field(hash=False)
    generators: tuple = ()
    operators: dict = field(default_factory=dict, hash=False)
    notes: tuple[str, ...] = ()
    filtration_cap: int | None = None
    fibre_parts: dict = field(default_factory=dict, hash=False)  # stem -> {s: Lattice}

    def column(self, n: int) -> TauColumn:
        col = self.columns.get(n)
        return col if col is not None else zero_column(n)

    def stems(self) -> range:
        return range(self.stem_window[0], self.stem_window[1] + 1)

    def group(self, n: int, s: int) -> FgAbGroup:
        return self.column(n).group(s)

    def tau_invert(self, n: int) -> FgAbGroup:
        return tau_invert(self.column(n))

    def in_window(self, n: int) -> bool:
        return self.stem_window[0] <= n <= self.stem_window[1]

    def with_columns(self, columns: dict, **kw) -> BigradedModule:
        return replace(self, columns=columns, **kw)

    def normalized(self) -> BigradedModule:
        cols, units = {}, {}
        for n, c in self.columns.items():
            c, units[n] = c.normalized_with_units(self.prime)
            if not c.is_zero:
                cols[n] = c
        gens = []
        for g in self.generators:
            n, s = g.bidegree
            u = units.get(n, {}).get(s, 1)
            coords = g.coords
            if u != 1:
                d = self.columns[n].group(s).invariant_factors[0]
                coords = tuple(x * pow(u, -1, d) % d if d else x * u for x in coords)
            gens.append(replace(g, coords=coords))
        parts = {}
        for n, lats in self.fibre_parts.items():
            if n in cols:
                kept = {s: lat for s, lat in lats.items() if cols[n].s_lo <= s <= cols[n].s_hi}
                if kept:
                    parts[n] = kept
        return replace(self, columns=cols, generators=tuple(gens), fibre_parts=parts)


def filtration_range(col: TauColumn, pad: int = 0) -> tuple[int, int]:
    return col.s_lo - pad, col.s_hi + pad


# ---------------------------------------------------------------- mod tau


@dataclass(frozen=True)
class E2Page:
    """Mod-τ homotopy, entry ``(n, s) -> (coker_part, ker_part)``."""

    entries: dict = field(hash=False)

    def get(self, n: int, s: int) -> tuple[FgAbGroup, FgAbGroup]:
        return self.entries.get((n, s), (FgAbGroup(), FgAbGroup()))


def coker_part(col: TauColumn, s: int, p: int | None = None) -> FgAbGroup:
    sq = subquotient(Lattice.full(col.ngens(s)), col.image_lattice(s, 1))
    return localize(sq.group, p)


def ker_part(col: TauColumn, t: int, p: int | None = None) -> FgAbGroup:
    """τ-torsion ``ker(τ: G_t -> G_{t-1})`` of the column; it lands at ``(n+1, t-2)``."""
    sq = subquotient(col.kernel_lattice(t, 1), col.rel(t))
    return localize(sq.group, p)


def mod_tau(m: BigradedModule, filtrations: tuple[int, int] | None = None) -> E2Page:
    """Mod-τ reduction on the stem window; the extension of the two parts is left open."""
    entries = {}
    for n in m.stems():
        col, prev = m.column(n), m.column(n - 1)
        lo, hi = filtrations or (min(col.s_lo, prev.s_lo - 2) - 1, max(col.s_hi, prev.s_hi - 2) + 1)
        for s in range(lo, hi + 1):
            c = coker_part(col, s, m.prime)
            k = ker_part(prev, s + 2, m.prime) if m.in_window(n - 1) else FgAbGroup()
            if not (c.is_zero() and k.is_zero()):
                entries[(n, s)] = (c, k)
    return E2Page(entries)


# ---------------------------------------------------------------- covers and truncations


@dataclass(frozen=True)
class LinearLine:
    """A line through the origin: vertical, or ``y = m x`` with ``m > -1``."""

    slope: Fraction | None = None  # None means vertical

    def __post_init__(self):
        if self.slope is not None:
            m = Fraction(self.slope)
            if m <= -1:
                raise ModelError("slope must exceed -1")
            object.__setattr__(self, "slope", m)

    @classmethod
    def vertical(cls) -> LinearLine:
        return cls(None)

    def side(self, x: int, y: int) -> int:
        """+1 on the side containing (1,-1), 0 on the line, -1 otherwise."""
        if self.slope is None:
            v = Fraction(x)
        else:
            v = self.slope * x - y
        return (v > 0) - (v < 0)


COVER, TRUNCATION = "cover", "truncation"


def truncate(m: BigradedModule, line: LinearLine, n: int, direction: str = COVER) -> BigradedModule:
    """Connective cover (keeps ``(a-n, b+n)`` on or right of the line) or the complementary truncation."""
    if m.stem_window[0] > m.stem_window[1]:
        raise WindowUnderflow("empty stem window")
    keep_cover = direction == COVER
    if direction not in (COVER, TRUNCATION):
        raise ModelError(f"unknown direction {direction}")
    cols = {}
    for a, col in m.columns.items():
        if line.slope is None:
            inside = line.side(a - n, 0) >= 0
            if inside == keep_cover:
                cols[a] = col
            continue
        # membership is monotone in b: kept filtrations are b <= cut for covers
        cut = _slope_cut(line.slope, a, n)
        cols[a] = _cut_column(col, cut, keep_cover)
    return replace(m, columns=cols).normalized()


def _slope_cut(m: Fraction, a: int, n: int) -> int:
    # (a-n, b+n) in L_>= iff b + n <= m (a - n)
    bound = m * (a - n) - n
    return bound.numerator // bound.denominator


def _cut_column(col: TauColumn, cut: int, keep_below: bool) -> TauColumn:
    lo, hi = min(col.s_lo, cut), max(col.s_hi, cut + 1)
    groups = {s: col.group(s) for s in range(lo, hi + 1)}
    taus = {s: col.tau_hom(s) for s in range(lo + 1, hi + 1)}
    above = col.above
    if keep_below:
        for s in range(cut + 1, hi + 1):
            groups[s] = FgAbGroup()
        above = None
    else:
        for s in range(lo, cut + 1):
            groups[s] = FgAbGroup()
    for s in range(lo + 1, hi + 1):
        if groups[s].is_zero() or groups[s - 1].is_zero():
            taus[s] = AbHom.zero(groups[s], groups[s - 1])
    return TauColumn(col.stem, lo, hi, groups, taus, above)


def suspend(m: BigradedModule, shift: tuple[int, int]) -> BigradedModule:
    a, b = shift
    cols = {}
    for n, c in m.columns.items():
        cols[n + a] = TauColumn(
            n + a,
            c.s_lo + b,
            c.s_hi + b,
            {s + b: g for s, g in c.groups.items()},
            {s + b: h for s, h in c.tau_maps.items()},
            c.above,
        )
    gens = tuple(replace(g, bidegree=(g.bidegree[0] + a, g.bidegree[1] + b)) for g in m.generators)
    ops = {
        name: replace(op, maps={n + a: replace(f, lo=f.lo + b, hi=f.hi + b, mats={s + b: x for s, x in f.mats.items()})
                                for n, f in op.maps.items()})
        for name, op in m.operators.items()
    }
    return replace(
        m,
        stem_window=(m.stem_window[0] + a, m.stem_window[1] + a),
        columns=cols,
        generators=gens,
        operators=ops,
        filtration_cap=None if m.filtration_cap is None else m.filtration_cap + b,
    )


# ---------------------------------------------------------------- self-map localization


def column_map_is_iso(f: ColumnMap, src: TauColumn, tgt: TauColumn) -> bool:
    lo = min(src.s_lo, tgt.s_lo - f.shift, f.lo) - 1
    hi = max(src.s_hi, tgt.s_hi - f.shift, f.hi) + 1
    for s in range(lo, hi + 1):
        a, b = src.group(s), tgt.group(s + f.shift)
        if a != b:
            return False
        if a.is_zero():
            continue
        if not _is_iso(AbHom(a, b, _mat(f.at(s, src, tgt)))):
            return False
    return True


def invert_self_map(m: BigradedModule, op_name: str, degree: tuple[int, int] | None = None,
                    window: tuple[int, int] | None = None, rename=None) -> BigradedModule:
    """Colimit along an operator; each output column is the eventual stable value.

    Generators are dropped unless ``rename(name, j)`` is given, which names a
    generator of the source stem after dividing it by the ``j``-th power of the
    operator.
    """
    op = m.operators.get(op_name)
    if op is None:
        raise ModelError(f"unknown operator {op_name}")
    a, b = degree or op.degree
    if (a, b) != op.degree:
        raise ModelError(f"operator {op_name} has degree {op.degree}, not {(a, b)}")
    lo, hi = window or m.stem_window
    cols, gens = {}, []
    for n in range(lo, hi + 1):
        if a == 0 and b == 0:
            cols[n] = m.column(n)
            continue
        j0 = -((m.stem_window[0] - n) // -a) if n < m.stem_window[0] else 0
        found = None
        j = j0
        while n + (j + 1) * a <= m.stem_window[1]:
            src_stem = n + j * a
            f = op.maps.get(src_stem)
            src, tgt = m.column(src_stem), m.column(src_stem + a)
            if f is None:
                iso = src.is_zero and tgt.is_zero
            else:
                iso = column_map_is_iso(f, src, tgt)
            if iso and found is None:
                found = j
            elif not iso:
                found = None
            j += 1
        if found is None:
            raise InsufficientWindow(f"stem {n}")
        src = m.column(n + found * a)
        shifted = TauColumn(
            n,
            src.s_lo - found * b,
            src.s_hi - found * b,
            {s - found * b: g for s, g in src.groups.items()},
            {s - found * b: h for s, h in src.tau_maps.items()},
            src.above,
        )
        cols[n] = shifted
        if rename is not None:
            for g in m.generators:
                if g.bidegree[0] == n + found * a:
                    gens.append(Generator(rename(g.name, found), (n, g.bidegree[1] - found * b), g.coords))
    return replace(m, stem_window=(lo, hi), columns=cols, generators=tuple(gens), operators={}).normalized()


# ---------------------------------------------------------------- validation


def validate_model(m: BigradedModule) -> list[str]:
    out = []
    for n, c in sorted(m.columns.items()):
        if c.stem != n:
            out.append(f"stem {n}: column labelled {c.stem}")
        out.extend(c.violations())
    for g in m.generators:
        n, s = g.bidegree
        grp = m.group(n, s)
        if len(g.coords) != grp.ngens:
            out.append(f"generator {g.name}: coordinates do not match group at {(n, s)}")
    for name, op in m.operators.items():
        a, b = op.degree
        for n, f in op.maps.items():
            src, tgt = m.column(n), m.column(n + a)
            lo = min(src.s_lo, tgt.s_lo - b) - 1
            hi = max(src.s_hi, tgt.s_hi - b) + 1
            out.extend(column_map_violations(f, src, tgt, lo, hi, f"operator {name} at stem {n}"))
    return out


# ---------------------------------------------------------------- serialization


def column_to_json(c: TauColumn) -> dict:
    return {
        "stem": c.stem,
        "s_lo": c.s_lo,
        "s_hi": c.s_hi,
        "groups": [{"s": s, "invariant_factors": list(c.groups[s].invariant_factors)} for s in sorted(c.groups)],
        "tau": [{"s": s, "matrix": [list(r) for r in c.tau_maps[s].matrix]} for s in sorted(c.tau_maps)],
        "above": {"h0tower": c.above.p} if c.above else "zero",
        "below": "stable",
    }


def column_from_json(d: dict) -> TauColumn:
    above = d.get("above", "zero")
    above = H0Tower(int(above["h0tower"])) if isinstance(above, dict) else None
    groups = {int(g["s"]): g["invariant_factors"] for g in d["groups"]}
    taus = {int(t["s"]): t["matrix"] for t in d.get("tau", [])}
    return column_from_data(int(d["stem"]), int(d["s_lo"]), int(d["s_hi"]), groups, taus, above)


def model_to_json(m: BigradedModule) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "prime": m.prime,
        "base_theory": m.base_theory,
        "stem_window": list(m.stem_window),
        "filtration_cap": m.filtration_cap,
        "columns": [column_to_json(m.columns[n]) for n in sorted(m.columns)],
        "generators": [
            {"name": g.name, "bidegree": list(g.bidegree), "coords": list(g.coords)} for g in m.generators
        ],
        "operators": [
            {
                "name": op.name,
                "degree": list(op.degree),
                "maps": [
                    {
                        "stem": n,
                        "lo": f.lo,
                        "hi": f.hi,
                        "shift": f.shift,
                        "mats": [{"s": s, "matrix": [list(r) for r in f.mats[s]]} for s in sorted(f.mats)],
                    }
                    for n, f in sorted(op.maps.items())
                ],
            }
            for op in m.operators.values()
        ],
        "notes": list(m.notes),
        "fibre_parts": [
            {"stem": n, "s": s, "basis": [list(b) for b in lat.basis]}
            for n in sorted(m.fibre_parts)
            for s, lat in sorted(m.fibre_parts[n].items())
        ],
    }


def model_from_json(d: dict) -> BigradedModule:
    version = d.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ModelError(f"unsupported model format version {version}")
    cols = {}
    for c in d["columns"]:
        col = column_from_json(c)
        cols[col.stem] = col
    gens = tuple(Generator(g["name"], tuple(g["bidegree"]), tuple(g["coords"])) for g in d.get("generators", []))
    ops = {}
    for o in d.get("operators", []):
        maps = {
            int(f["stem"]): ColumnMap(int(f["lo"]), int(f["hi"]),
                                      {int(x["s"]): [list(r) for r in x["matrix"]] for x in f["mats"]},
                                      int(f.get("shift", 0)))
            for f in o["maps"]
        }
        ops[o["name"]] = Operator(o["name"], tuple(o["degree"]), maps)
    cap = d.get("filtration_cap")
    parts: dict = {}
    for f in d.get("fibre_parts", []):
        n, s = int(f["stem"]), int(f["s"])
        parts.setdefault(n, {})[s] = Lattice.span(f["basis"], cols[n].ngens(s) if n in cols else 0)
    return BigradedModule(
        int(d["prime"]),
        d["base_theory"],
        tuple(d["stem_window"]),
        cols,
        gens,
        ops,
        tuple(d.get("notes", [])),
        None if cap is None else int(cap),
        parts,
    )


def dumps(m: BigradedModule) -> str:
    return json.dumps(model_to_json(m), sort_keys=True, indent=1)


def loads(text: str) -> BigradedModule:
    return model_from_json(json.loads(text))
