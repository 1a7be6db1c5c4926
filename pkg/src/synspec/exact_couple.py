"""Brute-force spectral sequence of a filtered chain complex.

This is the oracle for the τ-module dictionary.  A column ``G_*`` is realised
as ``H_0`` of a filtered complex of free abelian groups, obtained from a graded
free ``Z[tau]``-resolution ``0 -> P2 -> P1 -> P0 -> G``: a free generator in
degree ``s`` becomes a basis vector of filtration ``s`` and τ becomes the
inclusion ``F^{s+1} -> F^s``.  The spectral sequence is then computed from the
textbook formulas ``Z_r``, ``B_r`` without any reference to τ-divisibility.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import FgAbGroup, Lattice, subquotient, vecmat
from .sseq import Chart, Differential
from .taumod import E2Page, TauColumn, localize


@dataclass(frozen=True)
class FilteredComplexFixture:
    """Chain groups ``Z^{n_k}`` in degrees ``k = 0, 1, 2`` with filtration tags.

    ``d[k]`` has one row per basis vector of degree ``k`` (its boundary in
    degree ``k-1``); boundaries never lower filtration.
    """

    tags: tuple[tuple[int, ...], ...]
    d: tuple[tuple[tuple[int, ...], ...], ...]

    def rank(self, k: int) -> int:
        return len(self.tags[k]) if 0 <= k < len(self.tags) else 0

    def filtration_range(self) -> tuple[int, int]:
        all_tags = [t for ts in self.tags for t in ts]
        return (min(all_tags), max(all_tags)) if all_tags else (0, 0)

    def check(self) -> None:
        for k in range(1, len(self.tags)):
            for i, row in enumerate(self.d[k]):
                for j, c in enumerate(row):
                    if c and self.tags[k - 1][j] < self.tags[k][i]:
                        raise ValueError("boundary lowers filtration")
        for k in range(2, len(self.tags)):
            for row in self.d[k]:
                if any(vecmat(row, self.d[k - 1], self.rank(k - 2))):
                    raise ValueError("d o d != 0")


# ---------------------------------------------------------------- resolution


def _graded_pieces(col: TauColumn, lo: int, hi: int):
    """Generators of P0: lifts of generators of ``G_s / tau G_(s+1)`` for each ``s``."""
    gens: list[tuple[int, list[int]]] = []  # (degree, element of G_degree)
    for s in range(hi, lo - 1, -1):
        if col.group(s).is_zero():
            continue
        sq = subquotient(Lattice.full(col.ngens(s)), col.image_lattice(s, 1))
        for k in range(sq.group.ngens):
            y = [int(i == k) for i in range(sq.group.ngens)]
            gens.append((s, tuple(sq.lift(y))))
    return gens


def _p0_matrix(col: TauColumn, gens, t: int) -> tuple[list[int], list[list[int]]]:
    """Indices of P0 generators alive at degree ``t`` and their images in ``G_t``."""
    idx, rows = [], []
    for i, (s, x) in enumerate(gens):
        if s < t:
            continue
        img = vecmat(x, col.tau_power(s, s - t), col.ngens(t)) if s > t else list(x)
        idx.append(i)
        rows.append(img)
    return idx, rows


@dataclass(frozen=True)
class Resolution:
    """Graded free ``Z[tau]``-resolution ``0 -> P2 -> P1 -> P0 -> G`` of a column.

    Each generator is ``(degree, vector)``: for ``P0`` the vector is its image in
    ``G_degree``; for ``P1`` and ``P2`` it is the boundary in the previous free
    module, written in the basis of all its generators (a generator of degree
    ``t`` contributes ``tau^(t - degree)`` times itself).
    """

    p0: tuple
    p1: tuple
    p2: tuple


def free_resolution(col: TauColumn) -> Resolution:
    """Resolve a column that vanishes above its window."""
    if col.above:
        raise ValueError("only columns that vanish above their window can be resolved")
    lo, hi = col.s_lo, col.s_hi
    gens0 = _graded_pieces(col, lo, hi)
    n0 = len(gens0)

    def kernel_at(t: int) -> tuple[list[int], Lattice]:
        idx, rows = _p0_matrix(col, gens0, t)
        rel = col.rel(t)
        lat = rel.preimage(rows, len(idx)) if idx else Lattice(0)
        return idx, lat

    def embed(idx, vec, n):
        out = [0] * n
        for i, c in zip(idx, vec):
            out[i] = c
        return out

    # P1: generators of K_s modulo the image of K_{s+1}
    gens1: list[tuple[int, list[int]]] = []
    for s in range(hi, lo - 1, -1):
        idx, lat = kernel_at(s)
        full_lat = Lattice.span([embed(idx, b, n0) for b in lat.basis], n0)
        if s < hi:
            idx_up, lat_up = kernel_at(s + 1)
            up = Lattice.span([embed(idx_up, b, n0) for b in lat_up.basis], n0)
        else:
            up = Lattice(n0)
        sq = subquotient(full_lat, up)
        for k in range(sq.group.ngens):
            y = [int(i == k) for i in range(sq.group.ngens)]
            gens1.append((s, tuple(sq.lift(y))))
    n1 = len(gens1)

    # P2: kernel of P1 -> P0, degree by degree
    def syzygies_at(t: int) -> Lattice:
        rows, idx = [], []
        for j, (s, v) in enumerate(gens1):
            if s >= t:
                idx.append(j)
                rows.append(v)
        if not idx:
            return Lattice(n1)
        ker = Lattice(n0).preimage(rows, len(idx))
        return Lattice.span([embed(idx, b, n1) for b in ker.basis], n1)

    gens2: list[tuple[int, list[int]]] = []
    for s in range(hi, lo - 1, -1):
        here = syzygies_at(s)
        up = syzygies_at(s + 1) if s < hi else Lattice(n1)
        sq = subquotient(here, up)
        if sq.group.torsion_order() != 1:
            raise ValueError("second syzygy is not free")
        for k in range(sq.group.ngens):
            y = [int(i == k) for i in range(sq.group.ngens)]
            gens2.append((s, tuple(sq.lift(y))))

    return Resolution(tuple(gens0), tuple(gens1), tuple(gens2))


def column_to_filtered_complex(col: TauColumn) -> FilteredComplexFixture:
    """Free resolution of a finite column (zero above its window) as a filtered complex."""
    res = free_resolution(col)
    gens0, gens1, gens2 = res.p0, res.p1, res.p2
    tags = (
        tuple(s for s, _ in gens0),
        tuple(s for s, _ in gens1),
        tuple(s for s, _ in gens2),
    )
    d = ((), tuple(tuple(v) for _, v in gens1), tuple(tuple(v) for _, v in gens2))
    fx = FilteredComplexFixture(tags, d)
    fx.check()
    return fx


# ---------------------------------------------------------------- spectral sequence


class _Complex:
    def __init__(self, fx: FilteredComplexFixture):
        self.fx = fx
        self.lo, self.hi = fx.filtration_range()

    def F(self, k: int, level: int) -> Lattice:
        n = self.fx.rank(k)
        rows = [[int(i == j) for j in range(n)] for i, t in enumerate(self.fx.tags[k]) if t >= level] if n else []
        return Lattice.span(rows, n)

    def dmat(self, k: int):
        return [list(r) for r in self.fx.d[k]] if 0 < k < len(self.fx.tags) else []

    def Z(self, k: int, r: int, level: int) -> Lattice:
        """``{x in F^level C_k : d x in F^(level + r) C_(k-1)}``."""
        base = self.F(k, level)
        if k == 0 or not base.basis:
            return base
        m = self.dmat(k)
        n_prev = self.fx.rank(k - 1)
        images = [vecmat(b, m, n_prev) for b in base.basis]
        coeffs = self.F(k - 1, level + r).preimage(images, len(base.basis))
        return Lattice.span([vecmat(c, [list(b) for b in base.basis], self.fx.rank(k)) for c in coeffs.basis],
                            self.fx.rank(k))

    def boundary_of(self, k: int, lat: Lattice) -> Lattice:
        """``d(lat)`` where ``lat`` lives in degree ``k+1``."""
        if k + 1 >= len(self.fx.tags):
            return Lattice(self.fx.rank(k))
        return lat.image(self.dmat(k + 1), self.fx.rank(k))

    def E(self, k: int, r: int, level: int) -> tuple[Lattice, Lattice]:
        top = self.Z(k, r, level)
        bottom = self.Z(k, r - 1, level + 1) + self.boundary_of(k, self.Z(k + 1, r - 1, level - r + 1))
        return top, bottom

    def image_of_d(self, k: int, r: int, level: int) -> FgAbGroup:
        top = self.Z(k, r, level)
        bottom = self.Z(k, r + 1, level) + self.Z(k, r - 1, level + 1)
        return subquotient(top, bottom).group

    def e_infinity(self, k: int, level: int) -> FgAbGroup:
        cycles = self.Z(k, 10**6, level)
        bounds = self.F(k, level) & self.boundary_of(k, self.F(k + 1, -10**6))
        return subquotient(cycles, self.Z(k, 10**6, level + 1) + bounds).group


def brute_force_exact_couple(fx: FilteredComplexFixture, stem: int = 0, p: int | None = None) -> Chart:
    """Spectral sequence of the filtered complex, in synthetic coordinates.

    Degree 0 at level ``l`` is placed at ``(stem, l)``; degree 1 at level ``l``
    at ``(stem + 1, l - 1)``.  A filtered ``d_r`` becomes a synthetic
    ``d_(r+1)``.  With ``p`` given, every group is localized at ``p``.
    """
    cx = _Complex(fx)
    lo, hi = cx.lo - 1, cx.hi + 1
    width = hi - lo + 2
    e2: dict = {}
    e_inf: dict = {}
    diffs = []
    for level in range(lo, hi + 1):
        for k, pos in ((0, (stem, level)), (1, (stem + 1, level - 1))):
            top, bottom = cx.E(k, 1, level)
            g = localize(subquotient(top, bottom).group, p)
            if not g.is_zero():
                entry = e2.setdefault(pos, [FgAbGroup(), FgAbGroup()])
                entry[k] = g
        g = localize(cx.e_infinity(0, level), p)
        if not g.is_zero():
            e_inf[(stem, level)] = g
        for r in range(1, width + 1):
            img = localize(cx.image_of_d(1, r, level), p)
            if not img.is_zero():
                diffs.append(Differential((stem + 1, level - 1), (stem, level + r), r + 1, img.length() + img.rank, img))
    chart = Chart(p or 0, "oracle", (stem, stem + 1), (lo, hi), E2Page({k: tuple(v) for k, v in e2.items()}))
    chart.differentials = sorted(diffs, key=lambda d: (d.source, d.r))
    chart.e_infty = e_inf
    return chart


# ---------------------------------------------------------------- random fixtures


def random_column(rng, p: int = 2, max_torsion: int = 64, max_height: int = 7, stem: int = 0) -> TauColumn:
    """A random finite column presented over ``Z[tau]`` (zero above its window).

    ``rng`` is a :class:`random.Random`; columns whose window exceeds
    ``max_height`` or whose groups have torsion beyond ``max_torsion`` are
    rejected and redrawn.
    """
    from .presentations import ZTAU_RING, PresentedColumn

    coeffs = [1, p, p * p, -p, p ** 3, 0]
    while True:
        gens = [(f"g{i}", rng.randint(0, 4)) for i in range(rng.randint(1, 3))]
        rels = []
        for _ in range(rng.randint(0, 3)):
            t = rng.randint(0, 5)
            alive = [i for i, (_, s) in enumerate(gens) if s >= t]
            vec = {i: c for i in alive if (c := rng.choice(coeffs))}
            if vec:
                rels.append((t, vec))
        col = PresentedColumn(stem, ZTAU_RING, p, gens, rels).column()
        if col.s_hi - col.s_lo > max_height:
            continue
        if all(col.group(s).torsion_order() <= max_torsion for s in range(col.s_lo, col.s_hi + 1)):
            return col


# ---------------------------------------------------------------- dictionary oracle


def _order(g: FgAbGroup):
    return g.order() if g.is_finite() else ("Z", g.rank, g.torsion_order())


def chart_summary(c: Chart) -> tuple:
    """What the dictionary has to agree on: E2 orders per part, differentials, E-infinity groups."""
    e2 = {k: (_order(v[0]), _order(v[1])) for k, v in c.e2.entries.items()}
    diffs = sorted((d.source, d.target, d.r, tuple(d.image.invariant_factors)) for d in c.differentials)
    einf = {k: tuple(g.invariant_factors) for k, g in c.e_infty.items()}
    return e2, diffs, einf


def dictionary_mismatches(col: TauColumn, p: int) -> list[str]:
    """Differences between the signature of ``col`` and the filtered-complex oracle."""
    from .sseq import gamma_ss
    from .taumod import BigradedModule

    m = BigradedModule(p, "Fp", (col.stem, col.stem + 1), {col.stem: col})
    got = chart_summary(gamma_ss(m, stems=(col.stem, col.stem + 1)))
    want = chart_summary(brute_force_exact_couple(column_to_filtered_complex(col), col.stem, p))
    return [f"{name}: {a} != {b}" for name, a, b in zip(("E2", "differentials", "E-infinity"), got, want) if a != b]


def dictionary_oracle(seed: int = 0, count: int = 200, p: int = 2, max_torsion: int = 64,
                      max_height: int = 6) -> list[str]:
    """Run the oracle on ``count`` seeded random columns; an empty list means full agreement."""
    import random

    rng = random.Random(seed)
    out = []
    for i in range(count):
        col = random_column(rng, p, max_torsion, max_height)
        out.extend(f"column {i}: {e}" for e in dictionary_mismatches(col, p))
    return out
