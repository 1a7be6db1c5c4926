"""Columns from generators and relations over ``Z[tau]`` or ``A = Z[tau, h0]/(tau h0 - p)``.

Over ``A`` every generator contributes one copy of ``Z`` in every filtration: the
monomial ``tau^k g`` below the generator and ``h0^k g`` above it.  Over ``Z[tau]``
a generator only lives at or below its own filtration.  Relations are integer
combinations of these monomials in a single filtration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import AbHom, FgAbGroup, Lattice, present, vecmat
from .taumod import ColumnMap, H0Tower, TauColumn

A_RING, ZTAU_RING = "A", "Ztau"


@dataclass
class PresentedColumn:
    stem: int
    ring: str
    p: int
    gens: list[tuple[str, int]]
    rels: list[tuple[int, dict]] = field(default_factory=list)

    def __post_init__(self):
        self._names = {name: i for i, (name, _) in enumerate(self.gens)}
        self._cache = {}

    # ------------------------------------------------------------ free module

    def present_at(self, s: int) -> list[int]:
        """Indices of generators with a monomial in filtration ``s``."""
        if self.ring == A_RING:
            return list(range(len(self.gens)))
        return [i for i, (_, si) in enumerate(self.gens) if si >= s]

    def tau_factor(self, i: int, s: int) -> int:
        """Coefficient of tau on generator ``i``'s monomial, from ``s+1`` to ``s``."""
        return 1 if s + 1 <= self.gens[i][1] else self.p

    def h0_factor(self, i: int, s: int) -> int:
        """Coefficient of h0 on generator ``i``'s monomial, from ``s`` to ``s+1``."""
        return self.p if s + 1 <= self.gens[i][1] else 1

    def move(self, vec: dict, t: int, s: int) -> dict:
        """Transport a free-module element from filtration ``t`` to ``s`` by tau or h0."""
        out = dict(vec)
        while t > s:
            t -= 1
            out = {i: c * self.tau_factor(i, t) for i, c in out.items() if self.gens[i][1] >= t or self.ring == A_RING}
        while t < s:
            if self.ring != A_RING:
                raise ValueError("h0 is not available over Z[tau]")
            out = {i: c * self.h0_factor(i, t) for i, c in out.items()}
            t += 1
        return {i: c for i, c in out.items() if c}

    def _indexed(self, vec: dict) -> dict:
        return {self._names[k] if isinstance(k, str) else k: c for k, c in vec.items()}

    def relations_at(self, s: int) -> list[list[int]]:
        idx = self.present_at(s)
        pos = {i: k for k, i in enumerate(idx)}
        rows = []
        for t, vec in self.rels:
            vec = self._indexed(vec)
            if self.ring != A_RING and t < s:
                continue
            moved = self.move(vec, t, s)
            row = [0] * len(idx)
            for i, c in moved.items():
                row[pos[i]] += c
            rows.append(row)
        return rows

    def pres(self, s: int):
        if s not in self._cache:
            idx = self.present_at(s)
            self._cache[s] = (idx, present(self.relations_at(s), len(idx)))
        return self._cache[s]

    # ------------------------------------------------------------ output

    def window(self) -> tuple[int, int]:
        levels = [s for _, s in self.gens] + [t for t, _ in self.rels]
        if not levels:
            return 0, 0
        return min(levels) - 1, max(levels) + 1

    def element(self, vec: dict, s: int) -> tuple[int, ...]:
        """Normal coordinates at ``s`` of a combination of generator monomials at ``s``."""
        idx, pr = self.pres(s)
        pos = {i: k for k, i in enumerate(idx)}
        free = [0] * len(idx)
        for i, c in self._indexed(vec).items():
            if i in pos:
                free[pos[i]] += c
        return pr.project(free)

    def column(self) -> TauColumn:
        lo, hi = self.window()
        groups, taus = {}, {}
        for s in range(lo, hi + 1):
            groups[s] = self.pres(s)[1].group
        for s in range(lo + 1, hi + 1):
            src_idx, src = self.pres(s)
            tgt_idx, tgt = self.pres(s - 1)
            rows = []
            for y in _basis(src.group.ngens):
                free = src.lift_element(y)
                vec = {src_idx[k]: c for k, c in enumerate(free) if c}
                rows.append(self.element(self.move(vec, s, s - 1), s - 1))
            taus[s] = AbHom(groups[s], groups[s - 1], tuple(rows))
        above = H0Tower(self.p) if self.ring == A_RING and not groups[hi].is_zero() else None
        return TauColumn(self.stem, lo, hi, groups, taus, above)


def _basis(n: int):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def presented_map(src: PresentedColumn, tgt: PresentedColumn, images: dict, shift: int,
                  lo: int | None = None, hi: int | None = None) -> ColumnMap:
    """Module map sending generator ``g`` to the combination ``images[g]`` in filtration ``s_g + shift``.

    The map is extended to every monomial by tau- and h0-linearity.
    """
    slo, shi = src.window()
    tlo, thi = tgt.window()
    lo = min(slo, tlo - shift) if lo is None else lo
    hi = max(shi, thi - shift) if hi is None else hi
    imgs = {src._names[k] if isinstance(k, str) else k: tgt._indexed(v) for k, v in images.items()}
    mats = {}
    for s in range(lo, hi + 1):
        src_idx, sp = src.pres(s)
        rows = []
        for y in _basis(sp.group.ngens):
            free = sp.lift_element(y)
            total = {}
            for k, c in enumerate(free):
                if not c:
                    continue
                i = src_idx[k]
                si = src.gens[i][1]
                img = imgs.get(i, {})
                # the monomial of g_i at s is tau^(si-s) g_i or h0^(s-si) g_i
                moved = tgt.move(img, si + shift, s + shift) if img else {}
                for j, d in moved.items():
                    total[j] = total.get(j, 0) + c * d
            rows.append(list(tgt.element(total, s + shift)))
        mats[s] = rows
    return ColumnMap(lo, hi, mats, shift)
