"""Homotopy fixed points of complex conjugation on KU, run inside BP-synthetic spectra.

The E2 page is ``H^s(C2; pi_2w KU)`` with ``u -> -u``, computed from the
periodic resolution of ``Z`` over ``Z[C2]``.  The only differential is the
multiplicative extension of ``d3(u^2) = tau^2 h1^3``; the page collapses at E4
and every relation holds in the top filtration of its stem, so E4 is read off
directly as a sum of cyclic τ-modules.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import FgAbGroup, present
from .models import BP, DEFAULT_CAP
from .presentations import ZTAU_RING, PresentedColumn
from .taumod import BigradedModule, _cut_column


def c2_cohomology(s: int, sign: int) -> FgAbGroup:
    """``H^s(C2; Z)`` where the generator acts by ``sign``.

    Cochains of the periodic resolution are ``Z -> Z -> ...`` with differentials
    alternating ``1 - sign`` and ``1 + sign``.
    """
    if s < 0:
        return FgAbGroup()

    def d(k: int) -> int:  # C^k -> C^(k+1)
        return 1 - sign if k % 2 == 0 else 1 + sign

    out_rank = 0 if d(s) != 0 else 1  # kernel of C^s -> C^(s+1)
    if out_rank == 0:
        return FgAbGroup()
    if s == 0:
        return FgAbGroup((0,))
    return present([[d(s - 1)]], 1).group


@dataclass(frozen=True)
class E2Class:
    """Generator of ``H^s(C2; Z u^w)``: the class ``h1^s u^(w - s)``."""

    s: int
    w: int
    group: FgAbGroup

    @property
    def stem(self) -> int:
        return 2 * self.w - self.s

    @property
    def u_exponent(self) -> int:
        return self.w - self.s


def e2_page(stems: tuple[int, int], max_s: int) -> dict:
    """``(stem, s) -> E2Class`` for all non-zero groups with ``s <= max_s``."""
    out = {}
    for s in range(0, max_s + 1):
        for n in range(stems[0], stems[1] + 1):
            if (n + s) % 2:
                continue
            w = (n + s) // 2
            g = c2_cohomology(s, -1 if w % 2 else 1)
            if not g.is_zero():
                out[(n, s)] = E2Class(s, w, g)
    return out


def d3_coefficient(x: E2Class) -> int:
    """``d3(h1^j u^(2m)) = m tau^2 h1^(j+3) u^(2m-2)`` by the Leibniz rule from ``d3(u^2) = tau^2 h1^3``."""
    return x.u_exponent // 2


def hfpss_c2_ku(stems: tuple[int, int] = (0, 20), filtration_cap: int | None = None) -> BigradedModule:
    """``KO`` over BP as the C2-homotopy fixed points of ``KU``, re-expressed as a τ-module."""
    cap = DEFAULT_CAP if filtration_cap is None else filtration_cap
    lo, hi = stems
    e2 = e2_page((lo - 1, hi + 1), cap + 4)
    # sources with odd m support a non-zero d3; their targets die under tau^2
    hit = set()
    for (n, s), x in e2.items():
        if d3_coefficient(x) % 2 and (n - 1, s + 3) in e2:
            hit.add((n - 1, s + 3))
    cols = {}
    for n in range(lo, hi + 1):
        gens, rels = [], []
        for s in range(0, cap + 2):
            x = e2.get((n, s))
            if x is None:
                continue
            odd = d3_coefficient(x) % 2
            name = f"h1^{s} u^{x.u_exponent}"
            if s == 0:
                # Z -> Z/2 has kernel 2Z: the survivor is 2u^(2m) when m is odd
                gens.append((name if not odd else "2 " + name, 0))
                continue
            if odd:
                continue  # a source of a non-zero d3 on a Z/2
            gens.append((name, s))
            rels.append((s, {name: 2}))
            if (n, s) in hit:
                rels.append((s - 2, {name: 1}))
        if gens:
            col = _cut_column(PresentedColumn(n, ZTAU_RING, 2, gens, rels).column(), cap, True)
            if not col.is_zero:
                cols[n] = col
    return BigradedModule(2, BP, tuple(stems), cols, (), {}, ("C2 homotopy fixed points of KU",), cap)
