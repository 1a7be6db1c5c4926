"""Closed-form presentations of the models, written out by hand.

Every column here is given directly by generators and relations; no long exact
sequence is solved.  Charts computed from these modules are therefore an
independent route to the chart fixtures, and the sphere presentations are the
source of the shipped sphere fixtures.

Generators flagged ``red`` are the classes detected in the fibre term of the
defining (co)fibre sequence; the rest are blue.  Modules without colours
(ko, the sphere) carry no fibre parts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import Lattice, padic_valuation
from .models import BP, DEFAULT_CAP, FP
from .presentations import A_RING, ZTAU_RING, PresentedColumn
from .taumod import BigradedModule, _cut_column


@dataclass
class StemData:
    """Generators ``(name, filtration, red)`` and relations ``(filtration, {name: coeff})``."""

    gens: list = field(default_factory=list)
    rels: list = field(default_factory=list)

    def gen(self, name: str, s: int, red: bool = False) -> None:
        self.gens.append((name, s, red))

    def rel(self, t: int, coeffs: dict) -> None:
        self.rels.append((t, coeffs))

    def cyclic(self, name: str, s: int, order: int, red: bool = False, tau_nilpotent: int | None = None) -> None:
        """A Z[tau]-generator of the given order (0 for Z), optionally killed by a power of tau."""
        self.gen(name, s, red)
        if order:
            self.rel(s, {name: order})
        if tau_nilpotent is not None:
            self.rel(s - tau_nilpotent, {name: 1})


def assemble(p: int, theory: str, window: tuple[int, int], stems: dict, cap: int | None = None,
             colored: bool = True, notes=()) -> BigradedModule:
    """Build a module from per-stem generators and relations (A over F_p, Z[tau] over BP)."""
    ring = A_RING if theory == FP else ZTAU_RING
    cols, parts = {}, {}
    for n in sorted(stems):
        data = stems[n]
        if not data.gens or not window[0] <= n <= window[1]:
            continue
        pc = PresentedColumn(n, ring, p, [(g, s) for g, s, _ in data.gens], data.rels)
        col = pc.column()
        if cap is not None:
            col = _cut_column(col, cap, True)
        if col.is_zero:
            continue
        cols[n] = col
        if colored:
            red = [i for i, (_, _, r) in enumerate(data.gens) if r]
            lats = {}
            for s in range(col.s_lo, col.s_hi + 1):
                alive = set(pc.present_at(s)) if col.ngens(s) else set()
                rows = [list(pc.element({i: 1}, s)) for i in red if i in alive]
                lats[s] = Lattice.span(rows, col.ngens(s))
            parts[n] = lats
    return BigradedModule(p, theory, tuple(window), cols, (), {}, tuple(notes), cap, parts)


def _stems(window) -> dict:
    return {n: StemData() for n in range(window[0], window[1] + 1)}


# ---------------------------------------------------------------- spheres


def sphere_ass_p2() -> BigradedModule:
    """F_2-synthetic sphere on stems 0-8: the Adams E2 page, which has no differentials there."""
    st = _stems((0, 8))
    st[0].gen("1", 0)
    st[1].gen("h1", 1)
    st[1].rel(2, {"h1": 1})
    st[2].gen("h1^2", 2)
    st[2].rel(3, {"h1^2": 1})
    st[3].gen("h2", 1)
    st[3].rel(4, {"h2": 1})  # h0^3 h2 = 0, and h0^2 h2 = h1^3
    st[6].gen("h2^2", 2)
    st[6].rel(3, {"h2^2": 1})
    st[7].gen("h3", 1)
    st[7].rel(5, {"h3": 1})
    st[8].gen("h1h3", 2)
    st[8].rel(3, {"h1h3": 1})
    st[8].gen("c0", 3)
    st[8].rel(4, {"c0": 1})
    m = assemble(2, FP, (0, 8), st, colored=False)
    return _named(m, "sphere", FP)


def sphere_anss_p2() -> BigradedModule:
    """BP-synthetic sphere on stems 0-8: the Adams-Novikov E2 page with its d3's on eta-powers."""
    st = _stems((0, 8))
    st[0].cyclic("1", 0, 0)
    for k in range(1, 9):
        # eta^k; from eta^4 on they are hit by d3, so tau^2 kills them
        st[k].cyclic(f"eta^{k}", k, 2, tau_nilpotent=2 if k >= 4 else None)
    st[3].cyclic("nu", 1, 0)
    st[3].rel(1, {"nu": 4, "eta^3": -1})  # 4 nu = tau^2 eta^3
    st[6].cyclic("nu^2", 2, 2)
    st[7].cyclic("sigma", 1, 16)
    st[8].cyclic("eta sigma", 2, 2)
    st[8].cyclic("epsilon", 2, 2)
    m = assemble(2, BP, (0, 8), st, colored=False)
    return _named(m, "sphere", BP)


def _named(m: BigradedModule, what: str, theory: str) -> BigradedModule:
    from dataclasses import replace

    return replace(m, notes=(f"{what} over {theory}",))


# ---------------------------------------------------------------- ko


def ko_f2(stems=(0, 48)) -> BigradedModule:
    """A{beta^k}, (A/h0){h1 beta^k}, (A/h0){h1^2 beta^k}, A{alpha beta^k}."""
    st = _stems(stems)
    for n in st:
        k, r = divmod(n, 8)
        if r == 0:
            st[n].gen("b", 4 * k)
        elif r in (1, 2):
            st[n].gen("h", 4 * k + r)
            st[n].rel(4 * k + r + 1, {"h": 1})
        elif r == 4:
            st[n].gen("a", 4 * k + 3)
    return assemble(2, FP, stems, st, colored=False)


def _eta_family(data: StemData, name: str, j: int, shift: int = 0, red: bool = False,
                nilpotent_from: int = 3) -> None:
    """The class ``eta^j x`` of a torsion-free ``x`` in filtration 0, moved up by ``shift``."""
    s = j + shift
    data.cyclic(name, s, 2, red, tau_nilpotent=2 if j >= nilpotent_from else None)


def ko_bp(stems=(0, 48), cap: int = DEFAULT_CAP) -> BigradedModule:
    """Z[h1, alpha, beta, tau]/(2h1, tau^2 h1^3, h1 alpha, alpha^2 - 4 beta), alpha and beta in filtration 0."""
    st = _stems(stems)
    for n in st:
        k, r = divmod(n, 8)
        if r == 0:
            st[n].cyclic("b", 0, 0)
        if r == 4:
            st[n].cyclic("a", 0, 0)
        for j in range(1, min(n, cap + 1) + 1):
            if (n - j) % 8 == 0:
                _eta_family(st[n], f"eta^{j}", j)
    return assemble(2, BP, stems, st, cap, colored=False)


# ---------------------------------------------------------------- connective image of J


def _ord_exponent(p: int, k: int) -> int:
    return padic_valuation(p, k) + (4 if p == 2 else 1)


def j_f2(stems=(0, 36)) -> BigradedModule:
    """The A-module description of j over F_2, at the bidegrees the fibre sequence produces.

    Stem 0: A{1}; 8k: (A/h0){P^(k-1) h1h3}; 8k+1: (A/h0){P^k h1, P^(k-1) h1^2 h3};
    8k+2: (A/h0){P^k h1^2}; 8k+3: (A/(tau h0)^3){P^k h2}; 8k+7: (A/(tau h0)^e){alpha_k}
    with e = ord_2(k+1) + 4.
    """
    st = _stems(stems)

    def a_mod_h0(n, name, s, red):
        st[n].gen(name, s, red)
        st[n].rel(s + 1, {name: 1})

    for n in st:
        k, r = divmod(n, 8)
        if n == 0:
            st[n].gen("1", 0)
        elif r == 0:
            a_mod_h0(n, "P h1h3", 4 * k + 2, True)
        elif r == 1:
            a_mod_h0(n, "P h1", 4 * k + 1, False)
            if k > 0:
                a_mod_h0(n, "P h1^2h3", 4 * k + 3, True)
        elif r == 2:
            a_mod_h0(n, "P h1^2", 4 * k + 2, False)
        elif r == 3:
            st[n].gen("P h2", 4 * k + 4, True)
            st[n].rel(4 * k + 4, {"P h2": 8})
        elif r == 7:
            st[n].gen("alpha", 4 * k + 5, True)
            st[n].rel(4 * k + 5, {"alpha": 2 ** _ord_exponent(2, k + 1)})
    return assemble(2, FP, stems, st)


def j_bp(stems=(0, 36), cap: int = DEFAULT_CAP) -> BigradedModule:
    """R{1, theta, nu} + sum_k B_k{alpha_k, x_k, y_k} over R = Z_2[tau, eta]/(2 eta, tau^2 eta^4).

    Relations: 2 theta, tau^2 theta (theta sits in (3, 5) and dies under tau^2),
    eta nu, 4 nu - tau^2 eta^3; B_k = Z/2^e[tau, eta]/(2 eta, tau^2 eta^3) with
    2 x_k, eta y_k, 4 y_k - tau^2 eta^2 x_k.
    """
    st = _stems(stems)
    top = cap + 2

    def add(n, name, s, order, red, nil=None):
        if n in st and s <= top:
            st[n].cyclic(name, s, order, red, tau_nilpotent=nil)

    add(0, "1", 0, 0, False)
    for i in range(1, top + 1):
        add(i, f"eta^{i}", i, 2, False, 2 if i >= 4 else None)
        add(3 + i - 1, f"eta^{i - 1} theta", 5 + i - 1, 2, True, 2)
    add(3, "nu", 1, 0, True)
    if 3 in st:
        st[3].rel(1, {"nu": 4, "eta^3": -1})
    k = 0
    while 8 * k + 7 <= stems[1]:
        e = _ord_exponent(2, k + 1)
        for i in range(0, top + 1):
            add(8 * k + 7 + i, f"eta^{i} alpha_{k}", 1 + i, 2 ** e if i == 0 else 2, True, 2 if i >= 3 else None)
            add(8 * k + 9 + i, f"eta^{i} x_{k}", 1 + i, 2, False, 2 if i >= 3 else None)
        n = 8 * k + 11
        add(n, f"y_{k}", 1, 0, True)
        if n in st:
            st[n].rel(1, {f"y_{k}": 4, f"eta^2 x_{k}": -1})
        k += 1
    return assemble(2, BP, stems, st, cap)


def j_odd(theory: str, p: int, stems=(0, 36)) -> BigradedModule:
    """C{1} + C/(tau h0)^e{alpha_n} over F_p, D{1} + D/p^e{alpha_n} over BP, e = ord_p(n) + 1.

    alpha_n sits in stem nq - 1 (q = 2p - 2), filtration n + 1 over F_p and 1 over BP.
    """
    q = 2 * p - 2
    st = _stems(stems)
    st[0].gen("1", 0)
    n = 1
    while n * q - 1 <= stems[1]:
        s = n + 1 if theory == FP else 1
        st[n * q - 1].gen("alpha", s, True)
        st[n * q - 1].rel(s, {"alpha": p ** _ord_exponent(p, n)})
        n += 1
    return assemble(p, theory, stems, st)


# ---------------------------------------------------------------- periodic image of J


def _beta_scalar_exponent(k: int) -> int:
    """2-adic valuation of psi^3 - 1 on beta^k, k != 0."""
    return padic_valuation(2, abs(k)) + 4


def periodic_j_f2(stems=(-18, 18)) -> BigradedModule:
    """Fibre of psi^3 - 1 on KO over F_2, written out stem by stem.

    Kernel classes (blue) come from beta^0 and the eta-classes; cokernel classes
    (red) come from beta^k (k != 0), alpha beta^k and the eta-classes one stem up,
    one filtration higher.
    """
    st = _stems(stems)
    for n in st:
        k, r = divmod(n, 8)
        data = st[n]
        if n == 0:
            data.gen("1", 0)
        if r in (1, 2):
            data.gen("h", 4 * k + r)
            data.rel(4 * k + r + 1, {"h": 1})
        # cokernel from stem n + 1, moved up one filtration
        k1, r1 = divmod(n + 1, 8)
        if r1 == 0:
            data.gen("alpha", 4 * k1 + 1, True)
            if k1 != 0:
                data.rel(4 * k1 + 1, {"alpha": 2 ** _beta_scalar_exponent(k1)})
        elif r1 in (1, 2):
            data.gen("c", 4 * k1 + r1 + 1, True)
            data.rel(4 * k1 + r1 + 2, {"c": 1})
        elif r1 == 4:
            data.gen("nu", 4 * k1 + 4, True)
            data.rel(4 * k1 + 4, {"nu": 8})
    return assemble(2, FP, stems, st)


def periodic_j_bp(stems=(-18, 18), cap: int = DEFAULT_CAP) -> BigradedModule:
    """Fibre of psi^3 - 1 on KO over BP: kernel plus shifted cokernel, glued by 4 y = tau^2 eta^3 beta^k."""
    st = _stems(stems)
    for n in st:
        data = st[n]
        if n == 0:
            data.cyclic("1", 0, 0)
        for j in range(1, cap + 2):
            if (n - j) % 8 == 0:
                # tau^2 eta^3 beta^k is no longer zero: it is 4y
                _eta_family(data, f"eta^{j}", j, nilpotent_from=4 if j == 3 else 3)
            if (n + 1 - j) % 8 == 0 and j + 1 <= cap + 1:
                _eta_family(data, f"c eta^{j}", j, shift=1, red=True)
        k1, r1 = divmod(n + 1, 8)
        if r1 == 0:
            data.cyclic("alpha", 1, 0 if k1 == 0 else 2 ** _beta_scalar_exponent(k1), True)
        elif r1 == 4:
            data.cyclic("y", 1, 0, True)
            data.rel(1, {"y": 4, "eta^3": -1})
    return assemble(2, BP, stems, st, cap)


# ---------------------------------------------------------------- Moore spectrum


def moore_f2() -> BigradedModule:
    """S/2 over F_2 on stems 0-8: the bottom cell (red) and top cell (blue) classes.

    Every piece is (A/h0){x} except stem 2, where h0 times the lift of h1 is h1^2.
    """
    st = _stems((0, 8))

    def a_mod_h0(n, name, s, red):
        st[n].gen(name, s, red)
        st[n].rel(s + 1, {name: 1})

    a_mod_h0(0, "1", 0, True)
    a_mod_h0(1, "h1", 1, True)
    st[2].gen("[h1]", 1)
    st[2].gen("h1^2", 2, True)
    st[2].rel(2, {"h1^2": 1, "[h1]": -1})
    st[2].rel(3, {"h1^2": 1})
    a_mod_h0(3, "h2", 1, True)
    a_mod_h0(3, "[h1^2]", 2, False)
    a_mod_h0(4, "[h0^2 h2]", 3, False)
    a_mod_h0(6, "h2^2", 2, True)
    a_mod_h0(7, "h3", 1, True)
    a_mod_h0(7, "[h2^2]", 2, False)
    a_mod_h0(8, "h1h3", 2, True)
    a_mod_h0(8, "c0", 3, True)
    a_mod_h0(8, "[h0^3 h3]", 4, False)
    return assemble(2, FP, (0, 8), st)


def moore_bp() -> BigradedModule:
    """S/2 over BP on stems 0-8.

    The cokernel of 2 (red) and the shifted kernel of 2 (blue) split except in
    stem 2, where twice the lift v of eta is tau^2 eta^2.
    """
    st = _stems((0, 8))
    st[0].cyclic("1", 0, 2, True)
    st[1].cyclic("eta", 1, 2, True)
    st[2].cyclic("v", 0, 0)
    st[2].cyclic("eta^2", 2, 2, True)
    st[2].rel(0, {"v": 2, "eta^2": -1})
    st[3].cyclic("nu", 1, 2, True)
    st[3].cyclic("eta^3", 3, 2, True, tau_nilpotent=2)
    st[3].cyclic("[eta^2]", 1, 2)
    for n in (4, 5, 6, 7, 8):
        st[n].cyclic(f"eta^{n}", n, 2, True, tau_nilpotent=2)
    st[4].cyclic("[eta^3]", 2, 2)
    st[5].cyclic("[eta^4]", 3, 2, tau_nilpotent=2)
    st[6].cyclic("nu^2", 2, 2, True)
    st[6].cyclic("[eta^5]", 4, 2, tau_nilpotent=2)
    st[7].cyclic("sigma", 1, 2, True)
    st[7].cyclic("[nu^2]", 1, 2)
    st[7].cyclic("[eta^6]", 5, 2, tau_nilpotent=2)
    st[8].cyclic("eta sigma", 2, 2, True)
    st[8].cyclic("epsilon", 2, 2, True)
    st[8].cyclic("[8 sigma]", 0, 2)
    st[8].cyclic("[eta^7]", 6, 2, tau_nilpotent=2)
    return assemble(2, BP, (0, 8), st)
