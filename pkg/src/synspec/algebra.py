"""Exact integer linear algebra: Smith/Hermite forms, lattices, f.g. abelian groups.

Elements of a group are integer row vectors; a homomorphism acts on the right,
``x -> x @ M``, so row ``i`` of the matrix is the image of generator ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

Matrix = list[list[int]]
Vector = tuple[int, ...]


class AlgebraError(ValueError):
    pass


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> Matrix:
    return [[0] * c for _ in range(r)]


def matmul(a: Matrix, b: Matrix, inner: int | None = None, cols: int | None = None) -> Matrix:
    """``a @ b``; ``cols`` is needed when ``b`` has no rows."""
    if not a:
        return []
    n = len(b) if inner is None else inner
    if cols is None:
        cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * cols
        for k in range(n):
            c = row[k]
            if c:
                bk = b[k]
                for j in range(cols):
                    if bk[j]:
                        acc[j] += c * bk[j]
        out.append(acc)
    return out


def vecmat(v, m: Matrix, cols: int) -> list[int]:
    acc = [0] * cols
    for c, row in zip(v, m):
        if c:
            for j in range(cols):
                acc[j] += c * row[j]
    return acc


def transpose(m: Matrix, cols: int | None = None) -> Matrix:
    if not m:
        return [[] for _ in range(cols or 0)]
    return [list(r) for r in zip(*m)]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# ---------------------------------------------------------------- Hermite form


def hnf_with_transform(rows: Matrix, ncols: int) -> tuple[Matrix, Matrix]:
    """Row Hermite normal form ``H = T @ rows`` with ``T`` unimodular.

    Zero rows of ``H`` sit at the bottom; the matching rows of ``T`` span the
    left kernel of ``rows``.
    """
    h = [list(r) for r in rows]
    m = len(h)
    t = identity(m)
    r = 0
    for c in range(ncols):
        if r == m:
            break
        piv = None
        for i in range(r, m):
            if h[i][c]:
                piv = i
                break
        if piv is None:
            continue
        for i in range(piv + 1, m):
            if not h[i][c]:
                continue
            a, b = h[piv][c], h[i][c]
            g, x, y = _xgcd(a, b)
            ua, ub = a // g, b // g
            hp, hi = h[piv], h[i]
            h[piv] = [x * p + y * q for p, q in zip(hp, hi)]
            h[i] = [ua * q - ub * p for p, q in zip(hp, hi)]
            tp, ti = t[piv], t[i]
            t[piv] = [x * p + y * q for p, q in zip(tp, ti)]
            t[i] = [ua * q - ub * p for p, q in zip(tp, ti)]
        h[r], h[piv] = h[piv], h[r]
        t[r], t[piv] = t[piv], t[r]
        if h[r][c] < 0:
            h[r] = [-v for v in h[r]]
            t[r] = [-v for v in t[r]]
        d = h[r][c]
        for i in range(r):
            q = h[i][c] // d
            if q:
                h[i] = [p - q * s for p, s in zip(h[i], h[r])]
                t[i] = [p - q * s for p, s in zip(t[i], t[r])]
        r += 1
    return h, t


def hnf(rows, ncols: int) -> Matrix:
    """Nonzero rows of the Hermite normal form: a canonical lattice basis."""
    if not rows:
        return []
    h, _ = hnf_with_transform([list(r) for r in rows], ncols)
    return [row for row in h if any(row)]


def left_kernel(rows: Matrix, ncols: int) -> Matrix:
    """Basis of ``{x : x @ rows = 0}`` in Hermite form."""
    m = len(rows)
    if m == 0:
        return []
    h, t = hnf_with_transform(rows, ncols)
    ker = [t[i] for i in range(m) if not any(h[i])]
    return hnf(ker, m)


# ---------------------------------------------------------------- lattices


@dataclass(frozen=True)
class Lattice:
    """Sublattice of ``Z^dim`` stored by its Hermite basis."""

    dim: int
    basis: tuple[Vector, ...] = ()

    @classmethod
    def span(cls, vectors, dim: int) -> Lattice:
        return cls(dim, tuple(tuple(r) for r in hnf(list(vectors), dim)))

    @classmethod
    def full(cls, dim: int) -> Lattice:
        return cls(dim, tuple(tuple(r) for r in identity(dim)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __add__(self, other: Lattice) -> Lattice:
        return Lattice.span(list(self.basis) + list(other.basis), self.dim)

    def __and__(self, other: Lattice) -> Lattice:
        a, b = list(self.basis), list(other.basis)
        if not a or not b:
            return Lattice(self.dim)
        ker = left_kernel(a + b, self.dim)
        return Lattice.span([vecmat(k[: len(a)], a, self.dim) for k in ker], self.dim)

    def contains(self, v) -> bool:
        return self.coordinates(v) is not None

    def __le__(self, other: Lattice) -> bool:
        return all(other.contains(v) for v in self.basis)

    def coordinates(self, v) -> list[int] | None:
        """Coefficients of ``v`` in the Hermite basis, or None if ``v`` is outside."""
        rest = list(v)
        coeffs = []
        for row in self.basis:
            c = next(j for j, x in enumerate(row) if x)
            q, r = divmod(rest[c], row[c])
            if r:
                return None
            coeffs.append(q)
            if q:
                rest = [a - q * b for a, b in zip(rest, row)]
        return coeffs if not any(rest) else None

    def image(self, m: Matrix, cols: int) -> Lattice:
        return Lattice.span([vecmat(b, m, cols) for b in self.basis], cols)

    def preimage(self, m: Matrix, source_dim: int) -> Lattice:
        """``{x in Z^source_dim : x @ m in self}``."""
        if source_dim == 0:
            return Lattice(0)
        stacked = [list(r) for r in m] + [list(b) for b in self.basis]
        ker = left_kernel(stacked, self.dim) if self.dim else identity(source_dim)
        return Lattice.span([k[:source_dim] for k in ker], source_dim)

    def index_in(self, other: Lattice) -> int:
        """``|other / self|``; 0 when infinite."""
        return group_from_presentation(
            [other.coordinates(b) for b in self.basis], other.rank
        ).order()


def solve_linear(rows: Matrix, y, modulo: Lattice) -> list[int] | None:
    """Some integer ``x`` with ``x @ rows - y`` in ``modulo``, or None."""
    n = len(rows)
    stacked = [[-v for v in y]] + [list(r) for r in rows]
    sol = modulo.preimage(stacked, n + 1)
    # Hermite basis: only the first vector can have a non-zero first entry
    if not sol.basis or abs(sol.basis[0][0]) != 1:
        return None
    sign = sol.basis[0][0]
    return [sign * v for v in sol.basis[0][1:]]


# ---------------------------------------------------------------- Smith form


def smith_normal_form(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return unimodular ``U, V`` and diagonal ``D`` with ``U @ M @ V == D``.

    Diagonal entries are non-negative and each divides the next.
    """
    d, u, v, _ = _smith(m)
    return u, d, v


def _smith(m: Matrix):
    rows = len(m)
    cols = len(m[0]) if rows else 0
    a = [list(r) for r in m]
    u = identity(rows)
    v = identity(cols)
    vinv = identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def row_combo(i, j, x, y, z, w):
        # (row_i, row_j) <- (x row_i + y row_j, z row_i + w row_j), det = 1
        ai, aj = a[i], a[j]
        a[i] = [x * p + y * q for p, q in zip(ai, aj)]
        a[j] = [z * p + w * q for p, q in zip(ai, aj)]
        ui, uj = u[i], u[j]
        u[i] = [x * p + y * q for p, q in zip(ui, uj)]
        u[j] = [z * p + w * q for p, q in zip(ui, uj)]

    def col_combo(i, j, x, y, z, w):
        # (col_i, col_j) <- (x col_i + y col_j, z col_i + w col_j)
        for mat in (a, v):
            for r in mat:
                p, q = r[i], r[j]
                r[i], r[j] = x * p + y * q, z * p + w * q
        # inverse acts on rows of vinv with the inverse 2x2 block (transposed)
        pi, pj = vinv[i], vinv[j]
        vinv[i] = [w * p - z * q for p, q in zip(pi, pj)]
        vinv[j] = [-y * p + x * q for p, q in zip(pi, pj)]

    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            for i in range(t + 1, rows):
                if a[i][t] % a[t][t] == 0:
                    if a[i][t]:
                        row_combo(t, i, 1, 0, -(a[i][t] // a[t][t]), 1)
                elif a[i][t]:
                    # the pivot strictly shrinks, so this terminates
                    g, x, y = _xgcd(a[t][t], a[i][t])
                    p, q = a[t][t] // g, a[i][t] // g
                    row_combo(t, i, x, y, -q, p)
            touched = False
            for j in range(t + 1, cols):
                if a[t][j] % a[t][t] == 0:
                    if a[t][j]:
                        col_combo(t, j, 1, 0, -(a[t][j] // a[t][t]), 1)
                elif a[t][j]:
                    g, x, y = _xgcd(a[t][t], a[t][j])
                    p, q = a[t][t] // g, a[t][j] // g
                    col_combo(t, j, x, y, -q, p)
                    touched = True
            if not touched:
                break
        piv = a[t][t]
        bad = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if a[i][j] % piv:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            row_combo(t, bad, 1, 1, 0, 1)
            continue
        if piv < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return a, u, v, vinv


# ---------------------------------------------------------------- groups


@dataclass(frozen=True)
class FgAbGroup:
    """``Z/d_1 + ... + Z/d_k`` with ``d_i | d_{i+1}``; a factor 0 means ``Z``.

    Torsion factors come first, then the free ones, and no factor equals 1.
    """

    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        fs = tuple(int(x) for x in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", fs)
        if any(x < 0 or x == 1 for x in fs):
            raise AlgebraError(f"invalid invariant factors {fs}")
        tors = [x for x in fs if x]
        if fs != tuple(tors) + (0,) * (len(fs) - len(tors)):
            raise AlgebraError(f"free factors must come last: {fs}")
        if any(b % a for a, b in zip(tors, tors[1:])):
            raise AlgebraError(f"invariant factors must divide each other: {fs}")

    @property
    def ngens(self) -> int:
        return len(self.invariant_factors)

    @property
    def rank(self) -> int:
        return self.invariant_factors.count(0)

    def is_zero(self) -> bool:
        return not self.invariant_factors

    def is_finite(self) -> bool:
        return self.rank == 0

    def order(self) -> int:
        """Cardinality, with 0 standing for infinite."""
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def torsion_order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d or 1
        return out

    def length(self) -> int:
        """Composition length of the torsion part (number of prime-order layers)."""
        return sum(_omega(d) for d in self.invariant_factors if d)

    def reduce(self, x) -> Vector:
        return tuple(v % d if d else v for v, d in zip(x, self.invariant_factors))

    def relations(self) -> Matrix:
        n = self.ngens
        return [[d if i == j else 0 for j in range(n)] for i, d in enumerate(self.invariant_factors) if d]

    def relation_lattice(self) -> Lattice:
        return Lattice(self.ngens, tuple(tuple(r) for r in self.relations()))

    def is_zero_element(self, x) -> bool:
        return not any(self.reduce(x))

    def p_primary(self, p: int) -> FgAbGroup:
        return FgAbGroup(tuple(f for f in (_p_part(d, p) for d in self.invariant_factors) if f != 1))

    def __str__(self) -> str:
        if not self.invariant_factors:
            return "0"
        return " + ".join("Z" if d == 0 else f"Z/{d}" for d in self.invariant_factors)

    @classmethod
    def parse(cls, text: str) -> FgAbGroup:
        """Inverse of ``str``; also accepts ``(Z/2)^2`` style powers."""
        text = text.replace(" ", "")
        if text in ("", "0"):
            return cls(())
        factors = []
        for part in text.split("+"):
            power = 1
            if part.startswith("(") and ")^" in part:
                part, power = part[1:].split(")^")
                power = int(power)
            d = 0 if part == "Z" else int(part.split("/")[1])
            factors.extend([d] * power)
        return direct_sum_factors(factors)


def direct_sum_factors(factors) -> FgAbGroup:
    """Normalize an arbitrary list of cyclic orders into invariant factors."""
    n = len(factors)
    return group_from_presentation([[f if i == j else 0 for j in range(n)] for i, f in enumerate(factors)], n)


def _omega(d: int) -> int:
    count, q = 0, 2
    while q * q <= d:
        while d % q == 0:
            d //= q
            count += 1
        q += 1
    return count + (d > 1)


def _p_part(d: int, p: int) -> int:
    if d == 0:
        return 0
    out = 1
    while d % p == 0:
        d //= p
        out *= p
    return out


@dataclass(frozen=True)
class Presentation:
    """A normalized group with the coordinate change from its presenting generators.

    ``to_group`` (n x k) sends presenting coordinates to normal coordinates and
    ``lift`` (k x n) sends normal generators back to presenting coordinates.
    """

    group: FgAbGroup
    to_group: Matrix
    lift: Matrix
    n: int = 0

    def project(self, x) -> Vector:
        return self.group.reduce(vecmat(x, self.to_group, self.group.ngens))

    def lift_element(self, y) -> list[int]:
        return vecmat(y, self.lift, self.n)


def present(relations, n_generators: int) -> Presentation:
    """Normalize ``Z^n / rowspan(relations)``."""
    rels = [list(r) for r in relations if any(r)]
    n = n_generators
    if not rels:
        return Presentation(FgAbGroup((0,) * n), identity(n), identity(n), n)
    d, _, v, vinv = _smith(rels)
    diag = [d[i][i] if i < len(d) else 0 for i in range(n)]
    keep = [i for i in range(n) if diag[i] != 1]
    tors = [i for i in keep if diag[i] != 0]
    free = [i for i in keep if diag[i] == 0]
    order = tors + free
    group = FgAbGroup(tuple(diag[i] for i in order))
    to_group = [[v[r][i] for i in order] for r in range(n)]
    lift = [list(vinv[i]) for i in order]
    return Presentation(group, to_group, lift, n)


def group_from_presentation(relations, n_generators: int) -> FgAbGroup:
    """The group ``Z^n`` modulo the row span of ``relations``."""
    return present(relations, n_generators).group


@dataclass(frozen=True)
class Subquotient:
    """``A / B`` for lattices ``B <= A`` in ``Z^dim``, with coordinate maps."""

    top: Lattice
    bottom: Lattice
    pres: Presentation = field(repr=False)

    @property
    def group(self) -> FgAbGroup:
        return self.pres.group

    def project(self, x) -> Vector | None:
        coords = self.top.coordinates(x)
        return None if coords is None else self.pres.project(coords)

    def lift(self, y) -> list[int]:
        return vecmat(self.pres.lift_element(y), list(self.top.basis), self.top.dim)


def subquotient(top: Lattice, bottom: Lattice) -> Subquotient:
    rels = []
    for b in bottom.basis:
        c = top.coordinates(b)
        if c is None:
            raise AlgebraError("bottom lattice is not contained in top lattice")
        rels.append(c)
    return Subquotient(top, bottom, present(rels, top.rank))


# ---------------------------------------------------------------- homomorphisms


@dataclass(frozen=True)
class AbHom:
    """A homomorphism given by the images of the source generators (rows)."""

    source: FgAbGroup
    target: FgAbGroup
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = tuple(tuple(self.target.reduce(r)) for r in self.matrix)
        if len(m) != self.source.ngens or any(len(r) != self.target.ngens for r in m):
            raise AlgebraError("matrix shape does not match source and target")
        for d, row in zip(self.source.invariant_factors, m):
            if d and not self.target.is_zero_element([d * x for x in row]):
                raise AlgebraError("homomorphism is not well defined")
        object.__setattr__(self, "matrix", m)

    def __call__(self, x) -> Vector:
        return self.target.reduce(vecmat(x, self.matrix, self.target.ngens))

    def compose(self, after: AbHom) -> AbHom:
        """``after o self``."""
        return AbHom(self.source, after.target, tuple(map(tuple, matmul(
            [list(r) for r in self.matrix], [list(r) for r in after.matrix], self.target.ngens, after.target.ngens))))

    def is_zero(self) -> bool:
        return all(self.target.is_zero_element(r) for r in self.matrix)

    @classmethod
    def zero(cls, source: FgAbGroup, target: FgAbGroup) -> AbHom:
        return cls(source, target, tuple((0,) * target.ngens for _ in range(source.ngens)))

    @classmethod
    def identity(cls, g: FgAbGroup) -> AbHom:
        return cls(g, g, tuple(map(tuple, identity(g.ngens))))

    @classmethod
    def scalar(cls, g: FgAbGroup, c: int) -> AbHom:
        return cls(g, g, tuple(tuple(c * x for x in r) for r in identity(g.ngens)))


def hom_parts(f: AbHom) -> dict:
    """Kernel, image and cokernel of ``f`` together with the canonical maps."""
    s, t = f.source, f.target
    m = [list(r) for r in f.matrix]
    rel_s, rel_t = s.relation_lattice(), t.relation_lattice()
    ker_lat = rel_t.preimage(m, s.ngens)
    ker = subquotient(ker_lat, rel_s)
    img_lat = Lattice.span(m, t.ngens) + rel_t
    img = subquotient(img_lat, rel_t)
    cok = present(list(img_lat.basis), t.ngens)
    inc = AbHom(ker.group, s, tuple(tuple(s.reduce(ker.lift(e))) for e in identity(ker.group.ngens)))
    proj = AbHom(t, cok.group, tuple(cok.project(e) for e in identity(t.ngens)))
    return {
        "kernel": ker.group,
        "image": img.group,
        "cokernel": cok.group,
        "kernel_inclusion": inc,
        "cokernel_projection": proj,
    }


# ---------------------------------------------------------------- valuations


def padic_valuation(p: int, n: int) -> int:
    if p < 2:
        raise AlgebraError(f"not a prime: {p}")
    if n == 0:
        raise AlgebraError("infinite valuation")
    n, v = abs(n), 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def eigen_order(p: int, k: int, d: int) -> int:
    """``ord_p(k^d - 1)``, the p-adic size of the Adams operation eigenvalue minus one."""
    value = k**d - 1
    if value == 0:
        raise AlgebraError(f"k^d - 1 vanishes for k={k}, d={d}")
    return padic_valuation(p, value)
