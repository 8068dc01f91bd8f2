"""Polynomial functions on the side bundle, vector fields, and sections of the double bundle.

Functions on E are exact polynomials in u1..um. A truncation degree d is
carried by the model and bounds the finite monomial basis used for complexes.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .linalg import Matrix, as_fraction

Exps = tuple


def monomials_up_to(m: int, d: int) -> list[Exps]:
    """Exponent tuples of total degree <= d in graded order (1, u1, u2, u1^2, u1u2, ...)."""
    out = []
    for deg in range(d + 1):
        level = [e for e in itertools.product(range(deg + 1), repeat=m) if sum(e) == deg]
        level.sort(key=lambda e: tuple(-x for x in e))
        out.extend(level)
    return out


def monomial_str(e: Exps) -> str:
    parts = []
    for i, p in enumerate(e):
        if p == 1:
            parts.append(f"u{i + 1}")
        elif p > 1:
            parts.append(f"u{i + 1}^{p}")
    return "*".join(parts) if parts else "1"


_FACTOR = re.compile(r"^u(\d+)(?:\^(\d+))?$")


def parse_monomial(text: str, m: int) -> Exps:
    s = text.replace(" ", "")
    e = [0] * m
    if s == "1":
        return tuple(e)
    for factor in s.split("*"):
        mt = _FACTOR.match(factor)
        if not mt:
            raise ValueError(f"malformed monomial {text!r}")
        i = int(mt.group(1))
        if not 1 <= i <= m:
            raise ValueError(f"coordinate u{i} out of range (dim E = {m})")
        e[i - 1] += int(mt.group(2) or 1)
    return tuple(e)


class Poly:
    """Sparse exact polynomial in nvars variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms = {e: c for e, c in terms.items() if c} if terms else {}

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        c = as_fraction(c)
        return cls(nvars, {(0,) * nvars: c} if c else None)

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, e: Exps, c=1) -> "Poly":
        return cls(len(e), {tuple(e): as_fraction(c)})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "Poly") -> "Poly":
        if not other.terms:
            return self
        if not self.terms:
            return other
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return Poly(self.nvars, t)

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, q) -> "Poly":
        if not q:
            return Poly(self.nvars)
        if q == 1:
            return self
        return Poly(self.nvars, {e: c * q for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not self.terms or not other.terms:
            return Poly(self.nvars)
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return Poly(self.nvars, t)

    __rmul__ = __mul__

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def min_degree(self) -> int:
        return min((sum(e) for e in self.terms), default=-1)

    def homogeneous_part(self, deg: int) -> "Poly":
        return Poly(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == deg})

    def derivative(self, i: int) -> "Poly":
        t = {}
        for e, c in self.terms.items():
            p = e[i]
            if p:
                e2 = e[:i] + (p - 1,) + e[i + 1:]
                t[e2] = t.get(e2, 0) + c * p
        return Poly(self.nvars, t)

    def compose(self, images: Sequence["Poly"]) -> "Poly":
        """Substitute u_i -> images[i]."""
        if len(images) != self.nvars:
            raise ValueError("composition needs one image per variable")
        nv = images[0].nvars if images else 0
        powers: dict = {}

        def power(i, p):
            key = (i, p)
            if key not in powers:
                powers[key] = Poly.const(nv, 1) if p == 0 else power(i, p - 1) * images[i]
            return powers[key]

        out = Poly(nv)
        for e, c in self.terms.items():
            term = Poly.const(nv, c)
            for i, p in enumerate(e):
                if p:
                    term = term * power(i, p)
            out = out + term
        return out

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, p in zip(point, e):
                if p:
                    v *= Fraction(x) ** p
            total += v
        return total

    def truncate(self, d: int) -> "Poly":
        return Poly(self.nvars, {e: c for e, c in self.terms.items() if sum(e) <= d})

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda ec: (sum(ec[0]), tuple(-x for x in ec[0])))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{monomial_str(e)}" if monomial_str(e) != "1" else f"{c}"
                          for e, c in self.sorted_terms())


class TruncatedAlgebra:
    """Monomial basis of degree <= d in m variables and the truncating product."""

    def __init__(self, m: int, d: int):
        if m < 0 or d < 0:
            raise ValueError("negative dimension or degree")
        self.m = m
        self.d = d
        self.basis = monomials_up_to(m, d)
        self.index = {e: i for i, e in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, f: Poly) -> bool:
        return all(e in self.index for e in f.terms)

    def truncate(self, f: Poly) -> Poly:
        return f.truncate(self.d)

    def multiply(self, f: Poly, g: Poly) -> Poly:
        return (f * g).truncate(self.d)

    def coords(self, f: Poly) -> list[Fraction]:
        v = [Fraction(0)] * self.dim
        for e, c in f.terms.items():
            if e not in self.index:
                raise ValueError(f"monomial {monomial_str(e)} exceeds truncation degree {self.d}")
            v[self.index[e]] = c
        return v


def poly_multiply(alg: TruncatedAlgebra, f: Poly, g: Poly) -> Poly:
    return alg.multiply(f, g)


class VectorField:
    """X = sum_i comps[i] d/du_i with polynomial components."""

    __slots__ = ("comps",)

    def __init__(self, comps: Sequence[Poly]):
        self.comps = tuple(comps)

    @classmethod
    def zero(cls, m: int) -> "VectorField":
        return cls([Poly(m) for _ in range(m)])

    @property
    def m(self) -> int:
        return len(self.comps)

    def __bool__(self) -> bool:
        return any(self.comps)

    def __eq__(self, other) -> bool:
        return isinstance(other, VectorField) and self.comps == other.comps

    def __hash__(self):
        return hash(self.comps)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField([a + b for a, b in zip(self.comps, other.comps)])

    def __neg__(self) -> "VectorField":
        return VectorField([-a for a in self.comps])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-other)

    def scale(self, q) -> "VectorField":
        return VectorField([a.scale(q) for a in self.comps])

    def times(self, f: Poly) -> "VectorField":
        return VectorField([f * a for a in self.comps])

    def apply(self, f: Poly) -> Poly:
        out = Poly(f.nvars)
        for i, a in enumerate(self.comps):
            if a:
                df = f.derivative(i)
                if df:
                    out = out + a * df
        return out

    def bracket(self, other: "VectorField") -> "VectorField":
        return VectorField([self.apply(b) - other.apply(a) for a, b in zip(self.comps, other.comps)])

    def degree(self) -> int:
        return max((a.degree() for a in self.comps), default=-1)

    def __repr__(self) -> str:
        return "VF(" + ", ".join(map(repr, self.comps)) + ")"


def vf_apply(x: VectorField, f: Poly) -> Poly:
    return x.apply(f)


class Section:
    """Section of W -> E: one polynomial coefficient per basis element (A-block first)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Poly]):
        self.coeffs = tuple(coeffs)

    @classmethod
    def zero(cls, n: int, m: int) -> "Section":
        return cls([Poly(m) for _ in range(n)])

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Section) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "Section") -> "Section":
        return Section([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "Section":
        return Section([-a for a in self.coeffs])

    def __sub__(self, other: "Section") -> "Section":
        return self + (-other)

    def scale(self, q) -> "Section":
        return Section([a.scale(q) for a in self.coeffs])

    def times(self, f: Poly) -> "Section":
        return Section([f * a for a in self.coeffs])

    def degree(self) -> int:
        return max((a.degree() for a in self.coeffs), default=-1)

    def __repr__(self) -> str:
        return "Section(" + ", ".join(map(repr, self.coeffs)) + ")"


@dataclass(frozen=True)
class DvbModel:
    """W = E x (A (+) C) over a point: dims a, m = dim E, c, truncation degree d."""

    a: int
    m: int
    c: int
    d: int

    def __post_init__(self):
        if min(self.a, self.m, self.c, self.d) < 0:
            raise ValueError("dimensions and truncation degree must be non-negative")

    @property
    def n(self) -> int:
        return self.a + self.c

    @property
    def algebra(self) -> TruncatedAlgebra:
        return TruncatedAlgebra(self.m, self.d)

    def is_core(self, i: int) -> bool:
        return i >= self.a

    def label(self, i: int) -> str:
        return f"A{i + 1}" if i < self.a else f"C{i - self.a + 1}"

    def parse_label(self, text: str) -> int:
        mt = re.fullmatch(r"([AC])(\d+)", text.strip())
        if not mt:
            raise ValueError(f"malformed basis index {text!r}")
        k = int(mt.group(2))
        limit = self.a if mt.group(1) == "A" else self.c
        if not 1 <= k <= limit:
            raise ValueError(f"unknown basis index {text!r} (dim {mt.group(1)} = {limit})")
        return k - 1 if mt.group(1) == "A" else self.a + k - 1

    def zero_poly(self) -> Poly:
        return Poly(self.m)

    def const(self, c) -> Poly:
        return Poly.const(self.m, c)

    def coord(self, i: int) -> Poly:
        return Poly.var(self.m, i)

    def zero_section(self) -> Section:
        return Section.zero(self.n, self.m)

    def basis_section(self, i: int, f: Poly | None = None) -> Section:
        coeffs = [Poly(self.m) for _ in range(self.n)]
        coeffs[i] = f if f is not None else Poly.const(self.m, 1)
        return Section(coeffs)

    def section(self, a_block: Sequence[Poly], c_block: Sequence[Poly]) -> Section:
        if len(a_block) != self.a or len(c_block) != self.c:
            raise ValueError("block sizes do not match the model")
        return Section(list(a_block) + list(c_block))

    def a_block(self, s: Section) -> tuple[Poly, ...]:
        return s.coeffs[:self.a]

    def c_block(self, s: Section) -> tuple[Poly, ...]:
        return s.coeffs[self.a:]

    def zero_vf(self) -> VectorField:
        return VectorField.zero(self.m)

    def is_linear_section(self, s: Section) -> bool:
        return (all(f.degree() <= 0 for f in self.a_block(s))
                and all(not f or (f.min_degree() == 1 and f.degree() == 1) for f in self.c_block(s)))

    def is_core_section(self, s: Section) -> bool:
        return (not any(self.a_block(s))) and all(f.degree() <= 0 for f in self.c_block(s))


def section_weight(model: DvbModel, i: int, e: Exps) -> int:
    """Homogeneity weight of the monomial e in component i of a section."""
    return sum(e) - (1 if model.is_core(i) else 0)


def section_weight_part(model: DvbModel, s: Section, q: int) -> Section:
    out = []
    for i, f in enumerate(s.coeffs):
        out.append(Poly(model.m, {e: c for e, c in f.terms.items() if section_weight(model, i, e) == q}))
    return Section(out)


def vf_weight_part(x: VectorField, q: int) -> VectorField:
    return VectorField([Poly(p.nvars, {e: c for e, c in p.terms.items() if sum(e) - 1 == q}) for p in x.comps])


# ---------------------------------------------------------------- automorphisms


class PolyMatrix:
    """Square matrix with polynomial entries."""

    def __init__(self, rows: Sequence[Sequence[Poly]]):
        self.rows = [list(r) for r in rows]
        self.n = len(self.rows)

    @classmethod
    def identity(cls, n: int, m: int) -> "PolyMatrix":
        return cls([[Poly.const(m, 1 if i == j else 0) for j in range(n)] for i in range(n)])

    @classmethod
    def constant(cls, mat: Matrix, m: int) -> "PolyMatrix":
        return cls([[Poly.const(m, x) for x in row] for row in mat.data])

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        n = self.n
        m = self.rows[0][0].nvars if n else 0
        out = [[Poly(m) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for k in range(n):
                a = self.rows[i][k]
                if a:
                    for j in range(n):
                        b = other.rows[k][j]
                        if b:
                            out[i][j] = out[i][j] + a * b
        return PolyMatrix(out)

    def truncate(self, d: int) -> "PolyMatrix":
        return PolyMatrix([[x.truncate(d) for x in r] for r in self.rows])

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return PolyMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        return PolyMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def compose(self, base_map: Sequence[Poly]) -> "PolyMatrix":
        return PolyMatrix([[x.compose(base_map) for x in r] for r in self.rows])

    def apply(self, s: Section) -> Section:
        m = s.coeffs[0].nvars if s.coeffs else 0
        out = []
        for r in self.rows:
            acc = Poly(m)
            for a, f in zip(r, s.coeffs):
                if a and f:
                    acc = acc + a * f
            out.append(acc)
        return Section(out)

    def constant_part(self) -> Matrix:
        return Matrix(self.n, self.n, [[x.constant_term() for x in r] for r in self.rows])

    def degree(self) -> int:
        return max((x.degree() for r in self.rows for x in r), default=-1)

    def is_identity(self) -> bool:
        return all(x == (1 if i == j else 0) for i, r in enumerate(self.rows) for j, x in enumerate(r))

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyMatrix) and self.rows == other.rows


def _constant_inverse(mat: Matrix) -> Matrix:
    from .linalg import solve_linear
    n = mat.rows
    cols = []
    for j in range(n):
        e = [Fraction(int(i == j)) for i in range(n)]
        x = solve_linear(mat, e)
        if x is None:
            raise ValueError("matrix is not invertible")
        cols.append(x)
    return Matrix.from_columns(n, cols)


def invert_poly_matrix(mat: PolyMatrix) -> PolyMatrix:
    """Polynomial inverse via a truncated Neumann series, verified exactly."""
    n = mat.n
    if n == 0:
        return mat
    m = mat.rows[0][0].nvars
    c0 = mat.constant_part()
    c0inv = PolyMatrix.constant(_constant_inverse(c0), m)
    nil = c0inv @ mat - PolyMatrix.identity(n, m)  # zero constant term
    bound = max(0, (n - 1) * max(mat.degree(), 0)) + 1
    for cap in sorted({bound, 2 * bound + 2}):
        acc = PolyMatrix.identity(n, m)
        power = PolyMatrix.identity(n, m)
        for _ in range(cap):
            power = (power @ nil).truncate(cap)
            neg = PolyMatrix([[x.scale(-1) for x in r] for r in power.rows])
            power = neg
            acc = acc + power
        inv = acc @ c0inv
        if (inv @ mat).is_identity() and (mat @ inv).is_identity():
            return inv
    raise ValueError("module matrix has no polynomial inverse")


def _linear_part(base_map: Sequence[Poly]) -> Matrix:
    m = len(base_map)
    rows = []
    for f in base_map:
        rows.append([f.terms.get(tuple(int(i == j) for i in range(m)), Fraction(0)) for j in range(m)])
    return Matrix(m, m, rows)


def invert_base_map(base_map: Sequence[Poly]) -> list[Poly]:
    """Polynomial inverse of a polynomial map fixing the origin, verified exactly."""
    m = len(base_map)
    if m == 0:
        return []
    if any(f.constant_term() for f in base_map):
        raise ValueError("base map must fix the origin (zero constant terms)")
    lin = _linear_part(base_map)
    lin_inv = _constant_inverse(lin)
    ident = [Poly.var(m, i) for i in range(m)]
    higher = [f - sum((Poly.var(m, j).scale(lin.data[i][j]) for j in range(m)), Poly(m))
              for i, f in enumerate(base_map)]
    top = max((f.degree() for f in base_map), default=1)
    bound = max(1, top) ** max(1, m - 1)
    g = [sum((ident[j].scale(lin_inv.data[i][j]) for j in range(m)), Poly(m)) for i in range(m)]
    for _ in range(bound + 1):
        hg = [h.compose(g).truncate(bound) for h in higher]
        rhs = [ident[i] - hg[i] for i in range(m)]
        g = [sum((rhs[j].scale(lin_inv.data[i][j]) for j in range(m)), Poly(m)) for i in range(m)]
    if [f.compose(g) for f in base_map] == ident and [f.compose(base_map) for f in g] == ident:
        return g
    raise ValueError("base map has no polynomial inverse")


@dataclass
class AutomorphismPair:
    """Bundle automorphism: base map u -> base_map(u) and fiber matrix at u.

    The pullback of a section is s -> module_matrix(u)^{-1} s(base_map(u)).
    """

    model: DvbModel
    base_map: list[Poly]
    module_matrix: PolyMatrix

    def __post_init__(self):
        if len(self.base_map) != self.model.m or self.module_matrix.n != self.model.n:
            raise ValueError("automorphism shapes do not match the model")
        if any(f.constant_term() for f in self.base_map):
            raise ValueError("base map must have zero constant terms")
        if self.model.n and _is_singular(self.module_matrix.constant_part()):
            raise ValueError("module matrix is not invertible")
        self._inv_matrix = None

    def module_inverse(self) -> PolyMatrix:
        if self._inv_matrix is None:
            self._inv_matrix = invert_poly_matrix(self.module_matrix)
        return self._inv_matrix

    def inverse(self) -> "AutomorphismPair":
        ginv = invert_base_map(self.base_map)
        # fiber of the inverse at u is M(ginv(u))^{-1}
        mat = self.module_inverse().compose(ginv) if self.model.m else self.module_inverse()
        return AutomorphismPair(self.model, ginv, mat)


def _is_singular(mat: Matrix) -> bool:
    from .linalg import rank
    return rank(mat) < mat.rows


def identity_pair(model: DvbModel) -> AutomorphismPair:
    return AutomorphismPair(model, [Poly.var(model.m, i) for i in range(model.m)],
                            PolyMatrix.identity(model.n, model.m))


def compose_pairs(phi: AutomorphismPair, psi: AutomorphismPair) -> AutomorphismPair:
    """phi o psi, so that (phi o psi)^* = psi^* phi^*."""
    base = [f.compose(psi.base_map) for f in phi.base_map] if phi.model.m else []
    mat_phi = phi.module_matrix.compose(psi.base_map) if phi.model.m else phi.module_matrix
    return AutomorphismPair(phi.model, base, mat_phi @ psi.module_matrix)


def homogeneity_pair(model: DvbModel, lam) -> AutomorphismPair:
    """Scalar multiplication by lam on the fibers of W -> A."""
    lam = as_fraction(lam)
    if lam == 0:
        raise ValueError("homogeneity parameter must be non-zero")
    m = model.m
    base = [Poly.var(m, i).scale(lam) for i in range(m)]
    rows = [[Poly.const(m, (lam if model.is_core(i) else 1) if i == j else 0) for j in range(model.n)]
            for i in range(model.n)]
    return AutomorphismPair(model, base, PolyMatrix(rows))


def pullback_section(phi: AutomorphismPair, s: Section) -> Section:
    if phi.model.m:
        moved = Section([f.compose(phi.base_map) for f in s.coeffs])
    else:
        moved = s
    return phi.module_inverse().apply(moved)


def pullback_function(phi: AutomorphismPair, f: Poly) -> Poly:
    return f.compose(phi.base_map) if phi.model.m else f


def pullback_vector_field(phi: AutomorphismPair, x: VectorField) -> VectorField:
    """phi_M^* o X o (phi_M^{-1})^*, recovered on coordinate functions."""
    m = phi.model.m
    ginv = invert_base_map(phi.base_map)
    comps = []
    for i in range(m):
        comps.append(x.apply(ginv[i]).compose(phi.base_map))
    return VectorField(comps)


def iter_nonzero(s: Section) -> Iterable[tuple[int, Poly]]:
    return ((i, f) for i, f in enumerate(s.coeffs) if f)
