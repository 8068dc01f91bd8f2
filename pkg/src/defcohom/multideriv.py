"""Multiderivations of the section module, their Gerstenhaber bracket, and deformation complexes."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, NamedTuple, Sequence

from .linalg import CochainComplex, Matrix
from .poly import (AutomorphismPair, DvbModel, Poly, PolyMatrix, Section, VectorField, monomial_str,
                   monomials_up_to, pullback_section)

RawMap = Callable[[Sequence[Section]], Section]


class NotAMultiderivation(ValueError):
    pass


class DegreeOverflow(ValueError):
    """An element has coefficients beyond the truncation degree of the basis."""


def sort_with_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the sorting permutation and the sorted tuple; sign 0 on repeats."""
    lst = list(idx)
    if len(set(lst)) != len(lst):
        return 0, ()
    sign = 1
    for i in range(len(lst)):
        for j in range(i + 1, len(lst)):
            if lst[i] > lst[j]:
                sign = -sign
    return sign, tuple(sorted(lst))


def increasing_tuples(n: int, k: int) -> list[tuple[int, ...]]:
    if k < 0:
        return []
    return list(itertools.combinations(range(n), k))


class MultiDerivation:
    """Alternating k-ary multiderivation given by values on basis tuples and its symbol.

    val maps increasing k-tuples of basis indices to sections; sym maps
    increasing (k-1)-tuples to vector fields. Missing keys mean zero.
    """

    __slots__ = ("model", "arity", "val", "sym")

    def __init__(self, model: DvbModel, arity: int, val: dict | None = None, sym: dict | None = None):
        if arity < 0:
            raise ValueError("arity must be non-negative")
        self.model = model
        self.arity = arity
        self.val = {}
        self.sym = {}
        n = model.n
        for t, s in (val or {}).items():
            t = tuple(t)
            if len(t) != arity or list(t) != sorted(set(t)) or any(not 0 <= i < n for i in t):
                raise ValueError(f"val key {t} is not an increasing {arity}-tuple of basis indices")
            if len(s.coeffs) != n:
                raise ValueError("section length does not match the model")
            if s:
                self.val[t] = s
        for t, x in (sym or {}).items():
            t = tuple(t)
            if arity == 0:
                if x:
                    raise ValueError("arity-0 elements carry no symbol")
                continue
            if len(t) != arity - 1 or list(t) != sorted(set(t)) or any(not 0 <= i < n for i in t):
                raise ValueError(f"sym key {t} is not an increasing {arity - 1}-tuple of basis indices")
            if x.m != model.m:
                raise ValueError("vector field dimension does not match the model")
            if x:
                self.sym[t] = x

    @classmethod
    def zero(cls, model: DvbModel, arity: int) -> "MultiDerivation":
        return cls(model, arity)

    @classmethod
    def from_section(cls, model: DvbModel, s: Section) -> "MultiDerivation":
        return cls(model, 0, {(): s})

    @property
    def degree(self) -> int:
        return self.arity - 1

    def is_zero(self) -> bool:
        return not self.val and not self.sym

    def __eq__(self, other) -> bool:
        return (isinstance(other, MultiDerivation) and self.model == other.model and self.arity == other.arity
                and self.val == other.val and self.sym == other.sym)

    def _combine(self, other: "MultiDerivation", sign: int) -> "MultiDerivation":
        if self.model != other.model or self.arity != other.arity:
            raise ValueError("cannot add multiderivations of different models or arities")
        val = dict(self.val)
        for t, s in other.val.items():
            s2 = s if sign == 1 else -s
            val[t] = val[t] + s2 if t in val else s2
        sym = dict(self.sym)
        for t, x in other.sym.items():
            x2 = x if sign == 1 else -x
            sym[t] = sym[t] + x2 if t in sym else x2
        return MultiDerivation(self.model, self.arity, val, sym)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, q) -> "MultiDerivation":
        q = Fraction(q)
        return MultiDerivation(self.model, self.arity, {t: s.scale(q) for t, s in self.val.items()},
                               {t: x.scale(q) for t, x in self.sym.items()})

    def terms(self) -> dict:
        """Basis-free coordinates keyed by (kind, tuple, index, exponents)."""
        out = {}
        for t, s in self.val.items():
            for j, f in enumerate(s.coeffs):
                for e, c in f.terms.items():
                    out[("val", t, j, e)] = c
        for t, x in self.sym.items():
            for i, f in enumerate(x.comps):
                for e, c in f.terms.items():
                    out[("sym", t, i, e)] = c
        return out

    @classmethod
    def from_terms(cls, model: DvbModel, arity: int, terms: dict) -> "MultiDerivation":
        val: dict = {}
        sym: dict = {}
        for (kind, t, idx, e), c in terms.items():
            if not c:
                continue
            if kind == "val":
                coeffs = val.setdefault(t, [dict() for _ in range(model.n)])
                coeffs[idx][e] = coeffs[idx].get(e, 0) + c
            else:
                comps = sym.setdefault(t, [dict() for _ in range(model.m)])
                comps[idx][e] = comps[idx].get(e, 0) + c
        return cls(model, arity,
                   {t: Section([Poly(model.m, d) for d in cs]) for t, cs in val.items()},
                   {t: VectorField([Poly(model.m, d) for d in cs]) for t, cs in sym.items()})

    def max_degree(self) -> int:
        return max([s.degree() for s in self.val.values()] + [x.degree() for x in self.sym.values()], default=-1)

    def __repr__(self) -> str:
        return f"MultiDerivation(arity={self.arity}, val={len(self.val)} entries, sym={len(self.sym)} entries)"

    def describe(self) -> list[str]:
        lab = self.model.label
        lines = []
        for t in sorted(self.val):
            s = self.val[t]
            body = ", ".join(f"{lab(j)}: {f!r}" for j, f in enumerate(s.coeffs) if f)
            lines.append(f"val({', '.join(map(lab, t))}) = {{{body}}}")
        for t in sorted(self.sym):
            x = self.sym[t]
            body = ", ".join(f"d/du{i + 1}: {f!r}" for i, f in enumerate(x.comps) if f)
            lines.append(f"sym({', '.join(map(lab, t))}) = {{{body}}}")
        return lines


# ---------------------------------------------------------------- evaluation


def symbol_evaluate(c: MultiDerivation, args: Sequence[Section]) -> VectorField:
    """sigma_c on k-1 sections, extended function-multilinearly."""
    k = c.arity
    model = c.model
    if k == 0:
        raise ValueError("arity-0 elements have no symbol")
    if len(args) != k - 1:
        raise ValueError(f"symbol of a {k}-derivation takes {k - 1} arguments")
    out = [Poly(model.m) for _ in range(model.m)]
    comps = [[(i, f) for i, f in enumerate(s.coeffs) if f] for s in args]
    for choice in itertools.product(*comps):
        sign, key = sort_with_sign([i for i, _ in choice])
        if not sign or key not in c.sym:
            continue
        coef = Poly.const(model.m, sign)
        for _, f in choice:
            coef = coef * f
        for i, g in enumerate(c.sym[key].comps):
            if g:
                out[i] = out[i] + coef * g
    return VectorField(out)


def md_evaluate(c: MultiDerivation, args: Sequence[Section]) -> Section:
    """Evaluate c on arbitrary sections via multilinearity and the Leibniz rule in each slot."""
    k = c.arity
    model = c.model
    if len(args) != k:
        raise ValueError(f"a {k}-derivation takes {k} arguments, got {len(args)}")
    if k == 0:
        return c.val.get((), model.zero_section())
    out = [Poly(model.m) for _ in range(model.n)]
    comps = [[(i, f) for i, f in enumerate(s.coeffs) if f] for s in args]
    for choice in itertools.product(*comps):
        idx = [i for i, _ in choice]
        fs = [f for _, f in choice]
        sign, key = sort_with_sign(idx)
        if sign and key in c.val:
            coef = fs[0]
            for f in fs[1:]:
                coef = coef * f
            if sign < 0:
                coef = -coef
            for j, g in enumerate(c.val[key].coeffs):
                if g:
                    out[j] = out[j] + coef * g
        if not c.sym:
            continue
        for j in range(k):
            others = idx[:j] + idx[j + 1:]
            s2, key2 = sort_with_sign(others)
            if not s2 or key2 not in c.sym:
                continue
            g = c.sym[key2].apply(fs[j])
            if not g:
                continue
            for l in range(k):
                if l != j:
                    g = g * fs[l]
            # moving slot j to the end costs (-1)^(k-1-j) with 0-based j
            if s2 * (-1) ** (k - 1 - j) < 0:
                g = -g
            out[idx[j]] = out[idx[j]] + g
    return Section(out)


# ---------------------------------------------------------------- Gerstenhaber product and bracket


def unshuffles(total: int, first: int) -> list[tuple[int, tuple[int, ...], tuple[int, ...]]]:
    """(sign, first block, rest) for all (first, total-first)-unshuffles."""
    out = []
    for block in itertools.combinations(range(total), first):
        rest = tuple(i for i in range(total) if i not in block)
        inversions = sum(b - s for s, b in enumerate(block))
        out.append((-1 if inversions % 2 else 1, block, rest))
    return out


def gerstenhaber_product(c1: MultiDerivation, c2: MultiDerivation) -> RawMap:
    """Raw map (c1 o c2)(a_1..a_{k+l-1}) = sum_tau sign c1(c2(a_tau...), a_tau...)."""
    k, l = c1.arity, c2.arity
    r = k + l - 1
    model = c1.model

    def raw(args: Sequence[Section]) -> Section:
        if len(args) != r:
            raise ValueError(f"raw map takes {r} arguments")
        if k == 0:
            return model.zero_section()
        total = model.zero_section()
        for sign, block, rest in unshuffles(r, l):
            inner = md_evaluate(c2, [args[i] for i in block])
            if not inner:
                continue
            term = md_evaluate(c1, [inner] + [args[i] for i in rest])
            total = total + term if sign > 0 else total - term
        return total

    return raw


def probe_sections(model: DvbModel, tup: Sequence[int]) -> list[Section]:
    return [model.basis_section(i) for i in tup]


def symbol_extract(raw: RawMap, model: DvbModel, arity: int, strict: bool = True) -> MultiDerivation:
    """Rebuild a multiderivation from a raw alternating map by probing.

    Values come from basis tuples; the symbol from
    raw(e_S, u^i e_j) - u^i raw(e_S, e_j). With strict, every probe index j
    must agree and quadratic probes must match the reconstruction.
    """
    n, m = model.n, model.m
    val = {}
    for t in increasing_tuples(n, arity):
        s = raw(probe_sections(model, t))
        if s:
            val[t] = s
    sym = {}
    if arity >= 1 and m:
        for t in increasing_tuples(n, arity - 1):
            base = probe_sections(model, t)
            comps = []
            plain = {}
            for j in (range(n) if strict else range(min(n, 1))):
                plain[j] = raw(base + [model.basis_section(j)])
            for i in range(m):
                ui = model.coord(i)
                cand = None
                for j in plain:
                    diff = raw(base + [model.basis_section(j, ui)]) - plain[j].times(ui)
                    if any(f for jj, f in enumerate(diff.coeffs) if jj != j):
                        raise NotAMultiderivation(
                            f"probe u{i + 1}*{model.label(j)} leaks into other components")
                    p = diff.coeffs[j]
                    if cand is None:
                        cand = p
                    elif cand != p:
                        raise NotAMultiderivation(f"inconsistent symbol probes for direction u{i + 1}")
                comps.append(cand if cand is not None else Poly(m))
            x = VectorField(comps)
            if strict and n:
                for a in range(m):
                    for b in range(a, m):
                        q = model.coord(a) * model.coord(b)
                        got = raw(base + [model.basis_section(0, q)])
                        want = plain[0].times(q) + model.basis_section(0, x.apply(q))
                        if got != want:
                            raise NotAMultiderivation("raw map is not first order in its last slot")
            if x:
                sym[t] = x
    return MultiDerivation(model, arity, val, sym)


def gerstenhaber_bracket(c1: MultiDerivation, c2: MultiDerivation, strict: bool = True) -> MultiDerivation:
    """Graded commutator (-1)^{(k-1)(l-1)} c1 o c2 - c2 o c1."""
    if c1.model != c2.model:
        raise ValueError("bracket of multiderivations on different models")
    k, l = c1.arity, c2.arity
    r = k + l - 1
    if r < 0:
        raise ValueError("bracket of two arity-0 elements lands in degree -2, which is zero")
    p12 = gerstenhaber_product(c1, c2)
    p21 = gerstenhaber_product(c2, c1)
    sign = -1 if ((k - 1) * (l - 1)) % 2 else 1

    def raw(args):
        a = p12(args)
        b = p21(args)
        return (a if sign > 0 else -a) - b

    return symbol_extract(raw, c1.model, r, strict=strict)


# ---------------------------------------------------------------- pullbacks


def pullback_md(phi: AutomorphismPair, c: MultiDerivation, strict: bool = True) -> MultiDerivation:
    """(phi^* c)(a_1..a_k) = phi^*(c(phi^{-1*} a_1, ..., phi^{-1*} a_k))."""
    inv = phi.inverse()

    def raw(args):
        moved = [pullback_section(inv, s) for s in args]
        return pullback_section(phi, md_evaluate(c, moved))

    return symbol_extract(raw, c.model, c.arity, strict=strict)


# ---------------------------------------------------------------- Maurer-Cartan and differential


@dataclass
class McResult:
    ok: bool
    witness: dict | None
    square: MultiDerivation


def _first_nonzero(c: MultiDerivation) -> dict | None:
    lab = c.model.label
    for t in sorted(c.val):
        s = c.val[t]
        return {"kind": "val", "inputs": [lab(i) for i in t],
                "value": {lab(j): repr(f) for j, f in enumerate(s.coeffs) if f}}
    for t in sorted(c.sym):
        x = c.sym[t]
        return {"kind": "sym", "inputs": [lab(i) for i in t],
                "value": {f"u{i + 1}": repr(f) for i, f in enumerate(x.comps) if f}}
    return None


def mc_check(b: MultiDerivation) -> McResult:
    if b.arity != 2:
        raise ValueError("a bracket element has arity 2")
    sq = gerstenhaber_bracket(b, b)
    w = _first_nonzero(sq)
    return McResult(w is None, w, sq)


class BracketElement:
    """A 2-derivation certified to satisfy [[b, b]] = 0."""

    def __init__(self, underlying: MultiDerivation, _verified: bool = False):
        if underlying.arity != 2:
            raise ValueError("bracket elements have arity 2")
        self.underlying = underlying
        self.mc_verified = _verified

    @classmethod
    def verify(cls, md: MultiDerivation) -> "BracketElement":
        res = mc_check(md)
        if not res.ok:
            raise NotAMultiderivation(f"Maurer-Cartan equation fails: {res.witness}")
        return cls(md, True)

    @property
    def model(self) -> DvbModel:
        return self.underlying.model


def _require_mc(b) -> MultiDerivation:
    if isinstance(b, BracketElement):
        if not b.mc_verified:
            raise ValueError("bracket element has not passed the Maurer-Cartan check")
        return b.underlying
    raise TypeError("expected a verified BracketElement")


def def_differential(b: BracketElement, c: MultiDerivation, crosscheck: bool = False) -> MultiDerivation:
    out = gerstenhaber_bracket(_require_mc(b), c)
    if crosscheck:
        other = differential_explicit(b, c)
        if other != out:
            raise AssertionError("bracket differential disagrees with the explicit coboundary formula")
    return out


def differential_explicit(b: BracketElement, c: MultiDerivation) -> MultiDerivation:
    """Coboundary by the two-sum formula with bracket [x, y] = b(x, y)."""
    bb = _require_mc(b)
    k = c.arity

    def raw(args):
        model = c.model
        total = model.zero_section()
        for i in range(k + 1):
            rest = [a for j, a in enumerate(args) if j != i]
            inner = md_evaluate(c, rest)
            if inner:
                term = md_evaluate(bb, [args[i], inner])
                total = total + term if i % 2 == 0 else total - term
        for i in range(k + 1):
            for j in range(i + 1, k + 1):
                br = md_evaluate(bb, [args[i], args[j]])
                if not br:
                    continue
                rest = [a for l, a in enumerate(args) if l not in (i, j)]
                term = md_evaluate(c, [br] + rest)
                total = total + term if (i + j) % 2 == 0 else total - term
        return total

    return symbol_extract(raw, c.model, k + 1)


# ---------------------------------------------------------------- finite bases and complexes


class BasisElement(NamedTuple):
    kind: str  # "val" or "sym"
    tup: tuple
    index: int  # output basis index (val) or direction (sym)
    mono: tuple

    def key(self):
        return (self.kind, self.tup, self.index, self.mono)


def deriv_space_basis(model: DvbModel, k: int) -> list[BasisElement]:
    """Basis of k-derivations with coefficients of degree <= d: values first, then symbols."""
    if k < 0:
        return []
    monos = monomials_up_to(model.m, model.d)
    out = [BasisElement("val", t, j, e) for t in increasing_tuples(model.n, k)
           for j in range(model.n) for e in monos]
    if k >= 1:
        out += [BasisElement("sym", t, i, e) for t in increasing_tuples(model.n, k - 1)
                for i in range(model.m) for e in monos]
    return out


def deriv_space_dim(model: DvbModel, k: int) -> int:
    o = len(monomials_up_to(model.m, model.d))
    return comb(model.n, k) * model.n * o + (comb(model.n, k - 1) * model.m * o if k >= 1 else 0)


def element_of(model: DvbModel, k: int, be: BasisElement, coeff=1) -> MultiDerivation:
    return MultiDerivation.from_terms(model, k, {be.key(): Fraction(coeff)})


def to_coords(c: MultiDerivation, basis: Sequence[BasisElement], index: dict | None = None) -> list[Fraction]:
    if index is None:
        index = {be.key(): i for i, be in enumerate(basis)}
    v = [Fraction(0)] * len(basis)
    for key, x in c.terms().items():
        if key not in index:
            kind, t, i, e = key
            raise DegreeOverflow(f"term {kind} {t} -> {i} with monomial {monomial_str(e)} is outside the basis")
        v[index[key]] = x
    return v


def from_coords(model: DvbModel, k: int, basis: Sequence[BasisElement], vec: Sequence) -> MultiDerivation:
    return MultiDerivation.from_terms(model, k, {be.key(): Fraction(x) for be, x in zip(basis, vec) if x})


@dataclass
class DefComplex:
    """A deformation (sub)complex in coordinates, with its basis per degree."""

    complex: CochainComplex
    bases: dict[int, list[BasisElement]]
    window: tuple[int, int]

    def betti(self, cohom) -> list[int]:
        return cohom.betti_list(*self.window)


def differential_matrix(b: BracketElement, k: int, src: Sequence[BasisElement], tgt: Sequence[BasisElement],
                        crosscheck: bool = False, cache: dict | None = None) -> Matrix:
    """Matrix of delta from degree k (arity k+1) elements src to degree k+1 elements tgt."""
    model = b.model
    index = {be.key(): i for i, be in enumerate(tgt)}
    cols = []
    for be in src:
        key = (k, be.key())
        if cache is not None and key in cache:
            img = cache[key]
        else:
            c = element_of(model, k + 1, be)
            img = def_differential(b, c, crosscheck=crosscheck)
            if cache is not None:
                cache[key] = img
        try:
            cols.append(to_coords(img, tgt, index))
        except DegreeOverflow as exc:
            raise DegreeOverflow(f"delta leaves the chosen basis in degree {k + 1}: {exc}") from None
    return Matrix.from_columns(len(tgt), cols)


def padded_range(lo: int, hi: int) -> tuple[int, int]:
    """Degrees to assemble so that cohomology is correct on [lo, hi]."""
    return max(lo - 1, -1), hi + 1


def assemble_complex(b: BracketElement, degrees: tuple[int, int],
                     select: Callable[[int, BasisElement], bool] | None = None,
                     crosscheck: bool = False, cache: dict | None = None) -> DefComplex:
    lo, hi = degrees
    if lo > hi:
        raise ValueError("empty degree window")
    p_lo, p_hi = padded_range(lo, hi)
    model = b.model
    bases = {}
    for k in range(p_lo, p_hi + 1):
        full = deriv_space_basis(model, k + 1)
        bases[k] = [be for be in full if select is None or select(k, be)]
    diffs = [differential_matrix(b, k, bases[k], bases[k + 1], crosscheck=crosscheck, cache=cache)
             for k in range(p_lo, p_hi)]
    cx = CochainComplex(p_lo, [len(bases[k]) for k in range(p_lo, p_hi + 1)], diffs,
                        labels={k: bases[k] for k in bases})
    return DefComplex(cx, bases, (lo, hi))


def def_complex(b: BracketElement, degrees: tuple[int, int], crosscheck: bool = False,
                cache: dict | None = None) -> DefComplex:
    """Full deformation complex on the degree-capped basis, padded by one degree on each side."""
    return assemble_complex(b, degrees, None, crosscheck=crosscheck, cache=cache)


# ---------------------------------------------------------------- gauge flow


def _matrix_exp_nilpotent(mat: Matrix, t: Fraction) -> Matrix:
    n = mat.rows
    out = Matrix.identity(n)
    term = Matrix.identity(n)
    for j in range(1, n + 1):
        term = (term @ mat).scale(Fraction(t, j) if isinstance(t, int) else t / j)
        out = out + term
    return out


def _is_nilpotent(mat: Matrix) -> bool:
    n = mat.rows
    power = Matrix.identity(n)
    for _ in range(n):
        power = power @ mat
    return power.is_zero()


def flow_data(delta: MultiDerivation) -> tuple[Matrix, Matrix]:
    """(N, V): linear symbol matrix and constant value matrix of a 1-derivation."""
    model = delta.model
    if delta.arity != 1:
        raise ValueError("gauge generator must have arity 1")
    m, n = model.m, model.n
    x = delta.sym.get((), model.zero_vf())
    nmat = Matrix.zeros(m, m)
    for i, f in enumerate(x.comps):
        for e, c in f.terms.items():
            if sum(e) != 1:
                raise ValueError("exact flow needs a linear symbol (homogeneous degree-1 components)")
            nmat.data[i][e.index(1)] = c
    vmat = Matrix.zeros(n, n)
    for (j,), s in delta.val.items():
        for i, f in enumerate(s.coeffs):
            for e, c in f.terms.items():
                if sum(e) != 0:
                    raise ValueError("exact flow needs constant values on basis sections")
                vmat.data[i][j] = c
    if not _is_nilpotent(nmat) or not _is_nilpotent(vmat):
        raise ValueError("generator is not nilpotent; exp(t*Delta) is not a finite sum")
    return nmat, vmat


def flow_pair(delta: MultiDerivation, t) -> AutomorphismPair:
    """Automorphism whose pullback operator on sections is exp(t*Delta)."""
    t = Fraction(t)
    model = delta.model
    nmat, vmat = flow_data(delta)
    ent = _matrix_exp_nilpotent(nmat, t)
    base = [sum((Poly.var(model.m, j).scale(ent.data[i][j]) for j in range(model.m)), Poly(model.m))
            for i in range(model.m)]
    fiber = _matrix_exp_nilpotent(vmat, -t)
    return AutomorphismPair(model, base, PolyMatrix.constant(fiber, model.m))


def gauge_transport(b: BracketElement, delta: MultiDerivation, t) -> MultiDerivation:
    """b_t = (exp(t*Delta)^{-1})^* b, which solves d/dt b_t = [[b_t, Delta]]."""
    return pullback_md(flow_pair(delta, -Fraction(t)), _require_mc(b))


def _interpolate(points: Sequence[Fraction], values: Sequence[Fraction]) -> list[Fraction]:
    """Coefficients (ascending) of the interpolating polynomial."""
    n = len(points)
    coeffs = [Fraction(0)] * n
    for i, (xi, yi) in enumerate(zip(points, values)):
        if not yi:
            continue
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(points):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for s in range(len(basis) - 1):
                basis[s] -= xj * basis[s + 1]
            denom *= xi - xj
        for s in range(n):
            coeffs[s] += yi * basis[s] / denom
    return coeffs


def _poly_eval(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass
class GaugeReport:
    ok: bool
    degree_in_t: int
    failures: list[str]
    initial_velocity_is_coboundary: bool
    samples: dict = field(default_factory=dict)


def verify_gauge_flow(b: BracketElement, delta: MultiDerivation) -> GaugeReport:
    """Check d/dt b_t = [[b_t, Delta]] coefficientwise in t and d/dt|0 b_t = delta(Delta)."""
    model = b.model
    bound = 3 * max(model.n - 1, 0) + max(model.m - 1, 0) * (2 * max(b.underlying.max_degree(), 0) + 4) + 2
    pts = [Fraction(i) for i in range(bound + 4)]
    fam = {t: gauge_transport(b, delta, t) for t in pts}
    rhs = {t: gerstenhaber_bracket(fam[t], delta) for t in pts}
    failures = []
    keys = sorted(set().union(*(f.terms().keys() for f in fam.values()), *(r.terms().keys() for r in rhs.values())),
                  key=repr)
    fit = pts[:bound + 1]
    extra = pts[bound + 1:]
    top = 0
    for key in keys:
        yb = [fam[t].terms().get(key, Fraction(0)) for t in pts]
        yr = [rhs[t].terms().get(key, Fraction(0)) for t in pts]
        cb = _interpolate(fit, yb[:bound + 1])
        cr = _interpolate(fit, yr[:bound + 1])
        for t, y1, y2 in zip(extra, yb[bound + 1:], yr[bound + 1:]):
            if _poly_eval(cb, t) != y1 or _poly_eval(cr, t) != y2:
                failures.append(f"degree bound {bound} in t too small for {key}")
        deriv = [cb[s] * s for s in range(1, len(cb))] + [Fraction(0)]
        if deriv != cr:
            failures.append(f"ODE fails on coefficient {key}")
        nz = [s for s, c in enumerate(cb) if c]
        top = max(top, max(nz, default=0))
    velocity = gerstenhaber_bracket(_require_mc(b), delta)
    v0 = {key: _interpolate(fit, [fam[t].terms().get(key, Fraction(0)) for t in fit])[1] for key in keys}
    v0 = {k: v for k, v in v0.items() if v}
    cob = v0 == velocity.terms()
    if not cob:
        failures.append("initial velocity differs from delta(Delta)")
    # the square of b_t is polynomial of degree <= 2*top in t, so 2*top + 1 sample times decide it for all t
    for i in range(2 * top + 1):
        t = Fraction(i)
        bt = fam[t] if t in fam else gauge_transport(b, delta, t)
        if not mc_check(bt).ok:
            failures.append(f"transported bracket fails Maurer-Cartan at t = {t}")
            break
    return GaugeReport(not failures, top, failures, cob)

