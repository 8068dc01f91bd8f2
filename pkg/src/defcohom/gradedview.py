"""Cochains as derivations of the algebra of forms: polynomial coefficients times odd generators."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .multideriv import BracketElement, MultiDerivation, increasing_tuples, md_evaluate
from .poly import DvbModel, Poly, monomials_up_to


def _wedge_sign(i: tuple, j: tuple) -> tuple[int, tuple]:
    if set(i) & set(j):
        return 0, ()
    inv = sum(1 for x in i for y in j if x > y)
    return (-1 if inv % 2 else 1), tuple(sorted(i + j))


class Form:
    """Finite sum of terms coeff * u^e * xi^I with I an increasing tuple of odd generators."""

    __slots__ = ("m", "n", "terms")

    def __init__(self, m: int, n: int, terms: dict | None = None):
        self.m, self.n = m, n
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def function(cls, n: int, f: Poly) -> "Form":
        return cls(f.nvars, n, {(e, ()): c for e, c in f.terms.items()})

    @classmethod
    def generator(cls, m: int, n: int, j: int) -> "Form":
        return cls(m, n, {((0,) * m, (j,)): Fraction(1)})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, Form) and self.terms == other.terms

    def __add__(self, other: "Form") -> "Form":
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
        return Form(self.m, self.n, t)

    def __neg__(self):
        return Form(self.m, self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, q) -> "Form":
        return Form(self.m, self.n, {k: c * q for k, c in self.terms.items()})

    def __mul__(self, other: "Form") -> "Form":
        t: dict = {}
        for (e1, i1), c1 in self.terms.items():
            for (e2, i2), c2 in other.terms.items():
                s, ij = _wedge_sign(i1, i2)
                if s:
                    key = (tuple(a + b for a, b in zip(e1, e2)), ij)
                    t[key] = t.get(key, 0) + s * c1 * c2
        return Form(self.m, self.n, t)

    def degrees(self) -> set[int]:
        return {len(i) for (_, i) in self.terms}

    def coefficient_poly(self, odd: tuple) -> Poly:
        return Poly(self.m, {e: c for (e, i), c in self.terms.items() if i == odd})

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*u{e}*xi{i}" for (e, i), c in sorted(self.terms.items()))


@dataclass
class FormsAlgebra:
    model: DvbModel

    def basis(self) -> list[tuple]:
        """Monomials of degree <= d times increasing odd multi-indices."""
        monos = monomials_up_to(self.model.m, self.model.d)
        odd = [t for k in range(self.model.n + 1) for t in increasing_tuples(self.model.n, k)]
        return [(e, i) for e in monos for i in odd]

    @property
    def dim(self) -> int:
        return len(self.basis())

    def weight(self, e: tuple, odd: tuple) -> int:
        return sum(e) + sum(1 for j in odd if self.model.is_core(j))


def generators(model: DvbModel) -> list[tuple[str, int]]:
    return [("u", i) for i in range(model.m)] + [("xi", j) for j in range(model.n)]


def generator_form(model: DvbModel, gen: tuple[str, int]) -> Form:
    kind, i = gen
    if kind == "u":
        return Form.function(model.n, Poly.var(model.m, i))
    return Form.generator(model.m, model.n, i)


class GradedDerivation:
    """Derivation of the forms algebra of a given degree, stored by images of generators."""

    def __init__(self, model: DvbModel, degree: int, images: dict):
        self.model = model
        self.degree = degree
        self.images = {g: images.get(g, Form(model.m, model.n)) for g in generators(model)}

    def __eq__(self, other):
        return (isinstance(other, GradedDerivation) and self.degree == other.degree
                and self.images == other.images)

    def is_zero(self) -> bool:
        return not any(self.images.values())

    def apply(self, form: Form) -> Form:
        m, n = self.model.m, self.model.n
        out = Form(m, n)
        k = self.degree
        for (e, odd), c in form.terms.items():
            f = Poly(m, {e: c})
            rest = Form(m, n, {((0,) * m, odd): Fraction(1)})
            for i in range(m):
                df = f.derivative(i)
                if df:
                    out = out + Form.function(n, df) * self.images[("u", i)] * rest
            fform = Form.function(n, f)
            for s, j in enumerate(odd):
                left = Form(m, n, {((0,) * m, odd[:s]): Fraction(1)})
                right = Form(m, n, {((0,) * m, odd[s + 1:]): Fraction(1)})
                term = fform * left * self.images[("xi", j)] * right
                out = out + (term if (k * s) % 2 == 0 else -term)
        return out

    def weight_parts(self) -> set[int]:
        """Set of weight shifts appearing in the images of generators."""
        alg = FormsAlgebra(self.model)
        shifts = set()
        for (kind, i), img in self.images.items():
            gw = 1 if kind == "u" else (1 if self.model.is_core(i) else 0)
            for (e, odd), c in img.terms.items():
                shifts.add(alg.weight(e, odd) - gw)
        return shifts

    def __repr__(self):
        return f"GradedDerivation(degree={self.degree})"


def derivation_commutator(d1: GradedDerivation, d2: GradedDerivation) -> GradedDerivation:
    """[D1, D2] = D1 D2 - (-1)^{|D1||D2|} D2 D1."""
    sign = -1 if (d1.degree * d2.degree) % 2 else 1
    images = {}
    for g in generators(d1.model):
        a = d1.apply(d2.images[g])
        b = d2.apply(d1.images[g])
        images[g] = a - b if sign > 0 else a + b
    return GradedDerivation(d1.model, d1.degree + d2.degree, images)


def _form_from_values(model: DvbModel, values: dict[tuple, Poly]) -> Form:
    t = {}
    for odd, f in values.items():
        for e, c in f.terms.items():
            t[(e, odd)] = c
    return Form(model.m, model.n, t)


def cochain_to_derivation(c: MultiDerivation) -> GradedDerivation:
    """Degree-k derivation attached to a (k+1)-derivation.

    Functions go to sigma_c(...)f; a generator xi^j goes to minus the j-th
    component of the values of c, the symbol part vanishing on constants.
    """
    model = c.model
    k = c.arity - 1
    images = {}
    for i in range(model.m):
        vals = {}
        if k >= 0:
            for t, x in c.sym.items():
                vals[t] = x.comps[i]
        images[("u", i)] = _form_from_values(model, vals)
    for j in range(model.n):
        vals = {t: -s.coeffs[j] for t, s in c.val.items()}
        images[("xi", j)] = _form_from_values(model, vals)
    return GradedDerivation(model, k, images)


def ce_differential(b: BracketElement) -> GradedDerivation:
    """Lie algebroid differential from anchor and bracket evaluated on basis sections."""
    model = b.model
    bb = b.underlying
    n = model.n
    images = {}
    for i in range(model.m):
        vals = {}
        ui = model.coord(i)
        for j in range(n):
            # d(u^i)(e_j) = rho(e_j) u^i, read off as b(e_j, u^i e_l) - u^i b(e_j, e_l) for any l
            l = j
            probe = md_evaluate(bb, [model.basis_section(j), model.basis_section(l, ui)])
            plain = md_evaluate(bb, [model.basis_section(j), model.basis_section(l)])
            vals[(j,)] = (probe - plain.times(ui)).coeffs[l]
        images[("u", i)] = _form_from_values(model, vals)
    for kk in range(n):
        vals = {}
        for i, j in itertools.combinations(range(n), 2):
            s = md_evaluate(bb, [model.basis_section(i), model.basis_section(j)])
            vals[(i, j)] = -s.coeffs[kk]
        images[("xi", kk)] = _form_from_values(model, vals)
    return GradedDerivation(model, 1, images)


def square_zero_witness(d: GradedDerivation) -> tuple | None:
    for g in generators(d.model):
        if d.apply(d.images[g]):
            return g
    return None


def is_weight_zero_derivation(d: GradedDerivation) -> bool:
    return d.weight_parts() <= {0}


def random_forms_check(model: DvbModel, d: GradedDerivation, forms: Sequence[Form]) -> bool:
    """Graded Leibniz rule on products of the given forms."""
    for x, y in itertools.product(forms, repeat=2):
        lhs = d.apply(x * y)
        sx = min(x.degrees(), default=0)
        rhs = d.apply(x) * y + (x * d.apply(y)).scale((-1) ** ((d.degree * sx) % 2))
        if len(x.degrees()) <= 1 and lhs != rhs:
            return False
    return True
