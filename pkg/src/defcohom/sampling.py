"""Seeded random elements for property checks."""
from __future__ import annotations

import random
from fractions import Fraction

from .multideriv import MultiDerivation, deriv_space_basis, from_coords
from .poly import DvbModel, Poly, Section


def random_rational(rng: random.Random, bound: int = 3) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.choice((1, 1, 2, 3)))


def random_multiderivation(model: DvbModel, arity: int, rng: random.Random, density: float = 0.5,
                           bound: int = 3, select=None) -> MultiDerivation:
    basis = deriv_space_basis(model, arity)
    if select is not None:
        basis = [be for be in basis if select(be)]
    vec = [random_rational(rng, bound) if rng.random() < density else Fraction(0) for _ in basis]
    return from_coords(model, arity, basis, vec)


def random_poly(model: DvbModel, rng: random.Random, max_degree: int | None = None, density: float = 0.6) -> Poly:
    from .poly import monomials_up_to
    d = model.d if max_degree is None else max_degree
    terms = {e: random_rational(rng) for e in monomials_up_to(model.m, d) if rng.random() < density}
    return Poly(model.m, terms)


def random_section(model: DvbModel, rng: random.Random, max_degree: int | None = None) -> Section:
    return Section([random_poly(model, rng, max_degree) for _ in range(model.n)])


def random_linear_section(model: DvbModel, rng: random.Random) -> Section:
    a_block = [Poly.const(model.m, random_rational(rng)) for _ in range(model.a)]
    c_block = [sum((Poly.var(model.m, i).scale(random_rational(rng)) for i in range(model.m)), Poly(model.m))
               for _ in range(model.c)]
    return model.section(a_block, c_block)


def random_core_section(model: DvbModel, rng: random.Random) -> Section:
    return model.section([Poly(model.m) for _ in range(model.a)],
                         [Poly.const(model.m, random_rational(rng)) for _ in range(model.c)])
