"""Weight grading from fiberwise scalar multiplication and the linear deformation subcomplex."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .linalg import Matrix, cohomology, induced_rank, rank_kernel_image
from .multideriv import (BasisElement, BracketElement, DefComplex, MultiDerivation, assemble_complex,
                         deriv_space_basis, pullback_md)
from .poly import DvbModel, homogeneity_pair


def weight_of(model: DvbModel, kind: str, tup, index: int, mono) -> int:
    cores = sum(1 for i in tup if model.is_core(i))
    if kind == "val":
        return sum(mono) + cores - (1 if model.is_core(index) else 0)
    return sum(mono) + cores - 1


def weight_of_basis_element(model: DvbModel, arity: int, be: BasisElement) -> int:
    return weight_of(model, be.kind, be.tup, be.index, be.mono)


def is_weight_zero(model: DvbModel, arity: int, be: BasisElement) -> bool:
    return weight_of_basis_element(model, arity, be) == 0


def weight_decompose(c: MultiDerivation) -> dict[int, MultiDerivation]:
    buckets: dict[int, dict] = {}
    for key, x in c.terms().items():
        q = weight_of(c.model, *key)
        buckets.setdefault(q, {})[key] = x
    return {q: MultiDerivation.from_terms(c.model, c.arity, t) for q, t in sorted(buckets.items())}


def pr(c: MultiDerivation, q: int) -> MultiDerivation:
    return weight_decompose(c).get(q, MultiDerivation.zero(c.model, c.arity))


def lin(c: MultiDerivation) -> MultiDerivation:
    return pr(c, 0)


def core(c: MultiDerivation) -> MultiDerivation:
    return pr(c, -1)


def is_linear(c: MultiDerivation) -> bool:
    return all(q == 0 for q in weight_decompose(c))


def homogeneity_pullback(c: MultiDerivation, lam) -> MultiDerivation:
    return pullback_md(homogeneity_pair(c.model, lam), c)


def interpolation_check(c: MultiDerivation, lam) -> bool:
    """h_lam^* c equals sum_q lam^q pr_q(c)."""
    lam = Fraction(lam)
    lhs = homogeneity_pullback(c, lam)
    rhs = MultiDerivation.zero(c.model, c.arity)
    for q, part in weight_decompose(c).items():
        rhs = rhs + part.scale(lam ** q)
    return lhs == rhs


def weight_histogram(model: DvbModel, arity: int) -> dict[int, int]:
    return dict(sorted(Counter(weight_of_basis_element(model, arity, be)
                               for be in deriv_space_basis(model, arity)).items()))


def linear_subcomplex(b: BracketElement, degrees: tuple[int, int], cache: dict | None = None) -> DefComplex:
    return assemble_complex(b, degrees, lambda k, be: is_weight_zero(b.model, k + 1, be), cache=cache)


def nonlinear_subcomplex(b: BracketElement, degrees: tuple[int, int], cache: dict | None = None) -> DefComplex:
    return assemble_complex(b, degrees, lambda k, be: not is_weight_zero(b.model, k + 1, be), cache=cache)


@dataclass
class LinearizationReport:
    ok: bool
    failures: list[str]
    dims: dict  # degree -> (full, linear, rest)
    betti_linear: dict
    betti_full: dict
    injective: bool


def linearization_split(b: BracketElement, degrees: tuple[int, int]) -> LinearizationReport:
    """Full complex = linear (+) kernel of lin as complexes; H(linear) -> H(full) injective."""
    from .multideriv import def_complex
    cache: dict = {}
    full = def_complex(b, degrees, cache=cache)
    linc = linear_subcomplex(b, degrees, cache=cache)
    rest = nonlinear_subcomplex(b, degrees, cache=cache)
    failures = []
    dims = {}
    incl = {}
    for k in full.complex.degrees:
        fb = full.bases[k]
        findex = {be.key(): i for i, be in enumerate(fb)}
        nf, nl, nr = len(fb), len(linc.bases[k]), len(rest.bases[k])
        dims[k] = (nf, nl, nr)
        if nl + nr != nf:
            failures.append(f"dimensions do not add up in degree {k}: {nf} != {nl} + {nr}")
        m = Matrix.zeros(nf, nl)
        for j, be in enumerate(linc.bases[k]):
            m.data[findex[be.key()]][j] = Fraction(1)
        incl[k] = m
        if k < full.complex.k_max:
            d = full.complex.d(k)
            tindex = {be.key(): i for i, be in enumerate(full.bases[k + 1])}
            lin_rows = {tindex[be.key()] for be in linc.bases[k + 1]}
            for j, be in enumerate(fb):
                src_lin = is_weight_zero(b.model, k + 1, be)
                for i in range(d.rows):
                    if d.data[i][j] and ((i in lin_rows) != src_lin):
                        failures.append(f"delta mixes weights in degree {k}")
                        break
    hl = cohomology(linc.complex)
    hf = cohomology(full.complex)
    injective = True
    lo, hi = degrees
    for k in range(lo, hi + 1):
        r = induced_rank(incl, linc.complex, full.complex, k)
        if r != hl.betti.get(k, 0):
            injective = False
            failures.append(f"H^{k}(linear) -> H^{k}(full) has rank {r} < {hl.betti.get(k, 0)}")
    bl = {k: hl.betti[k] for k in range(lo, hi + 1)}
    bf = {k: hf.betti[k] for k in range(lo, hi + 1)}
    return LinearizationReport(not failures, failures, dims, bl, bf, injective)


def kernel_dimension(m: Matrix) -> int:
    return len(rank_kernel_image(m).kernel)
