from fractions import Fraction as F

from defcohom import constructions as cs
from defcohom.homogeneity import (core, homogeneity_pullback, interpolation_check, is_linear, lin,
                                  linear_subcomplex, linearization_split, pr, weight_decompose,
                                  weight_histogram, weight_of_basis_element)
from defcohom.linalg import Matrix, cohomology
from defcohom.multideriv import def_differential, deriv_space_basis, md_evaluate, symbol_evaluate
from defcohom.poly import DvbModel, section_weight_part, vf_weight_part
from defcohom.sampling import random_core_section, random_linear_section, random_multiderivation

MODELS = [DvbModel(1, 1, 1, 2), DvbModel(0, 2, 1, 1), DvbModel(2, 1, 1, 1)]


def test_no_weight_below_minus_one():
    for a in range(3):
        for c in range(3):
            for m in range(3):
                for d in range(3):
                    model = DvbModel(a, m, c, d)
                    for k in range(model.n + 2):
                        for be in deriv_space_basis(model, k):
                            assert weight_of_basis_element(model, k, be) >= -1


def test_histogram_small_case():
    # one core direction, one base coordinate, linear polynomials
    hist = weight_histogram(DvbModel(0, 1, 1, 1), 1)
    assert hist == {-1: 1, 0: 2, 1: 1}


def test_interpolation_identity(rng):
    for model in MODELS:
        for k in (0, 1, 2):
            c = random_multiderivation(model, k, rng)
            for lam in (2, 3, 5, 7, F(1, 2)):
                assert interpolation_check(c, lam)


def test_homogeneity_of_a_weight_zero_bracket():
    for b in (cs.type1_pullback(cs.aff1(), 1, 2), cs.vb_semidirect(cs.sl2(), cs.standard_rep(cs.sl2()))):
        assert is_linear(b.underlying)
        assert homogeneity_pullback(b.underlying, 3) == b.underlying


def test_projections_are_idempotent_and_sum_back(rng):
    for model in MODELS:
        c = random_multiderivation(model, 2, rng)
        assert lin(lin(c)) == lin(c)
        assert core(core(c)) == core(c)
        assert lin(core(c)).is_zero()
        total = sum(weight_decompose(c).values(), c.scale(0))
        assert total == c


def test_projected_cochain_on_homogeneous_sections(rng):
    for model in MODELS:
        for k in (1, 2):
            c = random_multiderivation(model, k, rng)
            for n_core in range(k + 1):
                args = ([random_core_section(model, rng) for _ in range(n_core)]
                        + [random_linear_section(model, rng) for _ in range(k - n_core)])
                out = md_evaluate(c, args)
                for q in (-1, 0):
                    assert md_evaluate(pr(c, q), args) == section_weight_part(model, out, q - n_core)
                if k >= 2 and n_core == 0:
                    sym = symbol_evaluate(c, args[:-1])
                    assert symbol_evaluate(lin(c), args[:-1]) == vf_weight_part(sym, 0)


def test_differential_commutes_with_projections(rng):
    for b in (cs.type1_pullback(cs.aff1(), 1, 1), cs.la_vector_space(Matrix(2, 1, [[1], [2]]), 1)):
        for k in (0, 1, 2):
            c = random_multiderivation(b.model, k, rng, 0.4)
            assert def_differential(b, lin(c)) == lin(def_differential(b, c))
            assert def_differential(b, core(c)) == core(def_differential(b, c))


def test_linearization_split_type1():
    rep = linearization_split(cs.type1_pullback(cs.abelian(1), 1, 1), (-1, 1))
    assert rep.ok, rep.failures
    for full, linear, rest in rep.dims.values():
        assert full == linear + rest


def test_linear_complex_of_tangent_bundle_is_acyclic():
    dc = linear_subcomplex(cs.tangent_bundle(1, 2), (-1, 2))
    assert cohomology(dc.complex).betti_list(-1, 2) == [0, 0, 0, 0]
