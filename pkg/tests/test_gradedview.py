from defcohom import constructions as cs
from defcohom.gradedview import (Form, ce_differential, cochain_to_derivation, derivation_commutator,
                                 generator_form, generators, is_weight_zero_derivation, random_forms_check,
                                 square_zero_witness)
from defcohom.homogeneity import is_linear
from defcohom.multideriv import def_differential, gerstenhaber_bracket
from defcohom.poly import DvbModel, Poly
from defcohom.sampling import random_multiderivation

BRACKETS = [cs.from_lie_algebra(cs.so3()), cs.from_lie_algebra(cs.aff1()), cs.from_lie_algebra(cs.heisenberg3())]


def test_wedge_is_graded_commutative():
    x = Form.generator(1, 3, 0)
    y = Form.generator(1, 3, 2)
    assert x * y == -(y * x)
    assert not (x * x)
    f = Form.function(3, Poly.var(1, 0))
    assert f * x == x * f


def test_bracket_becomes_square_zero_differential():
    for b in BRACKETS + [cs.type1_pullback(cs.aff1(), 1, 1), cs.action_algebroid(cs.aff1(), cs.standard_rep(cs.aff1()))]:
        d = ce_differential(b)
        assert square_zero_witness(d) is None
        assert cochain_to_derivation(b.underlying) == d


def test_failing_bracket_does_not_square_to_zero():
    bad = cs.perturb_bracket(cs.from_lie_algebra(cs.so3()).underlying, (0, 1), 0, 1)
    d = cochain_to_derivation(bad)
    assert square_zero_witness(d) is not None


def test_commutator_matches_bracket(rng):
    for b in BRACKETS:
        for k1, k2 in ((0, 1), (1, 1), (1, 2), (2, 2), (0, 3), (2, 3)):
            c1 = random_multiderivation(b.model, k1, rng)
            c2 = random_multiderivation(b.model, k2, rng)
            lhs = derivation_commutator(cochain_to_derivation(c1), cochain_to_derivation(c2))
            assert lhs == cochain_to_derivation(gerstenhaber_bracket(c1, c2))


def test_commutator_with_differential(rng):
    for b in BRACKETS + [cs.type1_pullback(cs.abelian(1), 1, 1)]:
        d = cochain_to_derivation(b.underlying)
        for k in (0, 1, 2):
            c = random_multiderivation(b.model, k, rng)
            assert derivation_commutator(d, cochain_to_derivation(c)) == \
                cochain_to_derivation(def_differential(b, c))


def test_derivations_obey_graded_leibniz(rng):
    model = DvbModel(1, 1, 1, 1)
    forms = [generator_form(model, g) for g in generators(model)]
    for k in (1, 2, 3):
        d = cochain_to_derivation(random_multiderivation(model, k, rng))
        assert random_forms_check(model, d, forms)


def test_linear_iff_weight_zero(rng):
    model = DvbModel(1, 1, 1, 1)
    for k in (1, 2, 3):
        for _ in range(10):
            c = random_multiderivation(model, k, rng, 0.2)
            assert is_linear(c) == is_weight_zero_derivation(cochain_to_derivation(c))
