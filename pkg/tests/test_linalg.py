from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defcohom.linalg import (CochainComplex, ComplexError, Matrix, ShortExactSequence, cohomology,
                             les_exactness_check, mapping_cone, parse_rational, rank, rank_kernel_image,
                             solve_linear, verify_complex)

small = st.integers(-3, 3)


def matrices(max_r=5, max_c=5):
    return st.integers(1, max_r).flatmap(
        lambda r: st.integers(1, max_c).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r).map(
                lambda rows: Matrix(r, c, rows))))


def test_rank_of_known_matrices():
    assert rank(Matrix(2, 2, [[1, 2], [2, 4]])) == 1
    assert rank(Matrix(3, 3, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])) == 3
    assert rank(Matrix.zeros(3, 4)) == 0


def test_kernel_of_rank_one_matrix():
    info = rank_kernel_image(Matrix(2, 2, [[1, 2], [2, 4]]))
    assert info.rank == 1
    assert info.kernel == [[F(-2), F(1)]]


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_nullity_and_kernel_is_annihilated(m):
    info = rank_kernel_image(m)
    assert info.rank + len(info.kernel) == m.cols
    for v in info.kernel:
        assert not any(m.apply(v))
    assert rank(m.transpose()) == info.rank


@settings(max_examples=60, deadline=None)
@given(matrices(), st.lists(small, min_size=5, max_size=5))
def test_solve_returns_exact_solution_when_consistent(m, xs):
    x = [F(v) for v in xs[:m.cols]]
    b = m.apply(x)
    sol = solve_linear(m, b)
    assert sol is not None and m.apply(sol) == b


def test_solve_detects_inconsistency():
    assert solve_linear(Matrix(2, 1, [[1], [1]]), [F(1), F(2)]) is None


def test_parse_rational():
    assert parse_rational("-3/6") == F(-1, 2)
    assert parse_rational("7") == 7
    for bad in ("1/0", "1.5", "a"):
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_shape_checks():
    with pytest.raises(ValueError):
        Matrix(2, 2, [[1, 2]])
    with pytest.raises(ValueError):
        Matrix(2, 3) @ Matrix(2, 3)
    with pytest.raises(ComplexError):
        CochainComplex(0, [1, 2], [Matrix.zeros(1, 2)])


def interval():
    # Q --id--> Q : acyclic
    return CochainComplex(0, [1, 1], [Matrix(1, 1, [[1]])])


def test_cohomology_of_simple_complexes():
    assert cohomology(interval()).betti == {0: 0, 1: 0}
    zero = CochainComplex(0, [2, 3], [Matrix.zeros(3, 2)])
    rep = cohomology(zero)
    assert rep.betti == {0: 2, 1: 3}
    assert len(rep.representatives[1]) == 3


def test_d_squared_failure_is_reported():
    bad = CochainComplex(0, [1, 1, 1], [Matrix(1, 1, [[1]]), Matrix(1, 1, [[1]])])
    assert verify_complex(bad) == (False, 0)
    with pytest.raises(ComplexError):
        cohomology(bad)


def test_cone_of_identity_is_acyclic():
    c = CochainComplex(0, [2, 1], [Matrix(1, 2, [[1, 1]])])
    ident = {0: Matrix.identity(2), 1: Matrix.identity(1)}
    cone = mapping_cone(ident, c, c)
    ok, _ = verify_complex(cone)
    assert ok
    assert all(v == 0 for v in cohomology(cone).betti.values())


def test_cone_of_zero_map_is_sum_of_shift_and_target():
    c = CochainComplex(0, [1], [])
    z = {0: Matrix.zeros(1, 1)}
    cone = mapping_cone(z, c, c)
    assert cohomology(cone).betti == {-1: 1, 0: 1}


def test_cone_rejects_non_chain_map():
    c = CochainComplex(0, [1, 1], [Matrix(1, 1, [[1]])])
    f = {0: Matrix(1, 1, [[1]]), 1: Matrix(1, 1, [[2]])}
    with pytest.raises(ComplexError):
        mapping_cone(f, c, c)


def random_complex(rng, dims):
    """Random complex: each differential kills the image of the previous one."""
    diffs = []
    prev = None
    for k in range(len(dims) - 1):
        rows, cols = dims[k + 1], dims[k]
        if prev is None:
            m = Matrix(rows, cols, [[rng.randint(-2, 2) for _ in range(cols)] for _ in range(rows)])
        else:
            # each row is a combination of functionals vanishing on image(prev)
            ann = rank_kernel_image(prev.transpose()).kernel
            data = []
            for _ in range(rows):
                w = [rng.randint(-2, 2) for _ in ann]
                data.append([sum((x * a[j] for x, a in zip(w, ann)), F(0)) for j in range(cols)])
            m = Matrix(rows, cols, data)
        diffs.append(m)
        prev = m
    return CochainComplex(0, dims, diffs)


def test_les_of_split_sequence_is_exact(rng):
    for _ in range(10):
        a = random_complex(rng, [2, 3, 2])
        b = random_complex(rng, [1, 2, 2])
        # direct sum with the obvious inclusion and projection
        dims = [x + y for x, y in zip(a.dims, b.dims)]
        diffs = []
        for k in range(2):
            m = Matrix.zeros(dims[k + 1], dims[k])
            da, db = a.d(k), b.d(k)
            for i in range(da.rows):
                for j in range(da.cols):
                    m.data[i][j] = da.data[i][j]
            for i in range(db.rows):
                for j in range(db.cols):
                    m.data[da.rows + i][da.cols + j] = db.data[i][j]
            diffs.append(m)
        mid = CochainComplex(0, dims, diffs)
        inc, proj = {}, {}
        for k in range(3):
            i = Matrix.zeros(dims[k], a.dims[k])
            for j in range(a.dims[k]):
                i.data[j][j] = F(1)
            p = Matrix.zeros(b.dims[k], dims[k])
            for j in range(b.dims[k]):
                p.data[j][a.dims[k] + j] = F(1)
            inc[k], proj[k] = i, p
        rep = les_exactness_check(ShortExactSequence(a, mid, b, inc, proj))
        assert rep.exact, rep.failures


def test_les_detects_broken_sequence():
    c = CochainComplex(0, [1], [])
    ses = ShortExactSequence(c, c, c, {0: Matrix.identity(1)}, {0: Matrix.identity(1)})
    rep = les_exactness_check(ses)
    assert not rep.exact
