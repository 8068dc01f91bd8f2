"""Named builders of bracket elements and the comparison maps between complexes."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .linalg import CochainComplex, Matrix, ShortExactSequence, as_fraction, mapping_cone, rank
from .multideriv import (BasisElement, BracketElement, DefComplex, MultiDerivation, assemble_complex,
                         increasing_tuples, mc_check, sort_with_sign)
from .poly import DvbModel, Poly, Section, VectorField


@dataclass
class LieAlgebraData:
    """Structure constants: brackets[(i, j)] = {k: c} for i < j, meaning [e_i, e_j] = sum c e_k."""

    dim: int
    brackets: dict
    name: str = "lie"

    def bracket_vector(self, i: int, j: int) -> list[Fraction]:
        v = [Fraction(0)] * self.dim
        if i == j:
            return v
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        for k, c in self.brackets.get((i, j), {}).items():
            v[k] += sign * c
        return v

    def ad(self, i: int) -> Matrix:
        """Matrix of ad(e_i) in the basis e."""
        cols = [self.bracket_vector(i, j) for j in range(self.dim)]
        return Matrix.from_columns(self.dim, cols)

    def jacobi_witness(self) -> tuple | None:
        for i, j, k in itertools.combinations(range(self.dim), 3):
            total = [Fraction(0)] * self.dim
            for x, y, z in ((i, j, k), (j, k, i), (k, i, j)):
                inner = self.bracket_vector(y, z)
                for w, c in enumerate(inner):
                    if c:
                        for t, d in enumerate(self.bracket_vector(x, w)):
                            total[t] += c * d
            if any(total):
                return (i, j, k)
        return None


def lie_algebra(dim: int, brackets: dict, name: str = "lie") -> LieAlgebraData:
    clean = {}
    for (i, j), out in brackets.items():
        if not (0 <= i < dim and 0 <= j < dim) or i == j:
            raise ValueError(f"bad bracket index pair {(i, j)}")
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        row = clean.setdefault((i, j), {})
        for k, c in out.items():
            if not 0 <= k < dim:
                raise ValueError(f"bracket output index {k} out of range")
            row[k] = row.get(k, Fraction(0)) + sign * as_fraction(c)
    return LieAlgebraData(dim, {p: {k: c for k, c in r.items() if c} for p, r in clean.items()}, name)


def abelian(n: int) -> LieAlgebraData:
    return lie_algebra(n, {}, f"abelian({n})")


def heisenberg3() -> LieAlgebraData:
    return lie_algebra(3, {(0, 1): {2: 1}}, "heisenberg3")


def sl2() -> LieAlgebraData:
    """Basis (h, e, f) with [h,e]=2e, [h,f]=-2f, [e,f]=h."""
    return lie_algebra(3, {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}}, "sl2")


def so3() -> LieAlgebraData:
    return lie_algebra(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (0, 2): {1: -1}}, "so3")


def aff1() -> LieAlgebraData:
    return lie_algebra(2, {(0, 1): {1: 1}}, "aff1")


@dataclass
class RepresentationData:
    dim: int
    matrices: list[Matrix]  # one per basis element of the Lie algebra


def check_representation(g: LieAlgebraData, rep: RepresentationData) -> tuple | None:
    """First pair (i, j) where theta[e_i, e_j] != [theta e_i, theta e_j], or None."""
    if len(rep.matrices) != g.dim or any(m.shape != (rep.dim, rep.dim) for m in rep.matrices):
        raise ValueError("representation needs one dim x dim matrix per basis element")
    for i, j in itertools.combinations(range(g.dim), 2):
        lhs = Matrix.zeros(rep.dim, rep.dim)
        for k, c in enumerate(g.bracket_vector(i, j)):
            if c:
                lhs = lhs + rep.matrices[k].scale(c)
        a, b = rep.matrices[i], rep.matrices[j]
        if lhs != a @ b - b @ a:
            return (i, j)
    return None


def adjoint_rep(g: LieAlgebraData) -> RepresentationData:
    return RepresentationData(g.dim, [g.ad(i) for i in range(g.dim)])


def trivial_rep(g: LieAlgebraData, k: int) -> RepresentationData:
    return RepresentationData(k, [Matrix.zeros(k, k) for _ in range(g.dim)])


def standard_rep(g: LieAlgebraData) -> RepresentationData:
    if g.name == "sl2":
        mats = [[[1, 0], [0, -1]], [[0, 1], [0, 0]], [[0, 0], [1, 0]]]
        return RepresentationData(2, [Matrix(2, 2, m) for m in mats])
    if g.name == "so3":
        return adjoint_rep(g)
    if g.name == "aff1":
        # x -> a x + b acting on (x, 1)
        return RepresentationData(2, [Matrix(2, 2, [[1, 0], [0, 0]]), Matrix(2, 2, [[0, 1], [0, 0]])])
    if g.name.startswith("abelian"):
        return RepresentationData(1, [Matrix.zeros(1, 1) for _ in range(g.dim)])
    raise ValueError(f"no standard representation known for {g.name}")


def end_rep(rep: RepresentationData) -> RepresentationData:
    """theta_End(x) T = [theta(x), T] on gl(C), basis E_pq in row-major order."""
    c = rep.dim
    mats = []
    for th in rep.matrices:
        cols = []
        for p in range(c):
            for q in range(c):
                # [th, E_pq] = th E_pq - E_pq th
                out = Matrix.zeros(c, c)
                for r in range(c):
                    out.data[r][q] += th.data[r][p]
                for s in range(c):
                    out.data[p][s] -= th.data[q][s]
                cols.append([out.data[r][s] for r in range(c) for s in range(c)])
        mats.append(Matrix.from_columns(c * c, cols))
    return RepresentationData(c * c, mats)


def _const_section(model: DvbModel, vec: dict) -> Section:
    return Section([Poly.const(model.m, vec.get(i, 0)) for i in range(model.n)])


def _certify(md: MultiDerivation) -> BracketElement:
    return BracketElement.verify(md)


def from_lie_algebra(g: LieAlgebraData) -> BracketElement:
    model = DvbModel(g.dim, 0, 0, 0)
    val = {}
    for (i, j), out in g.brackets.items():
        val[(i, j)] = _const_section(model, out)
    return _certify(MultiDerivation(model, 2, val))


def vb_semidirect(g: LieAlgebraData, rep: RepresentationData) -> BracketElement:
    """g semidirect C as a VB-algebra over a point: [(v, x), (w, y)] = ([v, w], v.y - w.x)."""
    bad = check_representation(g, rep)
    if bad:
        raise ValueError(f"not a representation: fails on basis pair {bad}")
    a, c = g.dim, rep.dim
    model = DvbModel(a, 0, c, 0)
    val = {}
    for (i, j), out in g.brackets.items():
        val[(i, j)] = _const_section(model, out)
    for i in range(a):
        th = rep.matrices[i]
        for p in range(c):
            col = {a + q: th.data[q][p] for q in range(c) if th.data[q][p]}
            if col:
                val[(i, a + p)] = _const_section(model, col)
    return _certify(MultiDerivation(model, 2, val))


def la_vector_space(partial: Matrix, d: int = 1) -> BracketElement:
    """LA-vector space C -> E given by a linear map partial: C -> E (shape dim E x dim C)."""
    e, c = partial.rows, partial.cols
    model = DvbModel(0, e, c, d)
    sym = {}
    for i in range(c):
        comps = [Poly.const(e, partial.data[r][i]) for r in range(e)]
        x = VectorField(comps)
        if x:
            sym[(i,)] = x
    return _certify(MultiDerivation(model, 2, {}, sym))


def la_cohomology_formula(partial: Matrix) -> dict[int, int]:
    r = rank(partial)
    ker = partial.cols - r
    coker = partial.rows - r
    return {-1: coker * ker, 0: coker * coker + ker * ker, 1: ker * coker}


def tangent_vb(g: LieAlgebraData) -> BracketElement:
    return vb_semidirect(g, adjoint_rep(g))


def tangent_lift(c: MultiDerivation) -> MultiDerivation:
    """c_tan((v1,w1),...,(vk,wk)) = (c(v1..vk), sum_i c(v1..w_i..vk)) on the tangent VB-algebra."""
    src = c.model
    if src.m or src.c:
        raise ValueError("tangent lift expects a cochain on a Lie algebra model")
    a = src.a
    model = DvbModel(a, 0, a, 0)
    k = c.arity
    val = {}
    for t in increasing_tuples(2 * a, k):
        cores = [i for i in t if i >= a]
        if len(cores) > 1:
            continue
        base_idx = [i if i < a else i - a for i in t]
        sign, key = sort_with_sign(base_idx)
        if not sign or key not in c.val:
            continue
        vec = c.val[key].coeffs
        shift = a if cores else 0
        coeffs = [Poly(0) for _ in range(2 * a)]
        for j, f in enumerate(vec):
            coeffs[j + shift] = f.scale(sign)
        val[t] = Section(coeffs)
    return MultiDerivation(model, k, val)


def action_algebroid(g: LieAlgebraData, rep: RepresentationData, d: int = 1) -> BracketElement:
    """Action Lie algebroid g x E -> E of a linear action; anchor xi -> -(R(xi) u) . d/du."""
    bad = check_representation(g, rep)
    if bad:
        raise ValueError(f"not a representation: fails on basis pair {bad}")
    a, m = g.dim, rep.dim
    model = DvbModel(a, m, 0, d)
    val = {(i, j): _const_section(model, out) for (i, j), out in g.brackets.items()}
    sym = {}
    for i in range(a):
        r = rep.matrices[i]
        comps = []
        for row in range(m):
            p = Poly(m)
            for col in range(m):
                if r.data[row][col]:
                    p = p + Poly.var(m, col).scale(-r.data[row][col])
            comps.append(p)
        x = VectorField(comps)
        if x:
            sym[(i,)] = x
    return _certify(MultiDerivation(model, 2, val, sym))


def type1_pullback(g: LieAlgebraData, m: int, d: int = 1) -> BracketElement:
    """Pullback of g along E -> point: sections are g-valued functions plus vector fields on E."""
    a = g.dim
    model = DvbModel(a, m, m, d)
    val = {(i, j): _const_section(model, out) for (i, j), out in g.brackets.items()}
    sym = {}
    for i in range(m):
        sym[(a + i,)] = VectorField([Poly.const(m, int(r == i)) for r in range(m)])
    return _certify(MultiDerivation(model, 2, val, sym))


def tangent_bundle(m: int, d: int = 1) -> BracketElement:
    return type1_pullback(abelian(0), m, d)


# ---------------------------------------------------------------- Chevalley-Eilenberg complexes


def ce_basis(g: LieAlgebraData, vdim: int, k: int) -> list[tuple[tuple[int, ...], int]]:
    return [(t, v) for t in increasing_tuples(g.dim, k) for v in range(vdim)]


def ce_differential(g: LieAlgebraData, rep: RepresentationData, k: int) -> Matrix:
    """d: C^k(g, V) -> C^{k+1}(g, V), standard formula with 0-based alternating signs."""
    src = ce_basis(g, rep.dim, k)
    tgt = ce_basis(g, rep.dim, k + 1)
    sindex = {b: i for i, b in enumerate(src)}
    m = Matrix.zeros(len(tgt), len(src))
    for row, (t, v) in enumerate(tgt):
        # (d w)(x_t) component v as a linear functional of w
        for i in range(k + 1):
            rest = t[:i] + t[i + 1:]
            th = rep.matrices[t[i]]
            for u in range(rep.dim):
                coef = th.data[v][u]
                if coef:
                    col = sindex[(rest, u)]
                    m.data[row][col] += coef * (-1) ** i
        for i in range(k + 1):
            for j in range(i + 1, k + 1):
                br = g.bracket_vector(t[i], t[j])
                rest = [x for l, x in enumerate(t) if l not in (i, j)]
                for w, c in enumerate(br):
                    if not c:
                        continue
                    sign, key = sort_with_sign([w] + rest)
                    if sign:
                        m.data[row][sindex[(key, v)]] += c * sign * (-1) ** (i + j)
    return m


def ce_complex(g: LieAlgebraData, rep: RepresentationData, lo: int, hi: int) -> CochainComplex:
    lo = max(lo, 0)
    dims = [len(ce_basis(g, rep.dim, k)) for k in range(lo, hi + 1)]
    diffs = [ce_differential(g, rep, k) for k in range(lo, hi)]
    return CochainComplex(lo, dims, diffs)


def shift_complex(cx: CochainComplex, s: int) -> CochainComplex:
    """cx[s]: degree k holds cx^{k+s}; no sign change on the differential."""
    return CochainComplex(cx.k_min - s, list(cx.dims), list(cx.differentials))


@dataclass
class ThetaCone:
    source: CochainComplex  # C(g, g) = deformation complex of g shifted down by one
    target: CochainComplex  # C(g, End C)
    theta: dict[int, Matrix]
    cone: CochainComplex


def theta_map(g: LieAlgebraData, rep: RepresentationData, k: int) -> Matrix:
    """C^k(g, g) -> C^k(g, End C): w -> theta o w."""
    c = rep.dim
    src = ce_basis(g, g.dim, k)
    tgt = ce_basis(g, c * c, k)
    tindex = {b: i for i, b in enumerate(tgt)}
    m = Matrix.zeros(len(tgt), len(src))
    for col, (t, j) in enumerate(src):
        th = rep.matrices[j]
        for p in range(c):
            for q in range(c):
                if th.data[p][q]:
                    m.data[tindex[(t, p * c + q)]][col] = th.data[p][q]
    return m


def theta_cone(g: LieAlgebraData, rep: RepresentationData, lo: int = -1, hi: int = 3) -> ThetaCone:
    """Cone of C_def(g)[-1] -> C(g, End C), built on degrees lo-1 .. hi+1."""
    src = ce_complex(g, adjoint_rep(g), 0, hi + 3)
    tgt = ce_complex(g, end_rep(rep), 0, hi + 2)
    theta = {k: theta_map(g, rep, k) for k in src.degrees}
    cone = mapping_cone(theta, src, tgt)
    return ThetaCone(src, tgt, theta, cone)


def splitting_iso(g: LieAlgebraData, rep: RepresentationData, lin: DefComplex, cone: CochainComplex,
                  k: int) -> Matrix:
    """Cone^k -> linear complex of g x| C in degree k: (w, v) -> (-1)^k w~ + iota(v)."""
    a, c = g.dim, rep.dim
    basis = lin.bases[k]
    index = {be.key(): i for i, be in enumerate(basis)}
    src_basis = ce_basis(g, g.dim, k + 1)
    tgt_basis = ce_basis(g, c * c, k)
    cols = []
    for t, j in src_basis:
        v = [Fraction(0)] * len(basis)
        v[index[("val", t, j, ())]] = Fraction((-1) ** (k % 2))
        cols.append(v)
    for t, pq in tgt_basis:
        p, q = divmod(pq, c)
        v = [Fraction(0)] * len(basis)
        v[index[("val", t + (a + q,), a + p, ())]] = Fraction(1)
        cols.append(v)
    if len(cols) != cone.dim(k):
        raise ValueError("cone and linear complex dimensions disagree")
    return Matrix.from_columns(len(basis), cols)


def check_splitting(g: LieAlgebraData, rep: RepresentationData, degrees=(-1, 3)):
    """Compare the linear complex of g x| C with the cone of theta degree by degree."""
    from .homogeneity import linear_subcomplex
    b = vb_semidirect(g, rep)
    lin = linear_subcomplex(b, degrees)
    tc = theta_cone(g, rep, *degrees)
    failures = []
    cx = lin.complex
    isos = {}
    for k in cx.degrees:
        s = splitting_iso(g, rep, lin, tc.cone, k)
        if s.rows != s.cols or rank(s) != s.rows:
            failures.append(f"splitting not invertible in degree {k}")
        isos[k] = s
    for k in range(cx.k_min, cx.k_max):
        if not (isos[k + 1] @ tc.cone.d(k) == cx.d(k) @ isos[k]):
            failures.append(f"splitting does not intertwine differentials in degree {k}")
    return failures, lin, tc


# ---------------------------------------------------------------- base projection and kernel


def base_lie_algebra(b: BracketElement) -> LieAlgebraData:
    """Lie algebra on the A-block read off from constant values on A-tuples."""
    model = b.model
    a = model.a
    br = {}
    for (i, j), s in b.underlying.val.items():
        if i < a and j < a:
            out = {k: s.coeffs[k].constant_term() for k in range(a) if s.coeffs[k].constant_term()}
            if out:
                br[(i, j)] = out
    return lie_algebra(a, br, "base")


def is_base_element(model: DvbModel, be: BasisElement) -> bool:
    return (be.kind == "val" and all(i < model.a for i in be.tup) and be.index < model.a
            and sum(be.mono) == 0)


def base_projection(c: MultiDerivation) -> MultiDerivation:
    """All-A inputs, A output, constant part: a cochain on the base Lie algebra."""
    model = c.model
    base = DvbModel(model.a, 0, 0, 0)
    val = {}
    for t, s in c.val.items():
        if all(i < model.a for i in t):
            out = [Poly.const(0, s.coeffs[j].constant_term()) for j in range(model.a)]
            sec = Section(out)
            if sec:
                val[t] = sec
    return MultiDerivation(base, c.arity, val)


@dataclass
class LinearSes:
    ses: ShortExactSequence
    kernel: DefComplex
    linear: DefComplex
    base: DefComplex


def base_projection_ses(b: BracketElement, degrees: tuple[int, int]) -> LinearSes:
    """0 -> kernel -> linear complex -> base deformation complex -> 0."""
    from .homogeneity import is_weight_zero, linear_subcomplex
    from .multideriv import def_complex
    model = b.model
    lin = linear_subcomplex(b, degrees)
    ker = assemble_complex(b, degrees, lambda k, be: is_weight_zero(model, k + 1, be)
                           and not is_base_element(model, be))
    base_b = from_lie_algebra(base_lie_algebra(b))
    base = def_complex(base_b, degrees)
    inc, proj = {}, {}
    for k in lin.complex.degrees:
        lb = lin.bases[k]
        lindex = {be.key(): i for i, be in enumerate(lb)}
        kb = ker.bases[k]
        im = Matrix.zeros(len(lb), len(kb))
        for j, be in enumerate(kb):
            im.data[lindex[be.key()]][j] = Fraction(1)
        inc[k] = im
        bb = base.bases.get(k, [])
        bindex = {be.key(): i for i, be in enumerate(bb)}
        pm = Matrix.zeros(len(bb), len(lb))
        for j, be in enumerate(lb):
            if is_base_element(model, be):
                pm.data[bindex[("val", be.tup, be.index, ())]][j] = Fraction(1)
        proj[k] = pm
    ses = ShortExactSequence(ker.complex, lin.complex, base.complex, inc, proj)
    return LinearSes(ses, ker, lin, base)


def end_kernel_complex(b: BracketElement, degrees: tuple[int, int]) -> DefComplex:
    return base_projection_ses(b, degrees).kernel


def perturb_bracket(b: MultiDerivation, tup: tuple, out: int, amount) -> MultiDerivation:
    """Add amount * e_out to b(e_tup) (used to build non-Jacobi test brackets)."""
    model = b.model
    extra = MultiDerivation(model, 2, {tup: model.basis_section(out, model.const(amount))})
    return b + extra


def unchecked_bracket(md: MultiDerivation):
    """MC verdict for an arbitrary 2-derivation without raising."""
    return mc_check(md)
