"""Acceptance checks, one per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (lines are repeated in the terminal summary)
or directly with ``python tests/test_acceptance.py``.
"""
import json
import random
import subprocess
import sys
import time
from fractions import Fraction as F

from defcohom import constructions as cs
from defcohom.cli import shipped_job_text, shipped_jobs
from defcohom.gradedview import cochain_to_derivation, derivation_commutator, is_weight_zero_derivation
from defcohom.homogeneity import (core, interpolation_check, is_linear, lin, linear_subcomplex,
                                  linearization_split, weight_of_basis_element)
from defcohom.linalg import Matrix, cohomology, les_exactness_check, rank, rank_kernel_image
from defcohom.multideriv import (def_complex, def_differential, deriv_space_basis,
                                 gauge_transport, gerstenhaber_bracket, md_evaluate, mc_check, MultiDerivation,
                                 verify_gauge_flow)
from defcohom.poly import DvbModel, Poly
from defcohom.sampling import random_multiderivation

LINES: list[str] = []
SEED = 20240611


def record(number: int, title: str, ok: bool, detail: str, started: float, limit: float) -> None:
    elapsed = time.perf_counter() - started
    ok = ok and elapsed < limit
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title} [{detail}; {elapsed:.1f}s, limit {limit:.0f}s]"
    LINES.append(line)
    print(line)
    assert ok, line


def betti(complex_, lo=-1, hi=2):
    return cohomology(complex_).betti_list(lo, hi)


# ---------------------------------------------------------------- 1


def _arities(rng):
    while True:
        ks = [rng.randint(0, 3) for _ in range(3)]
        if min(ks[0] + ks[1], ks[0] + ks[2], ks[1] + ks[2]) >= 1 and sum(ks) >= 2:
            return ks


def test_dgla_axioms():
    t0 = time.perf_counter()
    rng = random.Random(SEED)
    brackets = [cs.from_lie_algebra(cs.aff1()), cs.from_lie_algebra(cs.heisenberg3()),
                cs.type1_pullback(cs.abelian(1), 1, 1), cs.la_vector_space(Matrix(1, 1, [[2]]), 1),
                cs.vb_semidirect(cs.aff1(), cs.trivial_rep(cs.aff1(), 1))]
    assert all(b.model.n <= 3 and b.model.m <= 1 and b.model.d <= 1 for b in brackets)
    samples = 0
    bad = []
    trial = 0
    while samples < 210:
        b = brackets[trial % len(brackets)]
        trial += 1
        k1, k2, k3 = _arities(rng)
        c1, c2, c3 = (random_multiderivation(b.model, k, rng, 0.4) for k in (k1, k2, k3))
        samples += 3
        s = (-1) ** ((k1 - 1) * (k2 - 1))
        if gerstenhaber_bracket(c1, c2) != gerstenhaber_bracket(c2, c1).scale(-s):
            bad.append(("antisymmetry", trial))
        lhs = gerstenhaber_bracket(c1, gerstenhaber_bracket(c2, c3))
        rhs = (gerstenhaber_bracket(gerstenhaber_bracket(c1, c2), c3)
               + gerstenhaber_bracket(c2, gerstenhaber_bracket(c1, c3)).scale(s))
        if lhs != rhs:
            bad.append(("jacobi", trial))
        d12 = def_differential(b, gerstenhaber_bracket(c1, c2))
        leib = (gerstenhaber_bracket(def_differential(b, c1), c2)
                + gerstenhaber_bracket(c1, def_differential(b, c2)).scale((-1) ** (k1 - 1)))
        if d12 != leib:
            bad.append(("derivation", trial))
        if not def_differential(b, def_differential(b, c1)).is_zero():
            bad.append(("square", trial))
    record(1, "DGLA axioms", not bad, f"{samples} random cochains, failures {bad[:3]}", t0, 60)


# ---------------------------------------------------------------- 2


def test_maurer_cartan_versus_jacobi():
    t0 = time.perf_counter()
    algebras = [cs.abelian(n) for n in range(1, 5)] + [cs.heisenberg3(), cs.so3(), cs.sl2(), cs.aff1()]
    passes = all(mc_check(cs.from_lie_algebra(g).underlying).ok
                 for g in algebras)
    base = cs.from_lie_algebra(cs.so3()).underlying
    bad = cs.perturb_bracket(base, (0, 1), 0, 1)
    res = mc_check(bad)
    model = bad.model
    witness_ok = False
    if not res.ok:
        idx = [model.parse_label(lab) for lab in res.witness["inputs"]]
        e = [model.basis_section(i) for i in idx]

        def br(x, y):
            return md_evaluate(bad, [x, y])
        jac = br(e[0], br(e[1], e[2])) + br(e[1], br(e[2], e[0])) + br(e[2], br(e[0], e[1]))
        value = model.section([Poly.const(0, F(res.witness["value"].get(model.label(i), "0")))
                               for i in range(model.a)], [])
        witness_ok = bool(jac) and value == jac.scale(2)
    record(2, "Maurer-Cartan iff Jacobi", passes and not res.ok and witness_ok,
           f"8 Lie algebras pass; perturbed so3 witness {res.witness}", t0, 10)


# ---------------------------------------------------------------- 3


def _derivation_dimension(g) -> int:
    """Dimension of Der(g) by solving D[x,y] = [Dx,y] + [x,Dy] for the n*n entries of D."""
    n = g.dim
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            bij = g.bracket_vector(i, j)
            for out in range(n):
                row = [F(0)] * (n * n)
                for s in range(n):  # D applied to [e_i, e_j]
                    row[out * n + s] += bij[s]
                for s in range(n):  # [D e_i, e_j] + [e_i, D e_j]
                    row[s * n + i] -= g.bracket_vector(s, j)[out]
                    row[s * n + j] -= g.bracket_vector(i, s)[out]
                rows.append(row)
    if not rows:
        return n * n
    return n * n - rank(Matrix(len(rows), n * n, rows))


def test_whitehead_vanishing_and_heisenberg():
    t0 = time.perf_counter()
    sl2 = betti(def_complex(cs.from_lie_algebra(cs.sl2()), (-1, 1)).complex, -1, 1)
    h3 = betti(def_complex(cs.from_lie_algebra(cs.heisenberg3()), (-1, 1)).complex, -1, 1)
    g = cs.heisenberg3()
    center = len(rank_kernel_image(Matrix(g.dim * g.dim, g.dim,
                                          [[g.bracket_vector(j, i)[k] for j in range(g.dim)]
                                           for i in range(g.dim) for k in range(g.dim)])).kernel)
    oracle_h3 = _derivation_dimension(g) - (g.dim - center)
    oracle_sl2 = _derivation_dimension(cs.sl2()) - 3
    ok = sl2[1] == 0 and sl2[2] == 0 and h3[1] == 4 and oracle_h3 == 4 and oracle_sl2 == 0
    record(3, "Whitehead vanishing for sl2, Heisenberg derivations",
           ok, f"sl2 betti(-1..1) {sl2}; h3 betti(-1..1) {h3}; direct solve h3 {oracle_h3}, sl2 {oracle_sl2}", t0, 30)


# ---------------------------------------------------------------- 4


def test_la_vector_space_formula():
    t0 = time.perf_counter()
    rng = random.Random(SEED + 4)
    shapes = [(c, e) for c in range(1, 5) for e in range(1, 5)] + [(4, 4), (3, 4), (4, 3), (2, 2)]
    ranks_seen = set()
    bad = []
    for i, (c, e) in enumerate(shapes):
        r = min(c, e) if i >= 16 else rng.randint(0, min(c, e))
        if i == 0:
            r = 0
        left = Matrix(e, r, [[rng.randint(-3, 3) for _ in range(r)] for _ in range(e)])
        right = Matrix(r, c, [[rng.randint(-3, 3) for _ in range(c)] for _ in range(r)])
        p = left @ right
        ranks_seen.add(rank(p))
        got = betti(linear_subcomplex(cs.la_vector_space(p, 1), (-1, 1)).complex, -1, 1)
        want = cs.la_cohomology_formula(p)
        if got != [want[-1], want[0], want[1]]:
            bad.append((c, e, got, want))
    ok = not bad and ranks_seen == set(range(5))
    record(4, "LA-vector space cohomology formula", ok,
           f"{len(shapes)} random maps, ranks {sorted(ranks_seen)}, mismatches {bad[:2]}", t0, 60)


# ---------------------------------------------------------------- 5


def test_sl2_cone():
    t0 = time.perf_counter()
    g = cs.sl2()
    failures, linc, tc = cs.check_splitting(g, cs.standard_rep(g), (-1, 3))
    bl = betti(linc.complex, -1, 3)
    bc = betti(tc.cone, -1, 3)
    les = les_exactness_check(cs.base_projection_ses(cs.vb_semidirect(g, cs.standard_rep(g)), (-1, 3)).ses)
    ok = not failures and bl == bc == [0, 1, 0, 0, 1] and les.exact
    record(5, "sl2 x| standard: linear complex = Cone(Theta), LES exact", ok,
           f"linear {bl}, cone {bc}, splitting failures {len(failures)}, LES exact {les.exact}", t0, 60)


# ---------------------------------------------------------------- 6


def test_linearization():
    t0 = time.perf_counter()
    rng = random.Random(SEED + 6)
    brackets = [cs.type1_pullback(cs.aff1(), 1, 1), cs.type1_pullback(cs.abelian(1), 2, 1),
                cs.la_vector_space(Matrix(2, 1, [[1], [3]]), 1), cs.la_vector_space(Matrix(1, 2, [[0, 0]]), 2)]
    bad = []
    count = 0
    for i in range(104):
        b = brackets[i % len(brackets)]
        c = random_multiderivation(b.model, i % 3, rng, 0.4)
        count += 1
        dc = def_differential(b, c)
        if def_differential(b, lin(c)) != lin(dc):
            bad.append(("lin", i))
        if def_differential(b, core(c)) != core(dc):
            bad.append(("core", i))
        if lin(lin(c)) != lin(c) or not is_linear(lin(c)):
            bad.append(("idempotent", i))
    splits = []
    for b in brackets:
        rep = linearization_split(b, (-1, 1))
        splits.append(rep.ok)
        if not rep.ok:
            bad.append(("split", rep.failures[:1]))
    record(6, "linearization is a split cochain projection, injective on cohomology", not bad,
           f"{count} random cochains, {len(splits)} complexes split, failures {bad[:3]}", t0, 120)


# ---------------------------------------------------------------- 7


def test_weight_structure():
    t0 = time.perf_counter()
    checked = 0
    low = []
    for a in range(5):
        for c in range(5 - a):
            for m in range(3):
                for d in range(3):
                    model = DvbModel(a, m, c, d)
                    for k in range(model.n + 2):
                        for be in deriv_space_basis(model, k):
                            checked += 1
                            if weight_of_basis_element(model, k, be) < -1:
                                low.append((model, k, be))
    rng = random.Random(SEED + 7)
    interp_bad = 0
    for model in (DvbModel(1, 1, 1, 2), DvbModel(0, 2, 2, 1), DvbModel(2, 1, 1, 1)):
        for k in range(4):
            for _ in range(3):
                c = random_multiderivation(model, k, rng)
                interp_bad += sum(not interpolation_check(c, lam) for lam in (2, 3, 5, 7))
    record(7, "weights >= -1 and homogeneity interpolation", not low and interp_bad == 0,
           f"{checked} basis elements, {len(low)} below -1, interpolation failures {interp_bad}", t0, 60)


# ---------------------------------------------------------------- 8


def test_tangent_lift():
    t0 = time.perf_counter()
    rng = random.Random(SEED + 8)
    bad = []
    for g in (cs.so3(), cs.aff1()):
        b = cs.from_lie_algebra(g)
        tb = cs.tangent_vb(g)
        if cs.tangent_lift(b.underlying) != tb.underlying:
            bad.append((g.name, "bracket"))
        for k1, k2 in ((0, 1), (1, 1), (1, 2), (2, 2), (0, 3), (2, 3)):
            c1 = random_multiderivation(b.model, k1, rng)
            c2 = random_multiderivation(b.model, k2, rng)
            if cs.tangent_lift(gerstenhaber_bracket(c1, c2)) != \
                    gerstenhaber_bracket(cs.tangent_lift(c1), cs.tangent_lift(c2)):
                bad.append((g.name, "bracket-preserving", k1, k2))
            if cs.tangent_lift(def_differential(b, c1)) != def_differential(tb, cs.tangent_lift(c1)):
                bad.append((g.name, "cochain map", k1))
            if cs.base_projection(cs.tangent_lift(c1)) != c1:
                bad.append((g.name, "section", k1))
        lin_b = betti(linear_subcomplex(tb, (-1, 2)).complex)
        ker_b = betti(cs.end_kernel_complex(tb, (-1, 2)).complex)
        base_b = betti(def_complex(b, (-1, 2)).complex)
        if lin_b != [x + y for x, y in zip(ker_b, base_b)]:
            bad.append((g.name, "direct sum", lin_b, ker_b, base_b))
    record(8, "tangent lift for so3 and aff1", not bad, f"failures {bad[:3]}", t0, 60)


# ---------------------------------------------------------------- 9


def test_type1_quasi_isomorphism():
    t0 = time.perf_counter()
    details = []
    ok = True
    for g in (cs.abelian(1), cs.aff1()):
        lin_b = betti(linear_subcomplex(cs.type1_pullback(g, 1, 2), (-1, 2)).complex)
        base_b = betti(def_complex(cs.from_lie_algebra(g), (-1, 2)).complex)
        ok = ok and lin_b == base_b
        details.append(f"{g.name}: {lin_b} vs {base_b}")
    record(9, "type-1 pullback linear complex matches the Lie algebra", ok, "; ".join(details), t0, 120)


# ---------------------------------------------------------------- 10


def test_tangent_bundle_trivial():
    t0 = time.perf_counter()
    b = betti(linear_subcomplex(cs.tangent_bundle(1, 2), (-1, 2)).complex)
    record(10, "tangent bundle linear complex is acyclic", b == [0, 0, 0, 0], f"betti(-1..2) {b}", t0, 60)


# ---------------------------------------------------------------- 11


def test_gauge_flow():
    t0 = time.perf_counter()
    b = cs.from_lie_algebra(cs.heisenberg3())
    model = b.model
    gens = [MultiDerivation(model, 1, {(2,): model.basis_section(0, Poly.const(0, F(1, 2)))}),
            MultiDerivation(model, 1, {(2,): model.basis_section(1), (1,): model.basis_section(0, Poly.const(0, 3))}),
            MultiDerivation(model, 1, {(0,): model.basis_section(1)})]
    bad = []
    degrees = []
    for delta in gens:
        rep = verify_gauge_flow(b, delta)
        degrees.append(rep.degree_in_t)
        if not rep.ok or not rep.initial_velocity_is_coboundary:
            bad.append(rep.failures[:1])
        for t in (F(1), F(-7, 3)):
            if not mc_check(gauge_transport(b, delta, t)).ok:
                bad.append(("mc", t))
    record(11, "gauge flow on the Heisenberg algebra", not bad and max(degrees) >= 1,
           f"{len(gens)} nilpotent generators, degrees in t {degrees}, failures {bad[:2]}", t0, 10)


# ---------------------------------------------------------------- 12


def test_graded_view():
    t0 = time.perf_counter()
    rng = random.Random(SEED + 12)
    bad = []
    count = 0
    for g in (cs.so3(), cs.sl2(), cs.heisenberg3(), cs.aff1(), cs.abelian(2)):
        b = cs.from_lie_algebra(g)
        d = cochain_to_derivation(b.underlying)
        for k1, k2 in ((0, 1), (1, 1), (1, 2), (2, 2), (2, 3), (0, 2)):
            c1 = random_multiderivation(b.model, k1, rng)
            c2 = random_multiderivation(b.model, k2, rng)
            count += 1
            if derivation_commutator(cochain_to_derivation(c1), cochain_to_derivation(c2)) != \
                    cochain_to_derivation(gerstenhaber_bracket(c1, c2)):
                bad.append((g.name, "bracket", k1, k2))
            if derivation_commutator(d, cochain_to_derivation(c1)) != cochain_to_derivation(def_differential(b, c1)):
                bad.append((g.name, "differential", k1))
    linear_checks = 0
    for b in (cs.tangent_vb(cs.aff1()), cs.type1_pullback(cs.aff1(), 1, 1)):
        for k in (1, 2, 3):
            for density in (0.05, 0.2):
                c = random_multiderivation(b.model, k, rng, density)
                for cand in (c, lin(c)):
                    linear_checks += 1
                    if is_linear(cand) != is_weight_zero_derivation(cochain_to_derivation(cand)):
                        bad.append(("weight", k))
    record(12, "graded view: commutators of derivations", not bad,
           f"{count} bracket pairs, {linear_checks} linearity checks, failures {bad[:3]}", t0, 60)


# ---------------------------------------------------------------- 13


def _run_suite(tmp_path, tag):
    outputs = {}
    codes = {}
    for name in shipped_jobs():
        job = tmp_path / name
        job.write_text(shipped_job_text(name))
        proc = subprocess.run([sys.executable, "-m", "defcohom.cli", "run", str(job), "--format", "json"],
                              capture_output=True)
        outputs[name] = proc.stdout
        codes[name] = proc.returncode
    return outputs, codes


def test_cli_determinism(tmp_path):
    t0 = time.perf_counter()
    first, codes = _run_suite(tmp_path, "a")
    second, _ = _run_suite(tmp_path, "b")
    identical = first == second
    semantics = True
    for name, out in first.items():
        statuses = [t["status"] for t in json.loads(out)["tasks"]]
        want = 0 if all(s == "PASS" for s in statuses) else 1
        semantics = semantics and codes[name] == want
    bad_input = tmp_path / "bad.json"
    bad_input.write_text(json.dumps({"construct": "so3", "tasks": [{"op": "cohomology", "degrees": [2, 1]}]}))
    code_input = subprocess.run([sys.executable, "-m", "defcohom.cli", "run", str(bad_input)],
                                capture_output=True).returncode
    ok = identical and semantics and code_input == 2 and codes.get("non_jacobi.json") == 1
    record(13, "CLI determinism and exit codes", ok,
           f"{len(first)} shipped jobs, byte-identical {identical}, exit codes {sorted(set(codes.values()))} "
           f"+ input error {code_input}", t0, 60)


if __name__ == "__main__":
    import pathlib
    import tempfile
    tests = [v for k, v in list(globals().items()) if k.startswith("test_")]
    failed = 0
    for fn in tests:
        try:
            if fn is test_cli_determinism:
                with tempfile.TemporaryDirectory() as d:
                    fn(pathlib.Path(d))
            else:
                fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
