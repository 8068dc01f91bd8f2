"""Exact rational linear algebra and finite cochain complexes."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

Q = Fraction


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"not an exact rational: {x!r}")


def parse_rational(text: str) -> Fraction:
    """Parse "p", "-p" or "p/q" with integer p, q and q != 0. Decimals are rejected."""
    s = text.strip()
    if "/" in s:
        num, _, den = s.partition("/")
    else:
        num, den = s, "1"
    try:
        n, d = int(num), int(den)
    except ValueError:
        raise ValueError(f"malformed rational {text!r}") from None
    if d == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(n, d)


class Matrix:
    """Dense matrix of Fractions, rows x cols. Immutable by convention."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Sequence[Sequence] | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix shape")
        self.rows = rows
        self.cols = cols
        if data is None:
            self.data = [[Q(0)] * cols for _ in range(rows)]
        else:
            if len(data) != rows or any(len(r) != cols for r in data):
                raise ValueError(f"data does not match shape {rows}x{cols}")
            self.data = [[as_fraction(x) for x in r] for r in data]

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        m = cls(n, n)
        for i in range(n):
            m.data[i][i] = Q(1)
        return m

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Sequence[Fraction]]) -> "Matrix":
        m = cls(rows, len(columns))
        for j, col in enumerate(columns):
            if len(col) != rows:
                raise ValueError("column length mismatch")
            for i, x in enumerate(col):
                if x:
                    m.data[i][j] = as_fraction(x)
        return m

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def column(self, j: int) -> list[Fraction]:
        return [self.data[i][j] for i in range(self.rows)]

    def transpose(self) -> "Matrix":
        t = Matrix(self.cols, self.rows)
        for i in range(self.rows):
            for j in range(self.cols):
                t.data[j][i] = self.data[i][j]
        return t

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = Matrix(self.rows, other.cols)
        for i, row in enumerate(self.data):
            acc = out.data[i]
            for k, a in enumerate(row):
                if a:
                    for j, b in enumerate(other.data[k]):
                        if b:
                            acc[j] += a * b
        return out

    def apply(self, vec: Sequence[Fraction]) -> list[Fraction]:
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return [sum((a * v for a, v in zip(row, vec) if a and v), Q(0)) for row in self.data]

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in addition")
        return Matrix(self.rows, self.cols, [[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)])

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, [[-a for a in r] for r in self.data])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, q) -> "Matrix":
        q = as_fraction(q)
        return Matrix(self.rows, self.cols, [[q * a for a in r] for r in self.data])

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.data)

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self.shape == other.shape and self.data == other.data

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols})"

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        return Matrix(r1 - r0, c1 - c0, [row[c0:c1] for row in self.data[r0:r1]])


def hstack(blocks: Sequence[Matrix], rows: int) -> Matrix:
    cols = sum(b.cols for b in blocks)
    out = Matrix(rows, cols)
    c = 0
    for b in blocks:
        if b.rows != rows:
            raise ValueError("hstack row mismatch")
        for i in range(rows):
            out.data[i][c:c + b.cols] = b.data[i]
        c += b.cols
    return out


def vstack(blocks: Sequence[Matrix], cols: int) -> Matrix:
    data = []
    for b in blocks:
        if b.cols != cols:
            raise ValueError("vstack column mismatch")
        data.extend(list(r) for r in b.data)
    return Matrix(len(data), cols, data)


def _pivot_key(x: Fraction):
    return (abs(x.numerator), x.denominator)


def rref(m: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (rows, pivot columns)."""
    a = [list(r) for r in m.data]
    pivots: list[int] = []
    r = 0
    for c in range(m.cols):
        if r >= m.rows:
            break
        best = None
        for i in range(r, m.rows):
            x = a[i][c]
            if x and (best is None or _pivot_key(x) < _pivot_key(a[best][c])):
                best = i
        if best is None:
            continue
        a[r], a[best] = a[best], a[r]
        prow = a[r]
        inv = 1 / prow[c]
        if inv != 1:
            prow[:] = [x * inv for x in prow]
        nz = [j for j in range(c, m.cols) if prow[j]]
        for i in range(m.rows):
            if i != r:
                f = a[i][c]
                if f:
                    row = a[i]
                    for j in nz:
                        row[j] -= f * prow[j]
        pivots.append(c)
        r += 1
    return a, pivots


@dataclass
class RankInfo:
    rank: int
    kernel: list[list[Fraction]]  # basis vectors of the null space
    image: list[list[Fraction]]  # basis vectors of the column space


def rank_kernel_image(m: Matrix) -> RankInfo:
    red, pivots = rref(m)
    rank = len(pivots)
    free = [j for j in range(m.cols) if j not in set(pivots)]
    kernel = []
    for f in free:
        v = [Q(0)] * m.cols
        v[f] = Q(1)
        for r, p in enumerate(pivots):
            v[p] = -red[r][f]
        kernel.append(v)
    image = [m.column(p) for p in pivots]
    return RankInfo(rank, kernel, image)


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def rank_of_vectors(vectors: Sequence[Sequence[Fraction]], length: int) -> int:
    if not vectors:
        return 0
    return rank(Matrix(len(vectors), length, vectors))


def solve_linear(m: Matrix, b: Sequence[Fraction]) -> list[Fraction] | None:
    """One exact solution of m x = b, or None when the system is inconsistent."""
    if len(b) != m.rows:
        raise ValueError("right-hand side length mismatch")
    aug = Matrix(m.rows, m.cols + 1, [list(r) + [as_fraction(x)] for r, x in zip(m.data, b)])
    red, pivots = rref(aug)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [Q(0)] * m.cols
    for r, p in enumerate(pivots):
        x[p] = red[r][m.cols]
    return x


def extend_to_complement(base: Sequence[Sequence[Fraction]], candidates: Sequence[Sequence[Fraction]],
                         length: int) -> list[list[Fraction]]:
    """Greedily pick candidates that are independent modulo span(base)."""
    chosen: list[list[Fraction]] = []
    current = [list(v) for v in base]
    r = rank_of_vectors(current, length)
    for v in candidates:
        trial = current + [list(v)]
        r2 = rank_of_vectors(trial, length)
        if r2 > r:
            chosen.append(list(v))
            current = trial
            r = r2
    return chosen


class ComplexError(ValueError):
    pass


@dataclass
class CochainComplex:
    """Finite cochain complex in degrees k_min .. k_min+len(dims)-1.

    differentials[i] maps degree k_min+i to k_min+i+1 and has shape
    dims[i+1] x dims[i]. Outside the range every space is zero.
    """

    k_min: int
    dims: list[int]
    differentials: list[Matrix]
    labels: dict[int, list] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.differentials) != max(len(self.dims) - 1, 0):
            raise ComplexError("need exactly one differential between consecutive degrees")
        for i, d in enumerate(self.differentials):
            if d.shape != (self.dims[i + 1], self.dims[i]):
                raise ComplexError(
                    f"d_{self.k_min + i} has shape {d.shape}, expected {(self.dims[i + 1], self.dims[i])}")

    @property
    def k_max(self) -> int:
        return self.k_min + len(self.dims) - 1

    @property
    def degrees(self) -> range:
        return range(self.k_min, self.k_max + 1)

    def dim(self, k: int) -> int:
        if self.k_min <= k <= self.k_max:
            return self.dims[k - self.k_min]
        return 0

    def d(self, k: int) -> Matrix:
        """Differential out of degree k (zero map at the ends)."""
        if self.k_min <= k < self.k_max:
            return self.differentials[k - self.k_min]
        return Matrix.zeros(self.dim(k + 1), self.dim(k))


def verify_complex(c: CochainComplex) -> tuple[bool, int | None]:
    """Check d_{k+1} d_k = 0; returns (ok, first failing degree)."""
    for k in range(c.k_min, c.k_max - 1):
        if not (c.d(k + 1) @ c.d(k)).is_zero():
            return False, k
    return True, None


@dataclass
class CohomologyReport:
    betti: dict[int, int]
    representatives: dict[int, list[list[Fraction]]]

    def betti_list(self, lo: int, hi: int) -> list[int]:
        return [self.betti.get(k, 0) for k in range(lo, hi + 1)]


def cocycles(c: CochainComplex, k: int) -> list[list[Fraction]]:
    return rank_kernel_image(c.d(k)).kernel


def coboundaries(c: CochainComplex, k: int) -> list[list[Fraction]]:
    return rank_kernel_image(c.d(k - 1)).image


def cohomology(c: CochainComplex, check: bool = True) -> CohomologyReport:
    if check:
        ok, where = verify_complex(c)
        if not ok:
            raise ComplexError(f"d^2 != 0 at degree {where}")
    betti: dict[int, int] = {}
    reps: dict[int, list[list[Fraction]]] = {}
    infos = {k: rank_kernel_image(c.d(k)) for k in range(c.k_min - 1, c.k_max + 1)}
    for k in c.degrees:
        z = infos[k].kernel
        b = infos[k - 1].image
        betti[k] = len(z) - len(b)
        reps[k] = extend_to_complement(b, z, c.dim(k)) if betti[k] else []
    return CohomologyReport(betti, reps)


def induced_rank(f: dict[int, Matrix], src: CochainComplex, tgt: CochainComplex, k: int) -> int:
    """Rank of H^k(src) -> H^k(tgt) induced by the chain map f."""
    z = cocycles(src, k)
    b = coboundaries(tgt, k)
    fk = f[k]
    images = [fk.apply(v) for v in z]
    n = tgt.dim(k)
    return rank_of_vectors(b + images, n) - rank_of_vectors(b, n)


def is_chain_map(f: dict[int, Matrix], src: CochainComplex, tgt: CochainComplex) -> tuple[bool, int | None]:
    lo = min(src.k_min, tgt.k_min)
    hi = max(src.k_max, tgt.k_max)
    for k in range(lo, hi):
        fk = f.get(k, Matrix.zeros(tgt.dim(k), src.dim(k)))
        fk1 = f.get(k + 1, Matrix.zeros(tgt.dim(k + 1), src.dim(k + 1)))
        if not (fk1 @ src.d(k) == tgt.d(k) @ fk):
            return False, k
    return True, None


def mapping_cone(f: dict[int, Matrix], src: CochainComplex, tgt: CochainComplex) -> CochainComplex:
    """Cone^k = src^{k+1} (+) tgt^k with d(a, b) = (-d a, f(a) + d b)."""
    ok, where = is_chain_map(f, src, tgt)
    if not ok:
        raise ComplexError(f"not a chain map at degree {where}")
    lo = min(src.k_min - 1, tgt.k_min)
    hi = max(src.k_max - 1, tgt.k_max)
    dims = [src.dim(k + 1) + tgt.dim(k) for k in range(lo, hi + 1)]
    diffs = []
    for k in range(lo, hi):
        sa, ta = src.dim(k + 1), tgt.dim(k)
        sb, tb = src.dim(k + 2), tgt.dim(k + 1)
        m = Matrix.zeros(sb + tb, sa + ta)
        ds = src.d(k + 1)
        dt = tgt.d(k)
        fk = f.get(k + 1, Matrix.zeros(tgt.dim(k + 1), src.dim(k + 1)))
        for i in range(sb):
            for j in range(sa):
                m.data[i][j] = -ds.data[i][j]
        for i in range(tb):
            for j in range(sa):
                m.data[sb + i][j] = fk.data[i][j]
            for j in range(ta):
                m.data[sb + i][sa + j] = dt.data[i][j]
        diffs.append(m)
    return CochainComplex(lo, dims, diffs)


@dataclass
class ShortExactSequence:
    """0 -> sub --inc--> mid --proj--> quot -> 0, maps given per degree."""

    sub: CochainComplex
    mid: CochainComplex
    quot: CochainComplex
    inc: dict[int, Matrix]
    proj: dict[int, Matrix]


@dataclass
class LesReport:
    exact: bool
    failures: list[str]
    betti: dict[str, dict[int, int]]
    ranks: dict[str, dict[int, int]]


def _check_ses(ses: ShortExactSequence) -> list[str]:
    problems = []
    for name, f, s, t in (("inclusion", ses.inc, ses.sub, ses.mid), ("projection", ses.proj, ses.mid, ses.quot)):
        ok, where = is_chain_map(f, s, t)
        if not ok:
            problems.append(f"{name} is not a chain map at degree {where}")
    for k in ses.mid.degrees:
        i, p = ses.inc[k], ses.proj[k]
        if rank(i) != ses.sub.dim(k):
            problems.append(f"inclusion not injective in degree {k}")
        if rank(p) != ses.quot.dim(k):
            problems.append(f"projection not surjective in degree {k}")
        if not (p @ i).is_zero() or ses.sub.dim(k) + ses.quot.dim(k) != ses.mid.dim(k):
            problems.append(f"not exact in the middle at degree {k}")
    return problems


def connecting_rank(ses: ShortExactSequence, k: int) -> int:
    """Rank of the connecting map H^k(quot) -> H^{k+1}(sub)."""
    z = cocycles(ses.quot, k)
    p, i = ses.proj[k], ses.inc.get(k + 1)
    n = ses.sub.dim(k + 1)
    if i is None or n == 0:
        return 0
    xs = []
    for q in z:
        m = solve_linear(p, q)
        if m is None:
            raise ComplexError(f"projection cannot lift a cocycle in degree {k}")
        dm = ses.mid.d(k).apply(m)
        x = solve_linear(i, dm)
        if x is None:
            raise ComplexError(f"boundary of a lift is not in the subcomplex, degree {k + 1}")
        xs.append(x)
    b = coboundaries(ses.sub, k + 1)
    return rank_of_vectors(b + xs, n) - rank_of_vectors(b, n)


def les_exactness_check(ses: ShortExactSequence) -> LesReport:
    """Exactness of the long exact cohomology sequence, checked by rank counting."""
    failures = _check_ses(ses)
    if failures:
        return LesReport(False, failures, {}, {})
    lo, hi = ses.mid.k_min, ses.mid.k_max
    h = {name: cohomology(cx).betti for name, cx in (("sub", ses.sub), ("mid", ses.mid), ("quot", ses.quot))}
    ranks = {"inc": {}, "proj": {}, "conn": {}}
    for k in range(lo, hi + 1):
        ranks["inc"][k] = induced_rank(ses.inc, ses.sub, ses.mid, k)
        ranks["proj"][k] = induced_rank(ses.proj, ses.mid, ses.quot, k)
        ranks["conn"][k] = connecting_rank(ses, k) if k < hi else 0
    # node sequence: H^k(sub) -> H^k(mid) -> H^k(quot) -> H^{k+1}(sub)
    for k in range(lo, hi + 1):
        incoming = ranks["conn"].get(k - 1, 0)
        nodes = (("sub", incoming, ranks["inc"][k]),
                 ("mid", ranks["inc"][k], ranks["proj"][k]),
                 ("quot", ranks["proj"][k], ranks["conn"][k]))
        for name, r_in, r_out in nodes:
            if h[name][k] - r_out != r_in:
                failures.append(f"not exact at H^{k}({name}): dim {h[name][k]}, in-rank {r_in}, out-rank {r_out}")
    return LesReport(not failures, failures, h, ranks)
