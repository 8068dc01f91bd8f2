"""Job files: parsing, up-front validation, and execution into a deterministic report."""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from . import __version__
from . import constructions as cs
from .catalog import CatalogError, Construct, build, expression_from_object
from .homogeneity import (lin, linear_subcomplex, linearization_split, weight_decompose,
                          weight_histogram)
from .linalg import cohomology, les_exactness_check, parse_rational
from .multideriv import (BracketElement, MultiDerivation, NotAMultiderivation, def_complex, def_differential,
                         gauge_transport, mc_check, sort_with_sign, verify_gauge_flow)
from .poly import DvbModel, Poly, Section, VectorField, parse_monomial
from .sampling import random_multiderivation

OPS = ("mc-check", "cohomology", "weights", "linearize", "gauge", "splitting-check", "les-check", "formula-check")


class JobError(ValueError):
    """Malformed job input; carries the offending field path."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass
class Task:
    op: str
    params: dict
    where: str
    index: int


@dataclass
class Job:
    source: dict
    model: DvbModel
    bracket: MultiDerivation | None  # raw bracket when given as tables
    construct: str | None
    tasks: list[Task]
    generators: dict = field(default_factory=dict)  # task index -> parsed 1-derivation


def _rational(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise JobError(where, "expected a rational, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return parse_rational(value)
        except ValueError as exc:
            raise JobError(where, str(exc)) from None
    raise JobError(where, f"expected a rational string like \"p/q\", got {value!r}")


def _poly(model: DvbModel, value, where: str) -> Poly:
    if isinstance(value, (str, int)) and not isinstance(value, bool):
        return Poly.const(model.m, _rational(value, where))
    if not isinstance(value, dict):
        raise JobError(where, "expected a rational or a {monomial: rational} object")
    terms = {}
    for mono, c in value.items():
        try:
            e = parse_monomial(mono, model.m)
        except ValueError as exc:
            raise JobError(f"{where}.{mono}", str(exc)) from None
        terms[e] = terms.get(e, 0) + _rational(c, f"{where}.{mono}")
    return Poly(model.m, terms)


def _labels(model: DvbModel, value, where: str) -> list[int]:
    if not isinstance(value, list):
        raise JobError(where, "expected a list of basis indices like [\"A1\", \"C1\"]")
    out = []
    for i, lab in enumerate(value):
        if not isinstance(lab, str):
            raise JobError(f"{where}[{i}]", "basis index must be a string")
        try:
            out.append(model.parse_label(lab))
        except ValueError as exc:
            raise JobError(f"{where}[{i}]", str(exc)) from None
    return out


def _coordinate(model: DvbModel, value, where: str) -> str:
    """Normalize a base coordinate given as "u<i>" or as a 1-based integer to "u<i>"."""
    if isinstance(value, int) and not isinstance(value, bool):
        value = f"u{value}"
    if not (isinstance(value, str) and value.startswith("u") and value[1:].isdigit()
            and 1 <= int(value[1:]) <= model.m):
        raise JobError(where, f"unknown coordinate {value!r} (dim E = {model.m})")
    return value


def parse_tables(model: DvbModel, arity: int, tables, where: str) -> MultiDerivation:
    if not isinstance(tables, dict):
        raise JobError(where, "expected an object with \"val\" and \"sym\" lists")
    unknown = set(tables) - {"val", "sym"}
    if unknown:
        raise JobError(where, f"unknown keys {sorted(unknown)}")
    val: dict = {}
    sym: dict = {}
    for r, entry in enumerate(tables.get("val", [])):
        w = f"{where}.val[{r}]"
        if not isinstance(entry, dict) or "inputs" not in entry or "output" not in entry:
            raise JobError(w, "each value entry needs \"inputs\" and \"output\"")
        idx = _labels(model, entry["inputs"], f"{w}.inputs")
        if len(idx) != arity:
            raise JobError(f"{w}.inputs", f"expected {arity} inputs, got {len(idx)}")
        sign, key = sort_with_sign(idx)
        if not sign:
            raise JobError(f"{w}.inputs", "repeated basis index")
        out = entry["output"]
        if not isinstance(out, dict):
            raise JobError(f"{w}.output", "expected {basis index: coefficient}")
        coeffs = [Poly(model.m) for _ in range(model.n)]
        for lab, c in out.items():
            try:
                j = model.parse_label(lab)
            except ValueError as exc:
                raise JobError(f"{w}.output.{lab}", str(exc)) from None
            coeffs[j] = coeffs[j] + _poly(model, c, f"{w}.output.{lab}").scale(sign)
        s = Section(coeffs)
        val[key] = val[key] + s if key in val else s
    for r, entry in enumerate(tables.get("sym", [])):
        w = f"{where}.sym[{r}]"
        if arity == 0:
            raise JobError(w, "arity-0 elements have no symbol")
        if not isinstance(entry, dict) or "inputs" not in entry:
            raise JobError(w, "each symbol entry needs \"inputs\"")
        idx = _labels(model, entry["inputs"], f"{w}.inputs")
        if len(idx) != arity - 1:
            raise JobError(f"{w}.inputs", f"expected {arity - 1} inputs, got {len(idx)}")
        sign, key = sort_with_sign(idx) if idx else (1, ())
        if not sign:
            raise JobError(f"{w}.inputs", "repeated basis index")
        if "direction" in entry:
            if "coeff" not in entry or "field" in entry:
                raise JobError(w, "a symbol entry with \"direction\" needs \"coeff\" and no \"field\"")
            fld = {_coordinate(model, entry["direction"], f"{w}.direction"): entry["coeff"]}
        elif "field" in entry:
            fld = entry["field"]
            if not isinstance(fld, dict):
                raise JobError(f"{w}.field", "expected {\"u<i>\": polynomial}")
        else:
            raise JobError(w, "each symbol entry needs \"direction\" + \"coeff\" or a \"field\"")
        comps = [Poly(model.m) for _ in range(model.m)]
        for coord, c in fld.items():
            i = int(_coordinate(model, coord, f"{w}.field.{coord}")[1:]) - 1
            comps[i] = comps[i] + _poly(model, c, f"{w}.field.{coord}").scale(sign)
        x = VectorField(comps)
        sym[key] = sym[key] + x if key in sym else x
    return MultiDerivation(model, arity, val, sym)


def _degrees(params: dict, where: str, required: bool = True) -> tuple[int, int] | None:
    if "degrees" not in params:
        if required:
            raise JobError(f"{where}.degrees", "degree window [lo, hi] is mandatory")
        return None
    d = params["degrees"]
    if (not isinstance(d, list) or len(d) != 2 or not all(isinstance(x, int) and not isinstance(x, bool) for x in d)
            or d[0] > d[1] or d[0] < -1):
        raise JobError(f"{where}.degrees", "expected [lo, hi] with -1 <= lo <= hi")
    if d[1] > 6:
        raise JobError(f"{where}.degrees", "upper degree above 6 is outside desk scale")
    return (d[0], d[1])


def parse_job(text: str) -> Job:
    try:
        src = json.loads(text)
    except json.JSONDecodeError as exc:
        raise JobError(f"line {exc.lineno} column {exc.colno}", f"invalid JSON: {exc.msg}") from None
    if not isinstance(src, dict):
        raise JobError("$", "job must be a JSON object")
    unknown = set(src) - {"construct", "model", "bracket", "tasks", "name", "description"}
    if unknown:
        raise JobError("$", f"unknown top-level keys {sorted(unknown)}")
    construct = None
    bracket = None
    if "construct" in src:
        if "model" in src or "bracket" in src:
            raise JobError("$", "give either \"construct\" or \"model\" + \"bracket\", not both")
        spec = src["construct"]
        if not isinstance(spec, (str, dict)):
            raise JobError("construct", "expected a catalog expression or a {\"kind\": ...} object")
        try:
            construct = spec if isinstance(spec, str) else expression_from_object(spec)
            built = build(construct)
        except (CatalogError, ValueError) as exc:
            raise JobError("construct", str(exc)) from None
        model = built.bracket.model
    elif "model" in src:
        md = src["model"]
        if not isinstance(md, dict):
            raise JobError("model", "expected {dimA, dimE, dimC, trunc}")
        dims = []
        for key in ("dimA", "dimE", "dimC", "trunc"):
            v = md.get(key, 0)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise JobError(f"model.{key}", "expected a non-negative integer")
            dims.append(v)
        model = DvbModel(*dims)
        if "bracket" not in src:
            raise JobError("bracket", "a raw model needs a bracket table")
        bracket = parse_tables(model, 2, src["bracket"], "bracket")
    else:
        raise JobError("$", "job needs \"construct\" or \"model\"")
    tasks_src = src.get("tasks")
    if not isinstance(tasks_src, list) or not tasks_src:
        raise JobError("tasks", "expected a non-empty list of tasks")
    tasks = []
    gens = {}
    for i, t in enumerate(tasks_src):
        where = f"tasks[{i}]"
        if not isinstance(t, dict) or "op" not in t:
            raise JobError(where, "each task needs an \"op\"")
        op = t["op"]
        if op not in OPS:
            raise JobError(f"{where}.op", f"unknown op {op!r}; expected one of {', '.join(OPS)}")
        if op in ("cohomology", "linearize", "splitting-check", "les-check", "formula-check"):
            _degrees(t, where)
        if op == "cohomology":
            if t.get("complex", "full") not in ("full", "linear"):
                raise JobError(f"{where}.complex", "expected \"full\" or \"linear\"")
            exp = t.get("expect")
            if exp is not None and (not isinstance(exp, list) or not all(isinstance(x, int) for x in exp)):
                raise JobError(f"{where}.expect", "expected a list of integers")
            if exp is not None:
                lo, hi = _degrees(t, where)
                if len(exp) != hi - lo + 1:
                    raise JobError(f"{where}.expect", "length must match the degree window")
        if op == "gauge":
            if "generator" not in t:
                raise JobError(f"{where}.generator", "gauge needs a 1-derivation generator")
            gens[i] = parse_tables(model, 1, t["generator"], f"{where}.generator")
            times = t.get("times", [])
            if not isinstance(times, list):
                raise JobError(f"{where}.times", "expected a list of rationals")
            for r, x in enumerate(times):
                _rational(x, f"{where}.times[{r}]")
        if op == "weights" and "arity" in t:
            if not isinstance(t["arity"], int) or t["arity"] < 0:
                raise JobError(f"{where}.arity", "expected a non-negative integer")
        if op == "linearize":
            for key in ("samples", "seed"):
                if key in t and (not isinstance(t[key], int) or t[key] < 0):
                    raise JobError(f"{where}.{key}", "expected a non-negative integer")
        tasks.append(Task(op, t, where, i))
    return Job(src, model, bracket, construct, tasks, gens)


# ---------------------------------------------------------------- execution


class TaskError(Exception):
    pass


def _frac(x: Fraction) -> str:
    return str(x)


def _betti_map(report, lo, hi) -> dict:
    return {str(k): report.betti.get(k, 0) for k in range(lo, hi + 1)}


@dataclass
class Context:
    job: Job
    construct: Construct | None = None
    bracket: BracketElement | None = None
    bracket_error: str | None = None

    def element(self) -> BracketElement:
        if self.bracket is None:
            raise TaskError(self.bracket_error or "bracket unavailable")
        return self.bracket


def _prepare(job: Job) -> Context:
    ctx = Context(job)
    if job.construct is not None:
        ctx.construct = build(job.construct)
        ctx.bracket = ctx.construct.bracket
    else:
        res = mc_check(job.bracket)
        if res.ok:
            ctx.bracket = BracketElement(job.bracket, True)
        else:
            ctx.bracket_error = f"bracket fails the Maurer-Cartan equation at {res.witness}"
    return ctx


def _task_mc(ctx: Context, t: Task):
    md = ctx.bracket.underlying if ctx.bracket else ctx.job.bracket
    res = mc_check(md)
    return ("PASS" if res.ok else "FAIL"), {"maurer_cartan": res.ok}, res.witness


def _task_cohomology(ctx: Context, t: Task):
    lo, hi = _degrees(t.params, t.where)
    b = ctx.element()
    kind = t.params.get("complex", "full")
    try:
        dc = def_complex(b, (lo, hi)) if kind == "full" else linear_subcomplex(b, (lo, hi))
    except ValueError as exc:
        raise TaskError(str(exc)) from None
    rep = cohomology(dc.complex)
    data = {"complex": kind, "degrees": [lo, hi], "betti": _betti_map(rep, lo, hi),
            "dims": {str(k): dc.complex.dim(k) for k in range(lo, hi + 1)}}
    exp = t.params.get("expect")
    if exp is not None:
        got = rep.betti_list(lo, hi)
        data["expect"] = exp
        if got != exp:
            return "FAIL", data, {"expected": exp, "got": got}
    return "PASS", data, None


def _task_weights(ctx: Context, t: Task):
    b = ctx.element()
    parts = weight_decompose(b.underlying)
    data = {"bracket_weights": {str(q): len(p.terms()) for q, p in parts.items()},
            "bracket_is_linear": set(parts) <= {0}}
    if "arity" in t.params:
        hist = weight_histogram(b.model, t.params["arity"])
        data["basis_histogram"] = {str(q): c for q, c in hist.items()}
        if hist and min(hist) < -1:
            return "FAIL", data, {"min_weight": min(hist)}
    if t.params.get("expect_linear") and not data["bracket_is_linear"]:
        return "FAIL", data, {"nonzero_weights": sorted(parts)}
    return "PASS", data, None


def _task_linearize(ctx: Context, t: Task):
    lo, hi = _degrees(t.params, t.where)
    b = ctx.element()
    try:
        rep = linearization_split(b, (lo, hi))
    except ValueError as exc:
        raise TaskError(str(exc)) from None
    rng = random.Random(t.params.get("seed", 0))
    samples = t.params.get("samples", 5)
    commute_fail = None
    for s in range(samples):
        k = lo + s % (hi - lo + 1)
        c = random_multiderivation(b.model, k + 1, rng, density=0.3)
        if def_differential(b, lin(c)) != lin(def_differential(b, c)):
            commute_fail = {"sample": s, "degree": k}
            break
    data = {"degrees": [lo, hi],
            "dims": {str(k): list(v) for k, v in rep.dims.items() if lo <= k <= hi},
            "betti_linear": {str(k): v for k, v in rep.betti_linear.items()},
            "betti_full": {str(k): v for k, v in rep.betti_full.items()},
            "injective_on_cohomology": rep.injective, "samples": samples}
    ok = rep.ok and commute_fail is None
    witness = commute_fail or (rep.failures[0] if rep.failures else None)
    return ("PASS" if ok else "FAIL"), data, witness


def _task_gauge(ctx: Context, t: Task):
    b = ctx.element()
    gen = ctx.job.generators[t.index]
    try:
        rep = verify_gauge_flow(b, gen)
    except ValueError as exc:
        raise TaskError(str(exc)) from None
    velocity = def_differential(b, gen)
    data = {"degree_in_t": rep.degree_in_t, "initial_velocity_is_delta": rep.initial_velocity_is_coboundary,
            "stationary": velocity.is_zero()}
    failures = list(rep.failures)
    checked = {}
    for x in t.params.get("times", []):
        tt = _rational(x, t.where)
        ok = mc_check(gauge_transport(b, gen, tt)).ok
        checked[_frac(tt)] = ok
        if not ok:
            failures.append(f"b_t fails the Maurer-Cartan equation at t = {tt}")
    if checked:
        data["maurer_cartan_at"] = checked
    return ("PASS" if not failures else "FAIL"), data, (failures[0] if failures else None)


def _task_splitting(ctx: Context, t: Task):
    lo, hi = _degrees(t.params, t.where)
    c = ctx.construct
    if c is None or c.kind != "vb":
        raise TaskError("splitting-check needs a vb_algebra or tangent construct")
    failures, linc, tc = cs.check_splitting(c.lie, c.rep, (lo, hi))
    hl = cohomology(linc.complex)
    hc = cohomology(tc.cone)
    data = {"betti_linear": _betti_map(hl, lo, hi), "betti_cone": _betti_map(hc, lo, hi)}
    if data["betti_linear"] != data["betti_cone"]:
        failures.append("Betti numbers of cone and linear complex differ")
    return ("PASS" if not failures else "FAIL"), data, (failures[0] if failures else None)


def _task_les(ctx: Context, t: Task):
    lo, hi = _degrees(t.params, t.where)
    b = ctx.element()
    try:
        ls = cs.base_projection_ses(b, (lo, hi))
    except ValueError as exc:
        raise TaskError(str(exc)) from None
    rep = les_exactness_check(ls.ses)
    data = {"exact": rep.exact}
    if rep.betti:
        data["betti"] = {name: {str(k): v for k, v in h.items() if lo <= k <= hi} for name, h in rep.betti.items()}
    return ("PASS" if rep.exact else "FAIL"), data, (rep.failures[0] if rep.failures else None)


def _task_formula(ctx: Context, t: Task):
    lo, hi = _degrees(t.params, t.where)
    c = ctx.construct
    if c is None or c.kind != "la":
        raise TaskError("formula-check needs an la_vector_space construct")
    dc = linear_subcomplex(c.bracket, (lo, hi))
    got = cohomology(dc.complex)
    want = cs.la_cohomology_formula(c.partial)
    data = {"betti": _betti_map(got, lo, hi), "formula": {str(k): want.get(k, 0) for k in range(lo, hi + 1)}}
    ok = data["betti"] == data["formula"]
    return ("PASS" if ok else "FAIL"), data, (None if ok else {"expected": data["formula"]})


HANDLERS = {
    "mc-check": _task_mc,
    "cohomology": _task_cohomology,
    "weights": _task_weights,
    "linearize": _task_linearize,
    "gauge": _task_gauge,
    "splitting-check": _task_splitting,
    "les-check": _task_les,
    "formula-check": _task_formula,
}


def canonical_digest(src: Any) -> str:
    blob = json.dumps(src, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def run_job(job: Job) -> dict:
    ctx = _prepare(job)
    results = []
    for t in job.tasks:
        try:
            status, data, witness = HANDLERS[t.op](ctx, t)
        except (TaskError, NotAMultiderivation) as exc:
            status, data, witness = "ERROR", {}, str(exc)
        results.append({"op": t.op, "status": status, "data": data, "witness": witness})
    m = job.model
    meta = {"input_sha256": canonical_digest(job.source), "version": __version__,
            "model": {"dimA": m.a, "dimE": m.m, "dimC": m.c, "trunc": m.d},
            "construct": job.construct}
    return {"tasks": results, "meta": meta}


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def report_table(report: dict) -> str:
    lines = []
    for i, t in enumerate(report["tasks"]):
        summary = ""
        d = t["data"]
        if "betti" in d and isinstance(d["betti"], dict) and all(isinstance(v, int) for v in d["betti"].values()):
            summary = "betti " + " ".join(f"{k}:{v}" for k, v in d["betti"].items())
        elif "betti_linear" in d:
            summary = "betti(lin) " + " ".join(f"{k}:{v}" for k, v in d["betti_linear"].items())
        if t["witness"] is not None and t["status"] != "PASS":
            summary = (summary + "  " if summary else "") + f"witness: {json.dumps(t['witness'], sort_keys=True)}"
        lines.append(f"{i:>3}  {t['op']:<16} {t['status']:<6} {summary}".rstrip())
    meta = report["meta"]
    lines.append(f"model dimA={meta['model']['dimA']} dimE={meta['model']['dimE']} "
                 f"dimC={meta['model']['dimC']} trunc={meta['model']['trunc']}  sha256={meta['input_sha256'][:12]}")
    return "\n".join(lines) + "\n"


def exit_code(report: dict) -> int:
    return 0 if all(t["status"] == "PASS" for t in report["tasks"]) else 1
