"""Named example constructions, addressable by short expressions such as ``type1(aff1, m=1, d=2)``."""
from __future__ import annotations

import ast
from dataclasses import dataclass, field

from . import constructions as cs
from .linalg import Matrix, as_fraction
from .multideriv import BracketElement

LIE_ALGEBRAS = {
    "heisenberg3": cs.heisenberg3,
    "sl2": cs.sl2,
    "so3": cs.so3,
    "aff1": cs.aff1,
}


@dataclass
class Construct:
    expr: str
    bracket: BracketElement
    kind: str
    lie: cs.LieAlgebraData | None = None
    rep: cs.RepresentationData | None = None
    partial: Matrix | None = None
    extras: dict = field(default_factory=dict)


CATALOG = {
    "abelian(n)": "abelian Lie algebra of dimension n",
    "heisenberg3": "3-dim Heisenberg algebra [e1,e2]=e3",
    "sl2": "sl(2) in the basis (h, e, f)",
    "so3": "so(3) with [e_i, e_j] = e_k cyclic",
    "aff1": "2-dim non-abelian algebra [e1,e2]=e2",
    "vb_algebra(g, rep)": "semidirect product g x| C as a VB-algebra; rep = standard | adjoint | trivial(k)",
    "la_vector_space(partial, d=1)": "LA-vector space from a linear map C -> E (list of rows)",
    "tangent(g)": "tangent VB-algebra Tg = g x| g (adjoint)",
    "action(g, rep, d=1)": "action Lie algebroid of a linear g-action on E",
    "type1(g, m=1, d=1)": "pullback of g along E -> point, dim E = m",
    "tangent_bundle(m=1, d=1)": "tangent bundle TE of E = Q^m",
}


class CatalogError(ValueError):
    pass


def _literal(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, str)):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub) and isinstance(node.operand, ast.Constant):
        return -node.operand.value
    if isinstance(node, ast.List):
        return [_literal(x) for x in node.elts]
    if isinstance(node, ast.Name):
        return ("name", node.id)
    if isinstance(node, ast.Call):
        return _call(node)
    raise CatalogError(f"unsupported expression element: {ast.dump(node)}")


def _call(node):
    if isinstance(node, ast.Name):
        return ("call", node.id, [], {})
    if not isinstance(node, ast.Call) or not isinstance(node.func, ast.Name):
        raise CatalogError("expected a constructor call like name(args)")
    return ("call", node.func.id, [_literal(a) for a in node.args], {k.arg: _literal(k.value) for k in node.keywords})


def parse_expression(text: str):
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise CatalogError(f"cannot parse construct {text!r}: {exc.msg}") from None
    body = tree.body
    if isinstance(body, ast.Name):
        return ("call", body.id, [], {})
    return _call(body)


def _as_lie(x) -> cs.LieAlgebraData:
    if isinstance(x, tuple) and x[0] in ("name", "call"):
        name = x[1]
        args = x[2] if x[0] == "call" else []
        if name == "abelian":
            if len(args) != 1 or not isinstance(args[0], int) or args[0] < 0:
                raise CatalogError("abelian(n) needs one non-negative integer")
            return cs.abelian(args[0])
        if name in LIE_ALGEBRAS:
            return LIE_ALGEBRAS[name]()
        raise CatalogError(f"unknown Lie algebra {name!r}")
    raise CatalogError(f"expected a Lie algebra name, got {x!r}")


def _as_rep(g: cs.LieAlgebraData, x) -> cs.RepresentationData:
    if isinstance(x, tuple):
        name = x[1]
        args = x[2] if x[0] == "call" else []
        if name == "standard":
            return cs.standard_rep(g)
        if name == "adjoint":
            return cs.adjoint_rep(g)
        if name == "trivial":
            k = args[0] if args else 1
            return cs.trivial_rep(g, k)
    raise CatalogError(f"unknown representation {x!r} (use standard, adjoint, trivial(k))")


def _as_matrix(x) -> Matrix:
    if not isinstance(x, list) or not x or not all(isinstance(r, list) for r in x):
        raise CatalogError("partial must be a non-empty list of rows")
    width = len(x[0])
    if any(len(r) != width for r in x):
        raise CatalogError("rows of partial have different lengths")
    try:
        return Matrix(len(x), width, [[as_fraction(v) for v in r] for r in x])
    except (TypeError, ValueError) as exc:
        raise CatalogError(f"bad entry in partial: {exc}") from None


def _kw(args, kwargs, pos, name, default):
    if name in kwargs:
        return kwargs[name]
    if len(args) > pos:
        return args[pos]
    return default


def _nonneg(v, name):
    if not isinstance(v, int) or v < 0:
        raise CatalogError(f"{name} must be a non-negative integer")
    return v


def build(text: str) -> Construct:
    """Instantiate a catalog expression. Raises CatalogError on malformed input."""
    _, name, args, kwargs = parse_expression(text)
    if name in LIE_ALGEBRAS or name == "abelian":
        g = _as_lie(("call", name, args, kwargs))
        return Construct(text, cs.from_lie_algebra(g), "lie", lie=g)
    if name == "vb_algebra":
        if len(args) < 2:
            raise CatalogError("vb_algebra(g, rep) needs a Lie algebra and a representation")
        g = _as_lie(args[0])
        rep = _as_rep(g, args[1])
        return Construct(text, cs.vb_semidirect(g, rep), "vb", lie=g, rep=rep)
    if name == "tangent":
        g = _as_lie(_kw(args, kwargs, 0, "g", None))
        return Construct(text, cs.tangent_vb(g), "vb", lie=g, rep=cs.adjoint_rep(g))
    if name == "la_vector_space":
        p = _as_matrix(_kw(args, kwargs, 0, "partial", None))
        d = _nonneg(_kw(args, kwargs, 1, "d", 1), "d")
        return Construct(text, cs.la_vector_space(p, d), "la", partial=p)
    if name == "action":
        g = _as_lie(_kw(args, kwargs, 0, "g", None))
        rep = _as_rep(g, _kw(args, kwargs, 1, "rep", ("name", "standard")))
        d = _nonneg(_kw(args, kwargs, 2, "d", 1), "d")
        return Construct(text, cs.action_algebroid(g, rep, d), "action", lie=g, rep=rep)
    if name == "type1":
        g = _as_lie(_kw(args, kwargs, 0, "g", None))
        m = _nonneg(_kw(args, kwargs, 1, "m", 1), "m")
        d = _nonneg(_kw(args, kwargs, 2, "d", 1), "d")
        return Construct(text, cs.type1_pullback(g, m, d), "type1", lie=g)
    if name == "tangent_bundle":
        m = _nonneg(_kw(args, kwargs, 0, "m", 1), "m")
        d = _nonneg(_kw(args, kwargs, 1, "d", 1), "d")
        return Construct(text, cs.tangent_bundle(m, d), "type1", lie=cs.abelian(0))
    raise CatalogError(f"unknown construct {name!r}; run `defcohom examples` for the catalog")


def builtin_examples() -> dict[str, str]:
    return dict(CATALOG)


# Object form used in job files: {"kind": "...", ...fields}. Each kind lists its allowed fields.
_OBJECT_FIELDS = {
    "lie_algebra": {"name", "n"},
    "vb_algebra": {"lie", "rep"},
    "tangent": {"lie"},
    "la_vector_space": {"partial", "trunc"},
    "action": {"lie", "rep", "trunc"},
    "type1": {"lie", "dimE", "trunc"},
    "tangent_bundle": {"dimE", "trunc"},
}


def _lie_expr(value, field_name: str) -> str:
    if isinstance(value, str) and (value in LIE_ALGEBRAS or value.startswith("abelian(")):
        return value
    raise CatalogError(f"{field_name}: unknown Lie algebra {value!r}")


def _int_field(obj: dict, key: str, default: int) -> int:
    v = obj.get(key, default)
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise CatalogError(f"{key}: expected a non-negative integer")
    return v


def expression_from_object(obj: dict) -> str:
    """Translate the object form of a construct into the equivalent catalog expression."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise CatalogError("construct object needs a \"kind\"")
    kind = obj["kind"]
    if kind not in _OBJECT_FIELDS:
        raise CatalogError(f"unknown construct kind {kind!r}; expected one of {', '.join(_OBJECT_FIELDS)}")
    extra = set(obj) - _OBJECT_FIELDS[kind] - {"kind"}
    if extra:
        raise CatalogError(f"unknown fields {sorted(extra)} for kind {kind!r}")
    if kind == "lie_algebra":
        name = obj.get("name")
        if name == "abelian":
            return f"abelian({_int_field(obj, 'n', 1)})"
        return _lie_expr(name, "name")
    if kind == "la_vector_space":
        p = obj.get("partial")
        if not isinstance(p, list) or not all(isinstance(r, list) for r in p):
            raise CatalogError("partial: expected a list of rows")
        rows = ", ".join("[" + ", ".join(repr(str(x)) if isinstance(x, str) else repr(x) for x in r) + "]"
                         for r in p)
        return f"la_vector_space([{rows}], d={_int_field(obj, 'trunc', 1)})"
    if kind == "tangent_bundle":
        return f"tangent_bundle(m={_int_field(obj, 'dimE', 1)}, d={_int_field(obj, 'trunc', 1)})"
    lie = _lie_expr(obj.get("lie"), "lie")
    if kind == "tangent":
        return f"tangent({lie})"
    if kind == "type1":
        return f"type1({lie}, m={_int_field(obj, 'dimE', 1)}, d={_int_field(obj, 'trunc', 1)})"
    rep = obj.get("rep", "standard")
    if not isinstance(rep, str) or not (rep in ("standard", "adjoint") or rep.startswith("trivial")):
        raise CatalogError(f"rep: unknown representation {rep!r}")
    if kind == "vb_algebra":
        return f"vb_algebra({lie}, {rep})"
    return f"action({lie}, {rep}, d={_int_field(obj, 'trunc', 1)})"
