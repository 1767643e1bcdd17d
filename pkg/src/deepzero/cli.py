"""``deepzero`` command line.

Function-spec documents are JSON objects mapping names to expressions::

    {
      "f": {"type": "monomial", "d": 2},
      "g": {"type": "sum", "children": [{"type": "ref", "name": "f"},
                                        {"type": "expatom", "mu": [0, 1]}]},
      "families": {"F": ["f", "g"]},
      "inner": {"I": {"zeros": [[0.5, 0, 2]], "atoms": [[0, 1]]}}
    }

Complex numbers are ``[re, im]`` pairs or plain reals.  Singular atoms use
``arg_over_pi`` so that boundary points stay exact.  Reports are JSON with
sorted keys; ``wall_time`` is the only nondeterministic field.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import decay as dc
from . import diskgeom as dg
from . import holofunc as hf
from . import inner as inn
from . import rootfinder as rf
from . import wronskian as wr
from .errors import DeepZeroError, MathError, PreconditionError, SpecError, UsageError

RESERVED = ("families", "inner")

# field name -> kind, per variant
SCHEMA: dict[str, dict[str, str]] = {
    "monomial": {"d": "int"},
    "polynomial": {"coeffs": "complex_list"},
    "expatom": {"mu": "complex"},
    "blaschkefactor": {"a": "complex"},
    "singularatom": {"arg_over_pi": "real", "mass": "real"},
    "sum": {"children": "expr_list"},
    "product": {"children": "expr_list"},
    "power": {"child": "expr", "k": "int"},
    "scale": {"child": "expr", "by": "complex"},
    "shiftarg": {"child": "expr", "a": "complex", "b": "complex"},
    "reciprocal": {"child": "expr"},
    "ref": {"name": "str"},
}
OPTIONAL = {("shiftarg", "a"), ("shiftarg", "b")}


def parse_complex(x, where: str = "") -> complex:
    if isinstance(x, bool):
        raise SpecError("expected a number", where)
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in x):
        return complex(x[0], x[1])
    raise SpecError("expected a complex number as a real or [re, im]", where)


@dataclass
class FunctionSpecDocument:
    exprs: dict[str, hf.FuncExpr] = field(default_factory=dict)
    families: dict[str, list[str]] = field(default_factory=dict)
    inner: dict[str, inn.InnerSpec] = field(default_factory=dict)

    def family(self, name: str) -> list[hf.FuncExpr]:
        if name not in self.families:
            raise SpecError(f"unknown family {name!r}", "$.families")
        return [self.exprs[n] for n in self.families[name]]


class _Parser:
    def __init__(self, raw: dict):
        self.raw = raw
        self.done: dict[str, hf.FuncExpr] = {}
        self.active: list[str] = []

    def named(self, name: str, where: str) -> hf.FuncExpr:
        if name in self.done:
            return self.done[name]
        if name in RESERVED or name not in self.raw:
            raise SpecError(f"reference to undefined name {name!r}", where)
        if name in self.active:
            raise SpecError(f"reference cycle through {name!r}", where)
        self.active.append(name)
        e = self.expr(self.raw[name], f"$.{name}")
        self.active.pop()
        self.done[name] = e
        return e

    def expr(self, obj: Any, where: str) -> hf.FuncExpr:
        if isinstance(obj, str):
            return self.named(obj, where)
        if not isinstance(obj, dict):
            raise SpecError("expected an expression object", where)
        kind = obj.get("type")
        if kind not in SCHEMA:
            raise SpecError(f"unknown variant {kind!r}", f"{where}.type")
        fields = SCHEMA[kind]
        extra = set(obj) - set(fields) - {"type"}
        if extra:
            raise SpecError(f"unknown field(s) {sorted(extra)} for {kind}", where)
        missing = [k for k in fields if k not in obj and (kind, k) not in OPTIONAL]
        if missing:
            raise SpecError(f"missing field(s) {missing} for {kind}", where)
        v = {k: self.value(obj[k], fields[k], f"{where}.{k}") for k in fields if k in obj}
        try:
            return self.build(kind, v, where)
        except PreconditionError as e:
            msg = str(e)
            raise SpecError(msg if msg.startswith("invariant") else f"invariant: {msg}", where) from None

    def value(self, x, kind: str, where: str):
        if kind == "int":
            if isinstance(x, bool) or not isinstance(x, int):
                raise SpecError("expected an integer", where)
            return x
        if kind == "real":
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise SpecError("expected a real number", where)
            return float(x)
        if kind == "str":
            if not isinstance(x, str):
                raise SpecError("expected a string", where)
            return x
        if kind == "complex":
            return parse_complex(x, where)
        if kind == "complex_list":
            if not isinstance(x, list) or not x:
                raise SpecError("expected a nonempty list", where)
            return [parse_complex(c, f"{where}[{i}]") for i, c in enumerate(x)]
        if kind == "expr":
            return self.expr(x, where)
        if kind == "expr_list":
            if not isinstance(x, list) or not x:
                raise SpecError("expected a nonempty list of expressions", where)
            return [self.expr(c, f"{where}[{i}]") for i, c in enumerate(x)]
        raise AssertionError(kind)

    def build(self, kind: str, v: dict, where: str) -> hf.FuncExpr:
        if kind == "ref":
            return self.named(v["name"], f"{where}.name")
        if kind == "monomial":
            return hf.Monomial(v["d"])
        if kind == "polynomial":
            return hf.Polynomial(tuple(v["coeffs"]))
        if kind == "expatom":
            return hf.ExpAtom(v["mu"])
        if kind == "blaschkefactor":
            return hf.BlaschkeFactor(v["a"])
        if kind == "singularatom":
            return hf.SingularAtom.from_arg(v["arg_over_pi"], v["mass"])
        if kind == "sum":
            return hf.Sum(tuple(v["children"]))
        if kind == "product":
            return hf.Product(tuple(v["children"]))
        if kind == "power":
            return hf.Power(v["child"], v["k"])
        if kind == "scale":
            return hf.Scale(v["child"], v["by"])
        if kind == "shiftarg":
            return hf.ShiftArg(v["child"], v.get("a", 1), v.get("b", 0))
        return hf.Reciprocal(v["child"])


def parse_func_spec(text: str) -> FunctionSpecDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(e.msg, f"line {e.lineno} col {e.colno}") from None
    if not isinstance(raw, dict):
        raise SpecError("document must be a JSON object", "$")
    p = _Parser(raw)
    doc = FunctionSpecDocument()
    for name in raw:
        if name not in RESERVED:
            doc.exprs[name] = p.named(name, f"$.{name}")
    fams = raw.get("families", {})
    if not isinstance(fams, dict):
        raise SpecError("families must map names to lists of expression names", "$.families")
    for fname, members in fams.items():
        where = f"$.families.{fname}"
        if not isinstance(members, list) or not members:
            raise SpecError("a family is a nonempty list of names", where)
        for i, m in enumerate(members):
            if not isinstance(m, str) or m not in doc.exprs:
                raise SpecError(f"family member {m!r} is not a defined expression", f"{where}[{i}]")
        doc.families[fname] = list(members)
    inners = raw.get("inner", {})
    if not isinstance(inners, dict):
        raise SpecError("inner must map names to inner specs", "$.inner")
    for iname, obj in inners.items():
        try:
            doc.inner[iname] = inn.InnerSpec.from_json_obj(obj)
        except SpecError as e:
            raise SpecError(str(e), f"$.inner.{iname}") from None
    return doc


# ---------------------------------------------------------------------------
# inline expressions: "poly 1,1", "mono 2", "exp 0,1", "blaschke 0.5,0",
# "atom 0.5 1" (arg_over_pi, mass), a document name, or a JSON object.

def _nums(s: str) -> list[float]:
    try:
        return [float(t) for t in s.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"cannot parse numbers from {s!r}") from None


def parse_point(s: str) -> complex:
    v = _nums(s)
    if len(v) not in (1, 2):
        raise UsageError(f"a point is 're' or 're,im', got {s!r}")
    return complex(v[0], v[1] if len(v) == 2 else 0.0)


def parse_points(s: str) -> list[complex]:
    return [parse_point(p) for p in s.split(";") if p.strip()]


def resolve_expr(s: str, doc: FunctionSpecDocument) -> hf.FuncExpr:
    s = s.strip()
    if s in doc.exprs:
        return doc.exprs[s]
    if s.startswith("{"):
        try:
            wrapped = parse_func_spec(json.dumps({"_": json.loads(s)}) if _is_json(s) else s)
        except SpecError as e:
            loc = e.location
            if loc.startswith("$._"):
                loc = "$" + loc[3:]
            raise SpecError(e.message, loc) from None
        return wrapped.exprs["_"]
    head, _, rest = s.partition(" ")
    try:
        if head == "poly":
            v = _nums(rest)
            return hf.Polynomial(tuple(v))
        if head == "mono":
            return hf.Monomial(int(rest))
        if head == "exp":
            return hf.ExpAtom(parse_point(rest))
        if head == "blaschke":
            return hf.BlaschkeFactor(parse_point(rest))
        if head == "atom":
            x, m = rest.split()
            return hf.SingularAtom.from_arg(float(x), float(m))
    except PreconditionError as e:
        raise SpecError(str(e), s) from None
    except ValueError:
        raise UsageError(f"cannot parse expression {s!r}") from None
    raise UsageError(f"unknown expression {s!r}: not a document name or inline form")


def _is_json(s: str) -> bool:
    try:
        json.loads(s)
        return True
    except json.JSONDecodeError:
        return False


def resolve_inner(s: str, doc: FunctionSpecDocument) -> inn.InnerSpec:
    if s in doc.inner:
        return doc.inner[s]
    return inn.InnerSpec.from_json(s)


def resolve_family(args, doc: FunctionSpecDocument) -> list[hf.FuncExpr]:
    if args.family:
        return doc.family(args.family)
    if args.funcs:
        return [resolve_expr(t, doc) for t in args.funcs.split("|")]
    raise UsageError("give --family NAME or --funcs 'expr|expr|...'")


def resolve_region(args):
    chosen = [r for r in ("disk", "rect", "annulus") if getattr(args, r, None)]
    if len(chosen) != 1:
        raise UsageError("give exactly one of --disk, --rect, --annulus")
    v = _nums(getattr(args, chosen[0]))
    try:
        if chosen[0] == "disk" and len(v) == 3:
            return rf.Disk(complex(v[0], v[1]), v[2])
        if chosen[0] == "rect" and len(v) == 4:
            return rf.Rectangle(complex(v[0], v[1]), complex(v[2], v[3]))
        if chosen[0] == "annulus" and len(v) == 4:
            return rf.Annulus(complex(v[0], v[1]), v[2], v[3])
    except PreconditionError as e:
        raise UsageError(str(e)) from None
    raise UsageError(f"wrong number of values for --{chosen[0]}")


def cpx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _finite(x: float):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


# ---------------------------------------------------------------------------
# subcommands return (result payload, optional csv text, human summary)

def cmd_eval(a, doc):
    f = resolve_expr(a.f, doc)
    v = complex(f(parse_point(a.at)))
    return {"value": cpx(v)}, None, f"{v}"


def cmd_jet(a, doc):
    f = resolve_expr(a.f, doc)
    j = hf.eval_jet(f, parse_point(a.at), a.order)
    d = [complex(x) for x in j.derivs]
    return {"derivs": [cpx(x) for x in d]}, None, "\n".join(f"f^({k}) = {x}" for k, x in enumerate(d))


def cmd_wronskian(a, doc):
    funcs = resolve_family(a, doc)
    m = wr.wronskian_matrix(funcs, parse_point(a.at))
    v = complex(m.value)
    return {"value": cpx(v), "scale": float(m.scale), "n": len(funcs) - 1}, None, f"W = {v}"


def cmd_deep_zero(a, doc):
    funcs = resolve_family(a, doc)
    z = parse_point(a.at)
    sol = wr.deep_zero_coefficients(funcs, z, a.tol)
    if sol is None:
        return {"solution": None}, None, "none (matrix nonsingular)"
    chk = wr.verify_deep_zero(funcs, sol.lam, z)
    res = {"solution": {"lambda": [cpx(c) for c in sol.lam], "sigma_ratio": sol.sigma_ratio,
                        "residual": chk.residualnorm, "scale": chk.scale, "verified": chk.passed}}
    return res, None, "lambda = " + ", ".join(str(c) for c in sol.lam)


def _zero_report(rep: rf.ZeroReport):
    return {
        "zeros": [{"location": cpx(e.location), "multiplicity": e.multiplicity,
                   "enclosure_radius": e.enclosure_radius, "residual": e.residual} for e in rep.zeros],
        "total_count": rep.total_count,
        "unresolved": [{"center": cpx(u.center), "radius": u.radius, "count": u.count}
                       for u in rep.unresolved],
        "warnings": list(rep.warnings),
    }


def cmd_exceptional_set(a, doc):
    funcs = resolve_family(a, doc)
    rep = rf.exceptional_set(funcs, resolve_region(a), max_depth=a.max_depth,
                             sep_tol=a.sep_tol, workers=a.workers)
    lines = [f"{e.location} mult {e.multiplicity} (radius {e.enclosure_radius:.1e})" for e in rep.zeros]
    lines += [f"unresolved: {u.count} near {u.center}" for u in rep.unresolved]
    return _zero_report(rep), None, "\n".join(lines) or "empty"


def _random_points(rng, n, radius):
    r = radius * np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


def cmd_identity_check(a, doc):
    rng = np.random.default_rng(a.seed)
    v = a.variant
    if v in ("powers", "prepend"):
        if not a.f or a.n is None:
            raise UsageError(f"--variant {v} needs --f and --n")
        f = resolve_expr(a.f, doc)
        fam = wr.PowerFamily(f, a.n) if v == "powers" else wr.PrependPolyFamily(f, a.n)
    elif v == "monomials":
        if not a.exponents:
            raise UsageError("--variant monomials needs --exponents")
        fam = wr.MonomialFamily(tuple(int(x) for x in _nums(a.exponents)))
    elif v == "expsums":
        if not a.mus:
            raise UsageError("--variant expsums needs --mus")
        fam = wr.ExpSumFamily(tuple(parse_points(a.mus)))
    else:
        return _identity_pointwise(a, doc, rng)
    funcs = fam.funcs()
    radius = 0.9 if hf.funcs_natural_domain(funcs) == "disk" else 1.0
    z = _random_points(rng, a.points, radius)
    num = wr.wronskian_values(funcs, z)
    ref = wr.closed_form_wronskian(fam)(z)
    rel = np.abs(num - ref) / np.maximum(np.abs(ref), np.finfo(float).tiny)
    worst = float(rel.max())
    ok = worst <= a.tol
    return ({"max_relative_residual": worst, "points": a.points, "passed": bool(ok)}, None,
            f"max relative residual {worst:.3e} ({'ok' if ok else 'FAIL'})")


def _identity_pointwise(a, doc, rng):
    funcs = resolve_family(a, doc)
    radius = 0.9 if hf.funcs_natural_domain(funcs) == "disk" else 1.0
    z = _random_points(rng, a.points, radius)
    k = a.k if a.k is not None else 0
    if a.variant == "replacement":
        lam = parse_points(a.lam) if a.lam else list(rng.normal(size=len(funcs)) + 1j * rng.normal(size=len(funcs)))
        res = [wr.replacement_identity_check(funcs, lam, k, p) for p in z]
    else:
        g = resolve_expr(a.g, doc) if a.g else hf.ExpAtom(0.5)
        res = [wr.cofactor_expansion_check(funcs, g, k, p) for p in z]
    worst = float(max(res))
    ok = worst <= a.tol
    return ({"max_relative_residual": worst, "points": a.points, "passed": bool(ok)}, None,
            f"max relative residual {worst:.3e} ({'ok' if ok else 'FAIL'})")


def _target(a, doc):
    f = resolve_expr(a.f, doc)
    if a.derivative:
        f = hf.nth_derivative(f, a.derivative)
    return f


def _region(a, doc):
    if a.stolz:
        v = _nums(a.stolz)
        if len(v) != 2:
            raise UsageError("--stolz takes arg_over_pi,M")
        return dg.StolzAngle.from_arg(v[0], v[1])
    if a.levelset:
        name, _, eps = a.levelset.rpartition(",")
        h = doc.inner[name] if name in doc.inner else resolve_expr(name, doc)
        return dg.LevelSetSpec(h, float(eps))
    raise UsageError("give --stolz or --levelset")


def cmd_decay(a, doc):
    est = dc.decay_order_estimate(_target(a, doc), _region(a, doc),
                                  dc.default_radii(a.m_min, a.m_max), a.angular)
    res = {"gamma_hat": _finite(est.gamma_hat), "fit_residual": est.fit_residual,
           "samples_used": est.samples_used, "infinite_order": est.infinite_order,
           "radii": list(est.radii), "sups": list(est.sups)}
    return res, est.to_csv(), f"gamma_hat = {est.gamma_hat:.6g}"


def cmd_korenblum(a, doc):
    v = dc.korenblum_norm_estimate(resolve_expr(a.f, doc), a.beta, a.levels, a.angular)
    return {"estimate": v}, None, f"{v:.6g}"


def _boundary_set(a):
    chosen = [x for x in ("points", "arc", "dyadic") if getattr(a, x) is not None]
    if len(chosen) != 1:
        raise UsageError("give exactly one of --points, --arc, --dyadic")
    if a.points is not None:
        xs = _nums(a.points)
        return dc.FinitePoints(tuple(complex(math.cos(math.pi * x), math.sin(math.pi * x)) for x in xs))
    if a.arc is not None:
        v = _nums(a.arc)
        if len(v) != 2:
            raise UsageError("--arc takes start,end in units of pi")
        try:
            return dc.ArcSet(((math.pi * v[0], math.pi * v[1]),))
        except PreconditionError as e:
            raise UsageError(str(e)) from None
    return dc.dyadic_angles(a.dyadic)


def cmd_carleson(a, doc):
    rep = dc.carleson_integral(_boundary_set(a), a.floor)
    return ({"value": _finite(rep.value), "divergent": rep.divergent, "reason": rep.reason}, None,
            f"{rep.value:.10g}" + (" (divergent)" if rep.divergent else ""))


def cmd_blaschke_sum(a, doc):
    if sum(x is not None for x in (a.dyadic, a.harmonic, a.points)) != 1:
        raise UsageError("give exactly one of --dyadic N, --harmonic N, --points")
    if a.points is not None:
        rep = dc.blaschke_condition(parse_points(a.points))
    elif a.dyadic is not None:
        rep = dc.blaschke_condition(dc.dyadic_zeros(), a.dyadic)
    else:
        rep = dc.blaschke_condition(dc.harmonic_zeros(), a.harmonic)
    res = {"sum": rep.sum, "partial_sum": rep.partial_sum, "tail_bound": _finite(rep.tail_bound),
           "converged": rep.converged, "terms": rep.terms}
    return res, None, f"sum {rep.sum:.15g} ({'converged' if rep.converged else 'not converged'})"


def _levelset_spec(a, doc):
    h = doc.inner[a.h] if a.h in doc.inner else resolve_expr(a.h, doc)
    return dg.LevelSetSpec(h, a.eps)


def cmd_levelset(a, doc):
    s = dg.level_set_sample(_levelset_spec(a, doc), a.radial, a.angular)
    res = {"count": int(s.points.size), "tested": s.tested, "skipped": s.skipped}
    if a.csv is None:
        res["points"] = [cpx(z) for z in s.points]
    return res, s.to_csv(), f"{s.points.size} of {s.tested} grid points (skipped {s.skipped})"


def cmd_levset_check(a, doc):
    r = dg.levset_containment_check(_levelset_spec(a, doc), a.samples, a.seed)
    return ({"violations": r.violations, "tested": r.tested, "max_ratio": r.max_ratio}, None,
            f"{r.violations} violations in {r.tested} samples")


def cmd_spectrum(a, doc):
    arcs = dg.boundary_spectrum_estimate(resolve_inner(a.inner, doc), a.eps, a.resolution, a.angular)
    res = {"arcs": [[x.start, x.end] for x in arcs]}
    return res, None, "\n".join(f"[{x.start:.6f}, {x.end:.6f}]" for x in arcs) or "empty"


def cmd_inner_divides(a, doc):
    v = inn.divides(resolve_inner(a.i1, doc), resolve_inner(a.i2, doc))
    return {"divides": v}, None, str(v).lower()


def cmd_inner_truncate(a, doc):
    out = inn.truncate_deep(resolve_inner(a.inner, doc), a.n)
    return {"inner": out.to_json_obj()}, None, out.to_json()


def cmd_inner_J(a, doc):
    out = inn.theorem4_J(resolve_inner(a.inner, doc), a.n)
    return {"inner": out.to_json_obj()}, None, out.to_json()


# ---------------------------------------------------------------------------

class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_family(p):
    p.add_argument("--family", help="family name from the document")
    p.add_argument("--funcs", help="inline family, expressions separated by '|'")


def build_parser() -> argparse.ArgumentParser:
    common = _ArgParser(add_help=False)
    common.add_argument("--doc", help="function-spec JSON document (path, or '-' for stdin)")
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--csv", metavar="PATH", help="write plot data as CSV ('-' for stdout)")
    ap = _ArgParser(prog="deepzero", description="Wronskians, deep zeros and disk boundary analysis.")
    sub = ap.add_subparsers(dest="command", parser_class=_ArgParser)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    p = sub.add_parser("eval")
    p.add_argument("--f", required=True)
    p.add_argument("--at", required=True)

    p = sub.add_parser("jet")
    p.add_argument("--f", required=True)
    p.add_argument("--at", required=True)
    p.add_argument("--order", type=int, default=4)

    p = sub.add_parser("wronskian")
    _add_family(p)
    p.add_argument("--at", required=True)

    p = sub.add_parser("deep-zero")
    _add_family(p)
    p.add_argument("--at", required=True)
    p.add_argument("--tol", type=float, default=wr.DEFAULT_TOL)

    p = sub.add_parser("exceptional-set")
    _add_family(p)
    p.add_argument("--disk", help="cx,cy,r")
    p.add_argument("--rect", help="x0,y0,x1,y1")
    p.add_argument("--annulus", help="cx,cy,r_inner,r_outer")
    p.add_argument("--max-depth", type=int, default=rf.MAX_DEPTH)
    p.add_argument("--sep-tol", type=float, default=rf.SEP_TOL)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("identity-check")
    p.add_argument("--variant", required=True,
                   choices=["powers", "prepend", "monomials", "expsums", "replacement", "cofactor"])
    p.add_argument("--f")
    p.add_argument("--n", type=int)
    p.add_argument("--exponents")
    p.add_argument("--mus", help="frequencies 're,im;re,im;...'")
    _add_family(p)
    p.add_argument("--lam", help="coefficients 're,im;re,im;...'")
    p.add_argument("--g")
    p.add_argument("--k", type=int)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("decay")
    p.add_argument("--f", required=True)
    p.add_argument("--derivative", type=int, default=0)
    p.add_argument("--stolz", help="arg_over_pi,M")
    p.add_argument("--levelset", help="h,eps with h a document name or inline expression")
    p.add_argument("--m-min", type=int, default=4)
    p.add_argument("--m-max", type=int, default=20)
    p.add_argument("--angular", type=int, default=257)

    p = sub.add_parser("korenblum")
    p.add_argument("--f", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--levels", type=int, default=20)
    p.add_argument("--angular", type=int, default=256)

    p = sub.add_parser("carleson")
    p.add_argument("--points", help="arguments over pi, comma separated")
    p.add_argument("--arc", help="start,end over pi")
    p.add_argument("--dyadic", type=int, help="points exp(i pi 2^-j), j <= N, plus 1")
    p.add_argument("--floor", type=float, default=-1e4)

    p = sub.add_parser("blaschke-sum")
    p.add_argument("--dyadic", type=int, metavar="N")
    p.add_argument("--harmonic", type=int, metavar="N")
    p.add_argument("--points", help="'re,im;re,im;...'")

    for name in ("levelset", "levset-check"):
        p = sub.add_parser(name)
        p.add_argument("--h", required=True)
        p.add_argument("--eps", type=float, required=True)
        if name == "levelset":
            p.add_argument("--radial", type=int, default=64)
            p.add_argument("--angular", type=int, default=128)
        else:
            p.add_argument("--samples", type=int, default=10_000)
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("spectrum")
    p.add_argument("--inner", required=True, help="document name or inline inner JSON")
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--resolution", type=int, default=8)
    p.add_argument("--angular", type=int, default=4096)

    p = sub.add_parser("inner-divides")
    p.add_argument("--i1", required=True)
    p.add_argument("--i2", required=True)

    for name in ("inner-truncate", "inner-J"):
        p = sub.add_parser(name)
        p.add_argument("--inner", required=True)
        p.add_argument("--n", type=int, required=True)
    return ap


COMMANDS = {
    "eval": cmd_eval, "jet": cmd_jet, "wronskian": cmd_wronskian, "deep-zero": cmd_deep_zero,
    "exceptional-set": cmd_exceptional_set, "identity-check": cmd_identity_check,
    "decay": cmd_decay, "korenblum": cmd_korenblum, "carleson": cmd_carleson,
    "blaschke-sum": cmd_blaschke_sum, "levelset": cmd_levelset, "levset-check": cmd_levset_check,
    "spectrum": cmd_spectrum, "inner-divides": cmd_inner_divides,
    "inner-truncate": cmd_inner_truncate, "inner-J": cmd_inner_J,
}


def _load_doc(path: str | None) -> FunctionSpecDocument:
    if path is None:
        return FunctionSpecDocument()
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as e:
        raise UsageError(f"cannot read document: {e}") from None
    return parse_func_spec(text)


def run(argv: list[str]):
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise UsageError("a subcommand is required")
    doc = _load_doc(args.doc)
    t0 = time.perf_counter()
    result, csv_text, summary = COMMANDS[args.command](args, doc)
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("json", "csv", "doc", "command")}
    report = {"command": args.command, "params": params, "result": result,
              "precision": hf.resolve_precision(), "wall_time": time.perf_counter() - t0}
    return report, csv_text, summary, args


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        report, csv_text, summary, args = run(argv)
    except UsageError as e:
        print(f"deepzero: usage error: {e}", file=sys.stderr)
        return 1
    except MathError as e:
        print(f"deepzero: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except DeepZeroError as e:
        print(f"deepzero: {e}", file=sys.stderr)
        return 2
    if args.csv is not None:
        if csv_text is None:
            print("deepzero: usage error: this subcommand has no CSV output", file=sys.stderr)
            return 1
        if args.csv == "-":
            sys.stdout.write(csv_text)
        else:
            with open(args.csv, "w", encoding="utf-8") as fh:
                fh.write(csv_text)
    if args.json:
        print(json.dumps(report, sort_keys=True, default=str))
    elif args.csv != "-":
        print(summary)
    return 0
