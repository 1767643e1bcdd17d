"""Independent reference implementations used by the tests.

Nothing here calls into the package's jet machinery: expressions are
re-evaluated from their fields with mpmath, and derivatives come from mpmath's
numerical differentiation or from sympy.
"""

import math

import mpmath
import sympy as sp

from deepzero import holofunc as hf


def mp_value(e, z):
    """Evaluate an expression tree directly with mpmath."""
    z = mpmath.mpc(z)
    if isinstance(e, hf.Monomial):
        return z ** e.d
    if isinstance(e, hf.Polynomial):
        return sum((mpmath.mpc(c) * z**k for k, c in enumerate(e.coeffs)), mpmath.mpc(0))
    if isinstance(e, hf.ExpAtom):
        return mpmath.exp(mpmath.mpc(e.mu) * z)
    if isinstance(e, hf.BlaschkeFactor):
        a = mpmath.mpc(e.a)
        return (a - z) / (1 - mpmath.conj(a) * z)
    if isinstance(e, hf.SingularAtom):
        zeta = mpmath.mpc(e.zeta)
        return mpmath.exp(-e.mass * (zeta + z) / (zeta - z))
    if isinstance(e, hf.Sum):
        return sum((mp_value(t, z) for t in e.terms), mpmath.mpc(0))
    if isinstance(e, hf.Product):
        out = mpmath.mpc(1)
        for t in e.factors:
            out *= mp_value(t, z)
        return out
    if isinstance(e, hf.Power):
        return mp_value(e.base, z) ** e.k
    if isinstance(e, hf.Scale):
        return mpmath.mpc(e.by) * mp_value(e.expr, z)
    if isinstance(e, hf.ShiftArg):
        return mp_value(e.expr, mpmath.mpc(e.a) * z + mpmath.mpc(e.b))
    if isinstance(e, hf.Reciprocal):
        return 1 / mp_value(e.expr, z)
    raise TypeError(type(e))


def mp_derivs(e, z0, order, dps=40):
    """Derivatives ``f^(k)(z0)`` for ``k <= order`` by mpmath.diff."""
    with mpmath.workdps(dps):
        return [complex(mpmath.diff(lambda t: mp_value(e, t), mpmath.mpc(z0), k)) for k in range(order + 1)]


Z = sp.Symbol("z")


def sympy_expr(e):
    """The same tree as a sympy expression in ``Z``."""
    if isinstance(e, hf.Monomial):
        return Z ** e.d
    if isinstance(e, hf.Polynomial):
        return sum((sp.Float(c.real) + sp.I * sp.Float(c.imag)) * Z**k for k, c in enumerate(e.coeffs))
    if isinstance(e, hf.ExpAtom):
        return sp.exp((sp.Float(e.mu.real) + sp.I * sp.Float(e.mu.imag)) * Z)
    if isinstance(e, hf.Power):
        return sympy_expr(e.base) ** e.k
    if isinstance(e, hf.Sum):
        return sp.Add(*[sympy_expr(t) for t in e.terms])
    if isinstance(e, hf.Product):
        return sp.Mul(*[sympy_expr(t) for t in e.factors])
    if isinstance(e, hf.Scale):
        return (sp.Float(e.by.real) + sp.I * sp.Float(e.by.imag)) * sympy_expr(e.expr)
    raise TypeError(type(e))


def sympy_wronskian(exprs):
    n = len(exprs)
    m = sp.Matrix(n, n, lambda k, j: sp.diff(exprs[j], Z, k))
    return m.det()


def clausen2(x):
    return float(mpmath.clsin(2, x))


def carleson_finite_oracle(angles):
    """``int log dist(zeta, E)`` for finite E via the Clausen function:
    each gap g contributes ``-2 Cl_2(g / 2)``."""
    th = sorted(a % (2 * math.pi) for a in angles)
    gaps = [b - a for a, b in zip(th, th[1:] + [th[0] + 2 * math.pi])]
    return sum(-2 * clausen2(g / 2) for g in gaps if g > 0)


def carleson_mp_quad(angles):
    """The same integral by mpmath.quad, splitting at the points of E."""
    th = sorted(a % (2 * math.pi) for a in angles)
    cuts = sorted(set(th + [t + 2 * math.pi for t in th]))
    lo = th[0]
    pts = [c for c in cuts if lo <= c <= lo + 2 * math.pi]
    mids = []
    for a, b in zip(pts, pts[1:]):
        mids += [a, (a + b) / 2]
    mids.append(pts[-1])

    def dist(t):
        return min(abs(2 * mpmath.sin((t - s) / 2)) for s in th)

    return float(mpmath.quad(lambda t: mpmath.log(dist(t)), mids))
