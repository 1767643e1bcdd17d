"""Holomorphic expression trees and exact jet arithmetic.

A *jet* of order ``n`` at ``z0`` is the vector of raw derivatives
``f(z0), f'(z0), ..., f^(n)(z0)`` (not Taylor coefficients).  Expressions are
evaluated to jets by structural recursion; the atoms have closed-form
derivatives and the combinators use the Leibniz rule, so no finite
differences are involved anywhere.

Internally a jet is an array ``s`` of shape ``(order + 1, *points)`` so that a
whole contour of base points is processed in one pass.  In ``extended``
precision the arrays have ``object`` dtype and hold :class:`mpmath.mpc`.
"""

from __future__ import annotations

import contextlib
import os
from dataclasses import dataclass, field
from math import comb, factorial
from typing import Sequence

import mpmath
import numpy as np

from .errors import DomainError, OrderOverflowError, PreconditionError, UsageError

ORDER_CAP = 32
EXTENDED_DPS = 40
PRECISIONS = ("double", "extended")


def resolve_precision(precision: str | None = None) -> str:
    p = precision or os.environ.get("DEEPZERO_PRECISION", "double")
    if p not in PRECISIONS:
        raise UsageError(f"unknown precision {p!r}; expected one of {PRECISIONS}")
    return p


@contextlib.contextmanager
def precision_context(precision: str | None = None):
    if resolve_precision(precision) == "extended":
        with mpmath.workdps(EXTENDED_DPS):
            yield
    else:
        yield


_mp_exp = np.frompyfunc(mpmath.exp, 1, 1)


class _Backend:
    def __init__(self, precision):
        self.extended = resolve_precision(precision) == "extended"

    def array(self, z):
        if self.extended:
            z = np.asarray(z, dtype=object)
            out = np.empty(z.shape, dtype=object)
            out.flat = [mpmath.mpc(v) for v in z.flat]
            return out
        return np.asarray(z, dtype=np.complex128)

    def const(self, c):
        return mpmath.mpc(c) if self.extended else complex(c)

    def exp(self, x):
        return _mp_exp(x) if self.extended else np.exp(x)

    def zeros(self, shape):
        if self.extended:
            out = np.empty(shape, dtype=object)
            out.fill(mpmath.mpc(0))
            return out
        return np.zeros(shape, dtype=np.complex128)


def _abs(x):
    return np.asarray(np.abs(x)).astype(float)


# ---------------------------------------------------------------------------
# series kernels: s has shape (order + 1, ...)

def series_mul(u, v):
    n = u.shape[0]
    w = np.zeros_like(u) if u.dtype != object else u * 0
    for k in range(n):
        acc = u[0] * v[k]
        for i in range(1, k + 1):
            acc = acc + comb(k, i) * u[i] * v[k - i]
        w[k] = acc
    return w


def series_reciprocal(u):
    if np.any(_abs(u[0]) == 0.0):
        raise PreconditionError("reciprocal of a jet with vanishing leading value")
    n = u.shape[0]
    w = u * 0
    w[0] = 1 / u[0]
    for k in range(1, n):
        acc = comb(k, 1) * u[1] * w[k - 1]
        for i in range(2, k + 1):
            acc = acc + comb(k, i) * u[i] * w[k - i]
        w[k] = -acc * w[0]
    return w


def series_exp(u, backend):
    # w' = u' w, differentiated k times
    n = u.shape[0]
    w = u * 0
    w[0] = backend.exp(u[0])
    for k in range(n - 1):
        acc = u[1] * w[k]
        for i in range(1, k + 1):
            acc = acc + comb(k, i) * u[i + 1] * w[k - i]
        w[k + 1] = acc
    return w


def series_pow(u, k):
    result = u * 0
    result[0] = u[0] * 0 + 1
    base = u
    while k:
        if k & 1:
            result = series_mul(result, base)
        k >>= 1
        if k:
            base = series_mul(base, base)
    return result


def _series_const(c, z, order, be):
    s = be.zeros((order + 1,) + z.shape)
    s[0] = s[0] + be.const(c)
    return s


def _check_disk(z, what):
    if np.any(_abs(z) >= 1.0):
        raise DomainError(f"{what} is only defined inside the unit disk")


# ---------------------------------------------------------------------------
# expression tree

class FuncExpr:
    """Base class of the expression variants.  Instances are immutable."""

    variant = "abstract"

    def jet(self, z, order: int = 0, precision: str | None = None, cap: int = ORDER_CAP):
        """Raw derivative array of shape ``(order + 1, *shape(z))``."""
        if order < 0:
            raise PreconditionError("jet order must be nonnegative")
        if order > cap:
            raise OrderOverflowError(f"order {order} exceeds cap {cap}")
        be = _Backend(precision)
        with precision_context(precision):
            return self._series(be.array(z), order, be)

    def __call__(self, z, precision: str | None = None):
        out = self.jet(z, 0, precision)[0]
        return out[()] if out.ndim == 0 else out

    def _series(self, z, order, be):
        raise NotImplementedError

    def children(self) -> tuple:
        return ()

    def walk(self):
        yield self
        for c in self.children():
            yield from c.walk()

    @property
    def natural_domain(self) -> str:
        """``"plane"`` or ``"disk"``; disk atoms anywhere in the tree force ``"disk"``."""
        if any(isinstance(e, (BlaschkeFactor, SingularAtom)) for e in self.walk()):
            return "disk"
        return "plane"

    def in_domain(self, z) -> bool:
        try:
            self.jet(z, 0)
        except DomainError:
            return False
        return True

    # light operator sugar for building expressions in tests and scripts
    def __add__(self, other):
        return Sum((self, as_expr(other)))

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, FuncExpr):
            return Product((self, other))
        return Scale(self, complex(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Scale(self, -1)

    def __sub__(self, other):
        return Sum((self, -as_expr(other)))

    def __pow__(self, k):
        return Power(self, k)


def as_expr(x) -> FuncExpr:
    if isinstance(x, FuncExpr):
        return x
    return Polynomial((complex(x),))


@dataclass(frozen=True)
class Monomial(FuncExpr):
    d: int
    variant = "monomial"

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 0:
            raise PreconditionError("monomial degree must be a nonnegative integer")

    def _series(self, z, order, be):
        s = be.zeros((order + 1,) + z.shape)
        for k in range(min(order, self.d) + 1):
            s[k] = (factorial(self.d) // factorial(self.d - k)) * z ** (self.d - k)
        return s


@dataclass(frozen=True)
class Polynomial(FuncExpr):
    """``sum(coeffs[k] * z**k)``, ascending powers."""

    coeffs: tuple
    variant = "polynomial"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    def _series(self, z, order, be):
        s = be.zeros((order + 1,) + z.shape)
        c = [be.const(a) for a in self.coeffs]
        for k in range(order + 1):
            acc = s[k]
            for j in range(len(c) - 1, k - 1, -1):
                acc = acc * z + (factorial(j) // factorial(j - k)) * c[j]
            s[k] = acc
        return s


@dataclass(frozen=True)
class ExpAtom(FuncExpr):
    """``exp(mu * z)``."""

    mu: complex
    variant = "expatom"

    def __post_init__(self):
        object.__setattr__(self, "mu", complex(self.mu))

    def _series(self, z, order, be):
        mu = be.const(self.mu)
        e = be.exp(mu * z)
        s = be.zeros((order + 1,) + z.shape)
        for k in range(order + 1):
            s[k] = mu**k * e
        return s


@dataclass(frozen=True)
class BlaschkeFactor(FuncExpr):
    """``(a - z) / (1 - conj(a) z)`` with ``|a| < 1``."""

    a: complex
    variant = "blaschkefactor"

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        if abs(self.a) >= 1:
            raise PreconditionError("invariant: |a| < 1")

    def _series(self, z, order, be):
        _check_disk(z, "blaschkefactor")
        a = be.const(self.a)
        ac = be.const(self.a.conjugate())
        q = 1 - ac * z
        s = be.zeros((order + 1,) + z.shape)
        s[0] = (a - z) / q
        # b^(k) = (|a|^2 - 1) k! conj(a)^(k-1) / (1 - conj(a) z)^(k+1)
        d = abs(self.a) ** 2 - 1
        for k in range(1, order + 1):
            s[k] = d * factorial(k) * ac ** (k - 1) / q ** (k + 1)
        return s


@dataclass(frozen=True)
class SingularAtom(FuncExpr):
    """``exp(-mass (zeta + z) / (zeta - z))`` for a unimodular ``zeta``."""

    zeta: complex
    mass: float
    variant = "singularatom"

    def __post_init__(self):
        object.__setattr__(self, "zeta", complex(self.zeta))
        object.__setattr__(self, "mass", float(self.mass))
        if abs(abs(self.zeta) - 1) > 1e-12:
            raise PreconditionError("invariant: |zeta| = 1")
        if not self.mass > 0:
            raise PreconditionError("invariant: mass > 0")

    @classmethod
    def from_arg(cls, arg_over_pi: float, mass: float) -> "SingularAtom":
        return cls(complex(np.exp(1j * np.pi * arg_over_pi)), mass)

    def _series(self, z, order, be):
        _check_disk(z, "singularatom")
        zeta = be.const(self.zeta)
        d = zeta - z
        if np.any(_abs(d) == 0.0):
            raise DomainError("singularatom evaluated at its base point")
        # exponent u = -mass (zeta + z)/(zeta - z) = mass - 2 mass zeta / (zeta - z)
        u = be.zeros((order + 2,) + z.shape)
        u[0] = self.mass - 2 * self.mass * zeta / d
        for k in range(1, order + 2):
            u[k] = -2 * self.mass * factorial(k) * zeta / d ** (k + 1)
        return series_exp(u, be)[: order + 1]


@dataclass(frozen=True)
class Sum(FuncExpr):
    terms: tuple
    variant = "sum"

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def children(self):
        return self.terms

    def _series(self, z, order, be):
        s = be.zeros((order + 1,) + z.shape)
        for t in self.terms:
            s = s + t._series(z, order, be)
        return s


@dataclass(frozen=True)
class Product(FuncExpr):
    factors: tuple
    variant = "product"

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    def children(self):
        return self.factors

    def _series(self, z, order, be):
        s = _series_const(1, z, order, be)
        for f in self.factors:
            s = series_mul(s, f._series(z, order, be))
        return s


@dataclass(frozen=True)
class Power(FuncExpr):
    base: FuncExpr
    k: int
    variant = "power"

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise PreconditionError("power exponent must be a nonnegative integer")

    def children(self):
        return (self.base,)

    def _series(self, z, order, be):
        return series_pow(self.base._series(z, order, be), self.k)


@dataclass(frozen=True)
class Scale(FuncExpr):
    expr: FuncExpr
    by: complex
    variant = "scale"

    def __post_init__(self):
        object.__setattr__(self, "by", complex(self.by))

    def children(self):
        return (self.expr,)

    def _series(self, z, order, be):
        return be.const(self.by) * self.expr._series(z, order, be)


@dataclass(frozen=True)
class ShiftArg(FuncExpr):
    """``expr(a * z + b)``."""

    expr: FuncExpr
    a: complex = 1
    b: complex = 0
    variant = "shiftarg"

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))

    def children(self):
        return (self.expr,)

    def _series(self, z, order, be):
        a = be.const(self.a)
        w = be.array(a * z + be.const(self.b)) if be.extended else a * z + self.b
        s = self.expr._series(w, order, be)
        for k in range(1, order + 1):
            s[k] = s[k] * a**k
        return s


@dataclass(frozen=True)
class Reciprocal(FuncExpr):
    """``1 / expr``; undefined at zeros of ``expr``."""

    expr: FuncExpr
    variant = "reciprocal"

    def children(self):
        return (self.expr,)

    def _series(self, z, order, be):
        u = self.expr._series(z, order, be)
        if np.any(_abs(u[0]) == 0.0):
            raise DomainError("reciprocal evaluated at a zero of its argument")
        return series_reciprocal(u)


VARIANTS = {
    cls.variant: cls
    for cls in (Monomial, Polynomial, ExpAtom, BlaschkeFactor, SingularAtom,
                Sum, Product, Power, Scale, ShiftArg, Reciprocal)
}


def differentiate(f: FuncExpr) -> FuncExpr:
    """Closed-form derivative as a new expression tree."""
    if isinstance(f, Monomial):
        return Polynomial((0,)) if f.d == 0 else Scale(Monomial(f.d - 1), f.d)
    if isinstance(f, Polynomial):
        c = f.coeffs
        return Polynomial(tuple(k * c[k] for k in range(1, len(c))) or (0,))
    if isinstance(f, ExpAtom):
        return Scale(f, f.mu)
    if isinstance(f, BlaschkeFactor):
        q = Polynomial((1, -f.a.conjugate()))
        return Scale(Reciprocal(Power(q, 2)), abs(f.a) ** 2 - 1)
    if isinstance(f, SingularAtom):
        d = Polynomial((f.zeta, -1))
        return Product((f, Scale(Reciprocal(Power(d, 2)), -2 * f.mass * f.zeta)))
    if isinstance(f, Sum):
        return Sum(tuple(differentiate(t) for t in f.terms))
    if isinstance(f, Product):
        fs = f.factors
        return Sum(tuple(
            Product(fs[:i] + (differentiate(fs[i]),) + fs[i + 1:]) for i in range(len(fs))
        ))
    if isinstance(f, Power):
        if f.k == 0:
            return Polynomial((0,))
        return Scale(Product((Power(f.base, f.k - 1), differentiate(f.base))), f.k)
    if isinstance(f, Scale):
        return Scale(differentiate(f.expr), f.by)
    if isinstance(f, ShiftArg):
        return Scale(ShiftArg(differentiate(f.expr), f.a, f.b), f.a)
    if isinstance(f, Reciprocal):
        return Scale(Product((differentiate(f.expr), Reciprocal(Power(f.expr, 2)))), -1)
    raise TypeError(f"cannot differentiate {type(f).__name__}")


def nth_derivative(f: FuncExpr, n: int) -> FuncExpr:
    for _ in range(n):
        f = differentiate(f)
    return f


def boundary_focus(f: FuncExpr) -> tuple[float, ...]:
    """Arguments of boundary points where ``f`` may be small: singular atom
    vertices and directions of Blaschke zeros."""
    out = []
    for e in f.walk():
        if isinstance(e, SingularAtom):
            out.append(float(np.angle(e.zeta)))
        elif isinstance(e, BlaschkeFactor) and e.a != 0:
            out.append(float(np.angle(e.a)))
    return tuple(sorted(set(out)))


# ---------------------------------------------------------------------------
# scalar jets

@dataclass(frozen=True)
class Jet:
    basepoint: complex
    order: int
    derivs: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "derivs", tuple(self.derivs))
        if len(self.derivs) != self.order + 1:
            raise PreconditionError("jet length must equal order + 1")

    def as_array(self):
        dtype = object if any(isinstance(d, mpmath.mpc) for d in self.derivs) else np.complex128
        return np.array(self.derivs, dtype=dtype)

    @classmethod
    def from_array(cls, basepoint, s) -> "Jet":
        vals = tuple(v if isinstance(v, mpmath.mpc) else complex(v) for v in s)
        return cls(basepoint, len(vals) - 1, vals)

    @classmethod
    def constant(cls, c, basepoint=0j, order=0) -> "Jet":
        return cls(basepoint, order, (complex(c),) + (0j,) * order)

    @classmethod
    def identity(cls, basepoint=0j, order=0) -> "Jet":
        """Jet of ``z`` itself."""
        d = [complex(basepoint), 1 + 0j] + [0j] * (order - 1)
        return cls(basepoint, order, tuple(d[: order + 1]))

    def shift(self) -> "Jet":
        """Jet of the derivative, one order lower."""
        if self.order == 0:
            raise PreconditionError("cannot shift an order-0 jet")
        return Jet(self.basepoint, self.order - 1, self.derivs[1:])


def _check_compatible(u: Jet, v: Jet):
    if u.basepoint != v.basepoint or u.order != v.order:
        raise PreconditionError("jets must share basepoint and order")


def eval_jet(f: FuncExpr, z0: complex, order: int, precision: str | None = None,
             cap: int = ORDER_CAP) -> Jet:
    s = f.jet(z0, order, precision, cap)
    return Jet.from_array(complex(z0), s)


def jet_sum(u: Jet, v: Jet) -> Jet:
    _check_compatible(u, v)
    return Jet(u.basepoint, u.order, tuple(a + b for a, b in zip(u.derivs, v.derivs)))


def jet_product(u: Jet, v: Jet) -> Jet:
    _check_compatible(u, v)
    return Jet.from_array(u.basepoint, series_mul(u.as_array(), v.as_array()))


def jet_reciprocal(u: Jet) -> Jet:
    if u.derivs[0] == 0:
        raise PreconditionError("reciprocal of a jet with vanishing leading value")
    return Jet.from_array(u.basepoint, series_reciprocal(u.as_array()))


def jet_exp(u: Jet) -> Jet:
    arr = u.as_array()
    return Jet.from_array(u.basepoint, series_exp(arr, _Backend("extended" if arr.dtype == object else "double")))


def funcs_natural_domain(funcs: Sequence[FuncExpr]) -> str:
    return "disk" if any(f.natural_domain == "disk" for f in funcs) else "plane"
