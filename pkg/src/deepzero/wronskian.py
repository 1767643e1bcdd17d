"""Wronskian matrices, deep-zero coefficient systems and determinant identities.

The matrix convention is ``entries[k][j] = f_j^(k)(z)``: rows are derivative
orders, columns are functions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial, prod
from typing import Sequence

import mpmath
import numpy as np

from . import holofunc as hf
from .errors import PreconditionError
from .holofunc import FuncExpr

FAMILY_CAP = 13
DEFAULT_TOL = 1e-8
_EPS = np.finfo(float).eps


def _check_family(funcs):
    if len(funcs) == 0:
        raise PreconditionError("empty family")
    if len(funcs) > FAMILY_CAP:
        raise PreconditionError(f"family size {len(funcs)} exceeds cap {FAMILY_CAP}")


def family_jets(funcs: Sequence[FuncExpr], z, order: int, precision=None):
    """Array of shape ``(len(funcs), order + 1, *shape(z))``."""
    _check_family(funcs)
    return np.stack([f.jet(z, order, precision) for f in funcs])


def det(a):
    """Batched determinant over the last two axes (partially pivoted elimination)."""
    a = np.asarray(a)
    if a.dtype != object:
        return np.linalg.det(a.astype(np.complex128))
    # object dtype (mpmath): elimination with row pivoting per batch element
    shape = a.shape[:-2]
    out = np.empty(shape, dtype=object)
    for idx in np.ndindex(*shape):
        out[idx] = _lu_det(a[idx])
    return out


def _lu_det(m):
    m = [list(row) for row in m]
    n = len(m)
    d = mpmath.mpc(1)
    for c in range(n):
        p = max(range(c, n), key=lambda r: abs(m[r][c]))
        if m[p][c] == 0:
            return mpmath.mpc(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d *= m[c][c]
        for r in range(c + 1, n):
            t = m[r][c] / m[c][c]
            for k in range(c + 1, n):
                m[r][k] -= t * m[c][k]
    return d


@dataclass(frozen=True)
class WronskianMatrix:
    basepoint: complex
    n: int
    entries: np.ndarray

    @property
    def value(self):
        return det(self.entries)[()]

    @property
    def scale(self) -> float:
        """Largest entry magnitude."""
        return float(np.max(np.abs(self.entries).astype(float)))


def wronskian_matrix(funcs: Sequence[FuncExpr], z: complex, precision=None) -> WronskianMatrix:
    n = len(funcs) - 1
    jets = family_jets(funcs, z, n, precision)  # (j, k)
    return WronskianMatrix(complex(z), n, jets.T.copy())


def wronskian_value(funcs: Sequence[FuncExpr], z: complex, precision=None):
    with hf.precision_context(precision):
        return wronskian_matrix(funcs, z, precision).value


def wronskian_values(funcs: Sequence[FuncExpr], z, precision=None):
    """Vectorised ``W(z)`` over an array of points."""
    n = len(funcs) - 1
    jets = family_jets(funcs, z, n, precision)
    m = np.moveaxis(jets, (0, 1), (-1, -2))  # (..., k, j)
    with hf.precision_context(precision):
        return det(m)


def _compositions(r, parts):
    """All tuples of ``parts`` nonnegative integers summing to ``r``."""
    for cuts in itertools.combinations(range(r + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cuts + (r + parts - 1,):
            out.append(c - prev - 1)
            prev = c
        yield tuple(out)


class WronskianFunction:
    """``W(f_0, ..., f_n)`` as a function of ``z`` with exact derivative jets.

    Differentiating the determinant row by row gives
    ``W^(r) = sum over a with |a| = r of r!/prod(a_k!) det[f_j^(k + a_k)]``,
    where only terms whose shifted row indices ``k + a_k`` are distinct survive.
    """

    def __init__(self, funcs: Sequence[FuncExpr], precision=None):
        _check_family(funcs)
        self.funcs = tuple(funcs)
        self.n = len(funcs) - 1
        self.precision = precision
        self._terms = {}

    def _rules(self, r):
        if r not in self._terms:
            rules = []
            for a in _compositions(r, self.n + 1):
                rows = tuple(k + ak for k, ak in enumerate(a))
                if len(set(rows)) == self.n + 1:
                    coeff = factorial(r) // prod(factorial(x) for x in a)
                    rules.append((coeff, rows))
            self._terms[r] = rules
        return self._terms[r]

    def jet(self, z, order: int = 0):
        z = np.asarray(z)
        jets = family_jets(self.funcs, z, self.n + order, self.precision)
        m = np.moveaxis(jets, (0, 1), (-1, -2))  # (..., k, j)
        out = []
        with hf.precision_context(self.precision):
            for r in range(order + 1):
                acc = 0
                for coeff, rows in self._rules(r):
                    acc = acc + coeff * det(m[..., list(rows), :])
                out.append(acc)
        return np.stack([np.asarray(o) for o in out])

    def __call__(self, z):
        return self.jet(z, 0)[0]

    @property
    def natural_domain(self):
        return hf.funcs_natural_domain(self.funcs)


# ---------------------------------------------------------------------------
# deep-zero system

@dataclass(frozen=True)
class DeepZeroSolution:
    point: complex
    lam: tuple
    residuals: tuple
    sigma_ratio: float


def _as_complex_matrix(m):
    return np.array([[complex(x) for x in row] for row in m], dtype=np.complex128)


def singularity_ratio(entries) -> float:
    """``sigma_min / sigma_max``; zero for the zero matrix."""
    s = np.linalg.svd(_as_complex_matrix(entries), compute_uv=False)
    return 0.0 if s[0] == 0 else float(s[-1] / s[0])


def singularity_scale(entries) -> float:
    """``sigma_max * prod(sigma_0..sigma_{n-1})``.

    ``|W| / singularity_scale`` equals ``sigma_min / sigma_max``, so comparing
    the determinant against this scale is the same relative test the
    nullspace detection uses.
    """
    s = np.linalg.svd(_as_complex_matrix(entries), compute_uv=False)
    return float(s[0] * np.prod(s[:-1]))


def normalize_lambda(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=np.complex128)
    i = int(np.argmax(np.abs(lam)))
    if lam[i] == 0:
        raise PreconditionError("lambda must be nontrivial")
    return lam / lam[i]


def deep_zero_coefficients(funcs: Sequence[FuncExpr], z: complex,
                           tol: float = DEFAULT_TOL) -> DeepZeroSolution | None:
    if not tol > 0:
        raise PreconditionError("tol must be positive")
    m = _as_complex_matrix(wronskian_matrix(funcs, z).entries)
    _, s, vh = np.linalg.svd(m)
    if s[0] != 0 and not s[-1] < tol * s[0]:
        return None
    lam = normalize_lambda(vh[-1].conj())
    res = m @ lam
    return DeepZeroSolution(complex(z), tuple(complex(x) for x in lam),
                            tuple(complex(x) for x in res),
                            0.0 if s[0] == 0 else float(s[-1] / s[0]))


@dataclass(frozen=True)
class DeepZeroCheck:
    passed: bool
    residualnorm: float
    scale: float


def verify_deep_zero(funcs: Sequence[FuncExpr], lam, z: complex,
                     tol: float = 1e-9) -> DeepZeroCheck:
    """Is ``z`` an n-deep zero of ``sum(lam_j f_j)``?  ``lam`` is rescaled to
    unit max modulus first."""
    lam = normalize_lambda(lam)
    m = _as_complex_matrix(wronskian_matrix(funcs, z).entries)
    r = float(np.max(np.abs(m @ lam)))
    scale = float(np.max(np.abs(m)))
    return DeepZeroCheck(r <= tol * scale, r, scale)


def linear_combination(funcs: Sequence[FuncExpr], lam) -> FuncExpr:
    return hf.Sum(tuple(hf.Scale(f, complex(c)) for f, c in zip(funcs, lam)))


def replacement_identity_check(funcs: Sequence[FuncExpr], lam, k: int, z: complex,
                               precision=None) -> float:
    """Relative residual of ``W(f_0..g..f_n) = lam_k W`` with ``g = sum lam_j f_j``
    in slot ``k``."""
    lam = [complex(c) for c in lam]
    if len(lam) != len(funcs):
        raise PreconditionError("lambda length must match the family")
    if lam[k] == 0:
        raise PreconditionError(f"lambda_{k} = 0; replacement slot must carry a nonzero coefficient")
    g = linear_combination(funcs, lam)
    replaced = list(funcs)
    replaced[k] = g
    with hf.precision_context(precision):
        wk = wronskian_value(replaced, z, precision)
        w = wronskian_value(funcs, z, precision)
        return float(abs(wk - lam[k] * w) / (abs(lam[k] * w) + _EPS))


def cofactor_expansion_check(funcs: Sequence[FuncExpr], g: FuncExpr, k: int,
                             z: complex, precision=None) -> float:
    """Residual between ``W_k`` (column ``k`` replaced by the jet of ``g``) and
    its expansion ``sum_l g^(l) Delta_{l,k}`` with cofactors from minors."""
    n = len(funcs) - 1
    if not 0 <= k <= n:
        raise PreconditionError("column index out of range")
    with hf.precision_context(precision):
        m = wronskian_matrix(funcs, z, precision).entries
        gj = g.jet(z, n, precision)
        mk = m.copy()
        mk[:, k] = gj
        wk = det(mk)[()]
        rest = [j for j in range(n + 1) if j != k]
        terms = []
        for l in range(n + 1):
            rows = [i for i in range(n + 1) if i != l]
            minor = m[np.ix_(rows, rest)]
            cof = (-1) ** (l + k) * (det(minor)[()] if n > 0 else 1)
            terms.append(gj[l] * cof)
        expansion = sum(terms[1:], terms[0])
        denom = max(abs(wk), sum(abs(t) for t in terms))
        if denom == 0:
            return 0.0
        return float(abs(wk - expansion) / denom)


# ---------------------------------------------------------------------------
# closed forms

@dataclass(frozen=True)
class MonomialFamily:
    exponents: tuple

    def __post_init__(self):
        e = tuple(int(d) for d in self.exponents)
        if len(set(e)) != len(e) or min(e) < 0:
            raise PreconditionError("monomial exponents must be distinct nonnegative integers")
        object.__setattr__(self, "exponents", e)

    def funcs(self):
        return [hf.Monomial(d) for d in self.exponents]


@dataclass(frozen=True)
class ExpSumFamily:
    mus: tuple

    def __post_init__(self):
        m = tuple(complex(u) for u in self.mus)
        if len(set(m)) != len(m):
            raise PreconditionError("exponential frequencies must be pairwise distinct")
        object.__setattr__(self, "mus", m)

    def funcs(self):
        return [hf.ExpAtom(u) for u in self.mus]


@dataclass(frozen=True)
class PowerFamily:
    """``1, f, f^2, ..., f^n``."""

    f: FuncExpr
    n: int

    def funcs(self):
        return [hf.Power(self.f, k) for k in range(self.n + 1)]


@dataclass(frozen=True)
class PrependPolyFamily:
    """``1, z/1!, ..., z^(n-1)/(n-1)!, f``."""

    f: FuncExpr
    n: int

    def funcs(self):
        return [hf.Scale(hf.Monomial(k), 1 / factorial(k)) for k in range(self.n)] + [self.f]


def vandermonde_product(xs) -> complex:
    return prod((xs[j] - xs[i] for i in range(len(xs)) for j in range(i + 1, len(xs))), start=1)


def power_family_constant(n: int) -> int:
    return prod((factorial(k) for k in range(1, n + 1)), start=1)


def closed_form_wronskian(family) -> FuncExpr:
    if isinstance(family, MonomialFamily):
        d = family.exponents
        n = len(d) - 1
        c = vandermonde_product(d)
        return hf.Scale(hf.Monomial(sum(d) - n * (n + 1) // 2), c)
    if isinstance(family, ExpSumFamily):
        return hf.Scale(hf.ExpAtom(sum(family.mus)), vandermonde_product(family.mus))
    if isinstance(family, PowerFamily):
        n = family.n
        return hf.Scale(hf.Power(hf.differentiate(family.f), n * (n + 1) // 2),
                        power_family_constant(n))
    if isinstance(family, PrependPolyFamily):
        return hf.nth_derivative(family.f, family.n)
    raise TypeError(f"no closed form for {type(family).__name__}")
