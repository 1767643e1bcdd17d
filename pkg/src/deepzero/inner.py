"""Inner functions with finitely many Blaschke zeros and singular atoms.

An :class:`InnerSpec` is ``B * S`` where ``B`` has the zeros ``a`` (with
multiplicities) and each atom ``(x, m)`` contributes the singular factor
``exp(-m (zeta + z) / (zeta - z))`` with ``zeta = exp(i pi x)``.  Storing the
atom position as ``arg / pi`` keeps equality exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import holofunc as hf
from .errors import DomainError, PreconditionError, SpecError


def _zero_key(a: complex):
    return (abs(a), float(np.angle(a)) % (2 * np.pi), a.real, a.imag)


@dataclass(frozen=True)
class InnerSpec:
    zeros: tuple = ()  # ((a, mult), ...)
    atoms: tuple = ()  # ((arg_over_pi, mass), ...)

    def __post_init__(self):
        zs: dict[complex, int] = {}
        for a, mult in self.zeros:
            a = complex(a)
            if not abs(a) < 1:
                raise PreconditionError(f"zero {a} must lie in the open unit disk")
            if int(mult) != mult or mult < 1:
                raise PreconditionError("zero multiplicities must be positive integers")
            zs[a] = zs.get(a, 0) + int(mult)
        at: dict[float, float] = {}
        for x, mass in self.atoms:
            x = float(x) % 2.0
            if not mass > 0:
                raise PreconditionError("atom masses must be positive")
            at[x] = at.get(x, 0.0) + float(mass)
        object.__setattr__(self, "zeros", tuple(sorted(zs.items(), key=lambda t: _zero_key(t[0]))))
        object.__setattr__(self, "atoms", tuple(sorted(at.items())))

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.zeros)

    def zero_dict(self) -> dict:
        return dict(self.zeros)

    def atom_dict(self) -> dict:
        return dict(self.atoms)

    def atom_points(self) -> np.ndarray:
        return np.exp(1j * np.pi * np.array([x for x, _ in self.atoms], dtype=float))

    def blaschke_part(self) -> "InnerSpec":
        return InnerSpec(self.zeros, ())

    def singular_part(self) -> "InnerSpec":
        return InnerSpec((), self.atoms)

    def __call__(self, z):
        return eval_inner(self, z)

    # JSON: {"zeros": [[re, im, mult]], "atoms": [[arg_over_pi, mass]]}
    def to_json_obj(self) -> dict:
        return {"zeros": [[a.real, a.imag, m] for a, m in self.zeros],
                "atoms": [[x, m] for x, m in self.atoms]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj) -> "InnerSpec":
        if not isinstance(obj, dict) or set(obj) - {"zeros", "atoms"}:
            raise SpecError("inner spec must be an object with keys 'zeros' and 'atoms'")
        try:
            zeros = [(complex(re, im), int(m)) for re, im, m in obj.get("zeros", [])]
            atoms = [(float(x), float(m)) for x, m in obj.get("atoms", [])]
        except (TypeError, ValueError) as e:
            raise SpecError(f"malformed inner spec: {e}") from None
        try:
            return cls(tuple(zeros), tuple(atoms))
        except PreconditionError as e:
            raise SpecError(f"invariant: {e}") from None

    @classmethod
    def from_json(cls, text: str) -> "InnerSpec":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise SpecError(e.msg, f"line {e.lineno} col {e.colno}") from None
        return cls.from_json_obj(obj)


def eval_inner(spec: InnerSpec, z):
    z = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(z) >= 1):
        raise DomainError("inner functions are evaluated strictly inside the unit disk")
    out = np.ones(z.shape, dtype=np.complex128)
    for a, m in spec.zeros:
        if a == 0:
            factor = z
        else:
            factor = (np.conj(a) / abs(a)) * (a - z) / (1 - np.conj(a) * z)
        out = out * factor**m
    expo = np.zeros(z.shape, dtype=np.complex128)
    for (x, mass), zeta in zip(spec.atoms, spec.atom_points()):
        d = zeta - z
        if np.any(d == 0):
            raise DomainError("inner function evaluated at an atom")
        expo = expo - mass * (zeta + z) / d
    out = out * np.exp(expo)
    return out[()] if out.ndim == 0 else out


def to_funcexpr(spec: InnerSpec) -> hf.FuncExpr:
    factors = []
    for a, m in spec.zeros:
        b = hf.Monomial(1) if a == 0 else hf.Scale(hf.BlaschkeFactor(a), np.conj(a) / abs(a))
        factors.append(b if m == 1 else hf.Power(b, m))
    for (x, mass), zeta in zip(spec.atoms, spec.atom_points()):
        factors.append(hf.SingularAtom(zeta, mass))
    return hf.Product(tuple(factors))


def divides(i1: InnerSpec, i2: InnerSpec) -> bool:
    """``i2 / i1`` is inner: zero multiset containment and atomwise mass domination."""
    z2, a2 = i2.zero_dict(), i2.atom_dict()
    return (all(z2.get(a, 0) >= m for a, m in i1.zeros)
            and all(a2.get(x, 0.0) >= m for x, m in i1.atoms))


def multiply(i1: InnerSpec, i2: InnerSpec) -> InnerSpec:
    return InnerSpec(i1.zeros + i2.zeros, i1.atoms + i2.atoms)


def power(spec: InnerSpec, k: int) -> InnerSpec:
    if k < 0:
        raise PreconditionError("power must be nonnegative")
    return InnerSpec(tuple((a, m * k) for a, m in spec.zeros) if k else (),
                     tuple((x, m * k) for x, m in spec.atoms) if k else ())


def truncate_deep(spec: InnerSpec, n: int) -> InnerSpec:
    """Drop the zeros of multiplicity ``<= n``; the singular part survives."""
    if n < 0:
        raise PreconditionError("n must be nonnegative")
    return InnerSpec(tuple((a, m) for a, m in spec.zeros if m > n), spec.atoms)


def theorem4_J(w_inner: InnerSpec, n: int) -> InnerSpec:
    """Dominating inner function built from the inner factor of a Wronskian:
    every zero multiplicity ``m`` becomes ``m + n``, atoms are kept."""
    if n < 1:
        raise PreconditionError("n must be a positive integer")
    return InnerSpec(tuple((a, m + n) for a, m in w_inner.zeros), w_inner.atoms)


def power_family_inner_part(fprime_inner: InnerSpec, n: int) -> InnerSpec:
    """Inner factor of ``c_n (f')**(n(n+1)/2)`` given the inner factor of ``f'``."""
    if n < 0:
        raise PreconditionError("n must be nonnegative")
    return power(fprime_inner, n * (n + 1) // 2)


def dyadic_blaschke(N: int, args: Iterable[float] | None = None) -> InnerSpec:
    """Zeros with ``|a_j| = 1 - 2**-j`` for ``j = 1..N`` (positive reals unless
    ``args`` gives their arguments)."""
    if not 1 <= N <= 52:
        raise PreconditionError("N must lie in 1..52 (1 - 2**-N must stay representable)")
    args = [0.0] * N if args is None else list(args)
    return InnerSpec(tuple(((1 - 2.0**-j) * np.exp(1j * t), 1) for j, t in zip(range(1, N + 1), args)))


def blaschke_tail_bound(N: int, z: complex, r_cap: float = 1 - 1e-6) -> float:
    """Bound on ``|B(z) - B_N(z)|`` for the dyadic product: sum over ``j > N`` of
    ``2 (1 - |a_j|) (1 + |z|) / (1 - |z|)``."""
    r = abs(z)
    if r > r_cap or r_cap >= 1:
        raise DomainError(f"|z| = {r} is beyond the radius cap {r_cap}")
    return 2 * 2.0**-N * (1 + r) / (1 - r)
