"""Pseudohyperbolic geometry of the unit disk: Stolz angles, level sets of
bounded functions, and boundary-spectrum estimates for inner functions."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import holofunc as hf
from .errors import DomainError, PreconditionError
from .inner import InnerSpec, eval_inner

R_CAP = 1 - 1e-6


def _disk_check(*zs):
    for z in zs:
        if np.any(np.abs(np.asarray(z)) >= 1):
            raise DomainError("points must lie strictly inside the unit disk")


def pseudo_distance(z, w):
    """``|z - w| / |1 - conj(w) z|``."""
    _disk_check(z, w)
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    out = np.abs((z - w) / (1 - np.conj(w) * z))
    return out[()] if out.ndim == 0 else out


def mobius(a: complex):
    """The disk automorphism ``z -> (z - a) / (1 - conj(a) z)``."""
    _disk_check(a)
    return lambda z: (np.asarray(z) - a) / (1 - np.conj(a) * np.asarray(z))


@dataclass(frozen=True)
class StolzAngle:
    vertex: complex
    aperture: float

    def __post_init__(self):
        object.__setattr__(self, "vertex", complex(self.vertex))
        if abs(abs(self.vertex) - 1) > 1e-12:
            raise PreconditionError("Stolz vertex must be unimodular")
        if not self.aperture > 1:
            raise PreconditionError("Stolz aperture must exceed 1")

    @classmethod
    def from_arg(cls, arg_over_pi: float, aperture: float) -> "StolzAngle":
        return cls(complex(np.exp(1j * np.pi * arg_over_pi)), aperture)

    def contains(self, z):
        z = np.asarray(z)
        out = np.abs(self.vertex - z) <= self.aperture * (1 - np.abs(z))
        return out[()] if out.ndim == 0 else out

    def half_width(self, r: float) -> float | None:
        """Angular half-width of the slice ``{|z| = r}`` of the cone, ``None`` if empty."""
        if r == 0:
            return math.pi if self.aperture >= 1 else None
        c = (1 + r * r - self.aperture**2 * (1 - r) ** 2) / (2 * r)
        if c > 1:
            return None
        return math.pi if c <= -1 else math.acos(c)

    def slice(self, r: float, angular: int = 257) -> np.ndarray:
        w = self.half_width(r)
        if w is None:
            return np.zeros(0, complex)
        phi = np.angle(self.vertex) + np.linspace(-w, w, angular)
        return r * np.exp(1j * phi)


def stolz_contains(angle: StolzAngle, z):
    _disk_check(z)
    return angle.contains(z)


def stolz_aperture_of(points, vertex: complex = 1) -> float:
    """Smallest ``M`` with all ``points`` inside ``Gamma_M(vertex)``."""
    z = np.asarray(points)
    return float(np.max(np.abs(vertex - z) / (1 - np.abs(z))))


Evaluable = Union[hf.FuncExpr, InnerSpec, Callable]


def _values(h: Evaluable, z):
    if isinstance(h, InnerSpec):
        return eval_inner(h, z)
    if isinstance(h, hf.FuncExpr):
        return h.jet(z, 0)[0]
    return np.asarray(h(z))


def focus_angles(h: Evaluable) -> tuple:
    if isinstance(h, InnerSpec):
        angs = [float(x) * math.pi for x, _ in h.atoms] + [float(np.angle(a)) for a, _ in h.zeros if a != 0]
        return tuple(sorted(set(angs)))
    if isinstance(h, hf.FuncExpr):
        return hf.boundary_focus(h)
    return ()


@dataclass(frozen=True)
class LevelSetSpec:
    """``Omega(h, eps) = {z in D : |h(z)| < eps}`` for ``|h| <= 1`` on the disk."""

    h: Evaluable
    eps: float

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise PreconditionError("eps must lie in (0, 1)")

    def abs_h(self, z):
        return np.abs(_values(self.h, z))

    def contains(self, z):
        return self.abs_h(z) < self.eps

    def slice(self, r: float, angular: int = 257) -> np.ndarray:
        """Sample points of the level set on the circle ``|z| = r``.

        A uniform angular grid is merged with dense local grids around focus
        angles (atom vertices, Blaschke zero directions) whose width tracks
        the horocyclic scale ``sqrt(1 - r)``.
        """
        phis = [np.linspace(0, 2 * math.pi, 4 * angular, endpoint=False)]
        w = min(math.pi, 8 * math.sqrt(1 - r) + 4 * (1 - r))
        for f in focus_angles(self.h):
            phis.append(f + np.linspace(-w, w, angular))
            phis.append(f + np.linspace(-w, w, angular) / 16)
        z = r * np.exp(1j * np.concatenate(phis))
        keep = self._safe_contains(z)
        return z[keep]

    def _safe_contains(self, z):
        with np.errstate(all="ignore"):
            try:
                return self.contains(z)
            except DomainError:
                ok = np.zeros(z.shape, dtype=bool)
                for i, p in enumerate(z):
                    try:
                        ok[i] = bool(self.contains(np.array([p]))[0])
                    except DomainError:
                        pass
                return ok


@dataclass(frozen=True)
class LevelSetSample:
    points: np.ndarray
    abs_h: np.ndarray
    tested: int
    skipped: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re", "im", "abs_h"])
        for z, a in zip(self.points, self.abs_h):
            w.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(a))])
        return buf.getvalue()


def polar_grid(radial: int, angular: int, r_cap: float = R_CAP) -> np.ndarray:
    if radial < 2 or angular < 2:
        raise PreconditionError("grid resolutions must be at least 2")
    r = np.linspace(0, r_cap, radial)
    t = 2 * math.pi * np.arange(angular) / angular
    return (r[:, None] * np.exp(1j * t)[None, :]).ravel()


def level_set_sample(spec: LevelSetSpec, radial: int = 64, angular: int = 128,
                     r_cap: float = R_CAP) -> LevelSetSample:
    z = polar_grid(radial, angular, r_cap)
    vals = np.full(z.shape, np.nan)
    skipped = 0
    with np.errstate(all="ignore"):
        try:
            vals = spec.abs_h(z)
        except DomainError:
            for i, p in enumerate(z):
                try:
                    vals[i] = spec.abs_h(np.array([p]))[0]
                except DomainError:
                    skipped += 1
    keep = np.isfinite(vals) & (vals < spec.eps)
    return LevelSetSample(z[keep], vals[keep], z.size, skipped)


@dataclass(frozen=True)
class ContainmentReport:
    violations: int
    tested: int
    max_ratio: float  # largest |h(w)| / eps seen


def _random_disk_points(rng, n, r_cap=R_CAP):
    # half area-uniform, half log-uniform in the distance to the circle
    u = rng.random(n)
    r_area = np.sqrt(u) * r_cap
    r_log = 1 - 10.0 ** (-6 * rng.random(n))
    r = np.where(rng.random(n) < 0.5, r_area, np.minimum(r_log, r_cap))
    return r * np.exp(2j * math.pi * rng.random(n))


def levset_containment_check(spec: LevelSetSpec, samples: int = 10_000, seed: int = 0,
                             max_batches: int = 400) -> ContainmentReport:
    """For ``z`` in ``Omega(h, eps/2)`` and ``w`` in ``B(z, eps/4 (1 - |z|))``,
    count ``w`` with ``|h(w)| >= eps``."""
    rng = np.random.default_rng(seed)
    eps = spec.eps
    base = []
    have = 0
    for _ in range(max_batches):
        z = _random_disk_points(rng, 4 * samples)
        with np.errstate(all="ignore"):
            v = spec.abs_h(z)
        z = z[np.isfinite(v) & (v < eps / 2)]
        base.append(z)
        have += z.size
        if have >= samples:
            break
    z = np.concatenate(base)[:samples]
    if z.size < samples:
        raise PreconditionError(f"level set Omega(h, eps/2) too thin: found {z.size} of {samples} points")
    rad = eps / 4 * (1 - np.abs(z)) * np.sqrt(rng.random(z.size))
    w = z + rad * np.exp(2j * math.pi * rng.random(z.size))
    with np.errstate(all="ignore"):
        hw = spec.abs_h(w)
    return ContainmentReport(int(np.sum(hw >= eps)), int(z.size), float(np.max(hw) / eps))


def schwarz_pick_check(h: Evaluable, pairs: int = 10_000, seed: int = 0,
                       slack: float = 1e-12) -> ContainmentReport:
    """Count pairs with ``rho(h(z), h(w)) > rho(z, w) + slack``."""
    rng = np.random.default_rng(seed)
    z = _random_disk_points(rng, pairs)
    w = _random_disk_points(rng, pairs)
    hz, hw = _values(h, z), _values(h, w)
    lhs = pseudo_distance(hz, hw)
    rhs = pseudo_distance(z, w)
    return ContainmentReport(int(np.sum(lhs > rhs + slack)), pairs,
                             float(np.max(lhs - rhs)))


@dataclass(frozen=True)
class Arc:
    """Closed arc of the circle from angle ``start`` to ``end`` (counterclockwise)."""

    start: float
    end: float

    @property
    def length(self) -> float:
        return self.end - self.start

    def contains(self, angle: float) -> bool:
        t = (angle - self.start) % (2 * math.pi)
        return t <= self.length + 1e-15


def boundary_spectrum_estimate(theta: InnerSpec, eps: float = 0.5, resolution: int = 8,
                               angular: int = 4096) -> list[Arc]:
    """Outer approximation of ``T cap clos Omega(theta, eps)``.

    An angle is flagged when the inward radial probes at radii ``1 - 2**-m``
    in the deep window ``m in [ceil(resolution / 2), resolution]`` meet the
    level set.  Consecutive flagged grid angles are merged into arcs padded by
    half a grid step.
    """
    if not 0 < eps < 1:
        raise PreconditionError("eps must lie in (0, 1)")
    if resolution < 1:
        raise PreconditionError("resolution must be positive")
    grid = 2 * math.pi * np.arange(angular) / angular
    extra = np.array(focus_angles(theta)) % (2 * math.pi)
    phis = np.unique(np.concatenate([grid, extra]))
    ms = np.arange(math.ceil(resolution / 2), resolution + 1)
    radii = np.minimum(1 - 2.0 ** -ms, R_CAP)
    z = radii[:, None] * np.exp(1j * phis)[None, :]
    with np.errstate(all="ignore"):
        v = np.abs(eval_inner(theta, z))
    flagged = np.any(v < eps, axis=0)
    half = math.pi / angular
    arcs = []
    i = 0
    n = phis.size
    while i < n:
        if not flagged[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and flagged[j + 1]:
            j += 1
        arcs.append([phis[i] - half, phis[j] + half])
        i = j + 1
    # merge across the wrap at 2 pi
    if len(arcs) > 1 and flagged[0] and flagged[-1]:
        first = arcs.pop(0)
        arcs[-1][1] = first[1] + 2 * math.pi
    if len(arcs) == 1 and arcs[0][1] - arcs[0][0] >= 2 * math.pi:
        arcs = [[0.0, 2 * math.pi]]
    return [Arc(float(a), float(b)) for a, b in arcs]
