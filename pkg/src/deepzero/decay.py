"""Boundary decay of holomorphic functions on the disk.

Decay orders are fitted from sup-norms over slices ``{|z| = r} cap region``
along a radius schedule approaching the circle.  The module also holds the
Korenblum growth estimate, derivative-decay checks on nested regions and the
Blaschke / Carleson conditions for zero sets and boundary sets.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from . import holofunc as hf
from .diskgeom import R_CAP, LevelSetSpec, StolzAngle
from .errors import DomainError, PreconditionError

Region = Union[StolzAngle, LevelSetSpec]
Target = Union[hf.FuncExpr, Callable]

MIN_FIT_SAMPLES = 8


def default_radii(m_min: int = 4, m_max: int = 20) -> np.ndarray:
    return 1 - 2.0 ** -np.arange(m_min, m_max + 1)


def _evaluate(f: Target, z: np.ndarray, k: int = 0) -> np.ndarray:
    if isinstance(f, hf.FuncExpr):
        return f.jet(z, k)[k]
    if k:
        raise PreconditionError("derivatives need a FuncExpr, not a plain callable")
    return np.asarray(f(z))


def region_slice(region: Region, r: float, angular: int = 257) -> np.ndarray:
    return region.slice(r, angular)


@dataclass(frozen=True)
class DecayEstimate:
    gamma_hat: float
    region: Region
    radii: tuple
    sups: tuple
    fit_residual: float
    samples_used: int
    infinite_order: bool = False

    def fit_line(self) -> tuple[float, float]:
        """Slope and intercept of the fitted log-log line."""
        x, y = self._fit_data()
        if self.infinite_order:
            return math.inf, 0.0
        slope, icpt = np.polyfit(x, y, 1)
        return float(slope), float(icpt)

    def _fit_data(self):
        r = np.array(self.radii[-self.samples_used:])
        s = np.array(self.sups[-self.samples_used:])
        with np.errstate(divide="ignore"):
            return np.log(1 - r), np.log(s)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["radius", "sup_abs_f", "residual"])
        fitted = len(self.radii) - self.samples_used
        slope, icpt = self.fit_line() if not self.infinite_order else (0.0, 0.0)
        for i, (r, s) in enumerate(zip(self.radii, self.sups)):
            if i >= fitted and not self.infinite_order and s > 0:
                res = repr(float(math.log(s) - (slope * math.log(1 - r) + icpt)))
            else:
                res = ""
            w.writerow([repr(float(r)), repr(float(s)), res])
        return buf.getvalue()


def decay_order_estimate(f: Target, region: Region, radii: Sequence[float] | None = None,
                         angular: int = 257, derivative: int = 0) -> DecayEstimate:
    """Fit ``gamma`` in ``sup_{slice(r)} |f| ~ C (1 - r)**gamma``.

    ``f`` may be a FuncExpr or a vectorized callable (useful for fractional
    powers).  The slope comes from least squares over the deepest half of
    the schedule.
    """
    radii = np.asarray(default_radii() if radii is None else radii, dtype=float)
    if radii.ndim != 1 or np.any(np.diff(radii) <= 0) or radii[0] < 0 or radii[-1] >= 1:
        raise PreconditionError("radii must increase strictly inside [0, 1)")
    n_fit = math.ceil(radii.size / 2)
    if n_fit < MIN_FIT_SAMPLES:
        raise PreconditionError(f"a valid fit needs at least {MIN_FIT_SAMPLES} radii in its deepest half")
    sups = []
    for r in radii:
        z = region_slice(region, float(r), angular)
        if z.size == 0:
            raise PreconditionError(f"region is empty at radius {r}")
        with np.errstate(all="ignore"):
            v = np.abs(_evaluate(f, z, derivative))
        v = v[np.isfinite(v)]
        if v.size == 0:
            raise DomainError(f"no finite samples of f at radius {r}")
        sups.append(float(v.max()))
    sups = np.array(sups)
    deep_r, deep_s = radii[-n_fit:], sups[-n_fit:]
    if np.all(deep_s == 0):
        return DecayEstimate(math.inf, region, tuple(radii), tuple(sups), 0.0, n_fit, True)
    keep = deep_s > 0
    if keep.sum() < 2:
        raise PreconditionError("too few nonzero samples for a slope fit")
    x, y = np.log(1 - deep_r[keep]), np.log(deep_s[keep])
    slope, icpt = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + icpt)) ** 2)))
    return DecayEstimate(float(slope), region, tuple(radii), tuple(sups), resid, n_fit)


def korenblum_norm_estimate(f: Target, beta: float, levels: int = 20, angular: int = 256,
                            r_cap: float = R_CAP) -> float:
    """``max |f(z)| (1 - |z|)**beta`` over circles at radii ``0`` and
    ``1 - 2**-m`` for ``m = 1..levels``; a lower bound for the true sup."""
    radii = np.concatenate([[0.0], np.minimum(1 - 2.0 ** -np.arange(1, levels + 1), r_cap)])
    t = 2 * math.pi * np.arange(angular) / angular
    z = radii[:, None] * np.exp(1j * t)[None, :]
    with np.errstate(all="ignore"):
        v = np.abs(_evaluate(f, z)) * (1 - radii[:, None]) ** beta
    return float(np.nanmax(v))


def theorem21_threshold(n: int, beta: float) -> float:
    """The decay order ``n beta + n (n + 1) / 2`` that forces a Wronskian of
    ``A^{-beta}`` functions to vanish nontangentially."""
    if n < 0 or beta < 0:
        raise PreconditionError("need n >= 0 and beta >= 0")
    return n * beta + n * (n + 1) / 2


@dataclass(frozen=True)
class ContainmentResult:
    violations: int
    tested: int


def verify_containment(G: Region, G0: Region, delta: float, radii: Sequence[float] | None = None,
                       angular: int = 33, circle: int = 16) -> ContainmentResult:
    """Sample ``z`` in ``G`` and count points of the circles
    ``|w - z| = delta (1 - |z|)`` that fall outside ``G0``."""
    if not 0 < delta < 1:
        raise PreconditionError("delta must lie in (0, 1)")
    radii = default_radii(1, 20) if radii is None else np.asarray(radii)
    t = np.exp(2j * math.pi * np.arange(circle) / circle)
    bad = tested = 0
    for r in radii:
        z = region_slice(G, float(r), angular)
        if z.size == 0:
            continue
        w = (z[:, None] + delta * (1 - np.abs(z))[:, None] * t[None, :]).ravel()
        with np.errstate(all="ignore"):
            inside = np.asarray(G0.contains(w), dtype=bool)
        bad += int(np.sum(~inside))
        tested += w.size
    return ContainmentResult(bad, tested)


@dataclass(frozen=True)
class DerivativeDecayReport:
    order: float
    required: float
    passed: bool
    infinite_order: bool
    base_order: float
    containment_tested: int


def derivative_decay_check(f: hf.FuncExpr, alpha: float, k: int, G: Region, G0: Region,
                           delta: float, slack: float = 0.1,
                           radii: Sequence[float] | None = None) -> DerivativeDecayReport:
    """If ``f = O((1-|z|)**alpha)`` on ``G0`` and ``delta``-disks around ``G``
    stay in ``G0``, then ``f^(k)`` should decay with order ``alpha - k`` on ``G``."""
    if k < 1:
        raise PreconditionError("k must be a positive integer")
    cont = verify_containment(G, G0, delta)
    if cont.violations:
        raise PreconditionError(
            f"containment hypothesis fails on {cont.violations} of {cont.tested} sampled points")
    base = decay_order_estimate(f, G0, radii)
    est = decay_order_estimate(f, G, radii, derivative=k)
    required = alpha - k - slack
    passed = est.infinite_order or est.gamma_hat >= required
    return DerivativeDecayReport(est.gamma_hat, alpha - k, bool(passed), est.infinite_order,
                                 base.gamma_hat, cont.tested)


# ---------------------------------------------------------------------------
# zero sets inside the disk


@dataclass(frozen=True)
class ZeroGenerator:
    """Points ``rule(j)`` for ``j = 1, 2, ...`` with optional exact defects
    ``1 - |rule(j)|`` and a tail bound for ``sum_{j > N}`` of them."""

    name: str
    rule: Callable[[int], complex]
    defect: Callable[[int], float] | None = None
    tail: Callable[[int], float] | None = None
    default_terms: int = 50

    def point(self, j: int) -> complex:
        return self.rule(j)

    def defect_of(self, j: int) -> float:
        return self.defect(j) if self.defect else 1 - abs(self.rule(j))


def dyadic_zeros() -> ZeroGenerator:
    return ZeroGenerator("dyadic", lambda j: 1 - 2.0**-j, lambda j: 2.0**-j, lambda N: 2.0**-N)


def harmonic_zeros() -> ZeroGenerator:
    return ZeroGenerator("harmonic", lambda j: 1 - 1 / j, lambda j: 1 / j, None, 1 << 16)


@dataclass(frozen=True)
class BlaschkeReport:
    sum: float
    partial_sum: float
    tail_bound: float
    converged: bool
    terms: int
    checkpoints: tuple = field(default=())  # (N, partial sum) at powers of two


def blaschke_condition(points, N: int | None = None, tol: float = 1e-12) -> BlaschkeReport:
    """Partial sums of ``sum (1 - |z_j|)`` with a certified tail when known."""
    if isinstance(points, ZeroGenerator):
        N = points.default_terms if N is None else N
        defects = np.array([points.defect_of(j) for j in range(1, N + 1)])
        for j in (1, N):
            if not abs(points.point(j)) < 1:
                raise DomainError(f"generated point {j} is outside the disk")
        partial = np.cumsum(defects)
        cps = tuple((int(n), float(partial[n - 1])) for n in 2 ** np.arange(int(math.log2(N)) + 1))
        tail = points.tail(N) if points.tail else math.inf
        conv = tail < tol or (points.tail is not None and tail <= 2.0**-40)
        total = float(partial[-1] + tail) if math.isfinite(tail) else float(partial[-1])
        return BlaschkeReport(total, float(partial[-1]), float(tail), bool(conv), N, cps)
    z = np.asarray(points, dtype=complex).ravel()
    if np.any(np.abs(z) >= 1):
        raise DomainError("all points must lie inside the open unit disk")
    s = float(np.sum(1 - np.abs(z)))
    return BlaschkeReport(s, s, 0.0, True, int(z.size))


# ---------------------------------------------------------------------------
# boundary sets and the log-distance integral


def _unimodular_angles(points) -> list[float]:
    out = []
    for p in points:
        p = complex(p)
        if abs(abs(p) - 1) > 1e-12:
            raise PreconditionError(f"boundary point {p} is not unimodular")
        out.append(math.atan2(p.imag, p.real) % (2 * math.pi))
    return out


@dataclass(frozen=True)
class FinitePoints:
    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(complex(p) for p in self.points))
        _unimodular_angles(self.points)

    def angles(self) -> list[float]:
        return _unimodular_angles(self.points)


@dataclass(frozen=True)
class ArcSet:
    arcs: tuple  # ((start, end), ...) radians, counterclockwise

    def __post_init__(self):
        for a, b in self.arcs:
            if not b > a:
                raise PreconditionError("arcs must have positive length")


@dataclass(frozen=True)
class GeneratedPoints:
    rule: Callable[[int], complex]
    N: int
    limits: tuple = ()

    def truncated(self, N: int | None = None) -> FinitePoints:
        N = self.N if N is None else N
        return FinitePoints(tuple(self.rule(j) for j in range(1, N + 1)) + tuple(self.limits))


def dyadic_angles(N: int = 40) -> GeneratedPoints:
    """The points ``exp(i pi 2**-j)`` with their limit point ``1``."""
    return GeneratedPoints(lambda j: complex(math.cos(math.pi * 2.0**-j), math.sin(math.pi * 2.0**-j)),
                           N, (1 + 0j,))


BoundarySetDescriptor = Union[FinitePoints, ArcSet, GeneratedPoints]


@dataclass(frozen=True)
class CarlesonReport:
    value: float
    divergent: bool
    reason: str = ""


def _half_gap_integral(h: float, levels: int, nodes: int, ratio: float = 0.15) -> float:
    """``int_0^h log(2 sin(t/2)) dt`` on panels graded geometrically toward 0."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = h * ratio ** np.arange(levels + 1)
    edges = np.append(edges, 0.0)
    a, b = edges[1:], edges[:-1]
    t = 0.5 * (b - a)[:, None] * x[None, :] + 0.5 * (a + b)[:, None]
    vals = np.log(2 * np.sin(t / 2))
    return float(np.sum(0.5 * (b - a)[:, None] * w[None, :] * vals))


def _finite_carleson(angles: list[float], tol: float = 1e-13) -> float:
    th = np.unique(np.mod(angles, 2 * math.pi))
    gaps = np.diff(np.append(th, th[0] + 2 * math.pi))
    gaps = gaps[gaps > 0]
    total = 0.0
    for g in gaps:
        levels, nodes = 20, 12
        prev = _half_gap_integral(g / 2, levels, nodes)
        while True:
            levels, nodes = levels + 10, nodes + 4
            cur = _half_gap_integral(g / 2, levels, nodes)
            if abs(cur - prev) <= tol * max(1.0, g) or nodes > 64:
                break
            prev = cur
        total += 2 * cur
    return total


def carleson_integral(E: BoundarySetDescriptor, floor: float = -1e4) -> CarlesonReport:
    """``int_T log dist(zeta, E) |d zeta|``.

    Between consecutive points of ``E`` the distance is the chord to the
    nearer endpoint, so each gap contributes twice a half-gap integral of
    ``log(2 sin(t/2))``, computed on panels graded toward the endpoint.
    """
    if isinstance(E, ArcSet):
        if not E.arcs:
            raise PreconditionError("the boundary set is empty")
        return CarlesonReport(-math.inf, True, "arc of positive length")
    if isinstance(E, FinitePoints):
        if not E.points:
            raise PreconditionError("the boundary set is empty")
        v = _finite_carleson(E.angles())
        return CarlesonReport(v, v < floor, "below floor" if v < floor else "")
    if isinstance(E, GeneratedPoints):
        seq = []
        for N in sorted({max(1, E.N // 4), max(1, E.N // 2), E.N}):
            seq.append(_finite_carleson(E.truncated(N).angles()))
        v = seq[-1]
        stable = len(seq) < 2 or abs(seq[-1] - seq[-2]) <= 1e-6 * max(1.0, abs(v))
        div = v < floor and not stable
        return CarlesonReport(v, div, "refinement below floor without stabilizing" if div else "")
    raise PreconditionError(f"unknown boundary set descriptor {type(E).__name__}")
