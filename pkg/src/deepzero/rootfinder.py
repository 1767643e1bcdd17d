"""Argument-principle zero counting and adaptive localisation.

Search cells are axis-aligned rectangles intersected with a few disks (or
disk complements).  The contour of such a cell is assembled from the pieces
of each boundary curve that lie inside all the other sets, each piece oriented
so that the cell is on its left; the winding integral over the union of
pieces is the integral over the cell boundary.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import BoundaryZeroError, PreconditionError, WindingError
from .holofunc import FuncExpr
from .wronskian import WronskianFunction, family_jets

PANELS = 32
NODES = 16
MAX_PANELS = 4096
PANEL_TOL = 1e-10
MIN_PANEL = 2.0**-40
GUARD = 1e-9
MAX_DEPTH = 24
SEP_TOL = 1e-6
JITTER = ((0.37, -0.61), (-0.53, 0.29), (0.71, 0.43))


@lru_cache(maxsize=None)
def _gauss(n):
    return np.polynomial.legendre.leggauss(n)


# ---------------------------------------------------------------------------
# regions and cells

@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float
    clip: float | None = None

    def __post_init__(self):
        if not self.radius > 0:
            raise PreconditionError("disk radius must be positive")
        _check_clip(self.clip)

    def root_cell(self) -> "Cell":
        c, r = complex(self.center), self.radius * 1.01
        return _with_clip(Cell(c - r * (1 + 1j), c + r * (1 + 1j),
                               ((complex(self.center), self.radius, 1),)), self.clip)


@dataclass(frozen=True)
class Rectangle:
    lo: complex
    hi: complex
    clip: float | None = None

    def __post_init__(self):
        if not (self.hi.real > self.lo.real and self.hi.imag > self.lo.imag):
            raise PreconditionError("rectangle must be nonempty (lo < hi componentwise)")
        _check_clip(self.clip)

    def root_cell(self) -> "Cell":
        return _with_clip(Cell(complex(self.lo), complex(self.hi), ()), self.clip)


@dataclass(frozen=True)
class Annulus:
    center: complex
    inner: float
    outer: float
    clip: float | None = None

    def __post_init__(self):
        if not 0 < self.inner < self.outer:
            raise PreconditionError("annulus needs 0 < inner < outer")
        _check_clip(self.clip)

    def root_cell(self) -> "Cell":
        c, r = complex(self.center), self.outer * 1.01
        return _with_clip(Cell(c - r * (1 + 1j), c + r * (1 + 1j),
                               ((c, self.outer, 1), (c, self.inner, -1))), self.clip)


def _check_clip(clip):
    if clip is not None and not 0 < clip < 1:
        raise PreconditionError("clip margin must lie in (0, 1)")


def _with_clip(cell, clip):
    if clip is None:
        return cell
    return replace(cell, circles=cell.circles + ((0j, float(clip), 1),))


@dataclass(frozen=True)
class Cell:
    lo: complex
    hi: complex
    circles: tuple = ()  # (center, radius, +1 inside / -1 outside)

    @property
    def diameter(self) -> float:
        return abs(self.hi - self.lo)

    @property
    def mid(self) -> complex:
        return (self.lo + self.hi) / 2

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z)
        ok = ((z.real >= self.lo.real) & (z.real <= self.hi.real)
              & (z.imag >= self.lo.imag) & (z.imag <= self.hi.imag))
        return ok & self._in_circles(z)

    def _in_circles(self, z, skip=None):
        ok = np.ones(np.shape(z), dtype=bool)
        for i, (c, r, s) in enumerate(self.circles):
            if i != skip:
                d = np.abs(z - c)
                ok &= (d <= r) if s > 0 else (d >= r)
        return ok

    def boundary_distance(self, z: complex) -> float:
        d = min(z.real - self.lo.real, self.hi.real - z.real,
                z.imag - self.lo.imag, self.hi.imag - z.imag)
        for c, r, s in self.circles:
            d = min(d, s * (r - abs(z - c)))
        return d

    def split(self, at: complex) -> list["Cell"]:
        lo, hi = self.lo, self.hi
        xs = (lo.real, at.real, hi.real)
        ys = (lo.imag, at.imag, hi.imag)
        return [Cell(complex(xs[i], ys[j]), complex(xs[i + 1], ys[j + 1]), self.circles)
                for j in (0, 1) for i in (0, 1)]

    def pieces(self):
        """Oriented boundary pieces: ``("seg", p0, p1)`` or ``("arc", c, r, t0, t1)``."""
        out = []
        lo, hi = self.lo, self.hi
        corners = [lo, complex(hi.real, lo.imag), hi, complex(lo.real, hi.imag)]
        for p0, p1 in zip(corners, corners[1:] + corners[:1]):
            ts = [0.0, 1.0]
            d = p1 - p0
            for c, r, _ in self.circles:
                ts += _segment_circle(p0, d, c, r)
            ts = sorted(set(ts))
            for a, b in zip(ts, ts[1:]):
                if b - a < 1e-15:
                    continue
                if self._in_circles(p0 + 0.5 * (a + b) * d):
                    out.append(("seg", p0 + a * d, p0 + b * d))
        for i, (c, r, s) in enumerate(self.circles):
            angles = []
            for x in (lo.real, hi.real):
                angles += _circle_vline(c, r, x)
            for y in (lo.imag, hi.imag):
                angles += _circle_hline(c, r, y)
            for j, (c2, r2, _) in enumerate(self.circles):
                if j != i:
                    angles += _circle_circle(c, r, c2, r2)
            angles = sorted({a % (2 * math.pi) for a in angles})
            if not angles:
                arcs = [(0.0, 2 * math.pi)]
            else:
                arcs = list(zip(angles, angles[1:] + [angles[0] + 2 * math.pi]))
            for t0, t1 in arcs:
                if t1 - t0 < 1e-15:
                    continue
                m = c + r * np.exp(0.5j * (t0 + t1))
                inside_rect = (lo.real <= m.real <= hi.real) and (lo.imag <= m.imag <= hi.imag)
                if inside_rect and self._in_circles(m, skip=i):
                    out.append(("arc", c, r, t0, t1) if s > 0 else ("arc", c, r, t1, t0))
        return out

    def quadrature(self, panels: int = PANELS, nodes: int = NODES):
        """Nodes ``z`` and complex weights ``dz`` for contour integrals over the
        cell.  Panels are contiguous blocks of ``nodes`` entries."""
        pcs = self.pieces()
        if not pcs:
            return np.zeros(0, complex), np.zeros(0, complex)
        lengths = np.array([_piece_length(p) for p in pcs])
        total = lengths.sum()
        x, w = _gauss(nodes)
        zs, dzs = [], []
        for p, L in zip(pcs, lengths):
            k = max(1, int(round(panels * L / total)))
            edges = np.linspace(0.0, 1.0, k + 1)
            a, b = edges[:-1, None], edges[1:, None]
            t = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
            wt = (0.5 * (b - a) * w).ravel()
            z, dzdt = _piece_point(p, t)
            zs.append(z)
            dzs.append(wt * dzdt)
        return np.concatenate(zs), np.concatenate(dzs)


def _piece_point(p, t):
    """Point and derivative of the piece ``p`` at parameters ``t`` in [0, 1]."""
    if p[0] == "seg":
        _, p0, p1 = p
        return p0 + t * (p1 - p0), np.full(np.shape(t), p1 - p0, dtype=complex)
    _, c, r, t0, t1 = p
    e = np.exp(1j * (t0 + t * (t1 - t0)))
    return c + r * e, (t1 - t0) * 1j * r * e


def _piece_length(p):
    if p[0] == "seg":
        return abs(p[2] - p[1])
    return p[2] * abs(p[4] - p[3])


def _segment_circle(p0, d, c, r):
    # |p0 + t d - c|^2 = r^2
    q = p0 - c
    A = abs(d) ** 2
    B = 2 * (q.real * d.real + q.imag * d.imag)
    C = abs(q) ** 2 - r * r
    disc = B * B - 4 * A * C
    if disc <= 0:
        return []
    s = math.sqrt(disc)
    return [t for t in ((-B - s) / (2 * A), (-B + s) / (2 * A)) if 0 < t < 1]


def _circle_vline(c, r, x):
    u = (x - c.real) / r
    if abs(u) >= 1:
        return []
    a = math.acos(u)
    return [a, -a]


def _circle_hline(c, r, y):
    u = (y - c.imag) / r
    if abs(u) >= 1:
        return []
    a = math.asin(u)
    return [a, math.pi - a]


def _circle_circle(c1, r1, c2, r2):
    d = abs(c2 - c1)
    if d == 0 or d >= r1 + r2 or d <= abs(r1 - r2):
        return []
    base = math.atan2((c2 - c1).imag, (c2 - c1).real)
    a = math.acos((r1 * r1 + d * d - r2 * r2) / (2 * r1 * d))
    return [base + a, base - a]


# ---------------------------------------------------------------------------
# counting

class _Adapter:
    """Uniform ``jet(z, order)`` view of expressions and Wronskians."""

    def __init__(self, f):
        if isinstance(f, (FuncExpr, WronskianFunction)) or hasattr(f, "jet"):
            self.f = f
        else:
            raise TypeError("expected an object with a jet(z, order) method")

    def jet(self, z, order):
        return np.asarray(self.f.jet(z, order), dtype=np.complex128)


def _as_cell(boundary) -> Cell:
    return boundary if isinstance(boundary, Cell) else boundary.root_cell()


@dataclass(frozen=True)
class Winding:
    count: int
    value: complex
    moments: tuple  # (1/2 pi i) contour integrals of z^p f'/f, p = 1, 2
    panels: int
    min_ratio: float


def _panel_sums(g, pcs, idx, a, b, nodes, guard=GUARD):
    """Per-panel contour sums of ``f'/f``, ``z f'/f`` and ``z^2 f'/f`` over
    the parameter intervals ``[a, b]`` of pieces ``idx``."""
    x, w = _gauss(nodes)
    half = 0.5 * (b - a)[:, None]
    t = half * x + 0.5 * (a + b)[:, None]
    z = np.empty(t.shape, complex)
    dz = np.empty(t.shape, complex)
    for k in np.unique(idx):
        rows = idx == k
        z[rows], dzdt = _piece_point(pcs[k], t[rows])
        dz[rows] = half[rows] * w * dzdt
    s = g.jet(z.ravel(), 1)
    s0, s1 = s[0].reshape(z.shape), s[1].reshape(z.shape)
    mag = np.abs(s0)
    top = mag.max(axis=1)
    # guard each panel against its own maximum: contours can span many
    # orders of magnitude of |f| without coming near a zero
    if not (np.all(np.isfinite(s0)) and np.all(np.isfinite(s1))) or np.any(top == 0):
        raise BoundaryZeroError("f vanishes or is not finite on the contour")
    ratio = mag.min(axis=1) / top
    if ratio.min() < guard:
        raise BoundaryZeroError(f"|f| on the contour drops to {ratio.min():.3g} of its maximum")
    q = s1 / s0 * dz / (2j * math.pi)
    with np.errstate(all="ignore"):
        reach = np.nanmin(np.abs(s0 / s1) / np.abs(dz), axis=1)
    sums = np.stack([q.sum(axis=1), (q * z).sum(axis=1), (q * z * z).sum(axis=1)], axis=1)
    return sums, float(ratio.min()), reach


def winding(f, boundary, panels: int = PANELS, max_panels: int = MAX_PANELS,
            guard: float = GUARD, nodes: int = NODES, panel_tol: float = PANEL_TOL) -> Winding:
    """Winding number of ``f`` around ``boundary`` by composite Gauss-Legendre
    quadrature of ``f'/f``.

    The initial uniform rule is kept when it lands on an integer.  Otherwise
    each panel is bisected until its value agrees with the sum over its halves
    to ``panel_tol``, so only panels near a close zero get refined.
    """
    g = f if isinstance(f, _Adapter) else _Adapter(f)
    cell = _as_cell(boundary)
    pcs = cell.pieces()
    if not pcs:
        return Winding(0, 0j, (0j, 0j), 0, 1.0)
    lengths = np.array([_piece_length(p) for p in pcs])
    counts = np.maximum(1, np.round(panels * lengths / lengths.sum()).astype(int))
    idx = np.repeat(np.arange(len(pcs)), counts)
    a = np.concatenate([np.arange(k) / k for k in counts])
    b = np.concatenate([np.arange(1, k + 1) / k for k in counts])
    sums, min_ratio, reach = _panel_sums(g, pcs, idx, a, b, nodes, guard)

    def result(total, used, ratio):
        w = complex(total[0])
        dev = abs(w.real - round(w.real))
        if dev < 1e-6 and abs(w.imag) < 1e-6:
            return Winding(int(round(w.real)), w, (complex(total[1]), complex(total[2])), used, ratio)
        return None

    done = result(sums.sum(axis=0), idx.size, min_ratio)
    if done is not None:
        return done
    accepted = np.zeros(3, complex)
    used = 0
    while idx.size:
        mid = 0.5 * (a + b)
        both = np.concatenate([idx, idx]), np.concatenate([a, mid]), np.concatenate([mid, b])
        kids, r, kid_reach = _panel_sums(g, pcs, *both, nodes, guard)
        min_ratio = min(min_ratio, r)
        n = idx.size
        refined = kids[:n] + kids[n:]
        ok = np.abs(refined[:, 0] - sums[:, 0]) < panel_tol
        accepted += refined[ok].sum(axis=0)
        used += 2 * int(ok.sum())
        bad = np.concatenate([~ok, ~ok])
        idx, a, b = both[0][bad], both[1][bad], both[2][bad]
        sums, reach = kids[bad], kid_reach[bad]
        if used + idx.size > max_panels or (idx.size and np.min(b - a) < MIN_PANEL):
            total = accepted + sums.sum(axis=0)
            # a Newton step shorter than the local node spacing means a zero
            # sits on (or numerically at) the contour
            if np.min(reach) < 10:
                raise BoundaryZeroError(f"a zero lies on the contour (winding value {complex(total[0]):.4g})")
            raise WindingError(f"winding value {complex(total[0]):.4g} did not settle on an integer")
    done = result(accepted, used, min_ratio)
    if done is None:
        raise WindingError(f"winding value {complex(accepted[0]):.4g} did not settle on an integer")
    return done


def count_zeros(f, boundary, panels: int = PANELS) -> int:
    """Number of zeros (with multiplicity) enclosed by ``boundary``."""
    return winding(f, boundary, panels).count


# ---------------------------------------------------------------------------
# localisation

@dataclass(frozen=True)
class ZeroEntry:
    location: complex
    multiplicity: int
    enclosure_radius: float
    residual: float


@dataclass(frozen=True)
class Enclosure:
    center: complex
    radius: float
    count: int


@dataclass(frozen=True)
class ZeroReport:
    zeros: tuple = ()
    total_count: int = 0
    unresolved: tuple = ()
    warnings: tuple = ()

    def __post_init__(self):
        assert self.total_count == (sum(z.multiplicity for z in self.zeros)
                                    + sum(u.count for u in self.unresolved))

    @property
    def max_multiplicity(self) -> int:
        return max((z.multiplicity for z in self.zeros), default=0)


@dataclass
class _Search:
    f: _Adapter
    max_depth: int
    sep_tol: float
    panels: int
    zeros: list = field(default_factory=list)
    unresolved: list = field(default_factory=list)

    def resolve(self, cell: Cell, wnd: Winding, depth: int, pool=None):
        m = wnd.count
        if m <= 0:
            return
        hit = self.certify(cell, wnd)
        if hit is not None:
            self.zeros.append(hit)
            return
        if cell.diameter <= self.sep_tol or depth >= self.max_depth:
            self.unresolved.append(Enclosure(cell.mid, cell.diameter / 2, m))
            return
        kids = self.split(cell, m)
        if kids is None:
            self.unresolved.append(Enclosure(cell.mid, cell.diameter / 2, m))
            return
        if pool is not None and depth < 2:
            futs = [pool.submit(self._subtree, c, w, depth + 1) for c, w in kids]
            for fut in futs:
                z, u = fut.result()
                self.zeros += z
                self.unresolved += u
        else:
            for c, w in kids:
                self.resolve(c, w, depth + 1)

    def _subtree(self, cell, wnd, depth):
        sub = _Search(self.f, self.max_depth, self.sep_tol, self.panels)
        sub.resolve(cell, wnd, depth)
        return sub.zeros, sub.unresolved

    def split(self, cell: Cell, m: int):
        d = cell.diameter
        offsets = [(0.0, 0.0)] + list(JITTER)
        for dx, dy in offsets:
            at = cell.mid + 1e-3 * d * complex(dx, dy)
            kids = []
            try:
                for c in cell.split(at):
                    kids.append((c, winding(self.f, c, self.panels)))
            except (BoundaryZeroError, WindingError):
                continue
            # conservation of the winding count across the subdivision
            if sum(w.count for _, w in kids) == m:
                return kids
        return None

    def certify(self, cell: Cell, wnd: Winding):
        m = wnd.count
        c = wnd.moments[0] / m
        spread = abs(wnd.moments[1] / m - c * c)
        if m > 1 and spread > (1e-2 * cell.diameter) ** 2:
            return None
        z = self.polish(cell, c, m)
        if z is None:
            return None
        r = min(self.sep_tol / 2, 0.9 * cell.boundary_distance(z))
        if r < 1e-12 * (1 + abs(z)):
            return None
        try:
            w = winding(self.f, Disk(z, r), self.panels)
        except (BoundaryZeroError, WindingError):
            return None
        if w.count != m:
            return None
        return ZeroEntry(z, m, r, float(abs(self.f.jet(z, 0)[0])))

    def polish(self, cell: Cell, z: complex, m: int, iters: int = 60):
        # a zero of multiplicity m is a simple zero of f^(m-1)
        if not cell.contains(z):
            return None
        for _ in range(iters):
            s = self.f.jet(z, m)
            g, dg = complex(s[m - 1]), complex(s[m])
            if dg == 0 or not math.isfinite(abs(g)):
                return None
            step = g / dg
            t = 1.0
            while t > 1e-4:
                zn = z - t * step
                if cell.contains(zn) and abs(complex(self.f.jet(zn, m - 1)[m - 1])) <= abs(g):
                    break
                t *= 0.5
            else:
                return z if abs(step) < 1e-13 * (1 + abs(z)) else None
            z = zn
            if abs(t * step) < 1e-15 * (1 + abs(z)):
                break
        return z


def locate_zeros(f, region, max_depth: int = MAX_DEPTH, sep_tol: float = SEP_TOL,
                 panels: int = PANELS, workers: int = 1) -> ZeroReport:
    """Find all zeros of ``f`` in ``region`` by recursive quadrisection."""
    g = _Adapter(f)
    root = _as_cell(region)
    top = winding(g, root, panels)
    search = _Search(g, max_depth, sep_tol, panels)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            search.resolve(root, top, 0, pool)
    else:
        search.resolve(root, top, 0)
    zeros = tuple(sorted(search.zeros, key=lambda e: (e.location.real, e.location.imag)))
    unresolved = tuple(sorted(search.unresolved, key=lambda e: (e.center.real, e.center.imag)))
    return ZeroReport(zeros, top.count, unresolved)


def exceptional_set(funcs: Sequence[FuncExpr], region, dependence_tol: float = 1e-12,
                    **kwargs) -> ZeroReport:
    """Zeros of ``W(f_0, ..., f_n)`` in ``region``: the only points where a
    nontrivial combination can have an n-deep zero."""
    W = WronskianFunction(funcs)
    z, _ = _as_cell(region).quadrature(8, 8)
    jets = family_jets(funcs, z, W.n)
    hadamard = np.prod(np.linalg.norm(jets, axis=1), axis=0)  # product of column norms
    vals = np.abs(W(z))
    if vals.max() < dependence_tol * hadamard.max():
        msg = "max |W| is negligible on the region: suspected linearly dependent family"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        return ZeroReport(warnings=(msg,))
    return locate_zeros(W, region, **kwargs)
