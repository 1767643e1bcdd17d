import cmath

import numpy as np
import pytest

from deepzero import holofunc as hf
from deepzero import rootfinder as rf
from deepzero import wronskian as wr
from deepzero.errors import BoundaryZeroError, PreconditionError

one, z, z2, z3 = (hf.Monomial(k) for k in range(4))


def poly_from_roots(roots):
    return hf.Polynomial(tuple(np.poly(roots)[::-1]))


def test_count_examples():
    assert rf.count_zeros(z2, rf.Disk(0, 0.5)) == 2
    assert rf.count_zeros(hf.ExpAtom(1), rf.Disk(0, 1)) == 0
    W = wr.WronskianFunction([one, z2])
    assert rf.count_zeros(W, rf.Rectangle(-0.5 - 0.5j, 0.5 + 0.5j)) == 1


def test_count_on_annulus_and_clipped_disk():
    f = poly_from_roots([0.1, 0.5j, -1.5, 2.5])
    assert rf.count_zeros(f, rf.Annulus(0, 0.3, 2)) == 2
    assert rf.count_zeros(f, rf.Disk(0, 3, clip=0.9)) == 2


def test_boundary_zero_is_rejected():
    with pytest.raises(BoundaryZeroError):
        rf.count_zeros(hf.Polynomial((-0.5, 1)), rf.Disk(0, 0.5))


def test_zero_just_inside_the_contour():
    # 1e-5 from the circle: only panels near the zero need refining
    a = 0.5 * cmath.exp(0.4j) * (1 - 2e-5)
    w = rf.winding(hf.Polynomial((-a, 1)) * hf.Polynomial((0.1, 1)), rf.Disk(0, 0.5))
    assert w.count == 2 and w.panels < rf.MAX_PANELS
    assert rf.count_zeros(hf.Polynomial((-a / (1 - 4e-5), 1)), rf.Disk(0, 0.5)) == 0


def test_regions_validate():
    with pytest.raises(PreconditionError):
        rf.Disk(0, -1)
    with pytest.raises(PreconditionError):
        rf.Annulus(0, 2, 1)
    with pytest.raises(PreconditionError):
        rf.Rectangle(1 + 1j, 0j)


def test_square_doubles_count():
    f = poly_from_roots([0.2 + 0.1j, -0.4, 0.6j])
    box = rf.Disk(0.1, 0.8)
    assert rf.count_zeros(f * f, box) == 2 * rf.count_zeros(f, box)


def test_cell_conserves_winding():
    f = poly_from_roots([0.21 + 0.13j, -0.37 - 0.4j, 0.55, -0.6j])
    cell = rf.Disk(0, 0.9).root_cell()
    total = rf.count_zeros(f, cell)
    kids = cell.split(cell.mid + 0.013 + 0.007j)
    assert sum(rf.count_zeros(f, k) for k in kids) == total == 4


def test_locate_examples():
    W = wr.WronskianFunction([one, z2, z3])
    rep = rf.locate_zeros(W, rf.Disk(0, 0.8))
    assert len(rep.zeros) == 1 and rep.zeros[0].multiplicity == 2 and abs(rep.zeros[0].location) < 1e-6
    rep = rf.locate_zeros(poly_from_roots([0.3, -0.4j]), rf.Rectangle(-1 - 1j, 1 + 1j))
    locs = sorted((e.location for e in rep.zeros), key=lambda w: w.imag)
    assert [e.multiplicity for e in rep.zeros] == [1, 1]
    assert abs(locs[0] + 0.4j) < 1e-9 and abs(locs[1] - 0.3) < 1e-9
    rep = rf.locate_zeros(hf.Polynomial((5,)), rf.Disk(0, 1))
    assert rep.zeros == () and rep.unresolved == () and rep.total_count == 0


@pytest.mark.parametrize("seed", range(10))
def test_random_polynomials_are_located_exactly(seed):
    rng = np.random.default_rng(seed)
    deg = int(rng.integers(1, 9))
    roots = 0.85 * np.sqrt(rng.random(deg)) * np.exp(2j * np.pi * rng.random(deg))
    rep = rf.locate_zeros(poly_from_roots(roots), rf.Disk(0, 1))
    assert rep.unresolved == ()
    assert sum(e.multiplicity for e in rep.zeros) == deg
    for r in roots:
        e = min(rep.zeros, key=lambda e: abs(e.location - r))
        assert abs(e.location - r) <= max(e.enclosure_radius, 1e-9)


def test_multiple_roots():
    f = hf.Power(hf.Polynomial((-0.3 - 0.2j, 1)), 3) * hf.Polynomial((0.5, 1))
    rep = rf.locate_zeros(f, rf.Disk(0, 0.9))
    mults = sorted(e.multiplicity for e in rep.zeros)
    assert mults == [1, 3]
    g = (hf.ExpAtom(1) - 1) ** 2
    rep = rf.locate_zeros(g, rf.Disk(0.1, 1))
    assert [e.multiplicity for e in rep.zeros] == [2]


def test_rounded_cluster_is_never_split_into_fake_zeros():
    # expanded coefficients smear a triple root into a cluster at the noise level
    f = poly_from_roots([0.3 + 0.2j] * 3 + [-0.5])
    rep = rf.locate_zeros(f, rf.Disk(0, 0.9))
    near = [e for e in rep.zeros if abs(e.location - (0.3 + 0.2j)) < 1e-3]
    held = sum(e.multiplicity for e in near) + sum(
        u.count for u in rep.unresolved if abs(u.center - (0.3 + 0.2j)) < 1e-3)
    assert held == 3 and rep.total_count == 4


def test_parallel_search_matches_serial():
    f = poly_from_roots([0.1, -0.5 + 0.2j, 0.3 - 0.6j, 0.7j, -0.2 - 0.2j])
    a = rf.locate_zeros(f, rf.Disk(0, 0.95))
    b = rf.locate_zeros(f, rf.Disk(0, 0.95), workers=4)
    assert [e.location for e in a.zeros] == [e.location for e in b.zeros]


def test_depth_exhaustion_is_reported():
    f = poly_from_roots([0.2, 0.2 + 1e-9])
    rep = rf.locate_zeros(f, rf.Disk(0, 0.5), max_depth=3)
    assert rep.total_count == 2
    assert sum(u.count for u in rep.unresolved) + sum(e.multiplicity for e in rep.zeros) == 2


def test_exceptional_set_examples():
    rep = rf.exceptional_set([one, z2], rf.Disk(0, 0.9))
    assert [(e.multiplicity, abs(e.location) < 1e-6) for e in rep.zeros] == [(1, True)]
    assert rf.exceptional_set([one, z, z2], rf.Disk(0, 0.9)).zeros == ()
    assert rf.exceptional_set([hf.ExpAtom(-1), hf.ExpAtom(1)], rf.Disk(0, 2)).zeros == ()


def test_exceptional_set_warns_on_dependent_family():
    with pytest.warns(RuntimeWarning):
        rep = rf.exceptional_set([z, hf.Scale(z, 2)], rf.Disk(0, 0.9))
    assert rep.warnings


def test_exceptional_set_in_the_disk_with_blaschke_factors():
    B = hf.BlaschkeFactor(0.5) * hf.BlaschkeFactor(-0.3j)
    rep = rf.exceptional_set([one, z, B], rf.Disk(0, 0.9))
    # W(1, z, B) = B''; compare against locating B'' directly
    ref = rf.locate_zeros(hf.nth_derivative(B, 2), rf.Disk(0, 0.9))
    assert [e.multiplicity for e in rep.zeros] == [e.multiplicity for e in ref.zeros]
    for a, b in zip(rep.zeros, ref.zeros):
        assert abs(a.location - b.location) < 1e-6
