import numpy as np
import pytest

from poisson_growth.core import GridRegion, GridSpec, corner_at, \
    region_from_predicate
from poisson_growth.coupling import (
    CoupledState,
    DefectSnapshot,
    couple_evolve,
    defect_from_maximizers,
    save_snapshot,
)
from poisson_growth.growth import RoundedMacroProfile, WedgeProfile
from poisson_growth.macroscopic import FlatMacro, RarefactionMacro
from poisson_growth.poisson import mix64, sample


def flat_state_1d(h=1, n=10.0):
    prof = RoundedMacroProfile(FlatMacro(np.array([1.0])), n)
    grid = GridSpec(np.array([-5.0]), np.array([15.0]), np.array([20]))
    a0 = region_from_predicate(grid, lambda c: c[0] >= 0)
    return CoupledState(prof, a0, h), grid


def box_1d():
    return (corner_at(np.array([-25.0])), np.array([15.0]))


def cloud_1d(seed):
    return sample((np.array([-25.0, 0.0]), np.array([15.0, 8.0])), 1.0, seed)


def test_rejects_non_upper_defect_region():
    prof = RoundedMacroProfile(FlatMacro(np.array([1.0])), 5.0)
    grid = GridSpec(np.array([-1.0]), np.array([1.0]), np.array([4]))
    lower_set = region_from_predicate(grid, lambda c: c[0] < 0)
    with pytest.raises(ValueError, match="upper set"):
        CoupledState(prof, lower_set, 1)


def test_explicit_zeta_must_satisfy_sandwich():
    prof = RoundedMacroProfile(FlatMacro(np.array([1.0])), 5.0)
    grid = GridSpec(np.array([-1.0]), np.array([1.0]), np.array([4]))
    a0 = region_from_predicate(grid, lambda c: c[0] >= 0)
    too_tall = RoundedMacroProfile(FlatMacro(np.array([3.0])), 5.0)
    with pytest.raises(ValueError, match="sandwich|zeta0"):
        CoupledState(prof, a0, 1, zeta_profile=too_tall)


def test_empty_defect_region_stays_empty():
    state, grid = flat_state_1d()
    empty = GridRegion(grid, np.zeros(20, dtype=bool))
    st = CoupledState(state.sigma_profile, empty, 1)
    snap = couple_evolve(st, cloud_1d(3), grid, 8.0, box_1d())
    assert not snap.inA.any()
    assert snap.boundary.is_empty


def test_full_defect_region_stays_full():
    state, grid = flat_state_1d()
    full = GridRegion(grid, np.ones(20, dtype=bool))
    st = CoupledState(state.sigma_profile, full, 2)
    snap = couple_evolve(st, cloud_1d(4), grid, 8.0, box_1d())
    assert snap.inA.all()


def test_sandwich_holds_at_every_cell():
    state, grid = flat_state_1d(h=3)
    for seed in range(8):
        snap = couple_evolve(state, cloud_1d(mix64(5, seed)), grid, 8.0, box_1d())
        assert np.all(snap.zeta >= snap.sigma)
        assert np.all(snap.zeta <= snap.sigma + 3)


@pytest.mark.parametrize("h", [1, 3])
def test_maximizer_route_matches_coupling_d1(h):
    state, grid = flat_state_1d(h=h)
    for seed in range(25):
        cloud = cloud_1d(mix64(6 + h, seed))
        s1 = couple_evolve(state, cloud, grid, 8.0, box_1d())
        s2 = defect_from_maximizers(state, cloud, grid, 8.0, box_1d())
        assert np.array_equal(s1.inA, s2.inA)


@pytest.mark.parametrize("h", [1, 3])
def test_maximizer_route_matches_coupling_d2(h):
    prof = WedgeProfile(np.zeros(2))
    grid = GridSpec(np.zeros(2), np.array([2.0, 2.0]), np.array([8, 8]))
    a0 = region_from_predicate(grid, lambda c: c[0] + c[1] >= 1.5)
    state = CoupledState(prof, a0, h)
    box = (corner_at(np.zeros(2)), np.array([2.0, 2.0]))
    for seed in range(25):
        cloud = sample((np.array([0, 0, 0.0]), np.array([2.0, 2.0, 3.0])),
                       3.0, mix64(60 + h, seed))
        s1 = couple_evolve(state, cloud, grid, 3.0, box)
        s2 = defect_from_maximizers(state, cloud, grid, 3.0, box)
        assert np.array_equal(s1.inA, s2.inA)


def test_wedge_defect_membership_from_maximizer_location():
    # A(0) = {y >= y*} relative to a wedge: membership tracks maximizers
    prof = WedgeProfile(np.zeros(2))
    grid = GridSpec(np.zeros(2), np.array([2.0, 2.0]), np.array([10, 10]))
    a0 = region_from_predicate(grid, lambda c: np.all(c >= 0.8))
    state = CoupledState(prof, a0, 1)
    box = (corner_at(np.zeros(2)), np.array([2.0, 2.0]))
    for seed in range(10):
        cloud = sample((np.array([0, 0, 0.0]), np.array([2.0, 2.0, 2.0])),
                       4.0, mix64(91, seed))
        s1 = couple_evolve(state, cloud, grid, 2.0, box)
        s2 = defect_from_maximizers(state, cloud, grid, 2.0, box)
        assert np.array_equal(s1.inA, s2.inA)


def test_defect_monotone_in_initial_region():
    prof = RoundedMacroProfile(FlatMacro(np.array([1.0])), 10.0)
    grid = GridSpec(np.array([-5.0]), np.array([15.0]), np.array([20]))
    small = region_from_predicate(grid, lambda c: c[0] >= 5.0)
    large = region_from_predicate(grid, lambda c: c[0] >= 0.0)
    st_small = CoupledState(prof, small, 1)
    st_large = CoupledState(prof, large, 1)
    for seed in range(10):
        cloud = cloud_1d(mix64(14, seed))
        a_small = couple_evolve(st_small, cloud, grid, 8.0, box_1d()).inA
        a_large = couple_evolve(st_large, cloud, grid, 8.0, box_1d()).inA
        assert not np.any(a_small & ~a_large)


def test_defect_set_is_an_interval_in_one_dimension():
    state, grid = flat_state_1d()
    for seed in range(10):
        snap = couple_evolve(state, cloud_1d(mix64(15, seed)), grid, 8.0,
                             box_1d())
        idx = np.flatnonzero(snap.inA.ravel())
        if len(idx):
            assert np.array_equal(idx, np.arange(idx[0], idx[-1] + 1))


def test_rarefaction_defect_boundary_lands_in_the_strip():
    # scaled-down surrogate of the containment statement
    n, t = 40.0, 1.0
    prof = RoundedMacroProfile(RarefactionMacro(np.array([1.0]),
                                                np.array([2.0])), n)
    grid = GridSpec(n * np.array([-0.5]), n * np.array([1.6]), np.array([42]))
    a_grid = GridSpec(np.array([-150.0]), np.array([70.0]), np.array([80]))
    a0 = region_from_predicate(a_grid, lambda y: y[0] >= 0)
    state = CoupledState(prof, a0, 1)
    box = (corner_at(np.array([-140.0])), np.array([64.0]))
    hits = 0
    for seed in range(10):
        cloud = sample((np.array([-150.0, 0.0]), np.array([64.0, n * t])),
                       1.0, mix64(33, seed))
        snap = couple_evolve(state, cloud, grid, n * t, box)
        idx = np.flatnonzero(snap.inA.ravel())
        if not len(idx):
            continue
        loc = float(grid.centers().ravel()[idx[0]]) / n
        if 0.25 - 0.2 <= loc <= 1.0 + 0.2:
            hits += 1
    assert hits >= 8


def test_snapshot_roundtrip_and_boundary_definition(tmp_path):
    state, grid = flat_state_1d()
    snap = couple_evolve(state, cloud_1d(77), grid, 8.0, box_1d())
    from poisson_growth.core import boundary_of
    assert np.array_equal(snap.boundary.membership,
                          boundary_of(snap.region).membership)
    save_snapshot(snap, tmp_path / "snap.csv", sidecar={"h": 1})
    text = (tmp_path / "snap.csv").read_text().splitlines()
    assert text[0].startswith("t,i0,sigma") or text[0].startswith("t,i0,")
    assert len(text) == 1 + grid.n_cells
