import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poisson_growth.core import (
    GridRegion,
    GridSpec,
    TaggedCoord,
    at,
    before,
    boundary_of,
    closure_of_complement,
    corner_at,
    dominates,
    inclusion_gap,
    load_region,
    morph,
    region_from_predicate,
    save_region,
)

points = st.lists(st.integers(-5, 5), min_size=3, max_size=3).map(np.array)


def test_dominates_trivial_cases():
    assert dominates((1, 2), (2, 3), strict=True)
    assert not dominates((1, 2), (2, 1))
    x = np.array([0.5, -1.0])
    assert dominates(x, x)
    assert not dominates(x, x, strict=True)


def test_dominates_dimension_mismatch():
    with pytest.raises(ValueError):
        dominates((1, 2), (1, 2, 3))


@given(points, points, points)
def test_dominates_is_partial_order(x, y, z):
    assert dominates(x, x)
    if dominates(x, y) and dominates(y, x):
        assert np.array_equal(x, y)
    if dominates(x, y) and dominates(y, z):
        assert dominates(x, z)


@given(st.floats(-5, 5), st.floats(-5, 5), st.booleans())
def test_tagged_coord_comparison_rule(q, v, is_before):
    tc = before(v) if is_before else at(v)
    if is_before:
        assert tc.exceeded_by(q) == (q >= v)
    else:
        assert tc.exceeded_by(q) == (q > v)


def test_tagged_corner_admits_is_exact_on_equal_coordinates():
    pts = np.array([[1.0, 2.0], [1.5, 2.0], [1.0, 2.5]])
    corner = corner_at((1.0, 2.0))
    assert list(corner.admits(pts)) == [False, False, False]
    from poisson_growth.core import TaggedCorner

    corner_b = TaggedCorner((before(1.0), before(2.0)))
    assert list(corner_b.admits(pts)) == [True, True, True]


def _grid2(n=10, lo=(0.0, 0.0), hi=(1.0, 1.0)):
    return GridSpec(np.array(lo), np.array(hi), np.array([n, n]))


def test_boundary_of_full_and_empty_regions_is_empty():
    g = _grid2()
    full = GridRegion(g, np.ones(g.n_cells, dtype=bool))
    empty = GridRegion(g, np.zeros(g.n_cells, dtype=bool))
    assert boundary_of(full).is_empty
    assert boundary_of(empty).is_empty


def test_boundary_of_half_space_is_two_cell_layers():
    # oracle: enumerate adjacency by hand on the 10x10 grid
    g = _grid2(10)
    member = np.zeros((10, 10), dtype=bool)
    member[5:, :] = True  # half-space i0 >= 5
    expected = np.zeros((10, 10), dtype=bool)
    for i in range(10):
        for j in range(10):
            neigh = [(i, j), (i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)]
            neigh = [(a, b) for a, b in neigh if 0 <= a < 10 and 0 <= b < 10]
            vals = {member[a, b] for a, b in neigh}
            expected[i, j] = len(vals) == 2
    got = boundary_of(GridRegion(g, member))
    assert np.array_equal(got.membership, expected)
    assert np.array_equal(np.unique(np.nonzero(got.membership)[0]), [4, 5])


def test_morph_zero_is_identity():
    g = _grid2(8)
    rng = np.random.default_rng(0)
    reg = GridRegion(g, rng.random(64) < 0.4)
    out = morph(reg, 0.0)
    assert np.array_equal(out.membership, reg.membership)


def test_morph_single_cell_dilation_gives_5x5_block():
    g = _grid2(11)
    member = np.zeros((11, 11), dtype=bool)
    member[5, 5] = True
    h = g.cell_size[0]
    out = morph(GridRegion(g, member), 2 * h)
    expected = np.zeros((11, 11), dtype=bool)
    expected[3:8, 3:8] = True
    assert np.array_equal(out.membership, expected)


@given(st.integers(0, 2 ** 25 - 1), st.integers(1, 3))
@settings(max_examples=40)
def test_morph_erosion_dilation_contracts(bits, k):
    g = _grid2(5)
    member = np.array([(bits >> i) & 1 for i in range(25)], dtype=bool)
    reg = GridRegion(g, member)
    eps = k * g.cell_size[0]
    opened = morph(morph(reg, -eps), eps)
    assert not np.any(opened.membership & ~reg.membership)


@given(st.integers(0, 2 ** 25 - 1), st.integers(0, 2 ** 25 - 1), st.integers(1, 2))
@settings(max_examples=40)
def test_morph_is_monotone_in_the_region(bits_b, bits_c, k):
    g = _grid2(5)
    mb = np.array([(bits_b >> i) & 1 for i in range(25)], dtype=bool)
    mc = mb | np.array([(bits_c >> i) & 1 for i in range(25)], dtype=bool)
    eps = k * g.cell_size[0]
    for e in (eps, -eps):
        db = morph(GridRegion(g, mb), e)
        dc = morph(GridRegion(g, mc), e)
        assert not np.any(db.membership & ~dc.membership)


def test_boundary_is_contained_in_region_union_one_cell_dilation():
    g = _grid2(9)
    rng = np.random.default_rng(3)
    reg = GridRegion(g, rng.random(81) < 0.5)
    bd = boundary_of(reg)
    hull = morph(reg, g.cell_size[0]).membership | reg.membership
    assert not np.any(bd.membership & ~hull)


def test_inclusion_gap_subset_is_zero_and_empty_b_is_inf():
    g = _grid2(6)
    rng = np.random.default_rng(5)
    mb = rng.random(36) < 0.5
    ma = mb & (rng.random(36) < 0.7)
    a, b = GridRegion(g, ma), GridRegion(g, mb)
    assert inclusion_gap(a, b) == 0.0
    empty = GridRegion(g, np.zeros(36, dtype=bool))
    if not a.is_empty:
        assert inclusion_gap(a, empty) == float("inf")
    assert inclusion_gap(empty, b) == 0.0


def test_inclusion_gap_shift_by_one_cell_is_one_cell_width():
    g = _grid2(10)
    ma = np.zeros((10, 10), dtype=bool)
    ma[2:5, 2:5] = True
    mb = np.roll(ma, 1, axis=0)
    a, b = GridRegion(g, ma), GridRegion(g, mb)
    # brute-force oracle over cell pairs
    ca, cb = a.member_centers(), b.member_centers()
    expected = max(np.min(np.max(np.abs(cb - row), axis=1)) for row in ca)
    got = inclusion_gap(a, b)
    assert got == pytest.approx(expected)
    assert got == pytest.approx(g.cell_size[0])


def test_inclusion_gap_zero_iff_subset():
    g = _grid2(5)
    rng = np.random.default_rng(11)
    for _ in range(20):
        ma = rng.random(25) < 0.4
        mb = rng.random(25) < 0.4
        a, b = GridRegion(g, ma), GridRegion(g, mb)
        gap = inclusion_gap(a, b)
        subset = not np.any(a.membership & ~b.membership)
        assert (gap == 0.0) == subset


def test_region_predicate_and_upper_set_check():
    g = _grid2(8, lo=(-1, -1), hi=(1, 1))
    reg = region_from_predicate(g, lambda c: c[0] + c[1] >= 0)
    assert reg.is_upper_set()
    assert not reg.complement().is_upper_set()


def test_closure_of_complement_adds_inner_layer():
    g = _grid2(6)
    member = np.zeros((6, 6), dtype=bool)
    member[3:, :] = True
    cc = closure_of_complement(GridRegion(g, member))
    assert cc.membership[:4, :].all()
    assert not cc.membership[4:, :].any()


def test_region_csv_roundtrip(tmp_path):
    g = GridSpec(np.array([-1.0, 0.0]), np.array([1.0, 2.0]), np.array([4, 6]))
    rng = np.random.default_rng(7)
    reg = GridRegion(g, rng.random(24) < 0.5)
    path = tmp_path / "region.csv"
    save_region(reg, path)
    back = load_region(path)
    assert back.grid.same_grid(g)
    assert np.array_equal(back.membership, reg.membership)
