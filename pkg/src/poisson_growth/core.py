"""Shared geometry: coordinatewise partial order, tagged coordinates for
exact half-open box logic, and grid regions with morphological operations.

Points are plain float64 numpy arrays.  A region is a boolean indicator
over the cells of a rectangular grid; set predicates are discretized by
testing cell centers.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from scipy import ndimage


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite float64 vector, optionally checking dimension."""
    p = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if p.ndim != 1:
        raise ValueError(f"point must be one-dimensional, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point coordinates must be finite")
    if dim is not None and p.shape[0] != dim:
        raise ValueError(f"expected dimension {dim}, got {p.shape[0]}")
    return p


def dominates(x, y, strict: bool = False) -> bool:
    """Whether y dominates x: x <= y coordinatewise (x < y when strict)."""
    xv = as_point(x)
    yv = as_point(y)
    if xv.shape != yv.shape:
        raise ValueError(f"dimension mismatch: {xv.shape[0]} vs {yv.shape[0]}")
    if strict:
        return bool(np.all(xv < yv))
    return bool(np.all(xv <= yv))


class Side(Enum):
    """Which side of a coordinate value a tagged coordinate sits on."""

    AT = "at"
    BEFORE = "before"


@dataclass(frozen=True)
class TaggedCoord:
    """A coordinate value v, taken either exactly (AT) or as v-0 (BEFORE).

    The comparison rule is total: a point coordinate q exceeds (v, AT)
    iff q > v, and exceeds (v, BEFORE) iff q >= v.  BEFORE stands in for
    the open lower boundary of a half-open box without epsilon hacks.
    """

    value: float
    side: Side = Side.AT

    def exceeded_by(self, q: float) -> bool:
        if self.side is Side.AT:
            return q > self.value
        return q >= self.value

    def sort_key(self) -> tuple[float, int]:
        # (v, BEFORE) orders strictly below (v, AT)
        return (self.value, 0 if self.side is Side.BEFORE else 1)


def at(v: float) -> TaggedCoord:
    return TaggedCoord(float(v), Side.AT)


def before(v: float) -> TaggedCoord:
    return TaggedCoord(float(v), Side.BEFORE)


@dataclass(frozen=True)
class TaggedCorner:
    """Lower corner of a box, one tagged coordinate per axis, optional time."""

    coords: tuple[TaggedCoord, ...]
    time: TaggedCoord | None = None

    @property
    def dim(self) -> int:
        return len(self.coords)

    def values(self) -> np.ndarray:
        return np.array([c.value for c in self.coords], dtype=np.float64)

    def befores(self) -> np.ndarray:
        return np.array([c.side is Side.BEFORE for c in self.coords], dtype=bool)

    def admits(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of rows of `points` exceeding this corner on every axis."""
        pts = np.atleast_2d(points)
        v = self.values()
        b = self.befores()
        ok = np.where(b, pts >= v, pts > v)
        return np.all(ok, axis=1)


def corner_at(point, time: TaggedCoord | None = None) -> TaggedCorner:
    p = as_point(point)
    return TaggedCorner(tuple(at(v) for v in p), time)


def corner_before(point, time: TaggedCoord | None = None) -> TaggedCorner:
    p = as_point(point)
    return TaggedCorner(tuple(before(v) for v in p), time)


@dataclass
class GridSpec:
    """Uniform rectangular grid on [lo, hi) with a cell count per axis."""

    lo: np.ndarray
    hi: np.ndarray
    cells: np.ndarray  # positive ints, one per axis

    def __post_init__(self):
        self.lo = as_point(self.lo)
        self.hi = as_point(self.hi, dim=self.lo.shape[0])
        self.cells = np.atleast_1d(np.asarray(self.cells, dtype=np.int64))
        if self.cells.shape[0] != self.lo.shape[0]:
            raise ValueError("cells-per-axis length must match dimension")
        if np.any(self.cells < 1):
            raise ValueError("cell count must be >= 1 per axis")
        if not np.all(self.lo < self.hi):
            raise ValueError("grid requires lo < hi coordinatewise")

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    @property
    def cell_size(self) -> np.ndarray:
        return (self.hi - self.lo) / self.cells

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.cells))

    def axis_centers(self, axis: int) -> np.ndarray:
        h = self.cell_size[axis]
        return self.lo[axis] + h * (np.arange(self.cells[axis]) + 0.5)

    def centers(self) -> np.ndarray:
        """All cell centers as an (n_cells, dim) array in C order."""
        axes = [self.axis_centers(i) for i in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def cell_index(self, point, clamp: bool = False) -> tuple[int, ...] | None:
        """Index of the half-open cell [edge, next_edge) containing `point`.

        Returns None when the point is outside and clamp is False.
        """
        p = as_point(point, dim=self.dim)
        idx = np.floor((p - self.lo) / self.cell_size).astype(np.int64)
        if clamp:
            idx = np.clip(idx, 0, self.cells - 1)
            return tuple(int(i) for i in idx)
        if np.any(idx < 0) or np.any(idx >= self.cells):
            return None
        return tuple(int(i) for i in idx)

    def same_grid(self, other: "GridSpec") -> bool:
        return (
            np.array_equal(self.cells, other.cells)
            and np.allclose(self.lo, other.lo)
            and np.allclose(self.hi, other.hi)
        )

    def to_json(self) -> dict:
        return {
            "lo": self.lo.tolist(),
            "hi": self.hi.tolist(),
            "cells_per_axis": self.cells.tolist(),
        }

    @staticmethod
    def from_json(obj: dict) -> "GridSpec":
        return GridSpec(np.array(obj["lo"]), np.array(obj["hi"]),
                        np.array(obj["cells_per_axis"]))


@dataclass
class GridRegion:
    """Boolean indicator over the cells of a GridSpec."""

    grid: GridSpec
    membership: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.membership, dtype=bool)
        if m.size != self.grid.n_cells:
            raise ValueError("membership size must equal the grid cell count")
        self.membership = m.reshape(tuple(self.grid.cells))

    @property
    def is_empty(self) -> bool:
        return not bool(self.membership.any())

    def member_centers(self) -> np.ndarray:
        return self.grid.centers()[self.membership.ravel()]

    def contains_point(self, point, clamp: bool = False) -> bool:
        """Membership of the cell holding `point`; False outside the grid.

        With clamp=True the point is clamped into the grid first, which
        extends an upper-set indicator monotonically to all of space.
        """
        idx = self.grid.cell_index(point, clamp=clamp)
        if idx is None:
            return False
        return bool(self.membership[idx])

    def complement(self) -> "GridRegion":
        return GridRegion(self.grid, ~self.membership)

    def is_upper_set(self) -> bool:
        """True when membership is nondecreasing along every axis index."""
        m = self.membership
        for ax in range(m.ndim):
            lower = np.take(m, np.arange(m.shape[ax] - 1), axis=ax)
            upper = np.take(m, np.arange(1, m.shape[ax]), axis=ax)
            if np.any(lower & ~upper):
                return False
        return True


def region_from_predicate(grid: GridSpec, predicate) -> GridRegion:
    """Discretize a set: a cell is a member iff its center satisfies it."""
    centers = grid.centers()
    mask = np.fromiter((bool(predicate(c)) for c in centers), dtype=bool,
                       count=centers.shape[0])
    return GridRegion(grid, mask)


def boundary_of(region: GridRegion) -> GridRegion:
    """Cells whose axis-adjacent closed neighborhood meets both the region
    and its complement (two-layer discrete boundary).  Adjacency is taken
    inside the grid, so an all-true or all-false region has no boundary.
    """
    m = region.membership
    if not m.any() or m.all():
        return GridRegion(region.grid, np.zeros_like(m))
    struct = ndimage.generate_binary_structure(m.ndim, 1)  # axis neighbors
    near_member = ndimage.binary_dilation(m, structure=struct)
    near_nonmember = ndimage.binary_dilation(~m, structure=struct)
    return GridRegion(region.grid, near_member & near_nonmember)


def closure_of_complement(region: GridRegion) -> GridRegion:
    """Discrete closure of the complement: complement cells plus member
    cells axis-adjacent to the complement."""
    m = region.membership
    if not m.any():
        return GridRegion(region.grid, np.ones_like(m))
    struct = ndimage.generate_binary_structure(m.ndim, 1)
    near_nonmember = ndimage.binary_dilation(~m, structure=struct)
    return GridRegion(region.grid, (~m) | near_nonmember)


def _box_radii(grid: GridSpec, eps: float) -> tuple[int, ...]:
    # l-infinity ball of radius eps on cell centers, in integer cell offsets
    h = grid.cell_size
    return tuple(int(np.floor(abs(eps) / h[i] + 1e-12)) for i in range(grid.dim))


def morph(region: GridRegion, epsilon: float) -> GridRegion:
    """Open epsilon-neighborhood (epsilon > 0) or epsilon-erosion
    (epsilon < 0) of a region, in the l-infinity metric on cell centers.

    Erosion is the complement of the dilated complement, so the
    opening identity dilate(erode(B)) subset-of B holds exactly.
    """
    if epsilon == 0:
        return GridRegion(region.grid, region.membership.copy())
    radii = _box_radii(region.grid, epsilon)
    size = tuple(2 * r + 1 for r in radii)
    if all(r == 0 for r in radii):
        return GridRegion(region.grid, region.membership.copy())
    struct = np.ones(size, dtype=bool)
    if epsilon > 0:
        out = ndimage.binary_dilation(region.membership, structure=struct)
    else:
        out = ~ndimage.binary_dilation(~region.membership, structure=struct)
    return GridRegion(region.grid, out)


def inclusion_gap(a: GridRegion, b: GridRegion) -> float:
    """Smallest eps >= 0 with a subset-of morph(b, eps), as an l-infinity
    cell-center distance; +inf when b is empty and a is not."""
    if not a.grid.same_grid(b.grid):
        raise ValueError("inclusion_gap requires regions on the same grid")
    if a.is_empty:
        return 0.0
    if b.is_empty:
        return float("inf")
    ca = a.member_centers()
    cb = b.member_centers()
    # max over a-cells of the min l-infinity distance to a b-cell
    gap = 0.0
    for row in ca:
        d = np.min(np.max(np.abs(cb - row), axis=1))
        if d > gap:
            gap = float(d)
    return gap


def save_region(region: GridRegion, csv_path: str | Path,
                sidecar_path: str | Path | None = None) -> None:
    """CSV with header i0,...,i{d-1},member plus a JSON grid sidecar."""
    csv_path = Path(csv_path)
    d = region.grid.dim
    header = [f"i{k}" for k in range(d)] + ["member"]
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for idx in np.ndindex(*region.membership.shape):
            writer.writerow(list(idx) + [int(region.membership[idx])])
    sidecar = Path(sidecar_path) if sidecar_path else csv_path.with_suffix(".json")
    with open(sidecar, "w") as fh:
        json.dump(region.grid.to_json(), fh, indent=2)
        fh.write("\n")


def load_region(csv_path: str | Path,
                sidecar_path: str | Path | None = None) -> GridRegion:
    csv_path = Path(csv_path)
    sidecar = Path(sidecar_path) if sidecar_path else csv_path.with_suffix(".json")
    with open(sidecar) as fh:
        grid = GridSpec.from_json(json.load(fh))
    membership = np.zeros(tuple(grid.cells), dtype=bool)
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            idx = tuple(int(row[f"i{k}"]) for k in range(grid.dim))
            membership[idx] = bool(int(row["member"]))
    return GridRegion(grid, membership)
