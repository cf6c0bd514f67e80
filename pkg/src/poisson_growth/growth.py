"""The microscopic height process.

Three mutually checking evaluators of the variational growth formula

    sigma(x, t) = sup over y <= x of { sigma0(y) + H((y,0), (x,t)) },

where H counts the longest strictly increasing chain of cloud points in
the space-time box above (y, 0):

  * evaluate_lpp       last-passage recursion over cloud points,
  * evaluate_oracle    finite candidate-grid reduction of the supremum,
  * simulate_event_driven

and the local machinery (jump regions, generator application) behind the
event-driven dynamics: at a cloud point (y, s) the height rises by one on
the level set {w >= y : sigma(w) = sigma(y)}.
"""

from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .chain import longest_chain
from .core import GridRegion, TaggedCoord, TaggedCorner, as_point, at, before
from .macroscopic import (
    FlatMacro,
    GridMacro,
    MacroProfile,
    RarefactionMacro,
    ShockMacro,
)
from .poisson import PointCloud

NEG_INF = -np.inf


# ---------------------------------------------------------------------------
# staircase fields


@dataclass
class StaircaseField:
    """Integer-valued field, constant on left-closed right-open rectangles.

    `breaks[i]` is the sorted breakpoint list of axis i and starts at the
    window's lower corner; `values` has one entry per cell.  Outside the
    window the field is -inf below the lower corner (any coordinate) and
    clamps to the nearest cell elsewhere, which keeps a monotone field
    monotone on all of space.
    """

    breaks: list[np.ndarray]
    values: np.ndarray = field(repr=False)
    hi: np.ndarray = None

    def __post_init__(self):
        self.breaks = [np.asarray(b, dtype=np.float64) for b in self.breaks]
        self.values = np.asarray(self.values, dtype=np.float64)
        shape = tuple(len(b) for b in self.breaks)
        if self.values.shape != shape:
            raise ValueError(f"values shape {self.values.shape} != cells {shape}")
        self.hi = as_point(self.hi, dim=len(self.breaks))
        for i, b in enumerate(self.breaks):
            if b.size == 0 or np.any(np.diff(b) <= 0) or b[-1] >= self.hi[i]:
                raise ValueError("breakpoints must be sorted and below hi")

    @property
    def dim(self) -> int:
        return len(self.breaks)

    @property
    def lo(self) -> np.ndarray:
        return np.array([b[0] for b in self.breaks])

    def copy(self) -> "StaircaseField":
        return StaircaseField([b.copy() for b in self.breaks],
                              self.values.copy(), self.hi.copy())

    def is_monotone(self) -> bool:
        for ax in range(self.values.ndim):
            d = np.diff(self.values, axis=ax)
            if d.size and not np.all((d >= 0) | np.isnan(d)):
                return False
        return True

    def _axis_indices(self, coords: np.ndarray, axis: int,
                      befores: np.ndarray | None = None) -> np.ndarray:
        b = self.breaks[axis]
        idx = np.searchsorted(b, coords, side="right") - 1
        if befores is not None:
            idx_b = np.searchsorted(b, coords, side="left") - 1
            idx = np.where(befores, idx_b, idx)
        return np.minimum(idx, len(b) - 1)

    def value_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        n = pts.shape[0]
        out = np.empty(n)
        idx = np.empty((n, self.dim), dtype=np.int64)
        below = np.zeros(n, dtype=bool)
        for ax in range(self.dim):
            ix = self._axis_indices(pts[:, ax], ax)
            below |= ix < 0
            idx[:, ax] = np.maximum(ix, 0)
        out = self.values[tuple(idx[:, k] for k in range(self.dim))]
        out = np.where(below, NEG_INF, out)
        return out

    def value_at(self, y) -> float:
        return float(self.value_many(np.atleast_2d(as_point(y, self.dim)))[0])

    def tagged_many(self, vals: np.ndarray, befores: np.ndarray) -> np.ndarray:
        vals = np.atleast_2d(vals)
        befores = np.atleast_2d(befores)
        n = vals.shape[0]
        idx = np.empty((n, self.dim), dtype=np.int64)
        below = np.zeros(n, dtype=bool)
        for ax in range(self.dim):
            ix = self._axis_indices(vals[:, ax], ax, befores[:, ax])
            below |= ix < 0
            idx[:, ax] = np.maximum(ix, 0)
        out = self.values[tuple(idx[:, k] for k in range(self.dim))]
        return np.where(below, NEG_INF, out)

    def refine(self, y: np.ndarray) -> tuple[int, ...]:
        """Insert y's coordinates as breakpoints; return y's cell index."""
        pos = []
        for ax in range(self.dim):
            b = self.breaks[ax]
            i = int(np.searchsorted(b, y[ax], side="right"))
            if i > 0 and b[i - 1] == y[ax]:
                pos.append(i - 1)
                continue
            if y[ax] >= self.hi[ax] or y[ax] < b[0]:
                raise ValueError("refinement point outside the window")
            self.breaks[ax] = np.insert(b, i, y[ax])
            self.values = np.insert(self.values, i, np.take(self.values, i - 1,
                                                            axis=ax), axis=ax)
            pos.append(i)
        return tuple(pos)

    def increment_level_set_above(self, y: np.ndarray) -> None:
        """Raise by one on {w >= y : value(w) = value(y)}; no-op at +-inf."""
        v = self.value_at(y)
        if not np.isfinite(v):
            return
        if np.any(y >= self.hi):
            # {w >= y} misses the window entirely (top face, measure zero)
            return
        idx = self.refine(y)
        region = self.values[tuple(slice(i, None) for i in idx)]
        region[region == v] += 1.0

    def cell_boxes(self):
        """Iterate (lo_corner, hi_corner, value) over all cells."""
        edges = [np.append(self.breaks[ax], self.hi[ax]) for ax in range(self.dim)]
        for idx in np.ndindex(*self.values.shape):
            lo = np.array([self.breaks[ax][idx[ax]] for ax in range(self.dim)])
            hi = np.array([edges[ax][idx[ax] + 1] for ax in range(self.dim)])
            yield lo, hi, float(self.values[idx])


def wedge_field(corner, hi) -> StaircaseField:
    """The basic wedge: zero above `corner`, -inf elsewhere."""
    c = as_point(corner)
    h = as_point(hi, dim=c.shape[0])
    return StaircaseField([np.array([v]) for v in c],
                          np.zeros((1,) * c.shape[0]), h)


# ---------------------------------------------------------------------------
# initial-profile specifications


class ProfileSpec:
    """Initial height data sigma0, evaluable exactly at points, at tagged
    corners (mixed one-sided limits) and as suprema over corner sets."""

    dim: int

    def value_many(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def value(self, y) -> float:
        return float(self.value_many(np.atleast_2d(as_point(y, self.dim)))[0])

    def tagged_many(self, vals: np.ndarray, befores: np.ndarray) -> np.ndarray:
        """Limit of the profile at mixed tagged coordinates: axis i is
        approached from strictly below when befores[:, i] is set."""
        raise NotImplementedError

    def value_tagged(self, corner: TaggedCorner) -> float:
        return float(self.tagged_many(corner.values()[None, :],
                                      corner.befores()[None, :])[0])

    def sup_below_many(self, pts: np.ndarray) -> np.ndarray:
        """sup of the profile over {y : y < p strictly, all axes}."""
        pts = np.atleast_2d(pts)
        return self.tagged_many(pts, np.ones(pts.shape, dtype=bool))

    def sup_box_many(self, pts: np.ndarray) -> np.ndarray:
        """sup of the profile over {y : y <= p}; the value itself for
        monotone data."""
        return self.value_many(pts)

    def axis_breakpoints(self, lo: np.ndarray, hi: np.ndarray) -> list[np.ndarray]:
        """Per-axis discontinuity coordinates inside (lo, hi]."""
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass
class WedgeProfile(ProfileSpec):
    """sigma0 = 0 on {y >= corner}, -inf elsewhere."""

    corner: np.ndarray

    def __post_init__(self):
        self.corner = as_point(self.corner)
        self.dim = self.corner.shape[0]

    def value_many(self, pts):
        pts = np.atleast_2d(pts)
        ok = np.all(pts >= self.corner, axis=1)
        return np.where(ok, 0.0, NEG_INF)

    def tagged_many(self, vals, befores):
        vals = np.atleast_2d(vals)
        befores = np.atleast_2d(befores)
        ok = np.where(befores, vals > self.corner, vals >= self.corner)
        return np.where(np.all(ok, axis=1), 0.0, NEG_INF)

    def axis_breakpoints(self, lo, hi):
        out = []
        for i in range(self.dim):
            v = float(self.corner[i])
            out.append(np.array([v]) if lo[i] < v <= hi[i] else np.empty(0))
        return out

    def describe(self):
        return {"variant": "wedge", "corner": self.corner.tolist()}


@dataclass
class RoundedMacroProfile(ProfileSpec):
    """sigma0(y) = floor(n * u0(y / n)) for a macroscopic profile u0.

    Strictly increasing u0 (flat, shock, rarefaction) have one-sided
    limits floor(w-) = ceil(w) - 1 whenever any coordinate is approached
    from below; grid u0 uses per-axis staircase limits.
    """

    macro: MacroProfile
    scale: float

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        self.dim = self.macro.dim

    def _w(self, pts):
        # flat/shock/rarefaction data is 1-homogeneous, so n*u0(y/n) equals
        # u0(y) exactly; evaluating directly avoids float noise that would
        # flip floor/ceil at lattice points
        if isinstance(self.macro, GridMacro):
            return self.scale * self.macro.u0_many(np.atleast_2d(pts) / self.scale)
        return self.macro.u0_many(np.atleast_2d(pts))

    def value_many(self, pts):
        return np.floor(self._w(pts))

    def tagged_many(self, vals, befores):
        vals = np.atleast_2d(vals)
        befores = np.atleast_2d(befores)
        any_before = np.any(befores, axis=1)
        if isinstance(self.macro, GridMacro):
            w = self.scale * self.macro.u0_tagged_many(vals / self.scale, befores)
            return np.floor(w)
        w = self._w(vals)
        return np.where(any_before, np.ceil(w) - 1.0, np.floor(w))

    def axis_breakpoints(self, lo, hi):
        if isinstance(self.macro, GridMacro):
            g = self.macro.grid
            return [self.scale * g.lo[i]
                    + self.scale * g.cell_size[i] * np.arange(1, g.cells[i])
                    for i in range(self.dim)]
        if self.dim > 1:
            # discontinuities are diagonal; the oracle covers them with
            # both-tag candidates at cloud coordinates instead
            return [np.empty(0) for _ in range(self.dim)]
        slopes = []
        if isinstance(self.macro, FlatMacro):
            slopes = [float(self.macro.rho[0])]
        elif isinstance(self.macro, (ShockMacro, RarefactionMacro)):
            slopes = [float(self.macro.rho[0]), float(self.macro.lam[0])]
        pts: set[float] = set()
        for s in slopes:
            k_lo = int(np.ceil(s * lo[0]))
            k_hi = int(np.floor(s * hi[0]))
            for k in range(k_lo, k_hi + 1):
                y = k / s
                if lo[0] < y <= hi[0]:
                    pts.add(y)
        return [np.array(sorted(pts))]

    def describe(self):
        return {"variant": "rounded_macro", "scale": self.scale,
                "macro": self.macro.describe()}


@dataclass
class StaircaseProfile(ProfileSpec):
    """sigma0 given directly by a staircase field."""

    field: StaircaseField

    def __post_init__(self):
        self.dim = self.field.dim
        if not self.field.is_monotone():
            raise ValueError("staircase profile must be monotone")

    def value_many(self, pts):
        return self.field.value_many(pts)

    def tagged_many(self, vals, befores):
        return self.field.tagged_many(vals, befores)

    def axis_breakpoints(self, lo, hi):
        return [b[(lo[i] < b) & (b <= hi[i])]
                for i, b in enumerate(self.field.breaks)]

    def describe(self):
        return {"variant": "staircase",
                "cells": list(self.field.values.shape)}


def _region_tagged_membership(region: GridRegion, vals: np.ndarray,
                              befores: np.ndarray) -> np.ndarray:
    """Clamped cell membership of tagged points (BEFORE steps one cell
    down across exact cell edges)."""
    g = region.grid
    vals = np.atleast_2d(vals)
    befores = np.atleast_2d(befores)
    u = (vals - g.lo) / g.cell_size
    idx = np.floor(u).astype(np.int64)
    idx_b = np.ceil(u).astype(np.int64) - 1
    idx = np.where(befores, idx_b, idx)
    idx = np.clip(idx, 0, g.cells - 1)
    return region.membership[tuple(idx[:, k] for k in range(g.dim))]


@dataclass
class DefectProfile(ProfileSpec):
    """base + h on a region, base elsewhere: the taller initial state of
    a coupled pair.  The region indicator is extended to all of space by
    clamping into its grid, and must be an upper set so the sum stays
    monotone."""

    base: ProfileSpec
    region: GridRegion
    h: int

    def __post_init__(self):
        if self.h < 1:
            raise ValueError("defect offset h must be a positive integer")
        if not self.region.is_upper_set():
            raise ValueError(
                "defect region must be an upper set; the shifted profile "
                "would not be monotone")
        self.dim = self.base.dim

    def value_many(self, pts):
        pts = np.atleast_2d(pts)
        bump = _region_tagged_membership(self.region, pts,
                                         np.zeros(pts.shape, dtype=bool))
        return self.base.value_many(pts) + self.h * bump

    def tagged_many(self, vals, befores):
        bump = _region_tagged_membership(self.region, vals, befores)
        return self.base.tagged_many(vals, befores) + self.h * bump

    def axis_breakpoints(self, lo, hi):
        out = []
        g = self.region.grid
        for i, b in enumerate(self.base.axis_breakpoints(lo, hi)):
            edges = g.lo[i] + g.cell_size[i] * np.arange(g.cells[i] + 1)
            edges = edges[(lo[i] < edges) & (edges <= hi[i])]
            out.append(np.unique(np.concatenate([b, edges])))
        return out

    def describe(self):
        return {"variant": "defect", "h": self.h, "base": self.base.describe()}


@dataclass
class RestrictedProfile(ProfileSpec):
    """base on {membership == inside}, -inf elsewhere, where membership
    is the clamped region indicator.

    Supremum queries enumerate the region's cells exactly (edge cells
    extend to infinity on their outer sides through the clamping), so
    the profile may be non-monotone (inside=False restricts to a lower
    set) and the variational evaluator still sees exact suprema.
    """

    base: ProfileSpec
    region: GridRegion
    inside: bool = True

    def __post_init__(self):
        self.dim = self.base.dim
        g = self.region.grid
        sel = np.argwhere(self.region.membership == self.inside)
        edges = [np.append(g.lo[i] + g.cell_size[i] * np.arange(g.cells[i]),
                           g.hi[i]) for i in range(g.dim)]
        self._cell_lo = np.empty((len(sel), g.dim))
        self._cell_hi = np.empty((len(sel), g.dim))
        for r, idx in enumerate(sel):
            for i in range(g.dim):
                self._cell_lo[r, i] = -np.inf if idx[i] == 0 else edges[i][idx[i]]
                self._cell_hi[r, i] = (np.inf if idx[i] == g.cells[i] - 1
                                       else edges[i][idx[i] + 1])

    def value_many(self, pts):
        pts = np.atleast_2d(pts)
        member = _region_tagged_membership(self.region, pts,
                                           np.zeros(pts.shape, dtype=bool))
        keep = member == self.inside
        return np.where(keep, self.base.value_many(pts), NEG_INF)

    def tagged_many(self, vals, befores):
        raise NotImplementedError("restricted profiles join the variational "
                                  "evaluator only; use sup_* queries")

    def _sup_over_cells(self, pts: np.ndarray, strict: bool) -> np.ndarray:
        pts = np.atleast_2d(pts)
        n = pts.shape[0]
        out = np.full(n, NEG_INF)
        for r in range(self._cell_lo.shape[0]):
            clo, chi = self._cell_lo[r], self._cell_hi[r]
            if strict:
                nonempty = np.all(pts > clo, axis=1)
            else:
                nonempty = np.all(pts >= clo, axis=1)
            if not nonempty.any():
                continue
            top = np.minimum(chi, pts)
            # top coordinate hit by the cell edge is an open bound; hit by
            # the query it is closed unless the query itself is strict
            open_bound = (chi <= pts) | strict
            vals = self.base.tagged_many(top, open_bound)
            out = np.where(nonempty, np.maximum(out, vals), out)
        return out

    def sup_below_many(self, pts):
        return self._sup_over_cells(pts, strict=True)

    def sup_box_many(self, pts):
        return self._sup_over_cells(pts, strict=False)

    def axis_breakpoints(self, lo, hi):
        raise NotImplementedError

    def describe(self):
        return {"variant": "restricted", "inside": self.inside,
                "base": self.base.describe()}


# ---------------------------------------------------------------------------
# evaluators


@dataclass
class EvolvedHeights:
    """Values of the height process at query points, with the search box
    they were computed in and (when requested) maximizer corners."""

    queries: list[tuple[np.ndarray, float]]
    values: np.ndarray
    search_box: tuple[TaggedCorner, np.ndarray]
    maximizers: list[list[TaggedCorner]] | None = None


def _check_inputs(profile: ProfileSpec, cloud: PointCloud, queries,
                  search_box) -> tuple[np.ndarray, np.ndarray]:
    lower, upper = search_box
    upper = as_point(upper, dim=profile.dim)
    if lower.dim != profile.dim:
        raise ValueError("search box dimension mismatch")
    if cloud.dim != profile.dim + 1:
        raise ValueError("cloud must have one time axis on top of space")
    q_space = np.array([as_point(x, profile.dim) for x, _ in queries])
    q_times = np.array([float(t) for _, t in queries])
    if np.any(q_times < 0):
        raise ValueError("query times must be nonnegative")
    t_hi = cloud.hi[-1]
    if np.any(q_times > t_hi + 1e-12):
        raise ValueError(
            f"query time beyond the sampled range (0, {t_hi}]; refusing to "
            "truncate silently")
    if np.any(q_space > upper + 1e-12) or np.any(q_space < lower.values() - 1e-12):
        raise ValueError("queries must lie in the search box")
    return q_space, q_times


def _restrict_to_box(cloud: PointCloud, lower: TaggedCorner, upper: np.ndarray,
                     t_max: float):
    d = lower.dim
    space = cloud.points[:, :d]
    times = cloud.points[:, d]
    mask = lower.admits(space)
    mask &= np.all(space <= upper, axis=1)
    mask &= (times > 0) & (times <= t_max)
    return space[mask], times[mask]


def evaluate_lpp(profile: ProfileSpec, cloud: PointCloud, queries,
                 search_box, compute_maximizers: bool = False) -> EvolvedHeights:
    """Exact variational values through the last-passage recursion.

    For each cloud point p (in time order),

        W(p) = 1 + max( sup{sigma0(y) : y < p_space},
                        max{W(q) : q strictly below p in space and time} ),

    and the height at (x, t) is the larger of sup{sigma0(y) : y <= x} and
    the best W over cloud points inside the query box.  Chains are
    restricted to the search box; validate with a doubled box to certify
    the restriction (see `validated_heights`).
    """
    q_space, q_times = _check_inputs(profile, cloud, queries, search_box)
    lower, upper = search_box
    upper = as_point(upper, dim=profile.dim)
    t_max = float(np.max(q_times)) if len(q_times) else 0.0
    space, times = _restrict_to_box(cloud, lower, upper, t_max)
    order = np.argsort(times)
    space, times = space[order], times[order]
    if space.shape[0]:
        ell = profile.sup_below_many(space)
        w = _kernels.lpp_values(np.ascontiguousarray(space), ell)
        chain_best = _kernels.dominated_max(space, times, w, q_space, q_times)
    else:
        chain_best = np.full(len(queries), NEG_INF)
    base = profile.sup_box_many(q_space)
    values = np.maximum(base, chain_best)
    heights = EvolvedHeights([(q_space[i], q_times[i]) for i in range(len(queries))],
                             values, (lower, upper))
    if compute_maximizers:
        oracle = evaluate_oracle(profile, cloud, queries, search_box)
        heights.maximizers = oracle.maximizers
    return heights


def _axis_candidates(profile: ProfileSpec, lower: TaggedCorner,
                     x: np.ndarray, space: np.ndarray) -> list[list[TaggedCoord]]:
    d = x.shape[0]
    lo_vals = lower.values()
    breaks = profile.axis_breakpoints(lo_vals, x)
    axes = []
    for i in range(d):
        cands: dict[tuple, TaggedCoord] = {}

        def push(tc: TaggedCoord):
            lo_tc = lower.coords[i]
            if tc.sort_key() < lo_tc.sort_key() or tc.value > x[i]:
                return
            cands[tc.sort_key()] = tc

        push(lower.coords[i])
        for s in np.asarray(breaks[i]).ravel():
            push(at(float(s)))
        for cval in np.unique(space[:, i]):
            push(at(float(cval)))
            push(before(float(cval)))
        push(at(float(x[i])))
        push(before(float(x[i])))
        axes.append([cands[k] for k in sorted(cands)])
    return axes


def evaluate_oracle(profile: ProfileSpec, cloud: PointCloud, queries,
                    search_box) -> EvolvedHeights:
    """Slow reference evaluator: enumerate a finite grid of tagged lower
    corners that provably contains a maximizer of the variational
    supremum, and score each with an independent chain count.

    Per axis the candidates are the search-box corner, the profile's
    breakpoints (taken AT), and the cloud coordinates and the query
    coordinate (taken both AT and just BEFORE, which covers profiles
    whose level sets are not axis-aligned).
    """
    q_space, q_times = _check_inputs(profile, cloud, queries, search_box)
    lower, upper = search_box
    upper = as_point(upper, dim=profile.dim)
    d = profile.dim
    values = np.empty(len(queries))
    all_maximizers: list[list[TaggedCorner]] = []
    for qi in range(len(queries)):
        x, t = q_space[qi], q_times[qi]
        sub = cloud.restricted(np.append(lower.values() - 1.0, 0.0),
                               np.append(x, t))
        space = sub.points[:, :d] if sub.n else np.empty((0, d))
        keep = lower.admits(space) if sub.n else np.zeros(0, dtype=bool)
        space = space[keep]
        pts = sub.points[keep] if sub.n else sub.points
        axes = _axis_candidates(profile, lower, x, space)
        best = NEG_INF
        argmax: list[TaggedCorner] = []
        for combo in itertools.product(*axes):
            corner = TaggedCorner(tuple(combo))
            s0 = profile.value_tagged(corner)
            if s0 == NEG_INF:
                continue
            mask = corner.admits(space)
            h = longest_chain(pts[mask]) if mask.any() else 0
            val = s0 + h
            if val > best:
                best = val
                argmax = [corner]
            elif val == best:
                argmax.append(corner)
        values[qi] = best
        all_maximizers.append(argmax)
    return EvolvedHeights([(q_space[i], q_times[i]) for i in range(len(queries))],
                          values, (lower, upper), maximizers=all_maximizers)


def validated_heights(profile: ProfileSpec, cloud: PointCloud, queries,
                      search_box) -> EvolvedHeights:
    """Evaluate on the full cloud and assert that restricting chains to
    the search box does not change any value; the doubling check behind
    every scaled experiment.  The cloud must have been sampled on a box
    whose lower corner sits strictly below the search box."""
    lower, upper = search_box
    if not np.all(cloud.lo[:-1] < lower.values() - 1e-12):
        raise ValueError("cloud box must extend strictly below the search box "
                         "for the doubling validation")
    wide_lower = TaggedCorner(tuple(at(v) for v in cloud.lo[:-1]))
    wide = evaluate_lpp(profile, cloud, queries, (wide_lower, upper))
    tight = evaluate_lpp(profile, cloud, queries, search_box)
    if not np.array_equal(wide.values, tight.values):
        raise RuntimeError(
            "search box too small: values changed when the box was widened")
    return tight


def simulate_event_driven(profile: ProfileSpec, cloud: PointCloud, window,
                          horizon: float, keep_snapshots: bool = True
                          ) -> list[tuple[float, StaircaseField]]:
    """Graphical dynamics: process cloud points in time order and raise
    the height by one on the level set above each point.

    Only wedge-class data is accepted (a wedge, or a staircase whose
    window lower corner acts as the -inf cutoff); profiles with
    unbounded level sets have infinite jump rate and cannot be simulated
    in a finite window.  Returns (time, field) snapshots, starting with
    the initial state at time zero.
    """
    lo = as_point(window[0])
    hi = as_point(window[1], dim=lo.shape[0])
    if isinstance(profile, WedgeProfile):
        if np.any(profile.corner >= hi):
            raise ValueError("wedge corner must lie below the window top")
        fld = wedge_field(profile.corner, hi)
    elif isinstance(profile, StaircaseProfile):
        fld = profile.field.copy()
    else:
        raise TypeError(
            f"{type(profile).__name__} is not wedge-class; event-driven "
            "simulation accepts Wedge and Staircase profiles only")
    d = fld.dim
    if cloud.dim != d + 1:
        raise ValueError("cloud must be a space-time cloud")
    if np.any(cloud.hi[:-1] > fld.hi + 1e-12):
        raise ValueError("cloud spatial box must lie inside the field window")
    times = cloud.points[:, d]
    order = np.argsort(times)
    snapshots = [(0.0, fld.copy() if keep_snapshots else fld)]
    for i in order:
        s = times[i]
        if s > horizon:
            break
        y = cloud.points[i, :d]
        fld.increment_level_set_above(y)
        if keep_snapshots:
            snapshots.append((float(s), fld.copy()))
    if not keep_snapshots:
        snapshots = [(0.0, fld)]
    return snapshots


def final_field(snapshots: list[tuple[float, StaircaseField]]) -> StaircaseField:
    return snapshots[-1][1]


# ---------------------------------------------------------------------------
# jump regions and the generator


def jump_region(fld: StaircaseField, x) -> tuple[list[tuple[np.ndarray, np.ndarray]], float]:
    """The set where an arriving point would raise the height at x: the
    staircase cells below x sharing x's value, clipped to {y <= x}, with
    its volume.  Empty with volume zero at infinite heights."""
    xv = as_point(x, dim=fld.dim)
    v = fld.value_at(xv)
    if not np.isfinite(v):
        return [], 0.0
    boxes = []
    total = 0.0
    for clo, chi, val in fld.cell_boxes():
        if val != v:
            continue
        top = np.minimum(chi, xv)
        if np.any(top <= clo):
            continue
        boxes.append((clo, top))
        total += float(np.prod(top - clo))
    return boxes, total


def generator_apply(fld: StaircaseField, x0, k: int) -> float:
    """Generator applied to the cylinder indicator {height(x0) >= k}:
    the jump-region volume when the height sits at k-1, else zero."""
    xv = as_point(x0, dim=fld.dim)
    v = fld.value_at(xv)
    if np.isfinite(v) and v == k - 1:
        return jump_region(fld, xv)[1]
    return 0.0


def generator_path_integral(snapshots: list[tuple[float, StaircaseField]],
                            x0, k: int, horizon: float) -> float:
    """Integral of the generator term along one simulated path, exact for
    the piecewise-constant evolution."""
    total = 0.0
    for i, (s, fld) in enumerate(snapshots):
        s_next = snapshots[i + 1][0] if i + 1 < len(snapshots) else horizon
        if s >= horizon:
            break
        total += generator_apply(fld, x0, k) * (min(s_next, horizon) - s)
    return total


# ---------------------------------------------------------------------------
# serialization


def save_heights(heights: EvolvedHeights, csv_path: str | Path,
                 sidecar: dict | None = None,
                 sidecar_path: str | Path | None = None) -> None:
    """CSV x0,...,x{d-1},t,value plus a JSON sidecar."""
    csv_path = Path(csv_path)
    d = heights.queries[0][0].shape[0] if heights.queries else 0
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i}" for i in range(d)] + ["t", "value"])
        for (x, t), v in zip(heights.queries, heights.values):
            writer.writerow([repr(float(c)) for c in x]
                            + [repr(float(t)), repr(float(v))])
    meta = dict(sidecar or {})
    lower, upper = heights.search_box
    meta["search_box"] = {
        "lower": [[c.value, c.side.value] for c in lower.coords],
        "upper": np.asarray(upper).tolist(),
    }
    path = Path(sidecar_path) if sidecar_path else csv_path.with_suffix(".json")
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
