"""Coupled pairs of height processes sharing one Poisson cloud.

The taller process zeta starts at sigma0 + h on a defect region and the
pair is evolved with the same cloud, so the ordering
sigma <= zeta <= sigma + h is preserved exactly.  The defect set

    A(t) = {x : zeta(x, t) = sigma(x, t) + h}

is computed two independent ways: directly from the coupled values, and
through the maximizer characterization "x is in A(t) iff the height at x
has a variational maximizer inside A(0)", realized as a restricted-domain
evaluation of the same formula.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import GridRegion, GridSpec, boundary_of
from .growth import DefectProfile, ProfileSpec, RestrictedProfile, evaluate_lpp
from .poisson import PointCloud


@dataclass
class CoupledState:
    """Initial data of a coupled pair: base profile, defect region A(0)
    on a grid, offset h, and the derived (or explicitly given) taller
    profile zeta0 = sigma0 + h on A(0)."""

    sigma_profile: ProfileSpec
    defect0: GridRegion
    h: int
    zeta_profile: ProfileSpec = None

    def __post_init__(self):
        if self.zeta_profile is None:
            # DefectProfile validates that A(0) is an upper set, which is
            # what keeps zeta0 monotone; incompatible regions fail loudly
            self.zeta_profile = DefectProfile(self.sigma_profile, self.defect0,
                                              self.h)
        else:
            self._check_sandwich()

    def _check_sandwich(self):
        centers = self.defect0.grid.centers()
        s = self.sigma_profile.value_many(centers)
        z = self.zeta_profile.value_many(centers)
        if not np.all((z >= s) & (z <= s + self.h)):
            raise ValueError("zeta0 must satisfy sigma0 <= zeta0 <= sigma0 + h")


@dataclass
class DefectSnapshot:
    """Defect membership on a grid at one time, with its boundary and the
    underlying coupled heights."""

    t: float
    grid: GridSpec
    inA: np.ndarray = field(repr=False)
    boundary: GridRegion = None
    sigma: np.ndarray = field(default=None, repr=False)
    zeta: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.inA = np.asarray(self.inA, dtype=bool).reshape(tuple(self.grid.cells))
        if self.boundary is None:
            self.boundary = boundary_of(GridRegion(self.grid, self.inA))

    @property
    def region(self) -> GridRegion:
        return GridRegion(self.grid, self.inA)


def _grid_queries(grid: GridSpec, t: float):
    return [(c, t) for c in grid.centers()]


def couple_evolve(state: CoupledState, cloud: PointCloud, grid: GridSpec,
                  t: float, search_box) -> DefectSnapshot:
    """Evolve sigma and zeta on the same cloud and read off
    A(t) = {zeta = sigma + h} at the grid cell centers.

    Cells where both heights are -inf carry no defect information and are
    reported outside A(t)."""
    queries = _grid_queries(grid, t)
    sig = evaluate_lpp(state.sigma_profile, cloud, queries, search_box).values
    zet = evaluate_lpp(state.zeta_profile, cloud, queries, search_box).values
    if not np.all((zet >= sig) & (zet <= sig + state.h)):
        raise RuntimeError("coupling sandwich violated; evaluator bug")
    finite = np.isfinite(sig) & np.isfinite(zet)
    in_a = finite & (zet == sig + state.h)
    return DefectSnapshot(float(t), grid, in_a, sigma=sig.reshape(tuple(grid.cells)),
                          zeta=zet.reshape(tuple(grid.cells)))


def defect_from_maximizers(state: CoupledState, cloud: PointCloud,
                           grid: GridSpec, t: float, search_box) -> DefectSnapshot:
    """A(t) from maximizer membership alone: x is in A(t) exactly when the
    supremum defining sigma(x, t) is attained by some y in A(0), i.e. the
    A(0)-restricted supremum equals the unrestricted one.

    For h = 1 the complement is computed independently from zeta's
    maximizers over the complement of A(0); a disagreement between the
    two routes is an evaluator bug and raises."""
    queries = _grid_queries(grid, t)
    sig = evaluate_lpp(state.sigma_profile, cloud, queries, search_box).values
    zet = evaluate_lpp(state.zeta_profile, cloud, queries, search_box).values
    restricted = RestrictedProfile(state.sigma_profile, state.defect0, inside=True)
    sig_a = evaluate_lpp(restricted, cloud, queries, search_box).values
    finite = np.isfinite(sig) & np.isfinite(zet)
    in_a = finite & (sig_a == sig)
    if state.h == 1:
        zeta_out = RestrictedProfile(state.zeta_profile, state.defect0,
                                     inside=False)
        zet_ac = evaluate_lpp(zeta_out, cloud, queries, search_box).values
        out_a = zet_ac == zet
        if np.any(out_a[finite] == in_a[finite]):
            raise RuntimeError(
                "h=1 complementarity violated between the sigma and zeta "
                "maximizer characterizations; evaluator bug")
    return DefectSnapshot(float(t), grid, in_a, sigma=sig.reshape(tuple(grid.cells)),
                          zeta=zet.reshape(tuple(grid.cells)))


def save_snapshot(snap: DefectSnapshot, csv_path: str | Path,
                  sidecar: dict | None = None,
                  sidecar_path: str | Path | None = None) -> None:
    """CSV t,i0,...,i{d-1},sigma,zeta,inA,bd plus a JSON sidecar."""
    csv_path = Path(csv_path)
    d = snap.grid.dim
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"i{k}" for k in range(d)]
                        + ["sigma", "zeta", "inA", "bd"])
        bd = snap.boundary.membership
        for idx in np.ndindex(*snap.inA.shape):
            writer.writerow([repr(snap.t)] + list(idx)
                            + [repr(float(snap.sigma[idx])),
                               repr(float(snap.zeta[idx])),
                               int(snap.inA[idx]), int(bd[idx])])
    meta = dict(sidecar or {})
    meta["grid"] = snap.grid.to_json()
    path = Path(sidecar_path) if sidecar_path else csv_path.with_suffix(".json")
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
