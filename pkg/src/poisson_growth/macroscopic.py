"""The deterministic macroscopic limit: concave shape function g, slope
velocity f, a grid Hopf-Lax solver with argmax sets, closed-form flat,
shock and rarefaction solutions, and the forward/interface sets W and X
that carry initial sets along characteristics."""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import GridRegion, GridSpec, as_point, closure_of_complement


def velocity(rho, c: float) -> tuple[float, float, np.ndarray]:
    """Velocity of the interface at constant slope rho.

    Returns (kappa, f, gradf) with kappa = (c/(d+1))^(d+1),
    f(rho) = kappa / (rho_1 ... rho_d) and gradf_i = -f / rho_i.
    """
    r = as_point(rho)
    if c <= 0:
        raise ValueError("chain constant c must be positive")
    if np.any(r <= 0):
        raise ValueError("velocity is infinite outside positive slopes")
    d = r.shape[0]
    kappa = (c / (d + 1)) ** (d + 1)
    f = kappa / float(np.prod(r))
    gradf = -f / r
    return kappa, f, gradf


def shape_g(x, c: float) -> float:
    """Limit shape c * (x_1 ... x_d)^(1/(d+1)) on the positive orthant,
    -inf outside it."""
    xv = as_point(x)
    if c <= 0:
        raise ValueError("chain constant c must be positive")
    if np.any(xv < 0):
        return -math.inf
    d = xv.shape[0]
    return c * float(np.prod(xv)) ** (1.0 / (d + 1))


def shape_g_many(xs: np.ndarray, c: float) -> np.ndarray:
    """Vectorized shape function over rows; -inf off the orthant."""
    xs = np.atleast_2d(xs)
    d = xs.shape[1]
    out = np.full(xs.shape[0], -np.inf)
    ok = np.all(xs >= 0, axis=1)
    out[ok] = c * np.prod(xs[ok], axis=1) ** (1.0 / (d + 1))
    return out


class MacroProfile:
    """A macroscopic initial condition u0: nondecreasing, locally
    Lipschitz, evaluated in closed form or on a grid."""

    dim: int

    def u0_many(self, ys: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def u0(self, y) -> float:
        return float(self.u0_many(np.atleast_2d(as_point(y, self.dim)))[0])

    def lipschitz_bound(self) -> float:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass
class FlatMacro(MacroProfile):
    """u0(y) = rho . y for a strictly positive slope vector."""

    rho: np.ndarray

    def __post_init__(self):
        self.rho = as_point(self.rho)
        if np.any(self.rho <= 0):
            raise ValueError("flat profile needs a strictly positive slope")
        self.dim = self.rho.shape[0]

    def u0_many(self, ys):
        return np.atleast_2d(ys) @ self.rho

    def lipschitz_bound(self):
        return float(np.max(self.rho))

    def describe(self):
        return {"variant": "flat", "rho": self.rho.tolist()}


@dataclass
class ShockMacro(MacroProfile):
    """Two-slope shock data: rho . y where (rho - lambda) . y >= 0 and
    lambda . y on the other side, i.e. the max of the two planes."""

    lam: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        self.lam = as_point(self.lam)
        self.rho = as_point(self.rho, dim=self.lam.shape[0])
        if np.any(self.lam <= 0) or np.any(self.rho <= 0):
            raise ValueError("shock slopes must be strictly positive")
        if np.allclose(self.lam, self.rho):
            raise ValueError("shock needs two distinct slopes")
        self.dim = self.rho.shape[0]

    def u0_many(self, ys):
        ys = np.atleast_2d(ys)
        return np.maximum(ys @ self.rho, ys @ self.lam)

    def lipschitz_bound(self):
        return float(max(np.max(self.rho), np.max(self.lam)))

    def describe(self):
        return {"variant": "shock", "lambda": self.lam.tolist(),
                "rho": self.rho.tolist()}


@dataclass
class RarefactionMacro(MacroProfile):
    """Two-slope rarefaction data: lambda . y where (rho - lambda) . y >= 0
    and rho . y on the other side, i.e. the min of the two planes.

    Requires rho > lambda coordinatewise so the fan interpolation
    s -> (rho - lambda) . grad f(s*lambda + (1-s)*rho) is strictly
    monotone and the fan equation has a unique root.
    """

    lam: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        self.lam = as_point(self.lam)
        self.rho = as_point(self.rho, dim=self.lam.shape[0])
        if np.any(self.lam <= 0):
            raise ValueError("rarefaction slopes must be strictly positive")
        if not np.all(self.rho > self.lam):
            raise ValueError("rarefaction requires rho > lambda coordinatewise")
        self.dim = self.rho.shape[0]

    def u0_many(self, ys):
        ys = np.atleast_2d(ys)
        return np.minimum(ys @ self.rho, ys @ self.lam)

    def lipschitz_bound(self):
        return float(np.max(self.rho))

    def describe(self):
        return {"variant": "rarefaction", "lambda": self.lam.tolist(),
                "rho": self.rho.tolist()}


@dataclass
class GridMacro(MacroProfile):
    """u0 given by cell values on a grid, nondecreasing along every axis;
    evaluation clamps into the grid window (constant continuation)."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.size != self.grid.n_cells:
            raise ValueError("grid profile values must fill the grid")
        self.values = vals.reshape(tuple(self.grid.cells))
        for ax in range(self.values.ndim):
            if np.any(np.diff(self.values, axis=ax) < 0):
                raise ValueError("grid profile must be nondecreasing along axes")
        self.dim = self.grid.dim

    def _indices(self, ys: np.ndarray, before: np.ndarray | None = None):
        ys = np.atleast_2d(ys)
        u = (ys - self.grid.lo) / self.grid.cell_size
        idx = np.floor(u).astype(np.int64)
        if before is not None:
            idx_b = np.ceil(u).astype(np.int64) - 1
            idx = np.where(before, idx_b, idx)
        return np.clip(idx, 0, self.grid.cells - 1)

    def u0_many(self, ys):
        idx = self._indices(ys)
        return self.values[tuple(idx[:, k] for k in range(self.dim))]

    def u0_tagged_many(self, ys, before):
        idx = self._indices(ys, np.atleast_2d(before))
        return self.values[tuple(idx[:, k] for k in range(self.dim))]

    def lipschitz_bound(self):
        h = self.grid.cell_size
        best = 0.0
        for ax in range(self.values.ndim):
            d = np.diff(self.values, axis=ax)
            if d.size:
                best = max(best, float(np.max(d)) / h[ax])
        return best

    def describe(self):
        return {"variant": "grid", "grid": self.grid.to_json()}


@dataclass
class MacroSolution:
    """A macroscopic profile together with the chain constant driving it."""

    profile: MacroProfile
    c: float

    @property
    def kappa(self) -> float:
        d = self.profile.dim
        return (self.c / (d + 1)) ** (d + 1)


@dataclass
class ArgmaxSet:
    """Hopf-Lax maximizers at one (x, t), all attaining the value within
    `tolerance`; `shock` marks a diameter above one grid cell."""

    points: np.ndarray
    tolerance: float
    shock: bool = False

    @property
    def diameter(self) -> float:
        if len(self.points) < 2:
            return 0.0
        return float(np.max(np.ptp(self.points, axis=0)))


def _fan_root(profile: RarefactionMacro, xi: float, t: float, c: float) -> float:
    """Solve (rho-lam).x = -t (rho-lam).grad f(s*lam+(1-s)*rho) for s by
    bisection; the right side is continuous and strictly increasing."""
    lam, rho = profile.lam, profile.rho
    dlt = rho - lam

    def h(s: float) -> float:
        mu = s * lam + (1 - s) * rho
        _, fmu, gmu = velocity(mu, c)
        return -t * float(dlt @ gmu)

    lo_s, hi_s = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo_s + hi_s)
        if h(mid) < xi:
            lo_s = mid
        else:
            hi_s = mid
        if hi_s - lo_s <= 1e-12 * max(1.0, abs(lo_s)):
            break
    return 0.5 * (lo_s + hi_s)


def closed_form_u(profile: MacroProfile, x, t: float, c: float
                  ) -> tuple[float, ArgmaxSet]:
    """Exact solution value and maximizer(s) for flat, shock and
    rarefaction data.

    On the shock hyperplane both branch maximizers are returned; in the
    rarefaction fan the interpolation parameter is found by bisection to
    1e-12 relative accuracy.
    """
    xv = as_point(x)
    if t <= 0:
        raise ValueError("closed forms require t > 0")
    if isinstance(profile, FlatMacro):
        _, f, g = velocity(profile.rho, c)
        u = float(xv @ profile.rho) + t * f
        return u, ArgmaxSet(np.array([xv + t * g]), 0.0)
    if isinstance(profile, ShockMacro):
        lam, rho = profile.lam, profile.rho
        _, f_l, g_l = velocity(lam, c)
        _, f_r, g_r = velocity(rho, c)
        score = float((rho - lam) @ xv) - t * (f_l - f_r)
        u_rho = float(xv @ rho) + t * f_r
        u_lam = float(xv @ lam) + t * f_l
        scale = max(1.0, abs(float((rho - lam) @ xv)), t * abs(f_l - f_r))
        if abs(score) <= 1e-12 * scale:
            return u_rho, ArgmaxSet(np.array([xv + t * g_r, xv + t * g_l]), 0.0,
                                    shock=True)
        if score > 0:
            return u_rho, ArgmaxSet(np.array([xv + t * g_r]), 0.0)
        return u_lam, ArgmaxSet(np.array([xv + t * g_l]), 0.0)
    if isinstance(profile, RarefactionMacro):
        lam, rho = profile.lam, profile.rho
        dlt = rho - lam
        _, f_l, g_l = velocity(lam, c)
        _, f_r, g_r = velocity(rho, c)
        xi = float(dlt @ xv)
        lo_edge = -t * float(dlt @ g_r)
        hi_edge = -t * float(dlt @ g_l)
        if xi <= lo_edge:
            return float(xv @ rho) + t * f_r, ArgmaxSet(np.array([xv + t * g_r]), 0.0)
        if xi >= hi_edge:
            return float(xv @ lam) + t * f_l, ArgmaxSet(np.array([xv + t * g_l]), 0.0)
        s = _fan_root(profile, xi, t, c)
        mu = s * lam + (1 - s) * rho
        _, f_m, g_m = velocity(mu, c)
        return float(xv @ mu) + t * f_m, ArgmaxSet(np.array([xv + t * g_m]), 0.0)
    raise ValueError(f"closed forms are unavailable for {type(profile).__name__}")


def default_argmax_tol(profile: MacroProfile, grid: GridSpec) -> float:
    return 4.0 * profile.lipschitz_bound() * float(np.max(grid.cell_size))


def hopf_lax_solve(profile: MacroProfile, x, t: float, c: float,
                   search_grid: GridSpec, tol: float | None = None,
                   _redoubled: bool = False) -> tuple[float, ArgmaxSet]:
    """Hopf-Lax value by maximizing u0(y) + t*g((x-y)/t) over grid cell
    centers y <= x.

    The argmax set holds every candidate within `tol` of the maximum and
    is flagged as a shock when its diameter exceeds one grid cell.  A
    maximum attained on the grid's lower boundary triggers one doubling
    of the grid extent; a second hit is an error.
    """
    xv = as_point(x)
    if t <= 0:
        raise ValueError("hopf_lax_solve requires t > 0")
    if tol is None:
        tol = default_argmax_tol(profile, search_grid)
    centers = search_grid.centers()
    ok = np.all(centers <= xv, axis=1)
    if not ok.any():
        raise ValueError("no grid candidates lie below the query point")
    ys = centers[ok]
    vals = profile.u0_many(ys) + t * shape_g_many((xv - ys) / t, c)
    best = float(np.max(vals))
    if best == -np.inf:
        raise ValueError("objective is -inf on the whole search grid")
    near = vals >= best - tol
    arg = ys[near]
    # lower-boundary hit: some near-maximizer in the first cell layer
    h = search_grid.cell_size
    on_lower = np.any(arg < search_grid.lo + h, axis=1).any()
    if on_lower:
        if _redoubled:
            raise RuntimeError(
                "Hopf-Lax maximum stays on the search-grid boundary after "
                "doubling; enlarge the search grid")
        wider = GridSpec(search_grid.lo - (search_grid.hi - search_grid.lo),
                         search_grid.hi, search_grid.cells * 2)
        return hopf_lax_solve(profile, xv, t, c, wider, tol, _redoubled=True)
    cell = float(np.max(h))
    shock = len(arg) > 1 and float(np.max(np.ptp(arg, axis=0))) > cell
    return best, ArgmaxSet(arg, tol, shock=shock)


def _point_in_region_closed(region: GridRegion, y: np.ndarray) -> bool:
    """Closed-set membership of a point: a point on (or within a hair of)
    a member cell's boundary counts as a member.  Forward sets are closed,
    and kink maximizers land exactly on cell edges, so the open cell
    lookup would flip on the sign of the root-finding error."""
    g = region.grid
    u = (y - g.lo) / g.cell_size
    slack = 1e-7
    axes = []
    for i in range(g.dim):
        cand = {int(np.floor(u[i] - slack)), int(np.floor(u[i] + slack))}
        cand = {k for k in cand if 0 <= k < g.cells[i]}
        if not cand:
            return False
        axes.append(sorted(cand))
    return any(bool(region.membership[idx]) for idx in itertools.product(*axes))


def forward_W(profile: MacroProfile, B: GridRegion, t: float, c: float,
              eval_grid: GridSpec, tol: float | None = None,
              search_grid: GridSpec | None = None,
              method: str = "auto") -> GridRegion:
    """Forward image W(B, t): cells x of the evaluation grid for which
    some Hopf-Lax maximizer of (x, t) lies in B.

    Closed-form maximizers are used for flat, shock and rarefaction data
    (method="closed"); method="scan" forces the generic grid argmax,
    which needs a search grid.
    """
    use_closed = method == "closed" or (
        method == "auto"
        and isinstance(profile, (FlatMacro, ShockMacro, RarefactionMacro)))
    centers = eval_grid.centers()
    members = np.zeros(centers.shape[0], dtype=bool)
    for i, xv in enumerate(centers):
        if use_closed:
            _, arg = closed_form_u(profile, xv, t, c)
        else:
            if search_grid is None:
                raise ValueError("method='scan' requires a search grid")
            _, arg = hopf_lax_solve(profile, xv, t, c, search_grid, tol)
        members[i] = any(_point_in_region_closed(B, y) for y in arg.points)
    return GridRegion(eval_grid, members)


def interface_X(profile: MacroProfile, B: GridRegion, t: float, c: float,
                eval_grid: GridSpec, tol: float | None = None,
                search_grid: GridSpec | None = None,
                method: str = "auto") -> GridRegion:
    """Interface set X(B, t) = W(B, t) intersected with W(closure of the
    complement, t), evaluated on one grid."""
    wb = forward_W(profile, B, t, c, eval_grid, tol, search_grid, method)
    wc = forward_W(profile, closure_of_complement(B), t, c, eval_grid, tol,
                   search_grid, method)
    return GridRegion(eval_grid, wb.membership & wc.membership)


def save_solutions(points, times, values, shocks, csv_path: str | Path) -> None:
    """CSV x0,...,x{d-1},t,u,shock_flag for solved space-time samples."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d = pts.shape[1]
    with open(Path(csv_path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i}" for i in range(d)] + ["t", "u", "shock_flag"])
        for row, t, u, s in zip(pts, times, values, shocks):
            writer.writerow([repr(float(v)) for v in row]
                            + [repr(float(t)), repr(float(u)), int(bool(s))])


def solve_on_grid(profile: MacroProfile, grid: GridSpec, t: float, c: float
                  ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Closed-form solution values and shock flags at the grid centers."""
    centers = grid.centers()
    values = np.empty(centers.shape[0])
    shocks = np.zeros(centers.shape[0], dtype=bool)
    for i, x in enumerate(centers):
        u, arg = closed_form_u(profile, x, t, c)
        values[i] = u
        shocks[i] = arg.shock
    return centers, values, shocks


__all__ = [
    "ArgmaxSet",
    "FlatMacro",
    "GridMacro",
    "MacroProfile",
    "MacroSolution",
    "RarefactionMacro",
    "ShockMacro",
    "closed_form_u",
    "default_argmax_tol",
    "forward_W",
    "hopf_lax_solve",
    "interface_X",
    "save_solutions",
    "shape_g",
    "shape_g_many",
    "solve_on_grid",
    "velocity",
]
