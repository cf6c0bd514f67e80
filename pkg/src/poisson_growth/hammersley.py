"""One-dimensional interacting particle process with leftward jumps.

Graphical construction: a space-time Poisson cloud of rate tau drives the
dynamics, and at each cloud point (y, s) the leftmost particle strictly
right of y jumps to y.  Homogeneous Poisson particle configurations of
density mu are invariant, particles cross a fixed location as a Poisson
stream of rate tau/mu, and the counting function has mean

    E N(y, t) = mu * y + (tau / mu) * t.

Reinterpreting the space-time picture (y, t) as two spatial coordinates
turns counting functions into two-dimensional initial height fields; the
factory functions at the bottom build the flat/shock fields and the
coupled pair obtained by rerouting each trajectory along its right
neighbor above a stopping line.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._kernels import hammersley_sweep
from .core import GridRegion, GridSpec, as_point
from .growth import StaircaseField, StaircaseProfile
from .poisson import mix64, sample


@dataclass
class ParticleConfig:
    """Sorted particle locations on a window, with nominal density mu."""

    positions: np.ndarray
    window: tuple[float, float]
    mu: float

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=np.float64)
        if np.any(np.diff(self.positions) < 0):
            raise ValueError("positions must be sorted")
        lo, hi = self.window
        if len(self.positions) and (self.positions[0] < lo
                                    or self.positions[-1] > hi):
            raise ValueError("positions must lie inside the window")


def equilibrium_init(mu: float, window: tuple[float, float],
                     seed: int) -> ParticleConfig:
    """Poisson(mu) particle configuration on the window, sorted."""
    if mu <= 0:
        raise ValueError("density mu must be positive")
    lo, hi = float(window[0]), float(window[1])
    if hi <= lo:
        return ParticleConfig(np.empty(0), (lo, hi), mu)
    cloud = sample((np.array([lo]), np.array([hi])), mu, seed)
    return ParticleConfig(np.sort(cloud.points[:, 0]), (lo, hi), mu)


@dataclass
class Trajectories:
    """Labeled piecewise-constant particle paths over [0, T].

    Particle labels are array indices minus `label0`, so the particle
    labeled 0 is the rightmost one at or left of the origin at time 0.
    Jump events carry (time, label index, vacated position, new position).
    """

    init_positions: np.ndarray
    times: np.ndarray
    idxs: np.ndarray
    olds: np.ndarray
    news: np.ndarray
    horizon: float
    window: tuple[float, float]
    label0: int = 0

    @property
    def n_jumps(self) -> int:
        return int(np.sum(self.idxs >= 0))

    def positions_at(self, t: float) -> np.ndarray:
        pos = self.init_positions.copy()
        k = int(np.searchsorted(self.times, t, side="right"))
        sel = self.idxs[:k] >= 0
        # duplicate indices keep the last write, i.e. the latest jump
        pos[self.idxs[:k][sel]] = self.news[:k][sel]
        return pos

    def count(self, y: float, t: float) -> int:
        """N(y, t): label of the rightmost particle at or left of y."""
        pos = self.positions_at(t)
        return int(np.searchsorted(pos, y, side="right")) - 1 - self.label0


def simulate(init: ParticleConfig, tau: float, T: float, seed: int
             ) -> Trajectories:
    """Drive the particles with a rate-tau space-time cloud on
    window x (0, T] and record every jump."""
    if tau <= 0:
        raise ValueError("jump rate tau must be positive")
    lo, hi = init.window
    cloud = sample((np.array([lo, 0.0]), np.array([hi, T])), tau, seed)
    order = np.argsort(cloud.points[:, 1])
    ys = np.ascontiguousarray(cloud.points[order, 0])
    times = np.ascontiguousarray(cloud.points[order, 1])
    positions = init.positions.copy()
    idxs, olds = hammersley_sweep(positions, ys)
    label0 = int(np.searchsorted(init.positions, 0.0, side="right")) - 1
    return Trajectories(init.positions.copy(), times, idxs, olds, ys,
                        float(T), init.window, label0)


def flux_past(traj: Trajectories, y0: float, T: float) -> int:
    """Number of jumps crossing y0 from right to left during (0, T]."""
    sel = (traj.idxs >= 0) & (traj.times <= T)
    return int(np.sum(sel & (traj.news <= y0) & (traj.olds > y0)))


def save_trajectories(traj: Trajectories, csv_path: str | Path) -> None:
    """CSV k,t,pos of jump events only (k is the particle label)."""
    with open(Path(csv_path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "t", "pos"])
        for j in range(len(traj.times)):
            if traj.idxs[j] < 0:
                continue
            writer.writerow([int(traj.idxs[j]) - traj.label0,
                             repr(float(traj.times[j])),
                             repr(float(traj.news[j]))])


# ---------------------------------------------------------------------------
# two-dimensional initial fields from the space-time picture


def _padding(mu: float, tau: float, duration: float) -> float:
    # boundary emptiness must not reach the measurement region: pad by
    # three mean particle displacements, at least a few mean gaps
    return max(3.0 * (tau / mu) * duration / mu, 10.0 / mu)


def padding_for(mu: float, tau: float, duration: float) -> float:
    """Window padding used by the equilibrium experiments."""
    return _padding(mu, tau, duration)


def stopping_line_slope(lam, rho) -> float:
    """Slope a of the stopping line t = -a*y separating the two slope
    regions, a = (rho1 - lambda1) / (rho2 - lambda2)."""
    lam = as_point(lam, 2)
    rho = as_point(rho, 2)
    if not np.all(rho > lam):
        raise ValueError("needs rho > lambda coordinatewise")
    return float((rho[0] - lam[0]) / (rho[1] - lam[1]))


@dataclass
class _StoppedSystem:
    """Trajectories of the two-phase construction: equilibrium evolution
    below the stopping line t = -a*y, freezing on first contact, then a
    fresh-cloud evolution above the line built left to right."""

    init_positions: np.ndarray
    t_start: float
    stop_times: np.ndarray  # +inf when still active at the horizon
    events: list  # (time, index, new_pos), time-sorted
    horizon: float
    a: float


def _evolve_stopped(lam: np.ndarray, rho: np.ndarray, s_lo: float,
                    s_hi: float, t_start: float, t_end: float,
                    seed: int) -> _StoppedSystem:
    a = (rho[0] - lam[0]) / (rho[1] - lam[1])
    mu, tau, tau_p = lam[0], lam[0] * lam[1], rho[0] * rho[1]

    init = equilibrium_init(mu, (s_lo, s_hi), mix64(seed, 0))
    n = len(init.positions)
    positions = init.positions.copy()
    stop_times = np.full(n, np.inf)
    events: list[tuple[float, int, float]] = []

    # phase one: equilibrium sweep, freezing from the right as the line
    # t = -a*y passes each sitting particle
    cloud = sample((np.array([s_lo, t_start]), np.array([s_hi, t_end])),
                   tau, mix64(seed, 1))
    order = np.argsort(cloud.points[:, 1])
    active_end = n

    def freeze_until(s: float):
        nonlocal active_end
        while active_end > 0 and -a * positions[active_end - 1] <= s:
            stop_times[active_end - 1] = -a * positions[active_end - 1]
            active_end -= 1

    for j in order:
        w, s = cloud.points[j]
        freeze_until(s)
        i = int(np.searchsorted(positions[:active_end], w, side="right"))
        if i < active_end:
            events.append((float(s), i, float(w)))
            positions[i] = w
    freeze_until(t_end)

    # phase two: fresh cloud strictly above the line; frozen particles
    # re-evolve from their stopped locations, one at a time left to right,
    # blocked by the already rebuilt path of their left neighbor
    cloud_p = sample((np.array([s_lo, t_start]), np.array([s_hi, t_end])),
                     tau_p, mix64(seed, 2))
    above = cloud_p.points[cloud_p.points[:, 1] > -a * cloud_p.points[:, 0]]
    above = above[np.argsort(above[:, 1])]

    rebuilt: dict[int, list[tuple[float, float]]] = {}
    for k in range(active_end, n):
        start_t = stop_times[k]
        if start_t >= t_end:
            rebuilt[k] = [(start_t, float(positions[k]))]
            continue
        path = [(start_t, float(positions[k]))]
        cur = float(positions[k])
        left = rebuilt.get(k - 1)
        li = 0
        for w, s in above:
            if s <= start_t or s > t_end:
                continue
            if w >= cur:
                continue
            if left is not None:
                while li + 1 < len(left) and left[li + 1][0] <= s:
                    li += 1
                # left neighbor constrains only once it is itself above
                # the line; before that it sits strictly left of the line
                if left[li][0] <= s and w <= left[li][1]:
                    continue
            path.append((float(s), float(w)))
            events.append((float(s), k, float(w)))
            cur = float(w)
        rebuilt[k] = path

    events.sort(key=lambda e: e[0])
    return _StoppedSystem(init.positions.copy(), t_start, stop_times, events,
                          t_end, a)


def _field_from_events(init_positions: np.ndarray, t_start: float,
                       events: list, label0: int, window) -> StaircaseField:
    """Staircase N(x1, x2) on the window from labeled jump events."""
    (w1_lo, w2_lo), (w1_hi, w2_hi) = window
    bx = {w1_lo}
    bx.update(p for p in init_positions if w1_lo < p < w1_hi)
    bt = {w2_lo}
    for s, _, p in events:
        if w2_lo < s < w2_hi:
            bt.add(float(s))
        if w1_lo < p < w1_hi:
            bx.add(float(p))
    bx = np.array(sorted(bx))
    bt = np.array(sorted(bt))
    values = np.empty((len(bx), len(bt)))
    pos = init_positions.copy()
    ei = 0
    for j, tcell in enumerate(bt):
        while ei < len(events) and events[ei][0] <= tcell:
            _, idx, p = events[ei]
            pos[idx] = p
            ei += 1
        values[:, j] = np.searchsorted(pos, bx, side="right") - 1 - label0
    return StaircaseField([bx, bt], values, np.array([w1_hi, w2_hi]))


def build_flat_field_2d(rho, window, seed: int) -> StaircaseProfile:
    """Random initial field of mean rho.x: the counting function of an
    equilibrium system with density rho1 and cloud rate rho1*rho2, read
    in space-time coordinates."""
    rho = as_point(rho, 2)
    if np.any(rho <= 0):
        raise ValueError("slope must be positive")
    (w1_lo, w2_lo), (w1_hi, w2_hi) = window
    mu, tau = rho[0], rho[0] * rho[1]
    t_start = min(w2_lo, 0.0) - 1.0 / tau
    duration = w2_hi - t_start
    pad = _padding(mu, tau, duration)
    init = equilibrium_init(mu, (w1_lo - pad, w1_hi + pad), mix64(seed, 0))
    cloud = sample((np.array([w1_lo - pad, t_start]),
                    np.array([w1_hi + pad, w2_hi])), tau, mix64(seed, 1))
    order = np.argsort(cloud.points[:, 1])
    ys = np.ascontiguousarray(cloud.points[order, 0])
    times = cloud.points[order, 1]
    positions = init.positions.copy()
    idxs, _ = hammersley_sweep(positions, ys)
    events = [(float(times[j]), int(idxs[j]), float(ys[j]))
              for j in range(len(ys)) if idxs[j] >= 0]
    pos0 = init.positions.copy()
    for s, i, p in events:
        if s > 0:
            break
        pos0[i] = p
    label0 = int(np.searchsorted(pos0, 0.0, side="right")) - 1
    fld = _field_from_events(init.positions, t_start, events, label0, window)
    return StaircaseProfile(fld)


def _shock_system(lam, rho, window, seed):
    lam = as_point(lam, 2)
    rho = as_point(rho, 2)
    if not np.all(rho > lam):
        raise ValueError("shock construction needs rho > lambda coordinatewise")
    if not rho[0] / rho[1] < lam[0] / lam[1]:
        raise ValueError("shock construction needs rho1/rho2 < lambda1/lambda2 "
                         "so every particle reaches the stopping line")
    (w1_lo, w2_lo), (w1_hi, w2_hi) = window
    a = (rho[0] - lam[0]) / (rho[1] - lam[1])
    duration = w2_hi - min(w2_lo, -a * w1_hi, 0.0)
    pad = _padding(lam[0], lam[0] * lam[1], duration)
    pad_p = _padding(rho[0], rho[0] * rho[1], duration)
    s_lo = w1_lo - max(pad, pad_p)
    s_hi = w1_hi + max(pad, pad_p)
    t_start = min(w2_lo, -a * s_hi, 0.0) - 1.0 / lam[1]
    sys = _evolve_stopped(lam, rho, s_lo, s_hi, t_start, w2_hi, seed)
    pos0 = sys.init_positions.copy()
    for s, i, p in sys.events:
        if s > 0:
            break
        pos0[i] = p
    label0 = int(np.searchsorted(pos0, 0.0, side="right")) - 1
    return sys, label0


def build_shock_field_2d(lam, rho, window, seed: int) -> StaircaseProfile:
    """Random two-slope initial field of mean max(rho.x, lambda.x): the
    counting function of the stopped-and-restarted particle system, with
    the space-time coordinates read as the two spatial coordinates.

    Density lambda1 and cloud rate lambda1*lambda2 below the line
    (rho - lambda).x = 0, a fresh cloud of rate rho1*rho2 above it.
    """
    sys, label0 = _shock_system(lam, rho, window, seed)
    fld = _field_from_events(sys.init_positions, sys.t_start, sys.events,
                             label0, window)
    return StaircaseProfile(fld)


def build_coupled_shock_pair(lam, rho, window, seed: int,
                             grid: GridSpec | None = None
                             ) -> tuple[StaircaseProfile, StaircaseProfile, GridRegion]:
    """Coupled initial pair (sigma0, zeta0, A0) for the shock field.

    zeta0 counts the original trajectories.  sigma0 counts the surgered
    ones: each path follows its own trajectory below the stopping line,
    climbs vertically from its stopping point until it meets the path of
    its right neighbor, and follows that neighbor afterwards.  The two
    fields agree below the line and differ by at most one; A0 marks the
    grid cells where they differ.
    """
    sys, label0 = _shock_system(lam, rho, window, seed)
    n = len(sys.init_positions)

    events_by_k: dict[int, list[tuple[float, float]]] = {k: [] for k in range(n)}
    for s, k, p in sys.events:
        events_by_k[k].append((s, p))

    surgered: list[tuple[float, int, float]] = []
    for k in range(n):
        stop_k = sys.stop_times[k]
        own = events_by_k[k]
        # below the line: the particle's own jumps
        for s, p in own:
            if s < stop_k:
                surgered.append((s, k, p))
        if not np.isfinite(stop_k) or k + 1 >= n:
            continue
        # vertical climb at the stopped position until the right
        # neighbor's path crosses it, then follow the neighbor
        y_star = -stop_k / sys.a
        crossed = False
        for s, p in events_by_k[k + 1]:
            if s <= stop_k:
                continue
            if not crossed and p <= y_star:
                crossed = True
            if crossed:
                surgered.append((s, k, p))
    surgered.sort(key=lambda e: e[0])

    zeta_fld = _field_from_events(sys.init_positions, sys.t_start, sys.events,
                                  label0, window)
    sigma_fld = _field_from_events(sys.init_positions, sys.t_start, surgered,
                                   label0, window)
    sigma0 = StaircaseProfile(sigma_fld)
    zeta0 = StaircaseProfile(zeta_fld)

    if grid is None:
        (w1_lo, w2_lo), (w1_hi, w2_hi) = window
        grid = GridSpec(np.array([w1_lo, w2_lo]), np.array([w1_hi, w2_hi]),
                        np.array([24, 24]))
    centers = grid.centers()
    diff = zeta0.value_many(centers) - sigma0.value_many(centers)
    if np.any((diff < 0) | (diff > 1)):
        raise RuntimeError("surgered pair violates the one-step sandwich")
    a0 = GridRegion(grid, diff == 1)
    return sigma0, zeta0, a0
