"""Experiment runner: deterministic, seeded realizations of the canonical
experiments, each comparing an empirical quantity against its macroscopic
prediction and writing CSV artifacts plus a JSON manifest.

Output layout: out_dir/{experiment}/{seed}/ with aggregate.csv,
manifest.json and replica-*.csv.  Every CSV body starts with a comment
line carrying the manifest hash, so files from different runs cannot be
aggregated silently.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .chain import estimate_c
from .core import GridRegion, GridSpec, corner_at, inclusion_gap, \
    region_from_predicate, save_region
from .coupling import CoupledState, couple_evolve
from .growth import (
    RoundedMacroProfile,
    WedgeProfile,
    evaluate_lpp,
    evaluate_oracle,
    final_field,
    generator_path_integral,
    simulate_event_driven,
    validated_heights,
)
from .hammersley import build_coupled_shock_pair, equilibrium_init, flux_past, \
    padding_for, simulate
from .macroscopic import (
    FlatMacro,
    RarefactionMacro,
    ShockMacro,
    closed_form_u,
    interface_X,
    shape_g,
)
from .poisson import RNG_ID, mix64, sample

EXPERIMENTS = ("estimate-c", "wedge-shape", "hydro-profile", "generator-check",
               "defect", "hammersley-flux", "oracle-xcheck")


class ConfigError(ValueError):
    """Invalid or incomplete experiment configuration."""


class ValidationError(RuntimeError):
    """An internal cross-check (doubling, oracle agreement) failed."""


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int = 0
    out_dir: str = "out"
    d: int = 1
    nu: int | None = None
    n_list: list = field(default_factory=lambda: [100.0])
    t_list: list = field(default_factory=lambda: [1.0])
    replicas: int = 20
    c_override: float | None = None
    profile: str = "flat"  # flat | shock | rarefaction | wedge
    rho: list | None = None
    lam: list | None = None
    h: int = 1
    b_offset: float = 0.0  # B = {x : x . b_normal >= b_offset}
    b_normal: list | None = None
    grid_lo: list | None = None
    grid_hi: list | None = None
    grid_cells: list | None = None
    x0: list | None = None
    k: int = 1
    mu: float = 1.0
    tau: float = 1.0
    horizon: float = 100.0
    rate: float = 1.0
    points_budget: int = 200
    b_aspect: list | None = None
    init_fields: str = "rounded"  # rounded | hammersley

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; "
                              f"choose one of {', '.join(EXPERIMENTS)}")
        if self.replicas < 1:
            raise ConfigError("replicas must be >= 1")
        if self.experiment == "estimate-c" and not (self.nu or self.d):
            raise ConfigError("estimate-c needs nu (order dimension)")
        if self.experiment in ("wedge-shape", "hydro-profile", "defect"):
            if not self.n_list:
                raise ConfigError(f"{self.experiment} needs n_list")
            if not self.t_list:
                raise ConfigError(f"{self.experiment} needs t_list")
        if self.experiment in ("hydro-profile", "defect"):
            if self.profile not in ("flat", "shock", "rarefaction"):
                raise ConfigError("profile must be flat, shock or rarefaction")
            if self.rho is None:
                raise ConfigError(f"{self.experiment} needs rho")
            if self.profile in ("shock", "rarefaction") and self.lam is None:
                raise ConfigError(f"{self.profile} profile needs lam")
        if self.experiment == "defect" and self.b_normal is None:
            raise ConfigError("defect needs b_normal (and b_offset) for B")
        if self.experiment == "generator-check" and self.k != 1:
            raise ConfigError("generator-check has an exact reference only "
                              "for k = 1")

    def to_json(self) -> dict:
        return dataclasses.asdict(self)

    @staticmethod
    def from_json(obj: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(ExperimentConfig)}
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        if "experiment" not in obj:
            raise ConfigError("config needs an 'experiment' field")
        return ExperimentConfig(**obj)


def config_hash(cfg: ExperimentConfig) -> str:
    """Digest of the semantic config (the output location does not change
    what was computed)."""
    payload = cfg.to_json()
    payload.pop("out_dir", None)
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _n_threads() -> int:
    try:
        return max(1, int(os.environ.get("PG_THREADS", "1")))
    except ValueError:
        return 1


def _map_replicas(fn, replicas: int):
    """Run fn(r) for each replica, deterministically ordered by index."""
    workers = _n_threads()
    if workers == 1:
        return [fn(r) for r in range(replicas)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(replicas)))


def _write_csv(path: Path, header: list[str], rows: list[list], mhash: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# manifest={mhash}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def read_csv(path: str | Path, expect_hash: str | None = None):
    """Read a harness CSV, returning (hash, header, rows-of-strings);
    refuses to mix provenance when expect_hash is given."""
    path = Path(path)
    with open(path) as fh:
        first = fh.readline().strip()
        if not first.startswith("# manifest="):
            raise ValueError(f"{path} carries no manifest hash")
        mhash = first.split("=", 1)[1]
        if expect_hash is not None and mhash != expect_hash:
            raise ValueError(f"manifest mismatch: {mhash} != {expect_hash}; "
                             "refusing to aggregate mixed provenance")
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    return mhash, header, rows


def _chain_constant(cfg: ExperimentConfig, d: int) -> tuple[float, dict]:
    """c for the given space dimension and its provenance record."""
    if d == 1:
        return 2.0, {"provenance": "exact", "value": 2.0}
    if cfg.c_override is not None:
        return float(cfg.c_override), {"provenance": "override",
                                       "value": float(cfg.c_override)}
    est = estimate_c(d + 1, n=30.0, replicas=8, seed=mix64(cfg.seed, 0xC0FFEE))
    return est.mean, {"provenance": "estimated", "value": est.mean,
                      "stderr": est.stderr, "n": est.n, "replicas": est.replicas}


def _macro_profile(cfg: ExperimentConfig):
    rho = np.asarray(cfg.rho, dtype=float)
    if cfg.profile == "flat":
        return FlatMacro(rho)
    lam = np.asarray(cfg.lam, dtype=float)
    if cfg.profile == "shock":
        return ShockMacro(lam, rho)
    if cfg.profile == "rarefaction":
        return RarefactionMacro(lam, rho)
    raise ConfigError(f"unsupported macroscopic profile {cfg.profile!r}")


# ---------------------------------------------------------------------------
# individual experiments; each returns (aggregate_header, aggregate_rows,
# replica_files: {name: (header, rows)}, manifest_extra)


def _run_estimate_c(cfg: ExperimentConfig):
    nu = cfg.nu or cfg.d + 1
    b = np.asarray(cfg.b_aspect, dtype=float) if cfg.b_aspect else None
    rows = []
    for n in cfg.n_list:
        est = estimate_c(nu, float(n), b=b, replicas=cfg.replicas, seed=cfg.seed)
        ref = 2.0 if nu == 2 else float("nan")
        rows.append([nu, float(n), float(np.prod(est.b)), est.replicas,
                     est.mean, est.stderr, cfg.seed, est.rng_id, ref,
                     est.mean - ref if nu == 2 else float("nan")])
    header = ["nu", "n", "b_product", "replicas", "mean", "stderr", "seed",
              "rng_id", "ref", "error"]
    return header, rows, {}, {}


def _scaled_queries(cfg: ExperimentConfig, n: float, t: float):
    d = cfg.d
    lo = np.asarray(cfg.grid_lo if cfg.grid_lo else [0.1] * d, dtype=float)
    hi = np.asarray(cfg.grid_hi if cfg.grid_hi else [2.0] * d, dtype=float)
    cells = np.asarray(cfg.grid_cells if cfg.grid_cells
                       else [50 if d == 1 else 10] * d, dtype=int)
    grid = GridSpec(lo, hi, cells)
    return grid, [(n * c, n * t) for c in grid.centers()]


def _run_wedge_shape(cfg: ExperimentConfig):
    d = cfg.d
    c, c_meta = _chain_constant(cfg, d)
    n = float(cfg.n_list[0])
    t = float(cfg.t_list[0])
    grid, queries = _scaled_queries(cfg, n, t)
    centers = grid.centers()
    preds = np.array([t * shape_g(x / t, c) for x in centers])
    profile = WedgeProfile(np.zeros(d))
    hi_sp = np.max([q[0] for q in queries], axis=0)

    def one(r):
        cloud = sample((np.append(np.zeros(d), 0.0), np.append(hi_sp, n * t)),
                       cfg.rate, mix64(cfg.seed, r))
        ev = evaluate_lpp(profile, cloud, queries, (corner_at(np.zeros(d)), hi_sp))
        return ev.values / n

    vals = np.array(_map_replicas(one, cfg.replicas))
    header = [f"x{i}" for i in range(d)] + ["t", "pred", "mean_value",
                                            "mean_error", "max_abs_error"]
    rows = []
    for i, x in enumerate(centers):
        col = vals[:, i]
        rows.append(list(map(float, x)) + [t, float(preds[i]),
                                           float(col.mean()),
                                           float((col - preds[i]).mean()),
                                           float(np.abs(col - preds[i]).max())])
    reps = {}
    for r in range(cfg.replicas):
        rrows = [list(map(float, centers[i])) + [t, float(vals[r, i])]
                 for i in range(len(centers))]
        reps[f"replica-{r:03d}.csv"] = ([f"x{i}" for i in range(d)]
                                        + ["t", "value"], rrows)
    per_rep_max = np.abs(vals - preds).max(axis=1)
    extra = {"c": c_meta, "max_abs_error_per_replica": per_rep_max.tolist()}
    return header, rows, reps, extra


def _run_hydro_profile(cfg: ExperimentConfig):
    d = cfg.d
    c, c_meta = _chain_constant(cfg, d)
    n = float(cfg.n_list[0])
    t = float(cfg.t_list[0])
    macro = _macro_profile(cfg)
    grid, queries = _scaled_queries(cfg, n, t)
    centers = grid.centers()
    preds = np.array([closed_form_u(macro, x, t, c)[0] for x in centers])
    profile = RoundedMacroProfile(macro, n)
    hi_sp = np.max([q[0] for q in queries], axis=0)
    lo_sp = n * (np.min(centers, axis=0) - _drift_reach(cfg, c, d, t))

    def one(r):
        cloud = sample((np.append(lo_sp - n * 0.5, 0.0),
                        np.append(hi_sp, n * t)), cfg.rate, mix64(cfg.seed, r))
        ev = validated_heights(profile, cloud, queries,
                               (corner_at(lo_sp), hi_sp))
        return ev.values / n

    vals = np.array(_map_replicas(one, cfg.replicas))
    header = [f"x{i}" for i in range(d)] + ["t", "u_pred", "mean_value",
                                            "mean_error", "max_abs_error"]
    rows = []
    for i, x in enumerate(centers):
        col = vals[:, i]
        rows.append(list(map(float, x)) + [t, float(preds[i]),
                                           float(col.mean()),
                                           float((col - preds[i]).mean()),
                                           float(np.abs(col - preds[i]).max())])
    reps = {}
    for r in range(cfg.replicas):
        rrows = [list(map(float, centers[i])) + [t, float(vals[r, i])]
                 for i in range(len(centers))]
        reps[f"replica-{r:03d}.csv"] = ([f"x{i}" for i in range(d)]
                                        + ["t", "value"], rrows)
    extra = {"c": c_meta,
             "max_abs_error_per_replica": np.abs(vals - preds).max(axis=1).tolist()}
    return header, rows, reps, extra


def _run_generator_check(cfg: ExperimentConfig):
    d = cfg.d
    x0 = np.asarray(cfg.x0 if cfg.x0 else [1.0] * d, dtype=float)
    t = float(cfg.t_list[0])
    profile = WedgeProfile(np.zeros(d))
    window = (np.zeros(d), x0)
    vol = float(np.prod(x0))
    p_exact = 1.0 - math.exp(-vol * t)

    def one(r):
        cloud = sample((np.append(np.zeros(d), 0.0), np.append(x0, t)),
                       1.0, mix64(cfg.seed, r))
        snaps = simulate_event_driven(profile, cloud, window, t)
        fld = final_field(snaps)
        hit = fld.value_at(x0) >= cfg.k
        integ = generator_path_integral(snaps, x0, cfg.k, t)
        return float(hit), integ

    res = np.array(_map_replicas(one, cfg.replicas))
    p_emp = float(res[:, 0].mean())
    integ_mean = float(res[:, 1].mean())
    integ_se = float(res[:, 1].std(ddof=1) / math.sqrt(cfg.replicas))
    binom_se = math.sqrt(p_exact * (1 - p_exact) / cfg.replicas)
    header = ["replicas", "t", "k", "p_empirical", "p_exact", "binom_se",
              "generator_integral_mean", "generator_integral_se", "error"]
    rows = [[cfg.replicas, t, cfg.k, p_emp, p_exact, binom_se, integ_mean,
             integ_se, p_emp - p_exact]]
    return header, rows, {}, {"x0": x0.tolist(), "volume": vol}


def _drift_reach(cfg: ExperimentConfig, c: float, d: int, t: float) -> float:
    """How far below a query the Hopf-Lax maximizer can sit: the drift
    |t * grad f| at the flattest slope, plus a fluctuation margin."""
    slopes = [np.asarray(cfg.rho, dtype=float)] if cfg.rho else [np.ones(d)]
    if cfg.lam is not None:
        slopes.append(np.asarray(cfg.lam, dtype=float))
    s_min = min(float(np.min(s)) for s in slopes)
    kappa = (c / (d + 1)) ** (d + 1)
    # the 1.5*t margin keeps the quadratic loss at the box edge several
    # fluctuation sigmas deep, so the doubling check passes w.h.p.
    return t * kappa / s_min ** (d + 1) + 1.5 * t


def _b_region(cfg: ExperimentConfig, grid: GridSpec) -> GridRegion:
    normal = np.asarray(cfg.b_normal, dtype=float)
    return region_from_predicate(grid, lambda x: float(x @ normal) >= cfg.b_offset)


def _run_defect(cfg: ExperimentConfig):
    d = cfg.d
    c, c_meta = _chain_constant(cfg, d)
    n = float(cfg.n_list[0])
    t = float(cfg.t_list[0])
    macro = _macro_profile(cfg)
    lo = np.asarray(cfg.grid_lo if cfg.grid_lo else [-0.5] * d, dtype=float)
    hi = np.asarray(cfg.grid_hi if cfg.grid_hi else [2.0] * d, dtype=float)
    cells = np.asarray(cfg.grid_cells if cfg.grid_cells
                       else [40 if d == 1 else 16] * d, dtype=int)
    macro_grid = GridSpec(lo, hi, cells)
    # compute X on an enlarged fine grid (so maximizers near the window
    # edge stay inside the B indicator and the thin interface set is not
    # quantized at the evaluation resolution), then mark the evaluation
    # cells that meet it
    h_cell = macro_grid.cell_size
    reach = _drift_reach(cfg, c, d, t)
    pad_cells = np.ceil(reach / h_cell).astype(int) + 1
    refine = 4
    fine_grid = GridSpec(lo - pad_cells * h_cell, hi + pad_cells * h_cell,
                         (cells + 2 * pad_cells) * refine)
    x_fine = interface_X(macro, _b_region(cfg, fine_grid), t, c, fine_grid)
    members = np.zeros(tuple(cells), dtype=bool)
    for center in x_fine.member_centers():
        idx = macro_grid.cell_index(center)
        if idx is not None:
            members[idx] = True
    x_region = GridRegion(macro_grid, members)

    micro_grid = GridSpec(n * lo, n * hi, cells)
    search_lo = n * (lo - _drift_reach(cfg, c, d, t))
    normal = np.asarray(cfg.b_normal, dtype=float)
    if cfg.init_fields == "rounded":
        profile = RoundedMacroProfile(macro, n)
        # A(0) must cover the search region so the indicator clamps correctly
        a_grid = GridSpec(search_lo - n * 0.5, n * hi + n * 0.1,
                          np.maximum(cells * 2, 8))
        a0 = region_from_predicate(
            a_grid, lambda y: float(y @ normal) >= n * cfg.b_offset)
        state_for = lambda r: CoupledState(profile, a0, cfg.h)  # noqa: E731
    else:
        # random initial pair from the particle-system factory; the window
        # must cover the search region so the truncated staircases stay
        # wedge-class relative to the search box
        if d != 2 or cfg.profile != "shock" or cfg.h != 1:
            raise ConfigError("init_fields='hammersley' supports the d=2 "
                              "shock profile with h=1")
        window = (tuple(search_lo - n * 0.5), tuple(n * hi + n * 0.1))

        def state_for(r):
            s0, z0, a0 = build_coupled_shock_pair(
                np.asarray(cfg.lam, float), np.asarray(cfg.rho, float),
                window, mix64(cfg.seed ^ 0xF1E1D5, r))
            return CoupledState(s0, a0, 1, zeta_profile=z0)

    def one(r):
        state = state_for(r)
        cloud = sample((np.append(search_lo - n * 0.5, 0.0),
                        np.append(n * hi, n * t)), cfg.rate, mix64(cfg.seed, r))
        snap = couple_evolve(state, cloud, micro_grid, n * t,
                             (corner_at(search_lo), n * hi))
        if r == 0:
            # post-hoc doubling check of the configured search corner: the
            # widened box must reproduce the same snapshot exactly
            wide = couple_evolve(state, cloud, micro_grid, n * t,
                                 (corner_at(cloud.lo[:-1]), n * hi))
            if not (np.array_equal(wide.sigma, snap.sigma)
                    and np.array_equal(wide.zeta, snap.zeta)):
                raise ValidationError(
                    "defect search box too small: heights changed when the "
                    "box was widened")
        emp_bd = GridRegion(macro_grid, snap.boundary.membership)
        gap = inclusion_gap(emp_bd, x_region)
        if d == 1:
            in_cells = macro_grid.centers()[snap.inA.ravel()]
            # report the lower cell edge: the defect set is an interval
            # [X, inf) and the first member cell starts at its edge
            h_cell = float(macro_grid.cell_size[0])
            bd_loc = (float(in_cells.min()) - 0.5 * h_cell
                      if len(in_cells) else float("nan"))
        else:
            bd_loc = float("nan")
        return snap, gap, bd_loc

    results = _map_replicas(one, cfg.replicas)
    header = ["replica", "gap_to_X", "boundary_location", "n", "t", "h", "c"]
    rows = [[r, float(g), float(b), n, t, cfg.h, c]
            for r, (_, g, b) in enumerate(results)]
    reps = {}
    for r, (snap, _, _) in enumerate(results):
        d_ = snap.grid.dim
        rrows = []
        bd = snap.boundary.membership
        for idx in np.ndindex(*snap.inA.shape):
            rrows.append([snap.t] + list(idx)
                         + [float(snap.sigma[idx]), float(snap.zeta[idx]),
                            int(snap.inA[idx]), int(bd[idx])])
        reps[f"replica-{r:03d}.csv"] = (
            ["t"] + [f"i{k}" for k in range(d_)] + ["sigma", "zeta", "inA", "bd"],
            rrows)
    extra = {"c": c_meta, "X_cells": int(x_region.membership.sum()),
             "predicted_region_grid": macro_grid.to_json()}
    return header, rows, reps, extra, x_region


def _run_hammersley_flux(cfg: ExperimentConfig):
    mu, tau, T = cfg.mu, cfg.tau, cfg.horizon
    pad = padding_for(mu, tau, T)

    def one(r):
        init = equilibrium_init(mu, (-pad - 20.0, pad), mix64(cfg.seed, r))
        traj = simulate(init, tau, T, mix64(cfg.seed ^ 0x5EED, r))
        fl = flux_past(traj, 0.0, T)
        samples = []
        for y in (-15.0, -5.0, 5.0, 15.0):
            for tt in (0.25 * T, 0.5 * T, T):
                samples.append(traj.count(y, tt) - traj.count(0.0, 0.0))
        return fl, samples

    res = _map_replicas(one, cfg.replicas)
    fluxes = np.array([r[0] for r in res], dtype=float)
    samp = np.array([r[1] for r in res], dtype=float).mean(axis=0)
    ys, ts = [], []
    for y in (-15.0, -5.0, 5.0, 15.0):
        for tt in (0.25 * T, 0.5 * T, T):
            ys.append(y)
            ts.append(tt)
    A = np.column_stack([ys, ts, np.ones(len(ys))])
    slope_y, slope_t, _ = np.linalg.lstsq(A, samp, rcond=None)[0]
    header = ["replicas", "mu", "tau", "T", "flux_mean", "flux_var",
              "flux_pred", "flux_error", "slope_y", "slope_y_pred",
              "slope_t", "slope_t_pred", "slope_error"]
    pred = tau / mu * T
    rows = [[cfg.replicas, mu, tau, T, float(fluxes.mean()),
             float(fluxes.var(ddof=1)), pred, float(fluxes.mean() - pred),
             float(slope_y), mu, float(slope_t), tau / mu,
             float(max(abs(slope_y - mu), abs(slope_t - tau / mu)))]]
    return header, rows, {}, {}


def _run_oracle_xcheck(cfg: ExperimentConfig):
    d = cfg.d
    rows = []
    mismatches = 0
    for r in range(cfg.replicas):
        wedge = WedgeProfile(np.zeros(d))
        flat = RoundedMacroProfile(FlatMacro(np.ones(d)), 5.0)
        hi = 1.5 * np.ones(d)
        t_hi = 1.0
        rate = cfg.points_budget / (1.5 ** d * t_hi * 2.5)
        cloud_w = sample((np.append(np.zeros(d), 0.0), np.append(hi, t_hi)),
                         rate, mix64(cfg.seed, 2 * r))
        cloud_f = sample((np.append(-hi, 0.0), np.append(hi, t_hi)),
                         rate, mix64(cfg.seed, 2 * r + 1))
        qs = [(hi, t_hi), (hi * 0.7, t_hi * 0.6)]
        box_w = (corner_at(np.zeros(d)), hi)
        box_f = (corner_at(-hi), hi)
        a = evaluate_lpp(wedge, cloud_w, qs, box_w)
        b = evaluate_oracle(wedge, cloud_w, qs, box_w)
        ok_wedge = bool(np.array_equal(a.values, b.values))
        snaps = simulate_event_driven(wedge, cloud_w, (np.zeros(d), hi), t_hi)
        ok_event = True
        for (qx, qt), v in zip(qs, a.values):
            fld = [f for s, f in snaps if s <= qt][-1]
            ok_event = ok_event and fld.value_at(qx) == v
        af = evaluate_lpp(flat, cloud_f, qs, box_f)
        bf = evaluate_oracle(flat, cloud_f, qs, box_f)
        ok_flat = bool(np.array_equal(af.values, bf.values))
        mismatches += (not ok_wedge) + (not ok_flat) + (not ok_event)
        rows.append([r, cloud_w.n, cloud_f.n, int(ok_wedge), int(ok_flat),
                     int(ok_event)])
    header = ["replica", "wedge_points", "flat_points", "lpp_eq_oracle_wedge",
              "lpp_eq_oracle_flat", "event_eq_lpp_wedge"]
    if mismatches:
        raise ValidationError(f"{mismatches} evaluator cross-check failures")
    return header, rows, {}, {}


def run_experiment(cfg: ExperimentConfig) -> Path:
    """Run one experiment, writing artifacts under
    out_dir/{experiment}/{seed}/ and returning that directory."""
    cfg.validate()
    mhash = config_hash(cfg)
    t0 = time.time()
    x_region = None
    if cfg.experiment == "estimate-c":
        header, rows, reps, extra = _run_estimate_c(cfg)
    elif cfg.experiment == "wedge-shape":
        header, rows, reps, extra = _run_wedge_shape(cfg)
    elif cfg.experiment == "hydro-profile":
        header, rows, reps, extra = _run_hydro_profile(cfg)
    elif cfg.experiment == "generator-check":
        header, rows, reps, extra = _run_generator_check(cfg)
    elif cfg.experiment == "defect":
        header, rows, reps, extra, x_region = _run_defect(cfg)
    elif cfg.experiment == "hammersley-flux":
        header, rows, reps, extra = _run_hammersley_flux(cfg)
    else:
        header, rows, reps, extra = _run_oracle_xcheck(cfg)

    out = Path(cfg.out_dir) / cfg.experiment / str(cfg.seed)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "aggregate.csv", header, rows, mhash)
    for name, (rh, rrows) in reps.items():
        _write_csv(out / name, rh, rrows, mhash)
    if x_region is not None:
        save_region(x_region, out / "predicted_X.csv")
    manifest = {
        "config": cfg.to_json(),
        "manifest_hash": mhash,
        "rng_id": RNG_ID,
        "wall_time_s": time.time() - t0,
        **extra,
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return out
