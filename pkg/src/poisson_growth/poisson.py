"""Reproducible sampling of homogeneous Poisson point processes in boxes.

Every sample is fully determined by (seed, rng-id, box, rate).  Substreams
for replicas are derived with a splitmix64-style mixer so replica r of an
experiment is independent of r' and insensitive to execution order.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import as_point

RNG_ID = "pcg64-splitmix64-v1"

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_RESAMPLE_TWEAK = 0xA5A5A5A5A5A5A5A5


def mix64(seed: int, k: int) -> int:
    """splitmix64 finalizer applied to seed + (k+1)*golden; the documented
    substream derivation for replica k of a seeded experiment."""
    z = (int(seed) + (int(k) + 1) * _GOLDEN) & _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


@dataclass(frozen=True)
class PointCloud:
    """A seeded Poisson sample in the half-open box (lo, hi].

    For space-time clouds the last coordinate is time.
    """

    dim: int
    points: np.ndarray = field(repr=False)  # (n, dim)
    lo: np.ndarray
    hi: np.ndarray
    rate: float
    seed: int
    rng_id: str = RNG_ID

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def restricted(self, lo, hi) -> "PointCloud":
        """Points falling in the half-open sub-box (lo, hi]."""
        lo = as_point(lo, dim=self.dim)
        hi = as_point(hi, dim=self.dim)
        if self.n == 0:
            pts = self.points
        else:
            mask = np.all((self.points > lo) & (self.points <= hi), axis=1)
            pts = self.points[mask]
        return PointCloud(self.dim, pts, lo, hi, self.rate, self.seed, self.rng_id)


def _distinct_per_axis(points: np.ndarray) -> bool:
    for ax in range(points.shape[1]):
        if np.unique(points[:, ax]).size != points.shape[0]:
            return False
    return True


def sample(box: tuple, rate: float, seed: int) -> PointCloud:
    """Sample a rate-`rate` homogeneous Poisson process in the half-open
    box (lo, hi].

    The count is Poisson(rate * volume) and coordinates are i.i.d.
    uniform per axis, drawn as hi - u*(hi-lo) with u in [0,1) so points
    land exactly in the half-open box.  A zero-volume box yields an empty
    cloud.  Coordinate collisions within an axis (vanishingly rare in
    double precision) trigger a full deterministic resample.
    """
    lo = as_point(box[0])
    hi = as_point(box[1], dim=lo.shape[0])
    if np.any(hi < lo):
        raise ValueError("box upper corner must dominate the lower corner")
    if rate <= 0:
        raise ValueError(f"rate must be positive, got {rate}")
    dim = lo.shape[0]
    volume = float(np.prod(hi - lo))
    if volume == 0.0:
        return PointCloud(dim, np.empty((0, dim)), lo, hi, float(rate), int(seed))

    attempt_seed = int(seed)
    for _ in range(8):
        rng = np.random.Generator(np.random.PCG64(attempt_seed))
        n = int(rng.poisson(rate * volume))
        pts = hi - rng.random((n, dim)) * (hi - lo)
        if _distinct_per_axis(pts):
            return PointCloud(dim, pts, lo, hi, float(rate), int(seed))
        attempt_seed = mix64(attempt_seed ^ _RESAMPLE_TWEAK, 0)
    raise RuntimeError("could not draw an axis-distinct cloud (broken RNG?)")


def save_cloud(cloud: PointCloud, csv_path: str | Path,
               sidecar_path: str | Path | None = None) -> None:
    """CSV x0,...,x{d-1}, one point per row, with a JSON sidecar."""
    csv_path = Path(csv_path)
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i}" for i in range(cloud.dim)])
        for row in cloud.points:
            writer.writerow([repr(float(v)) for v in row])
    sidecar = Path(sidecar_path) if sidecar_path else csv_path.with_suffix(".json")
    meta = {
        "box": {"lo": cloud.lo.tolist(), "hi": cloud.hi.tolist()},
        "rate": cloud.rate,
        "seed": cloud.seed,
        "rng_id": cloud.rng_id,
    }
    with open(sidecar, "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def load_cloud(csv_path: str | Path,
               sidecar_path: str | Path | None = None) -> PointCloud:
    csv_path = Path(csv_path)
    sidecar = Path(sidecar_path) if sidecar_path else csv_path.with_suffix(".json")
    with open(sidecar) as fh:
        meta = json.load(fh)
    rows = []
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        for row in reader:
            rows.append([float(v) for v in row])
    dim = len(header)
    pts = np.array(rows, dtype=np.float64).reshape(len(rows), dim)
    return PointCloud(dim, pts, np.array(meta["box"]["lo"]),
                      np.array(meta["box"]["hi"]), meta["rate"],
                      meta["seed"], meta["rng_id"])
