"""Heights of random partial orders: longest strictly increasing chains
among Poisson points, Monte Carlo estimation of the chain constants, and
the analytic first-moment tail bound."""

from __future__ import annotations

import csv
import math
from bisect import bisect_left
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .core import TaggedCorner, as_point, at
from .poisson import PointCloud, mix64, sample


def _lis_strict(values: np.ndarray) -> int:
    """Length of the longest strictly increasing subsequence (patience)."""
    tails: list[float] = []
    for v in values:
        i = bisect_left(tails, v)
        if i == len(tails):
            tails.append(v)
        else:
            tails[i] = v
    return len(tails)


def longest_chain(points, dim: int | None = None) -> int:
    """Maximal number of points on a strictly increasing chain
    p1 < p2 < ... < pm under the coordinatewise order.

    Two dimensions reduce to a longest-increasing-subsequence after
    sorting by the first coordinate; three or more use the O(n^2)
    dominance dynamic program.  Coordinates are assumed pairwise
    distinct within each axis.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        return 0
    pts = np.atleast_2d(pts)
    nu = pts.shape[1]
    if dim is not None and nu != dim:
        raise ValueError(f"dimension mismatch: points have {nu}, expected {dim}")
    if nu == 1:
        return pts.shape[0]
    order = np.argsort(pts[:, 0])
    pts = pts[order]
    if nu == 2:
        return _lis_strict(pts[:, 1])
    return int(_kernels.chain_dp(np.ascontiguousarray(pts)))


def chain_height(cloud: PointCloud, lower: TaggedCorner, upper) -> int:
    """Height of the random order in the space-time box between a tagged
    lower corner and a closed upper corner (x, t).

    `upper` is (space_point, time).  Filtering is tag-exact: a BEFORE
    coordinate admits points equal to its value, an AT coordinate does
    not.  The lower time tag defaults to (0, AT), matching boxes that
    are open at time zero.
    """
    x, t = upper
    x = as_point(x)
    d = x.shape[0]
    if lower.dim != d:
        raise ValueError("lower corner and upper point disagree in dimension")
    if cloud.dim != d + 1:
        raise ValueError("cloud must be a space-time cloud of dimension d+1")
    if cloud.n == 0:
        return 0
    space = cloud.points[:, :d]
    times = cloud.points[:, d]
    t_lo = lower.time if lower.time is not None else at(0.0)
    mask = lower.admits(space)
    mask &= np.all(space <= x, axis=1)
    mask &= np.array([t_lo.exceeded_by(v) for v in times])
    mask &= times <= t
    if not mask.any():
        return 0
    return longest_chain(cloud.points[mask])


@dataclass(frozen=True)
class ChainEstimate:
    """Monte Carlo estimate of n^-1 H(0, n*b) over independent replicas."""

    dim: int
    n: float
    b: np.ndarray
    replicas: int
    mean: float
    stderr: float
    seed: int
    rng_id: str


def estimate_c(dim: int, n: float, b=None, replicas: int = 20,
               seed: int = 0) -> ChainEstimate:
    """Estimate the chain constant by averaging n^-1 H(0, n*b) over
    independent replicas.

    With b = 1 this estimates c_nu directly; a general positive aspect b
    estimates c_nu * (b_1...b_nu)^(1/nu) by the scaling of the Poisson
    process.  Replica r draws its cloud from the substream mix64(seed, r).
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if replicas < 1:
        raise ValueError("need at least one replica")
    bvec = np.ones(dim) if b is None else as_point(b, dim=dim)
    if np.any(bvec <= 0):
        raise ValueError("aspect vector must be positive coordinatewise")
    zeros = np.zeros(dim)
    vals = np.empty(replicas, dtype=np.float64)
    for r in range(replicas):
        cloud = sample((zeros, n * bvec), 1.0, mix64(seed, r))
        vals[r] = longest_chain(cloud.points) / n
    mean = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(replicas)) if replicas > 1 else 0.0
    return ChainEstimate(dim, float(n), bvec, replicas, mean, stderr,
                         int(seed), cloud.rng_id)


def tail_bound(gamma: float, k: int, dim: int) -> float:
    """First-moment bound min(1, gamma^k / (k!)^nu) on P{H >= k} for the
    height of the random order in a box of volume gamma."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if k < 1:
        raise ValueError("k must be a positive integer")
    log_val = k * math.log(gamma) - dim * math.lgamma(k + 1)
    if log_val >= 0:
        return 1.0
    return math.exp(log_val)


def append_estimate(est: ChainEstimate, csv_path: str | Path) -> None:
    """Append a chain-constant estimate row, writing the header when new."""
    csv_path = Path(csv_path)
    new = not csv_path.exists()
    with open(csv_path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if new:
            writer.writerow(["nu", "n", "b_product", "replicas", "mean",
                             "stderr", "seed", "rng_id"])
        writer.writerow([est.dim, repr(est.n), repr(float(np.prod(est.b))),
                         est.replicas, repr(est.mean), repr(est.stderr),
                         est.seed, est.rng_id])
