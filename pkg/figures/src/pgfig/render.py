"""Renderers for the three figure kinds.

All rendering is read-only over the inputs and deterministic: fixed
styling, the Agg backend, and no timestamps, so identical inputs yield
identical image bytes.
"""

from __future__ import annotations

import re
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .jobs import FigureError, FigureJob, Table, check_same_manifest, \
    read_grid_sidecar, read_table

_DPI = 120


def _new_axes(style: dict):
    fig, ax = plt.subplots(figsize=style.get("figsize", (6.0, 4.0)))
    return fig, ax


def _save(fig, output: Path) -> None:
    output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output, dpi=_DPI, metadata={"Software": "pgfig"})
    plt.close(fig)


def render_convergence(job: FigureJob) -> dict:
    """Chain-constant estimates against the box scale, with a stderr band
    and the exact planar reference line."""
    tables = [read_table(p) for p in job.inputs]
    check_same_manifest(tables)
    fig, ax = _new_axes(job.style)
    reference_drawn = False
    for t in tables:
        t.require(["nu", "n", "mean", "stderr"])
        n = np.array(t.floats("n"))
        mean = np.array(t.floats("mean"))
        se = np.array(t.floats("stderr"))
        order = np.argsort(n)
        n, mean, se = n[order], mean[order], se[order]
        nu = t.column("nu")[0]
        ax.plot(n, mean, marker="o", label=f"estimate (nu={nu})")
        ax.fill_between(n, mean - se, mean + se, alpha=0.25)
        if nu == "2" and not reference_drawn:
            ax.axhline(2.0, color="crimson", ls="--", lw=1.0,
                       label="exact planar constant 2")
            reference_drawn = True
    ax.set_xlabel("box scale n")
    ax.set_ylabel("n^-1 H(0, n*1)")
    ax.set_title("chain-constant convergence")
    ax.legend(loc="lower right")
    _save(fig, job.output)
    return {"kind": "convergence", "series": len(tables)}


def render_heatmap(job: FigureJob) -> dict:
    """Height field over a two-dimensional query grid."""
    t = read_table(job.inputs[0])
    t.require(["x0", "x1", "value"])
    x0 = np.array(t.floats("x0"))
    x1 = np.array(t.floats("x1"))
    val = np.array(t.floats("value"))
    u0 = np.unique(x0)
    u1 = np.unique(x1)
    grid = np.full((len(u0), len(u1)), np.nan)
    i0 = np.searchsorted(u0, x0)
    i1 = np.searchsorted(u1, x1)
    grid[i0, i1] = val
    fig, ax = _new_axes(job.style)
    mesh = ax.pcolormesh(u1, u0, grid, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="height")
    ax.set_xlabel("x1")
    ax.set_ylabel("x0")
    ax.set_title("interface height field")
    _save(fig, job.output)
    return {"kind": "heatmap", "cells": int(val.size)}


def _replica_index(path: Path) -> int | None:
    m = re.search(r"replica-(\d+)", path.name)
    return int(m.group(1)) if m else None


def render_defect_overlay(job: FigureJob) -> dict:
    """Empirical defect-boundary cells over the predicted interface set.

    Inputs, in order: a defect replica CSV (t,i0,...,inA,bd), the
    predicted region CSV (i0,...,member) with its JSON grid sidecar, and
    the aggregate CSV whose gap_to_X column provides the legend
    annotation for this replica.
    """
    if len(job.inputs) < 3:
        raise FigureError("defect-overlay needs replica.csv, region.csv and "
                          "aggregate.csv, in that order")
    replica = read_table(job.inputs[0])
    region = read_table(job.inputs[1])
    aggregate = read_table(job.inputs[2])
    check_same_manifest([replica, aggregate])
    meta = read_grid_sidecar(job.inputs[1])
    lo = np.array(meta["lo"], dtype=float)
    hi = np.array(meta["hi"], dtype=float)
    cells = np.array(meta["cells_per_axis"], dtype=int)
    d = len(cells)
    replica.require([f"i{k}" for k in range(d)] + ["inA", "bd"])
    region.require([f"i{k}" for k in range(d)] + ["member"])
    aggregate.require(["replica", "gap_to_X"])
    h = (hi - lo) / cells

    idx = _replica_index(job.inputs[0])
    gaps = dict(zip(aggregate.column("replica"), aggregate.column("gap_to_X")))
    gap = gaps.get(str(idx)) if idx is not None else None
    if gap is None:
        raise FigureError(
            f"replica index {idx} from {job.inputs[0].name} not found in "
            f"{job.inputs[2]}")

    def centers(table: Table, flag: str) -> np.ndarray:
        keep = [r for r, v in enumerate(table.column(flag)) if v == "1"]
        out = np.empty((len(keep), d))
        for axis in range(d):
            col = table.floats(f"i{axis}")
            out[:, axis] = [lo[axis] + h[axis] * (col[r] + 0.5) for r in keep]
        return out

    bd_cells = centers(replica, "bd")
    in_cells = centers(replica, "inA")
    x_cells = centers(region, "member")

    fig, ax = _new_axes(job.style)
    gap_label = f"inclusion gap = {float(gap):g}"
    if d == 1:
        ax.scatter(in_cells[:, 0], np.zeros(len(in_cells)), marker="s", s=24,
                   color="#bbd5ee", label="defect cells")
        for x in x_cells[:, 0]:
            ax.axvspan(x - h[0] / 2, x + h[0] / 2, color="gold", alpha=0.5)
        ax.axvspan(np.nan, np.nan, color="gold", alpha=0.5,
                   label="predicted interface set")
        ax.scatter(bd_cells[:, 0], np.zeros(len(bd_cells)), marker="|", s=220,
                   color="firebrick", label=f"boundary ({gap_label})")
        ax.set_yticks([])
        ax.set_xlabel("x")
    else:
        ax.scatter(in_cells[:, 1], in_cells[:, 0], marker="s", s=18,
                   color="#bbd5ee", label="defect cells")
        ax.scatter(x_cells[:, 1], x_cells[:, 0], marker="s", s=26,
                   color="gold", label="predicted interface set")
        ax.scatter(bd_cells[:, 1], bd_cells[:, 0], marker="x", s=30,
                   color="firebrick", label=f"boundary ({gap_label})")
        ax.set_xlabel("x1")
        ax.set_ylabel("x0")
    ax.set_title("defect boundary vs predicted interface")
    ax.legend(loc="upper left", fontsize=8)
    _save(fig, job.output)
    return {"kind": "defect-overlay", "gap": float(gap),
            "annotation": gap_label}


def render(job: FigureJob) -> dict:
    """Dispatch a job; returns a small summary of what was drawn."""
    if job.kind == "convergence":
        return render_convergence(job)
    if job.kind == "heatmap":
        return render_heatmap(job)
    return render_defect_overlay(job)
