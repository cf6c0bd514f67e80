"""Figure jobs over the documented experiment CSV formats.

Inputs are the artifacts the experiment runner writes: CSVs whose first
line carries `# manifest=<hash>`, plus the plain grid-region CSV with its
JSON sidecar.  Nothing here imports the simulation package; the CSV
contract is the whole interface.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

KINDS = ("convergence", "heatmap", "defect-overlay")


class FigureError(ValueError):
    """Bad inputs: unknown kind, empty data, missing columns, mixed runs."""


@dataclass
class Table:
    path: Path
    manifest: str | None
    header: list[str]
    rows: list[list[str]]

    def column(self, name: str) -> list[str]:
        idx = self.header.index(name)
        return [r[idx] for r in self.rows]

    def floats(self, name: str) -> list[float]:
        return [float(v) for v in self.column(name)]

    def require(self, columns: list[str]) -> None:
        missing = [c for c in columns if c not in self.header]
        if missing:
            raise FigureError(
                f"{self.path} is missing columns {missing}; expected at "
                f"least {columns}, found {self.header}")


def read_table(path: str | Path) -> Table:
    path = Path(path)
    manifest = None
    with open(path, newline="") as fh:
        first = fh.readline()
        if first.startswith("# manifest="):
            manifest = first.strip().split("=", 1)[1]
            header_line = fh.readline()
        else:
            header_line = first
        header = header_line.strip().split(",") if header_line.strip() else []
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if not header or not rows:
        raise FigureError(f"{path} has no data rows; refusing to render")
    return Table(path, manifest, header, rows)


def check_same_manifest(tables: list[Table]) -> None:
    hashes = {t.manifest for t in tables if t.manifest is not None}
    if len(hashes) > 1:
        raise FigureError(
            f"inputs come from different runs (manifest hashes {sorted(hashes)}); "
            "refusing to mix provenance")


def read_grid_sidecar(csv_path: str | Path) -> dict:
    sidecar = Path(csv_path).with_suffix(".json")
    if not sidecar.exists():
        raise FigureError(f"region sidecar {sidecar} not found")
    with open(sidecar) as fh:
        return json.load(fh)


@dataclass
class FigureJob:
    """One rendering request: input CSVs, figure kind, output path."""

    kind: str
    inputs: list[Path]
    output: Path
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FigureError(f"unknown figure kind {self.kind!r}; "
                              f"choose one of {', '.join(KINDS)}")
        self.inputs = [Path(p) for p in self.inputs]
        self.output = Path(self.output)
        if not self.inputs:
            raise FigureError("a figure job needs at least one input CSV")
        for p in self.inputs:
            if not p.exists():
                raise FigureError(f"input {p} does not exist")
