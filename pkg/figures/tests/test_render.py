from pathlib import Path

import pytest

from pgfig import FigureError, FigureJob, render

FIXTURES = Path(__file__).parent / "fixtures"


def test_convergence_renders_from_golden_csv(tmp_path):
    job = FigureJob("convergence", [FIXTURES / "estimate_c.csv"],
                    tmp_path / "conv.png")
    summary = render(job)
    assert summary["kind"] == "convergence"
    assert (tmp_path / "conv.png").stat().st_size > 0


def test_heatmap_renders_from_golden_csv(tmp_path):
    job = FigureJob("heatmap", [FIXTURES / "heights_2d.csv"],
                    tmp_path / "heat.png")
    summary = render(job)
    assert summary["cells"] == 100
    assert (tmp_path / "heat.png").stat().st_size > 0


def test_defect_overlay_annotation_equals_fixture_gap(tmp_path):
    job = FigureJob("defect-overlay",
                    [FIXTURES / "replica-000.csv", FIXTURES / "predicted_X.csv",
                     FIXTURES / "aggregate.csv"],
                    tmp_path / "overlay.png")
    summary = render(job)
    # the precomputed gap for replica 0, straight from the aggregate CSV
    with open(FIXTURES / "aggregate.csv") as fh:
        fh.readline()  # manifest
        header = fh.readline().strip().split(",")
        row = fh.readline().strip().split(",")
    expected = float(row[header.index("gap_to_X")])
    assert summary["gap"] == expected
    assert f"{expected:g}" in summary["annotation"]
    assert (tmp_path / "overlay.png").stat().st_size > 0


def test_rendering_is_deterministic(tmp_path):
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    render(FigureJob("convergence", [FIXTURES / "estimate_c.csv"], a))
    render(FigureJob("convergence", [FIXTURES / "estimate_c.csv"], b))
    assert a.read_bytes() == b.read_bytes()


def test_empty_csv_errors_and_writes_nothing(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("# manifest=abc\nnu,n,mean,stderr\n")
    out = tmp_path / "fig.png"
    with pytest.raises(FigureError, match="no data rows"):
        render(FigureJob("convergence", [empty], out))
    assert not out.exists()


def test_missing_columns_error_lists_expectations(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("# manifest=abc\nfoo,bar\n1,2\n")
    with pytest.raises(FigureError, match="missing columns.*mean"):
        render(FigureJob("convergence", [bad], tmp_path / "fig.png"))


def test_mixed_manifest_inputs_are_refused(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    a.write_text("# manifest=aaa\nnu,n,mean,stderr\n2,10.0,1.9,0.01\n")
    b.write_text("# manifest=bbb\nnu,n,mean,stderr\n2,20.0,1.95,0.01\n")
    with pytest.raises(FigureError, match="provenance"):
        render(FigureJob("convergence", [a, b], tmp_path / "fig.png"))


def test_unknown_kind_and_missing_input_are_errors(tmp_path):
    with pytest.raises(FigureError, match="unknown figure kind"):
        FigureJob("sparkline", [FIXTURES / "estimate_c.csv"], tmp_path / "x.png")
    with pytest.raises(FigureError, match="does not exist"):
        FigureJob("heatmap", [tmp_path / "nope.csv"], tmp_path / "x.png")


def test_cli_end_to_end(tmp_path):
    from pgfig.cli import main

    out = tmp_path / "cli.png"
    rc = main(["convergence", "--in", str(FIXTURES / "estimate_c.csv"),
               "--out", str(out)])
    assert rc == 0 and out.exists()
    rc = main(["heatmap", "--in", str(tmp_path / "missing.csv"),
               "--out", str(tmp_path / "y.png")])
    assert rc == 1
