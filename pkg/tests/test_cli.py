"""Tests for the command-line interface."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from elasticgraph.cli import RunConfig, cli
from elasticgraph.matching import register_pair
from elasticgraph.storage import LocalStorage, load_graph, save_graph


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def files(tmp_path, path3, path4, triangle):
    data = tmp_path / "data"
    return {
        "path3": str(save_graph(path3, data / "path3.json")),
        "path4": str(save_graph(path4, data / "path4.json")),
        "triangle": str(save_graph(triangle, data / "triangle.json")),
    }


def run(runner, out, *args):
    return runner.invoke(cli, ["--samples", "10", "--out", str(out), *args])


def test_distance_to_self(runner, tmp_path, files):
    result = run(runner, tmp_path / "out", "distance", files["triangle"], files["triangle"])
    assert result.exit_code == 0, result.output
    assert float(result.output.strip().splitlines()[-1]) < 1e-6
    record = json.loads((tmp_path / "out" / "registration.json").read_text())
    assert sorted(record["permutation"]) == list(range(6))
    assert record["d_graph"] < 1e-6


def test_distance_overrides_are_recorded(runner, tmp_path, files):
    out = tmp_path / "out"
    result = run(runner, out, "--lambda", "0.3", "distance", files["path3"], files["triangle"])
    assert result.exit_code == 0, result.output
    config = RunConfig.load(out / "run_config.json")
    assert config.lam == 0.3
    assert config.n_samples == 10
    assert config.command == "distance"
    assert config.inputs == [files["path3"], files["triangle"]]

    reg = register_pair(load_graph(files["path3"]), load_graph(files["triangle"]), config.matching())
    assert result.output.strip().splitlines()[-1] == f"{reg.d_graph:.9f}"


def test_config_rerun_reproduces_registration(runner, tmp_path, files):
    first = tmp_path / "first"
    assert run(runner, first, "--seed", "4", "distance", files["path3"], files["triangle"]).exit_code == 0
    second = tmp_path / "second"
    result = runner.invoke(
        cli, ["--config", str(first / "run_config.json"), "--out", str(second),
              "distance", files["path3"], files["triangle"]],
    )
    assert result.exit_code == 0, result.output
    assert (first / "registration.json").read_bytes() == (second / "registration.json").read_bytes()
    assert RunConfig.load(second / "run_config.json").seed == 4


def test_missing_file_exits_2(runner, tmp_path, files):
    missing = str(tmp_path / "nope.json")
    result = run(runner, tmp_path / "out", "distance", files["path3"], missing)
    assert result.exit_code == 2
    assert "nope.json" in result.output


def test_bad_parameter_exits_2(runner, tmp_path, files):
    result = run(runner, tmp_path / "out", "--lambda", "1.5", "distance", files["path3"], files["path3"])
    assert result.exit_code == 2
    assert "lam" in result.output


def test_malformed_graph_exits_2(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    result = run(runner, tmp_path / "out", "distance", str(bad), str(bad))
    assert result.exit_code == 2
    assert "bad.json" in result.output


def test_geodesic_frames(runner, tmp_path, files):
    out = tmp_path / "out"
    result = run(runner, out, "geodesic", "--frames", "3", files["triangle"], files["triangle"])
    assert result.exit_code == 0, result.output
    frames = sorted((out / "frames").glob("frame_*.svg"))
    assert [f.name for f in frames] == ["frame_000.svg", "frame_001.svg", "frame_002.svg"]
    assert frames[0].read_bytes() == frames[1].read_bytes() == frames[2].read_bytes()


def test_geodesic_two_frames(runner, tmp_path, files):
    out = tmp_path / "out"
    result = run(runner, out, "geodesic", "--frames", "2", files["path3"], files["path4"])
    assert result.exit_code == 0, result.output
    assert len(list((out / "frames").glob("*.svg"))) == 2


def test_multiscale_levels(runner, tmp_path, files):
    out = tmp_path / "out"
    result = run(runner, out, "multiscale", "--levels", "0.5,1", files["path4"])
    assert result.exit_code == 0, result.output
    assert load_graph(out / "level_0.500.json").n_nodes == 2
    assert load_graph(out / "level_1.000.json").n_nodes == 4
    clusters = json.loads((out / "level_0.500_clusters.json").read_text())
    assert clusters["n_clusters"] == 2
    assert (out / "level_0.500.svg").exists()
    assert not (out / "report.html").exists()


def test_multiscale_target_selects_full_resolution(runner, tmp_path, files):
    out = tmp_path / "out"
    result = run(runner, out, "multiscale", "--levels", "0.5,1", "--target", files["path4"], files["path4"])
    assert result.exit_code == 0, result.output
    assert "Selected h* = 1 " in result.output
    rows = (out / "profile.csv").read_text().splitlines()
    assert rows[0] == "h,d_graph"
    assert len(rows) == 3
    assert "Plotly.newPlot" in (out / "report.html").read_text()


def test_mean_of_single_graph(runner, tmp_path, files):
    out = tmp_path / "out"
    result = run(runner, out, "mean", files["triangle"])
    assert result.exit_code == 0, result.output
    assert load_graph(out / "mean.json").allclose(load_graph(files["triangle"]))
    for name in ("mean.svg", "summary.md", "report.html"):
        assert (out / name).exists()


def test_pca_of_identical_graphs(runner, tmp_path, files):
    out = tmp_path / "out"
    result = run(runner, out, "pca", files["triangle"], files["triangle"])
    assert result.exit_code == 0, result.output
    assert json.loads((out / "tangent.json").read_text())["n_components"] == 0
    assert list(out.glob("pc_*.svg")) == []
    assert "no deformation grids" in (out / "summary.md").read_text()


def test_cluster_precomputed_matrix(runner, tmp_path):
    d = np.full((6, 6), 10.0)
    d[:3, :3] = d[3:, 3:] = 1.0
    np.fill_diagonal(d, 0.0)
    matrix = LocalStorage(tmp_path / "in").save_matrix(d, [f"g{i}" for i in range(6)], "distances.csv")
    out = tmp_path / "out"
    result = run(runner, out, "cluster", "--matrix", str(matrix))
    assert result.exit_code == 0, result.output
    clusters = json.loads((out / "clusters.json").read_text())
    assert clusters["k"] == 2
    assert clusters["graphs"] == [f"g{i}" for i in range(6)]
    assert len(set(clusters["labels"][:3])) == 1 and len(set(clusters["labels"][3:])) == 1
    assert (out / "heatmap.svg").read_text().count('fill="rgb(') == 36


def test_cluster_needs_input(runner, tmp_path):
    result = run(runner, tmp_path / "out", "cluster")
    assert result.exit_code == 2


def test_partition_path(runner, tmp_path, files):
    out = tmp_path / "out"
    result = run(runner, out, "partition", files["path4"])
    assert result.exit_code == 0, result.output
    parts = [load_graph(out / f"{name}.json") for name in ("part_a", "part_b")]
    assert sorted(p.n_nodes for p in parts) == [2, 2]
    assert (out / "part_a.svg").exists()


def test_bench(runner, tmp_path):
    out = tmp_path / "out"
    result = run(runner, out, "bench", "--sizes", "4", "--repeats", "1", "--affinity-samples", "6,12")
    assert result.exit_code == 0, result.output
    rows = (out / "timings.csv").read_text().splitlines()
    assert rows[0] == "n,seconds"
    assert rows[1].startswith("4,")
    rows = (out / "affinity.csv").read_text().splitlines()
    assert rows[0] == "samples,seconds"
    assert [r.split(",")[0] for r in rows[1:]] == ["6", "12"]


def test_validate_clean_graph(runner, files):
    result = runner.invoke(cli, ["validate", files["triangle"]])
    assert result.exit_code == 0
    assert "0 violation(s)" in result.output


def test_validate_reports_errors(runner, tmp_path):
    doc = {
        "nodes": [{"id": "a", "x": 0, "y": 0}],
        "edges": [{"u": "a", "v": "a", "points": [[0, 0], [1, 1], [0, 1], [0, 0]]}],
    }
    path = tmp_path / "loop.json"
    path.write_text(json.dumps(doc))
    result = runner.invoke(cli, ["validate", str(path)])
    assert result.exit_code == 1
    assert "[!!!]" in result.output


def replay(runner, first, out, *args):
    return runner.invoke(cli, ["--config", str(first / "run_config.json"), "--out", str(out), *args])


def test_geodesic_rerun_keeps_frame_count(runner, tmp_path, files):
    first, second = tmp_path / "first", tmp_path / "second"
    assert run(runner, first, "geodesic", "--frames", "3", files["path3"], files["path4"]).exit_code == 0
    result = replay(runner, first, second, "geodesic", files["path3"], files["path4"])
    assert result.exit_code == 0, result.output
    frames = sorted(f.name for f in (second / "frames").glob("*.svg"))
    assert frames == ["frame_000.svg", "frame_001.svg", "frame_002.svg"]
    for name in frames:
        assert (first / "frames" / name).read_bytes() == (second / "frames" / name).read_bytes()
    assert RunConfig.load(second / "run_config.json").options["frames"] == 3


def test_geodesic_flag_overrides_replayed_frames(runner, tmp_path, files):
    first, second = tmp_path / "first", tmp_path / "second"
    assert run(runner, first, "geodesic", "--frames", "3", files["path3"], files["path4"]).exit_code == 0
    result = replay(runner, first, second, "geodesic", "--frames", "2", files["path3"], files["path4"])
    assert result.exit_code == 0, result.output
    assert len(list((second / "frames").glob("*.svg"))) == 2


def test_geodesic_default_frames_are_recorded(runner, tmp_path, files):
    out = tmp_path / "out"
    assert run(runner, out, "geodesic", files["triangle"], files["triangle"]).exit_code == 0
    assert len(list((out / "frames").glob("*.svg"))) == 8
    assert RunConfig.load(out / "run_config.json").options == {"frames": 8}


def test_mean_rerun_keeps_init_and_level(runner, tmp_path, files):
    first, second = tmp_path / "first", tmp_path / "second"
    graphs = [files["path4"], files["triangle"]]
    result = run(runner, first, "mean", "--init", "1", "--level", "1", *graphs)
    assert result.exit_code == 0, result.output
    result = replay(runner, first, second, "mean", *graphs)
    assert result.exit_code == 0, result.output
    assert RunConfig.load(second / "run_config.json").options == {"init": "1", "level": 1.0}
    assert (first / "mean.json").read_bytes() == (second / "mean.json").read_bytes()


def test_pca_rerun_keeps_components(runner, tmp_path, files):
    first, second = tmp_path / "first", tmp_path / "second"
    graphs = [files["path4"], files["triangle"]]
    assert run(runner, first, "pca", "--components", "0", *graphs).exit_code == 0
    assert json.loads((first / "tangent.json").read_text())["n_components"] == 1
    assert list(first.glob("pc_*.svg")) == []
    result = replay(runner, first, second, "pca", *graphs)
    assert result.exit_code == 0, result.output
    assert list(second.glob("pc_*.svg")) == []
    assert RunConfig.load(second / "run_config.json").options["components"] == 0
    assert (first / "tangent.json").read_bytes() == (second / "tangent.json").read_bytes()


def test_bench_rerun_keeps_grids(runner, tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    result = run(runner, first, "bench", "--sizes", "4", "--repeats", "1", "--affinity-samples", "6")
    assert result.exit_code == 0, result.output
    result = replay(runner, first, second, "bench")
    assert result.exit_code == 0, result.output
    assert [r.split(",")[0] for r in (second / "timings.csv").read_text().splitlines()] == ["n", "4"]
    assert [r.split(",")[0] for r in (second / "affinity.csv").read_text().splitlines()] == ["samples", "6"]
    options = RunConfig.load(second / "run_config.json").options
    assert options["sizes"] == [4] and options["repeats"] == 1


def test_partition_rerun_keeps_min_nodes(runner, tmp_path, files):
    first, second = tmp_path / "first", tmp_path / "second"
    assert run(runner, first, "partition", "--min-nodes", "2", files["path4"]).exit_code == 0
    result = replay(runner, first, second, "partition", files["path4"])
    assert result.exit_code == 0, result.output
    assert RunConfig.load(second / "run_config.json").options == {"min_nodes": 2}


def test_options_are_not_inherited_across_commands(runner, tmp_path, files):
    first, second = tmp_path / "first", tmp_path / "second"
    assert run(runner, first, "geodesic", "--frames", "3", files["path3"], files["path3"]).exit_code == 0
    result = replay(runner, first, second, "partition", files["path4"])
    assert result.exit_code == 0, result.output
    assert RunConfig.load(second / "run_config.json").options == {"min_nodes": 0}


def test_non_utf8_graph_exits_2(runner, tmp_path, files):
    bad = tmp_path / "latin1.json"
    bad.write_bytes(b'{"nodes": [{"id": "\xe9", "x": 0, "y": 0}], "edges": []}')
    result = run(runner, tmp_path / "out", "distance", files["path3"], str(bad))
    assert result.exit_code == 2
    assert "latin1.json" in result.output


def test_cluster_matrix_with_text_cell_exits_2(runner, tmp_path):
    matrix = tmp_path / "distances.csv"
    matrix.write_text(",a,b\na,0,x\nb,1,0\n")
    result = run(runner, tmp_path / "out", "cluster", "--matrix", str(matrix))
    assert result.exit_code == 2
    assert "distances.csv" in result.output
