"""elasticgraph command-line entry point."""

from __future__ import annotations

import functools
import json
import logging
import sys
from pathlib import Path
from typing import Any

import click
from pydantic import BaseModel, Field, ValidationError, field_validator

from elasticgraph.config import (
    COMMAND_DEFAULTS,
    DEFAULT_E,
    DEFAULT_ETA,
    DEFAULT_LAMBDA,
    DEFAULT_LEVELS,
    DEFAULT_OUTLIER_FRACTION,
    DEFAULT_RESTARTS,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_WEIGHTS,
    E_PRESETS,
    LOG_FORMAT,
    LOG_LEVEL,
    MEAN_MAX_ITER,
    MEAN_TOL,
    OUT_DIR,
    PCA_GRID,
)
from elasticgraph.errors import ElasticGraphError, InputError
from elasticgraph.graph.schema import MetricKind, Severity, WeightPolicy
from elasticgraph.matching.params import MatchingParams

logger = logging.getLogger("elasticgraph")

# Options naming input files; recorded but never inherited from a replayed config.
_PATH_OPTIONS = frozenset({"target", "matrix"})


class RunConfig(BaseModel):
    """Everything a run depends on; written to ``run_config.json``."""

    eta: float = Field(default=DEFAULT_ETA, gt=0)
    lam: float = Field(default=DEFAULT_LAMBDA, ge=0, le=1)
    e: float = Field(default=DEFAULT_E, gt=0)
    n_samples: int = Field(default=DEFAULT_SAMPLES, ge=2)
    seed: int = DEFAULT_SEED
    weights: WeightPolicy = WeightPolicy(DEFAULT_WEIGHTS)
    levels: list[float] = Field(default_factory=lambda: list(DEFAULT_LEVELS), min_length=1)
    metric: MetricKind = MetricKind.RESISTANCE
    restarts: int = Field(default=DEFAULT_RESTARTS, ge=0)
    mean_tol: float = Field(default=MEAN_TOL, gt=0)
    mean_max_iter: int = Field(default=MEAN_MAX_ITER, ge=0)
    outlier_fraction: float = Field(default=DEFAULT_OUTLIER_FRACTION, ge=0, lt=0.5)
    command: str = ""
    inputs: list[str] = Field(default_factory=list)
    options: dict[str, Any] = Field(default_factory=dict)
    out_dir: str = str(OUT_DIR)

    @field_validator("levels")
    @classmethod
    def _levels_in_range(cls, v: list[float]) -> list[float]:
        for h in v:
            if not 0.0 < h <= 1.0:
                raise ValueError(f"level {h} outside (0, 1]")
        return v

    @field_validator("e")
    @classmethod
    def _e_preset(cls, v: float) -> float:
        if v not in E_PRESETS:
            logger.warning("e=%g is not one of the presets %s", v, ", ".join(f"{p:g}" for p in E_PRESETS))
        return v

    def matching(self) -> MatchingParams:
        return MatchingParams(
            eta=self.eta,
            lam=self.lam,
            e=self.e,
            n_samples=self.n_samples,
            seed=self.seed,
            weights=self.weights,
            restarts=self.restarts,
        )

    @classmethod
    def load(cls, path: Path | str) -> RunConfig:
        path = Path(path)
        try:
            return cls.model_validate(json.loads(path.read_text(encoding="utf-8")))
        except UnicodeDecodeError as exc:
            raise InputError(f"{path}: not UTF-8 text (byte {exc.start})") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        except ValidationError as exc:
            raise InputError(f"{path}: {_first_error(exc)}") from exc


def _first_error(exc: ValidationError) -> str:
    first = exc.errors()[0]
    where = ".".join(str(p) for p in first["loc"]) or "<config>"
    return f"{where}: {first['msg']}"


def _floats(ctx, param, value: str | None) -> list[float] | None:
    if value is None:
        return None
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}") from exc


def _ints(ctx, param, value: str | None) -> list[int] | None:
    if value is None:
        return None
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}") from exc


def _handle_errors(fn):
    """Map package errors to exit codes: 2 for bad input, 1 otherwise."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (InputError, OSError) as exc:
            click.echo(f"Error: {exc}", err=True)
            sys.exit(2)
        except ElasticGraphError as exc:
            click.echo(f"Error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _setup(ctx: click.Context, command: str, inputs, **local) -> tuple[RunConfig, Any]:
    """Merge config file, global flags and command flags; write ``run_config.json``.

    Command options resolve as flag, then the replayed config (same command
    only), then ``COMMAND_DEFAULTS``. Commands read them from ``config.options``.
    """
    from elasticgraph.storage.local import LocalStorage

    obj = ctx.obj or {}
    base = RunConfig.load(obj["config_path"]) if obj.get("config_path") else RunConfig()
    options = {k: v for k, v in local.pop("options", {}).items() if v is not None}
    saved = {k: v for k, v in base.options.items() if k not in _PATH_OPTIONS} if base.command == command else {}
    update = {k: v for k, v in {**obj.get("overrides", {}), **local}.items() if v is not None}
    data = {**base.model_dump(mode="json"), **update}
    data["command"] = command
    data["inputs"] = [str(p) for p in inputs]
    data["options"] = {**COMMAND_DEFAULTS.get(command, {}), **saved, **options}
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as exc:
        raise InputError(f"invalid parameters: {_first_error(exc)}") from exc

    storage = LocalStorage(Path(config.out_dir))
    storage.save_record(config, "run_config.json")
    return config, storage


def _names(paths) -> list[str]:
    return [Path(p).stem for p in paths]


def _load_all(paths):
    from elasticgraph.storage.local import load_graph

    graphs = [load_graph(p) for p in paths]
    click.echo(f"  Loaded {len(graphs)} graph(s)")
    for name, g in zip(_names(paths), graphs):
        click.echo(f"  - {name}: {g.n_nodes} nodes, {g.n_edges} edges")
    return graphs


@click.group()
@click.option("--eta", type=float, default=None, help="Weight penalty eta of the edge metric.")
@click.option("--lambda", "lam", type=float, default=None, help="Edge/node trade-off lambda in [0, 1].")
@click.option("--e", "e", type=float, default=None, help="Null-node dissimilarity factor e.")
@click.option("--samples", type=int, default=None, help="Points per resampled curve.")
@click.option("--seed", type=int, default=None, help="Random seed.")
@click.option("--weights", type=click.Choice([p.value for p in WeightPolicy]), default=None,
              help="Edge weight policy.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Output directory.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Load parameters from a run_config.json.")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging.")
@click.pass_context
def cli(ctx, eta, lam, e, samples, seed, weights, out_dir, config_path, verbose):
    """Elastic shape analysis of planar shape graphs."""
    level = logging.DEBUG if verbose else LOG_LEVEL
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logger.setLevel(level)
    ctx.obj = {
        "config_path": config_path,
        "overrides": {
            "eta": eta, "lam": lam, "e": e, "n_samples": samples,
            "seed": seed, "weights": weights, "out_dir": out_dir,
        },
    }


@cli.command()
@click.argument("graph0", type=click.Path(exists=True, dir_okay=False))
@click.argument("graph1", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
@_handle_errors
def distance(ctx, graph0, graph1):
    """Register two graphs and print d_graph."""
    from elasticgraph.matching.register import register_pair, registration_record

    config, storage = _setup(ctx, "distance", [graph0, graph1])
    g0, g1 = _load_all([graph0, graph1])
    reg = register_pair(g0, g1, config.matching())
    storage.save_record(registration_record(reg, graph0, graph1), "registration.json")
    click.echo(f"{reg.d_graph:.9f}")


@cli.command()
@click.argument("graph0", type=click.Path(exists=True, dir_okay=False))
@click.argument("graph1", type=click.Path(exists=True, dir_okay=False))
@click.option("--frames", type=int, default=None, help="Number of frames, endpoints included [default: 8].")
@click.pass_context
@_handle_errors
def geodesic(ctx, graph0, graph1, frames):
    """Render the geodesic between two graphs as an SVG frame sequence."""
    from elasticgraph.matching.geodesic import graph_geodesic
    from elasticgraph.matching.register import register_pair, registration_record
    from elasticgraph.reports.svg import Viewport, frame_points, render_frame

    config, storage = _setup(ctx, "geodesic", [graph0, graph1], options={"frames": frames})
    frames = config.options["frames"]
    click.echo("[1/2] Registering...")
    g0, g1 = _load_all([graph0, graph1])
    reg = register_pair(g0, g1, config.matching())
    storage.save_record(registration_record(reg, graph0, graph1), "registration.json")
    click.echo(f"  d_graph = {reg.d_graph:.9f}")

    click.echo(f"\n[2/2] Rendering {frames} frame(s)...")
    path = graph_geodesic(reg, frames)
    viewport = Viewport.fit(p for frame in path.frames for p in frame_points(frame))
    heaviest = path.max_weight()
    for k, frame in enumerate(path.frames):
        storage.save_text(render_frame(frame, viewport, heaviest), f"frames/frame_{k:03d}.svg")
    click.echo(f"  Frames written to {storage.path('frames')}")


@cli.command()
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@click.option("--levels", callback=_floats, default=None, help="Comma-separated levels h in (0, 1].")
@click.option("--metric", type=click.Choice([k.value for k in MetricKind]), default=None,
              help="Internal node metric for the dendrogram.")
@click.option("--target", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Select the level closest to this graph.")
@click.pass_context
@_handle_errors
def multiscale(ctx, graph, levels, metric, target):
    """Coarsen a graph at several resolutions."""
    from elasticgraph.multiscale.coarsen import multiscale as coarsen_levels
    from elasticgraph.multiscale.coarsen import select_resolution
    from elasticgraph.reports.html_generator import distance_profile_figure, render_report_html
    from elasticgraph.reports.summary import resolution_summary
    from elasticgraph.reports.svg import render_graph

    inputs = [graph] + ([target] if target else [])
    config, storage = _setup(ctx, "multiscale", inputs, levels=levels, metric=metric,
                             options={"target": target})
    (g,) = _load_all([graph])
    click.echo("=" * 50)

    for coarse in coarsen_levels(g, config.levels, config.metric, config.n_samples):
        stem = f"level_{coarse.level:.3f}"
        storage.save_graph(coarse.graph, f"{stem}.json")
        storage.save_record(coarse.record(g), f"{stem}_clusters.json")
        storage.save_text(render_graph(coarse.graph, title=f"h={coarse.level:g}"), f"{stem}.svg")
        click.echo(f"  h={coarse.level:g}: {coarse.n_clusters} node(s), {coarse.graph.n_edges} edge(s)")

    if target:
        (reference,) = _load_all([target])
        choice = select_resolution(reference, g, config.levels, config.matching(), config.metric)
        storage.save_rows(["h", "d_graph"], [list(row) for row in choice.profile], "profile.csv")
        summary = resolution_summary(choice, Path(target).stem, Path(graph).stem)
        storage.save_text(summary, "summary.md")
        html = render_report_html(
            f"Resolution selection: {Path(graph).stem}",
            summary,
            {"d_graph versus h": distance_profile_figure(choice.profile, choice.level)},
        )
        storage.save_text(html, "report.html")
        click.echo(f"\nSelected h* = {choice.level:g} (d_graph {choice.registration.d_graph:.9f})")


def _compute_mean(config: RunConfig, graphs):
    from elasticgraph.multiscale.coarsen import multiscale as coarsen_levels
    from elasticgraph.statistics.mean import karcher_mean_graphs

    level = config.options.get("level")
    init = str(config.options["init"])
    if level is not None:
        graphs = [coarsen_levels(g, [level], config.metric, config.n_samples)[0].graph for g in graphs]
        click.echo(f"  Coarsened inputs to h={level:g}")
    start: str | int = int(init) if init.isdigit() else init
    return karcher_mean_graphs(graphs, config.matching(), config.mean_tol, config.mean_max_iter, start)


_mean_options = [
    click.option("--level", type=float, default=None, help="Coarsen every input to this level first."),
    click.option("--init", default=None, help="'largest' or the index of the start graph [default: largest]."),
]


def _with_mean_options(fn):
    for option in reversed(_mean_options):
        fn = option(fn)
    return fn


@cli.command()
@click.argument("graphs", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@_with_mean_options
@click.pass_context
@_handle_errors
def mean(ctx, graphs, level, init):
    """Karcher mean of a population of graphs."""
    from elasticgraph.reports.html_generator import render_report_html, trace_figure
    from elasticgraph.reports.summary import mean_summary
    from elasticgraph.reports.svg import render_graph

    config, storage = _setup(ctx, "mean", graphs, options={"level": level, "init": init})
    click.echo("[1/2] Loading graphs...")
    population = _load_all(graphs)

    click.echo("\n[2/2] Computing the mean...")
    result = _compute_mean(config, population)
    storage.save_graph(result.mean, "mean.json")
    storage.save_text(render_graph(result.mean, title="mean"), "mean.svg")
    summary = mean_summary(result, _names(graphs))
    storage.save_text(summary, "summary.md")
    storage.save_text(
        render_report_html("Mean shape graph", summary, {"Objective trace": trace_figure(result.objective_trace)}),
        "report.html",
    )
    click.echo(f"  Objective: {result.objective:.9g} after {len(result.objective_trace) - 1} iteration(s)")


@cli.command()
@click.argument("graphs", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@_with_mean_options
@click.option("--components", type=int, default=None, help="Directions to render [default: 3].")
@click.pass_context
@_handle_errors
def pca(ctx, graphs, level, init, components):
    """Tangent PCA around the mean, with deformation grids per direction."""
    from elasticgraph.reports.html_generator import render_report_html, spectrum_figure
    from elasticgraph.reports.summary import pca_summary
    from elasticgraph.reports.svg import render_graph, render_grid
    from elasticgraph.statistics.tpca import pc_deformation, tangent_pca

    config, storage = _setup(ctx, "pca", graphs,
                             options={"level": level, "init": init, "components": components})
    click.echo("[1/3] Loading graphs...")
    population = _load_all(graphs)
    names = _names(graphs)

    click.echo("\n[2/3] Mean and tangent PCA...")
    result = _compute_mean(config, population)
    model = tangent_pca(result)
    storage.save_graph(result.mean, "mean.json")
    storage.save_text(render_graph(result.mean, title="mean"), "mean.svg")
    storage.save_record(model.record(names), "tangent.json")
    summary = pca_summary(model, names)
    storage.save_text(summary, "summary.md")
    storage.save_text(
        render_report_html("Tangent PCA", summary, {"Spectrum": spectrum_figure(model.singular_values)}),
        "report.html",
    )

    shown = min(config.options["components"], model.n_components)
    click.echo(f"\n[3/3] Rendering {shown} deformation grid(s)...")
    for d in range(shown):
        row = [pc_deformation(model, d, t) for t in PCA_GRID]
        labels = [f"PC{d + 1} {t:+g}s" for t in PCA_GRID]
        storage.save_text(render_grid([row], [labels], title=f"PC{d + 1}"), f"pc_{d + 1}.svg")


@cli.command()
@click.argument("graphs", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Cluster a distances.csv instead of computing distances.")
@click.option("--outlier-fraction", type=float, default=None, help="Fraction of points flagged as outliers.")
@click.pass_context
@_handle_errors
def cluster(ctx, graphs, matrix, outlier_fraction):
    """Cluster graphs by their pairwise d_graph."""
    from elasticgraph.reports.html_generator import render_report_html, silhouette_figure
    from elasticgraph.reports.summary import cluster_summary
    from elasticgraph.reports.svg import render_heatmap
    from elasticgraph.statistics.clustering import cluster_distances
    from elasticgraph.statistics.distances import pairwise_distances
    from elasticgraph.storage.local import load_matrix

    if not graphs and not matrix:
        raise InputError("cluster needs graph files or --matrix")
    inputs = list(graphs) + ([matrix] if matrix else [])
    config, storage = _setup(ctx, "cluster", inputs, outlier_fraction=outlier_fraction,
                             options={"matrix": matrix})
    if matrix:
        names, distances = load_matrix(matrix)
        click.echo(f"[1/2] Loaded {len(names)}x{len(names)} distance matrix")
    else:
        click.echo("[1/2] Computing pairwise distances...")
        names = _names(graphs)
        distances = pairwise_distances(_load_all(graphs), config.matching())
    storage.save_matrix(distances, names, "distances.csv")

    click.echo("\n[2/2] Clustering...")
    report = cluster_distances(distances, config.outlier_fraction)
    storage.save_record(report.record(names), "clusters.json")
    storage.save_text(
        render_heatmap(distances, names, report.order(), report.labels, title="d_graph"), "heatmap.svg"
    )
    summary = cluster_summary(report, names)
    storage.save_text(summary, "summary.md")
    storage.save_text(
        render_report_html("Clustering", summary, {"Silhouette": silhouette_figure(report.scores, report.k)}),
        "report.html",
    )
    click.echo(f"  k = {report.k} (silhouette {report.silhouette:.4f})")


@cli.command()
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@click.option("--min-nodes", type=int, default=None,
              help="Drop components with fewer nodes before splitting [default: 0].")
@click.pass_context
@_handle_errors
def partition(ctx, graph, min_nodes):
    """Split a graph in two by its Fiedler vector."""
    from elasticgraph.graph.preprocess import fiedler_bipartition, remove_small_components
    from elasticgraph.reports.svg import render_graph

    config, storage = _setup(ctx, "partition", [graph], options={"min_nodes": min_nodes})
    (g,) = _load_all([graph])
    g = remove_small_components(g, config.options["min_nodes"])
    parts = fiedler_bipartition(g)
    for name, part in zip(("part_a", "part_b"), parts):
        storage.save_graph(part, f"{name}.json")
        storage.save_text(render_graph(part, title=name), f"{name}.svg")
        click.echo(f"  {name}: {part.n_nodes} node(s), {part.n_edges} edge(s)")


@cli.command()
@click.option("--sizes", callback=_ints, default=None, help="Comma-separated node counts [default: 10,20,40,80].")
@click.option("--repeats", type=int, default=None, help="Timed runs per size [default: 3].")
@click.option("--affinity-samples", callback=_ints, default=None,
              help="Comma-separated curve sample counts for the edge-table timing [default: 15,30,60].")
@click.pass_context
@_handle_errors
def bench(ctx, sizes, repeats, affinity_samples):
    """Time graph registration against n and edge-distance tables against samples."""
    from elasticgraph.benchmark import time_affinity, time_registration

    config, storage = _setup(ctx, "bench", [],
                             options={"sizes": sizes, "repeats": repeats, "affinity_samples": affinity_samples})
    opts = config.options
    click.echo(f"[1/2] Registration: sizes {opts['sizes']}, {opts['repeats']} run(s) each")
    click.echo("=" * 50)
    rows = time_registration(opts["sizes"], config.matching(), opts["repeats"])
    for n, seconds in rows:
        click.echo(f"  n={n}: {seconds:.4f}s")
    storage.save_rows(["n", "seconds"], [list(row) for row in rows], "timings.csv")

    click.echo(f"\n[2/2] Edge-distance table: n={opts['affinity_nodes']}, samples {opts['affinity_samples']}")
    rows = time_affinity(opts["affinity_samples"], opts["affinity_nodes"], config.seed, opts["repeats"])
    for n_samples, seconds in rows:
        click.echo(f"  samples={n_samples}: {seconds:.4f}s")
    storage.save_rows(["samples", "seconds"], [list(row) for row in rows], "affinity.csv")


@cli.command(name="validate")
@click.argument("graphs", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@_handle_errors
def validate_cmd(graphs):
    """Check graph files; exit 1 when an ERROR is found."""
    from elasticgraph.graph.validate import has_errors, validate
    from elasticgraph.storage.local import load_graph

    failed = False
    for path in graphs:
        violations = validate(load_graph(path))
        click.echo(f"{path}: {len(violations)} violation(s)")
        for v in violations:
            icon = "!!!" if v.severity == Severity.ERROR else "!"
            ids = f" [{', '.join(v.node_ids)}]" if v.node_ids else ""
            click.echo(f"  - [{icon}] {v.violation_type.value}: {v.description}{ids}")
        failed = failed or has_errors(violations)
    if failed:
        sys.exit(1)


if __name__ == "__main__":
    cli()
