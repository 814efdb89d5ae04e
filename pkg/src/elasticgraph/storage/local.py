"""Local file storage: shape-graph JSON documents, result records and CSV tables."""

from __future__ import annotations

import csv
import json
import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ValidationError

from elasticgraph.config import OUT_DIR
from elasticgraph.errors import GraphParseError, InputError
from elasticgraph.graph.model import ShapeGraph
from elasticgraph.graph.preprocess import simplify_multiedges
from elasticgraph.graph.schema import EdgeRecord, GraphDocument, NodeRecord

logger = logging.getLogger(__name__)


def _fmt(x: float) -> str:
    return f"{x:.9g}"


# --- Graph documents ---


def to_document(g: ShapeGraph) -> GraphDocument:
    nodes = [
        NodeRecord(id=node_id, x=None, y=None)
        if g.is_null(i)
        else NodeRecord(id=node_id, x=float(g.positions[i, 0]), y=float(g.positions[i, 1]))
        for i, node_id in enumerate(g.node_ids)
    ]
    edges = [
        EdgeRecord(
            u=g.node_ids[a],
            v=g.node_ids[b],
            points=[(float(x), float(y)) for x, y in e.points],
            weight=e.weight,
        )
        for (a, b), e in sorted(g.edges.items())
    ]
    return GraphDocument(nodes=nodes, edges=edges, metadata=dict(g.metadata))


def parse_graph(text: str, source: str = "<string>") -> ShapeGraph:
    """Parse a shape-graph JSON document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        doc = GraphDocument.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "<document>"
        raise GraphParseError(f"{source}: field {where}: {first['msg']}") from exc
    return simplify_multiedges(doc)


def load_graph(path: Path | str) -> ShapeGraph:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise GraphParseError(f"{path}: not UTF-8 text (byte {exc.start})") from exc
    g = parse_graph(text, str(path))
    logger.debug("Loaded %s from %s", g, path)
    return g


def save_graph(g: ShapeGraph, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = to_document(g)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc.model_dump(mode="json"), f, indent=2)
        f.write("\n")
    logger.debug("Saved %s to %s", g, path)
    return path


# --- Result storage ---


class LocalStorage:
    """Write run outputs under one directory."""

    def __init__(self, out_dir: Path | None = None):
        self.out_dir = Path(out_dir or OUT_DIR)
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        p = self.out_dir / name
        p.parent.mkdir(parents=True, exist_ok=True)
        return p

    def save_graph(self, g: ShapeGraph, name: str) -> Path:
        path = save_graph(g, self.path(name))
        logger.info("Wrote %s", path)
        return path

    def save_record(self, record: BaseModel, name: str) -> Path:
        path = self.path(name)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(record.model_dump(mode="json"), f, indent=2)
            f.write("\n")
        logger.info("Wrote %s", path)
        return path

    def save_text(self, text: str, name: str) -> Path:
        path = self.path(name)
        path.write_text(text, encoding="utf-8")
        logger.info("Wrote %s", path)
        return path

    def save_matrix(self, matrix: np.ndarray, labels: Sequence[str], name: str) -> Path:
        """Square matrix as CSV with a header row of labels."""
        path = self.path(name)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["", *labels])
            for label, row in zip(labels, np.asarray(matrix)):
                writer.writerow([label, *(_fmt(float(x)) for x in row)])
        logger.info("Wrote %s", path)
        return path

    def save_rows(self, header: Sequence[str], rows: Sequence[Sequence[float | int | str]], name: str) -> Path:
        path = self.path(name)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(list(header))
            for row in rows:
                writer.writerow([_fmt(x) if isinstance(x, float) else x for x in row])
        logger.info("Wrote %s", path)
        return path


def load_matrix(path: Path | str) -> tuple[list[str], np.ndarray]:
    """Read a matrix written by :meth:`LocalStorage.save_matrix`."""
    try:
        with open(path, newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: not UTF-8 text (byte {exc.start})") from exc
    if not rows:
        raise InputError(f"{path}: empty matrix file")
    labels = rows[0][1:]
    try:
        values = np.array([[float(x) for x in row[1:]] for row in rows[1:]])
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if values.shape != (len(labels), len(labels)):
        raise InputError(f"{path}: expected a {len(labels)}x{len(labels)} matrix, got shape {values.shape}")
    return labels, values
