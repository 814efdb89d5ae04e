"""Pydantic models for shape-graph documents and result records.

These are the on-disk shapes of everything the package reads or writes.
"""

from __future__ import annotations

from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field


# --- Enums ---


class WeightPolicy(str, Enum):
    BINARY = "binary"
    LENGTH = "length"


class MetricKind(str, Enum):
    EUCLIDEAN = "euclidean"
    GEODESIC = "geodesic"
    RESISTANCE = "effective_resistance"


class ViolationType(str, Enum):
    SELF_LOOP = "self_loop"
    ENDPOINT_MISMATCH = "endpoint_mismatch"
    NULL_NODE_EDGE = "null_node_edge"
    NEGATIVE_WEIGHT = "negative_weight"
    DUPLICATE_ID = "duplicate_id"
    DEGENERATE_CURVE = "degenerate_curve"
    BAD_EDGE_KEY = "bad_edge_key"


class Severity(str, Enum):
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"


# --- Graph documents ---


class NodeRecord(BaseModel):
    """A node; ``x``/``y`` are null for padding nodes."""

    id: str
    x: float | None = None
    y: float | None = None

    @property
    def is_null(self) -> bool:
        return self.x is None or self.y is None


class EdgeRecord(BaseModel):
    u: str
    v: str
    points: list[tuple[float, float]] = Field(min_length=2)
    weight: float | None = None


class GraphDocument(BaseModel):
    """Top-level shape-graph file. Unknown top-level keys are kept."""

    model_config = ConfigDict(extra="allow")

    nodes: list[NodeRecord] = Field(default_factory=list)
    edges: list[EdgeRecord] = Field(default_factory=list)
    metadata: dict[str, Any] = Field(default_factory=dict)


# --- Validation ---


class Violation(BaseModel):
    violation_type: ViolationType
    severity: Severity
    description: str
    node_ids: list[str] = Field(default_factory=list)


# --- Result records ---


class RegistrationRecord(BaseModel):
    source: str
    target: str
    mapping: dict[str, str]
    permutation: list[int]
    d_graph: float
    objective: float
    eta: float
    lam: float
    e: float
    mean_distance: float
    n_samples: int
    seed: int


class CoarseRecord(BaseModel):
    level: float
    n_clusters: int
    clusters: dict[str, list[str]]


class ClusterRecord(BaseModel):
    graphs: list[str]
    labels: list[int]
    outliers: list[int]
    modes: list[int]
    k: int
    silhouette: float


class TangentRecord(BaseModel):
    graphs: list[str]
    singular_values: list[float]
    explained_variance_ratio: list[float]
    n_components: int
    dimension: int
