"""Parameter bundle shared by registration, multiscale and statistics."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from elasticgraph.config import (
    DEFAULT_E,
    DEFAULT_ETA,
    DEFAULT_LAMBDA,
    DEFAULT_RESTARTS,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_WEIGHTS,
)
from elasticgraph.graph.schema import WeightPolicy


class MatchingParams(BaseModel):
    """eta, lambda and e of the graph distance plus solver settings.

    ``weights=None`` keeps the weights already stored on the edges.
    """

    model_config = ConfigDict(frozen=True)

    eta: float = Field(default=DEFAULT_ETA, gt=0)
    lam: float = Field(default=DEFAULT_LAMBDA, ge=0, le=1)
    e: float = Field(default=DEFAULT_E, gt=0)
    n_samples: int = Field(default=DEFAULT_SAMPLES, ge=2)
    seed: int = DEFAULT_SEED
    weights: WeightPolicy | None = WeightPolicy(DEFAULT_WEIGHTS)
    restarts: int = Field(default=DEFAULT_RESTARTS, ge=0)
