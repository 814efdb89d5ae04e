"""Configuration: env vars, numeric constants and default run parameters."""

import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# --- Paths ---
OUT_DIR = Path(os.getenv("ELASTICGRAPH_OUT_DIR", Path.cwd() / "out"))

# --- Logging ---
LOG_LEVEL = os.getenv("ELASTICGRAPH_LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"

# --- Metric and matching defaults ---
DEFAULT_ETA = float(os.getenv("ELASTICGRAPH_ETA", "1.0"))
DEFAULT_LAMBDA = float(os.getenv("ELASTICGRAPH_LAMBDA", "0.5"))
DEFAULT_E = float(os.getenv("ELASTICGRAPH_E", "0.7"))
E_PRESETS: tuple[float, ...] = (0.5, 0.7, 0.9)
DEFAULT_SAMPLES = int(os.getenv("ELASTICGRAPH_SAMPLES", "30"))
DEFAULT_SEED = int(os.getenv("ELASTICGRAPH_SEED", "0"))
DEFAULT_WEIGHTS = os.getenv("ELASTICGRAPH_WEIGHTS", "length")
DEFAULT_RESTARTS = 4

# --- Tolerances ---
SNAP_TOLERANCE = 1e-3
ENDPOINT_TOLERANCE = 1e-6
DEGENERATE_LENGTH = 1e-12

# --- Registration ---
EXACT_QAP_MAX_N = 8
ENUMERATE_MAX_N = 4
M_PAIR_BUDGET = 10_000
SOLVER_PATH_STEPS = 6
SOLVER_FW_ITERATIONS = 30
LOCAL_SEARCH_MAX_N = 40
DENSE_EIG_MAX_SIZE = 400
TIE_RTOL = 1e-12

# --- Multiscale ---
DEFAULT_LEVELS: tuple[float, ...] = tuple((i + 1) / 8 for i in range(8))
DISCONNECTED_SENTINEL_FACTOR = 10.0

# --- Statistics ---
MEAN_TOL = 1e-4
MEAN_MAX_ITER = 10
MEAN_REJECT_RTOL = 1e-6
KARCHER_TOL = 1e-4
KARCHER_MAX_ITER = 20
PCA_GRID: tuple[float, ...] = (-2.0, -1.0, 0.0, 1.0, 2.0)
FAINT_WEIGHT_FRACTION = 0.05
MAX_CLUSTERS = 8
DEFAULT_OUTLIER_FRACTION = 0.0

# --- Benchmark ---
BENCH_SIZES: tuple[int, ...] = (10, 20, 40, 80)
BENCH_AFFINITY_SAMPLES: tuple[int, ...] = (15, 30, 60)
BENCH_AFFINITY_NODES = 10
BENCH_REPEATS = 3

# --- Command defaults ---
# Used when neither the command line nor a replayed run_config.json sets the option.
COMMAND_DEFAULTS: dict[str, dict] = {
    "geodesic": {"frames": 8},
    "mean": {"init": "largest"},
    "pca": {"init": "largest", "components": 3},
    "partition": {"min_nodes": 0},
    "bench": {
        "sizes": list(BENCH_SIZES),
        "repeats": BENCH_REPEATS,
        "affinity_samples": list(BENCH_AFFINITY_SAMPLES),
        "affinity_nodes": BENCH_AFFINITY_NODES,
    },
}

# --- Rendering ---
SVG_SIZE = 400
SVG_PADDING = 0.10
