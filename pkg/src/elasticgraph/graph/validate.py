"""Shape-graph validation: self-loops, endpoint mismatches, null-node edges, bad weights."""

from __future__ import annotations

from collections import Counter

import numpy as np

from elasticgraph.config import DEGENERATE_LENGTH, ENDPOINT_TOLERANCE
from elasticgraph.graph.model import ShapeGraph
from elasticgraph.graph.schema import Severity, Violation, ViolationType


class GraphValidator:
    """Report invariant violations of a shape graph without modifying it."""

    def __init__(self, tolerance: float = ENDPOINT_TOLERANCE):
        self.tolerance = tolerance

    def check_duplicate_ids(self, g: ShapeGraph) -> list[Violation]:
        counts = Counter(g.node_ids)
        return [
            Violation(
                violation_type=ViolationType.DUPLICATE_ID,
                severity=Severity.ERROR,
                description=f"Node id {node_id!r} is used by {count} nodes.",
                node_ids=[node_id],
            )
            for node_id, count in counts.items()
            if count > 1
        ]

    def check_edge_keys(self, g: ShapeGraph) -> list[Violation]:
        violations: list[Violation] = []
        for a, b in g.edges:
            if not (0 <= a < g.n_nodes and 0 <= b < g.n_nodes) or a > b:
                violations.append(
                    Violation(
                        violation_type=ViolationType.BAD_EDGE_KEY,
                        severity=Severity.ERROR,
                        description=f"Edge key ({a}, {b}) is out of range or not ordered.",
                    )
                )
        return violations

    def check_self_loops(self, g: ShapeGraph) -> list[Violation]:
        return [
            Violation(
                violation_type=ViolationType.SELF_LOOP,
                severity=Severity.ERROR,
                description=f"Node {g.node_ids[a]!r} has a self-loop.",
                node_ids=[g.node_ids[a]],
            )
            for a, b in g.edges
            if a == b and 0 <= a < g.n_nodes
        ]

    def check_null_node_edges(self, g: ShapeGraph) -> list[Violation]:
        violations: list[Violation] = []
        null = g.null_mask
        for a, b in g.edges:
            if not (0 <= a < g.n_nodes and 0 <= b < g.n_nodes):
                continue
            if null[a] or null[b]:
                bad = [g.node_ids[i] for i in (a, b) if null[i]]
                violations.append(
                    Violation(
                        violation_type=ViolationType.NULL_NODE_EDGE,
                        severity=Severity.ERROR,
                        description=f"Real edge {g.node_ids[a]}-{g.node_ids[b]} touches null node(s) {', '.join(bad)}.",
                        node_ids=bad,
                    )
                )
        return violations

    def check_endpoints(self, g: ShapeGraph) -> list[Violation]:
        """Curve endpoints must sit on their nodes."""
        violations: list[Violation] = []
        null = g.null_mask
        for (a, b), e in g.edges.items():
            if not (0 <= a < g.n_nodes and 0 <= b < g.n_nodes) or null[a] or null[b]:
                continue
            gap = max(
                float(np.linalg.norm(e.points[0] - g.positions[a])),
                float(np.linalg.norm(e.points[-1] - g.positions[b])),
            )
            if gap > self.tolerance:
                violations.append(
                    Violation(
                        violation_type=ViolationType.ENDPOINT_MISMATCH,
                        severity=Severity.ERROR,
                        description=(
                            f"Edge {g.node_ids[a]}-{g.node_ids[b]}: curve endpoint is {gap:.3g} "
                            f"away from its node (tolerance {self.tolerance:g})."
                        ),
                        node_ids=[g.node_ids[a], g.node_ids[b]],
                    )
                )
        return violations

    def check_weights(self, g: ShapeGraph) -> list[Violation]:
        return [
            Violation(
                violation_type=ViolationType.NEGATIVE_WEIGHT,
                severity=Severity.ERROR,
                description=f"Edge ({a}, {b}) has weight {e.weight:g}.",
                node_ids=[g.node_ids[i] for i in (a, b) if 0 <= i < g.n_nodes],
            )
            for (a, b), e in g.edges.items()
            if not np.isfinite(e.weight) or e.weight < 0
        ]

    def check_degenerate_curves(self, g: ShapeGraph) -> list[Violation]:
        violations: list[Violation] = []
        for (a, b), e in g.edges.items():
            if a != b and e.length <= DEGENERATE_LENGTH:
                violations.append(
                    Violation(
                        violation_type=ViolationType.DEGENERATE_CURVE,
                        severity=Severity.WARNING,
                        description=f"Edge ({a}, {b}) has a zero-length curve.",
                        node_ids=[g.node_ids[i] for i in (a, b) if 0 <= i < g.n_nodes],
                    )
                )
        return violations

    def run_all_checks(self, g: ShapeGraph) -> list[Violation]:
        violations: list[Violation] = []
        violations.extend(self.check_duplicate_ids(g))
        violations.extend(self.check_edge_keys(g))
        violations.extend(self.check_self_loops(g))
        violations.extend(self.check_null_node_edges(g))
        violations.extend(self.check_endpoints(g))
        violations.extend(self.check_weights(g))
        violations.extend(self.check_degenerate_curves(g))
        return violations


def validate(g: ShapeGraph) -> list[Violation]:
    """All invariant violations of ``g``; an empty list means valid."""
    return GraphValidator().run_all_checks(g)


def has_errors(violations: list[Violation]) -> bool:
    return any(v.severity == Severity.ERROR for v in violations)
