"""Allow running as `python -m elasticgraph`."""

from elasticgraph.cli import cli

cli()
