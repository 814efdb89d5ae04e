"""Elastic shape analysis of planar shape graphs."""

__version__ = "0.1.0"
