"""Influence maximization under the independent cascade model."""
