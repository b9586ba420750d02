"""Tooling package for ip_trees utilities."""
