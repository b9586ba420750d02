"""CLI shims for running the ip_trees tools from a source checkout."""
