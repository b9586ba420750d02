"""Command line interfaces for IP trees."""
