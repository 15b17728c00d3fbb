"""Slow end-to-end and exhaustive oracle tests."""
