"""Test utilities for the mesh-transformer test suite."""
