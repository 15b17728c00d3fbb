"""Unit tests for the graphcore package."""
