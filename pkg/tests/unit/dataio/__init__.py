"""Unit tests for the dataio package."""
