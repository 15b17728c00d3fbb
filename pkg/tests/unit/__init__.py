"""Unit tests for mesh-transformer."""
