"""Tests for mesh-transformer."""
