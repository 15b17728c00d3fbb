"""Unit tests for configuration schemas and result records."""
