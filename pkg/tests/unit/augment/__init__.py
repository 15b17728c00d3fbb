"""Unit tests for the augment package."""
