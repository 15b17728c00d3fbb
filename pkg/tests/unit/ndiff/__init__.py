"""Unit tests for the ndiff package."""
