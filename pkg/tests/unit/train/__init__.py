"""Unit tests for the train package."""
