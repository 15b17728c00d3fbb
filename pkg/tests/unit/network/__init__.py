"""Unit tests for the network package."""
