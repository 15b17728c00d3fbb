"""Unit tests for the scaling package."""
