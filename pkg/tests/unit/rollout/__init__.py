"""Unit tests for the rollout package."""
