"""Tests for digraph-perf."""
