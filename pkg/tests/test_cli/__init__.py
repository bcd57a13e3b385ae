"""Tests of radixtiles.cli."""
