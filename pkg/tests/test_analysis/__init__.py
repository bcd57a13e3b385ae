"""Tests of radixtiles.analysis."""
