"""Tests of radixtiles.spectral."""
