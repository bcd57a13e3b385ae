"""Tests of radixtiles.lattice."""
