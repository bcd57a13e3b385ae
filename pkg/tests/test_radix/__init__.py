"""Tests of radixtiles.radix."""
