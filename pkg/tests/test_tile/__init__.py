"""Tests of radixtiles.tile."""
