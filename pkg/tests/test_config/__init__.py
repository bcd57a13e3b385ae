"""Tests of radixtiles.config."""
