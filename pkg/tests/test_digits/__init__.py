"""Tests of radixtiles.digits."""
