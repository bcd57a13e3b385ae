"""Tests of radixtiles.parser."""
