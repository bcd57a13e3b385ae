"""Tests of radixtiles.wavelet."""
