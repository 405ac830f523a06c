"""Polar wavelet frames with closed-form slicing and tomographic reconstruction."""

__version__ = "0.1.0"
