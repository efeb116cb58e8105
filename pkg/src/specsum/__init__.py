"""Laplacian eigenvalues of radial domains and closed-form spectral sums."""

__version__ = "0.1.0"
