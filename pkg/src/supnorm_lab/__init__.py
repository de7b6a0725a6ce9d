"""Numerical laboratory for supnorm estimates of 1-D advection-diffusion equations."""

__version__ = "0.1.0"
