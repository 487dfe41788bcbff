"""Kernels, samplers and SDE simulation for log-gas point fields."""

__version__ = "0.1.0"
