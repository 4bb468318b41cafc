"""tomodesign: A Python package for designing optimal measurements for quantum state tomography."""

__version__ = "0.1.0"

from tomodesign import basis, estimation, example_data, measurements, optimization, priors, simulation

__all__ = ["basis", "estimation", "example_data", "measurements", "optimization", "priors", "simulation"]
