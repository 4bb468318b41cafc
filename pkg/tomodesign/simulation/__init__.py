"""Simulated tomography experiments."""
from tomodesign.simulation._experiment import EmpiricalReport, ExperimentSpec, run_experiments, unphysical_decay

__all__ = ["EmpiricalReport", "ExperimentSpec", "run_experiments", "unphysical_decay"]
