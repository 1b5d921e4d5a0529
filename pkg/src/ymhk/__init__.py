"""Lattice laboratory for the higher order Yang--Mills--Higgs k-flow on the flat 4-torus."""

from ymhk.algebra import SU2, U1, GroupElem, GroupSpec, get_group
from ymhk.lattice import LatticeGeom, SeededSpectrum, TensorField
from ymhk.energy import EnergyBreakdown, fd_gradient_oracle, grad_ymh_k, ymh_k_energy
from ymhk.flow import FlowConfig, FlowState, Trajectory, rescale, run, stability_cap, step_rk4

__version__ = "0.1.0"

__all__ = [
    "U1",
    "SU2",
    "GroupSpec",
    "GroupElem",
    "get_group",
    "LatticeGeom",
    "SeededSpectrum",
    "TensorField",
    "EnergyBreakdown",
    "ymh_k_energy",
    "grad_ymh_k",
    "fd_gradient_oracle",
    "FlowConfig",
    "FlowState",
    "Trajectory",
    "run",
    "rescale",
    "stability_cap",
    "step_rk4",
]
