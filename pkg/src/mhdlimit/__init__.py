"""Pseudo-spectral lab for the inviscid limit of incompressible MHD on the torus."""

from .data import generate_data
from .experiments import data_perturbation_sweep, envelope_check, inviscid_sweep, mollification_split
from .inequalities import empirical_constant
from .littlewood_paley import (
    BesovIndex,
    LPFilterBank,
    besov_norm,
    build_filter_bank,
    decompose,
    dyadic_block,
    low_pass,
    paraproduct,
    remainder,
    sobolev_norm_direct,
)
from .solver import MHDState, SolverConfig, Trajectory, solve, solve_transport_diffusion
from .spectral import SpectralField, TorusGrid, VectorField, leray_project, make_grid

__version__ = "0.1.0"

__all__ = [
    "BesovIndex",
    "LPFilterBank",
    "MHDState",
    "SolverConfig",
    "SpectralField",
    "TorusGrid",
    "Trajectory",
    "VectorField",
    "besov_norm",
    "data_perturbation_sweep",
    "empirical_constant",
    "envelope_check",
    "generate_data",
    "inviscid_sweep",
    "mollification_split",
    "build_filter_bank",
    "decompose",
    "dyadic_block",
    "leray_project",
    "low_pass",
    "make_grid",
    "paraproduct",
    "remainder",
    "sobolev_norm_direct",
    "solve",
    "solve_transport_diffusion",
]
