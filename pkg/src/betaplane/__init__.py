"""Beta-plane vorticity dynamics with symmetry-invariant subgrid
closures and numeric certification of the underlying differential
invariants, syzygies and conservation identities."""

from .config import ConfigError, IcSpec, OutputSpec, RunConfig, parse_config
from .dissipation import VARIANTS, DissipationSpec
from .dynamics import InstabilityError, ModelParams, SimState, integrate
from .grid import Grid, RealField
from .invariants import GroupElement, moving_frame, normalized_invariant
from .run import run_experiment
from .symmetry import equivariance_experiment

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DissipationSpec",
    "Grid",
    "GroupElement",
    "IcSpec",
    "InstabilityError",
    "ModelParams",
    "OutputSpec",
    "RealField",
    "RunConfig",
    "SimState",
    "VARIANTS",
    "equivariance_experiment",
    "integrate",
    "moving_frame",
    "normalized_invariant",
    "parse_config",
    "run_experiment",
    "__version__",
]
