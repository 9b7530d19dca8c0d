"""Single-photon scattering and spontaneous emission of a qubit ultrastrongly
coupled to a waveguide, in the Silbey-Harris polaron frame."""

__version__ = "0.1.0"

from .model import Dispersion, ModeGrid, ModelParams, build_grid, build_log_grid  # noqa: E402
from .polaron import PolaronSolution, asymptotic_gap, solve_self_consistent  # noqa: E402
from .scattering import ScatteringConfig, compute_lineshape  # noqa: E402

__all__ = ["Dispersion", "ModeGrid", "ModelParams", "build_grid", "build_log_grid", "PolaronSolution",
           "asymptotic_gap", "solve_self_consistent", "ScatteringConfig", "compute_lineshape"]
