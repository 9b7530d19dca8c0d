"""Silbey-Harris polaron frame: renormalized gap and displacement profile."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .model import Dispersion, ModeGrid, ModelParams, build_grid, build_log_grid, coupling, dispersion

log = logging.getLogger(__name__)

VALIDATED_ALPHA = 0.3
DAMPING = 0.5
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000


class PolaronConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class PolaronSolution:
    delta_tilde: float
    f: np.ndarray
    g_eff: np.ndarray
    iterations: int
    residual: float
    grid: ModeGrid
    method: str = "fixed-point"


def renormalized_gap(f, grid: ModeGrid, params: ModelParams) -> float:
    """Delta * exp(-2 (1/L) sum_k f_k^2)."""
    f = np.asarray(f, dtype=float)
    if f.shape != grid.momenta.shape:
        raise ValueError("displacements do not match the grid")
    return params.delta * float(np.exp(-2.0 * grid.mode_sum(f * f)))


def silbey_harris_displacement(delta_tilde: float, grid: ModeGrid) -> np.ndarray:
    if not delta_tilde > 0:
        raise ValueError(f"renormalized gap must be > 0, got {delta_tilde}")
    return grid.couplings / (grid.frequencies + delta_tilde)


def displacement_at(k, delta_tilde: float, params: ModelParams):
    """Silbey-Harris f(k) evaluated off-grid from the analytic couplings."""
    return coupling(k, params) / (dispersion(k, params) + delta_tilde)


def asymptotic_gap(params: ModelParams) -> float:
    """Large-cutoff estimate Delta * (e Delta / omega_c)^(alpha / (1 - alpha))."""
    a = params.alpha
    if not 0 <= a < 1:
        raise ValueError(f"asymptotic gap needs 0 <= alpha < 1, got {a}")
    return params.delta * (np.e * params.delta / params.omega_c) ** (a / (1 - a))


def quadrature_grid(params: ModelParams, per_decade: int = 400) -> ModeGrid:
    """Default grid for continuum integrals.

    The hard-cutoff lattice is its own model and uses the uniform grid.  The
    linear family spans the gap scale up to ~40 omega_c, so it gets a log grid
    reaching four decades below the expected renormalized gap.
    """
    if params.dispersion is Dispersion.COSINE_HARD:
        return build_grid(params)
    scale = params.delta
    if params.alpha < 1:
        scale = min(scale, asymptotic_gap(params))
    k_min = max(1e-4 * scale, 1e-14 * params.delta) / params.speed
    return build_log_grid(params, k_min, per_decade)


def gap_map(delta_tilde: float, grid: ModeGrid, params: ModelParams) -> float:
    return renormalized_gap(silbey_harris_displacement(delta_tilde, grid), grid, params)


def _finish(params, grid, x, iterations, residual, method):
    if not grid.uniform and x < 100 * grid.frequencies[0]:
        warnings.warn(f"renormalized gap {x:.3g} is not resolved by the lowest grid frequency "
                      f"{grid.frequencies[0]:.3g}", stacklevel=3)
    f = silbey_harris_displacement(x, grid)
    g_eff = x * f
    f.setflags(write=False)
    g_eff.setflags(write=False)
    return PolaronSolution(float(x), f, g_eff, iterations, float(residual), grid, method)


def _bisect(params, grid, tol, iterations):
    lo, hi = 1e-12 * params.delta, params.delta

    def h(x):
        return x - gap_map(x, grid, params)

    if h(lo) > 0:
        raise PolaronConvergenceError("no renormalized gap above 1e-12 Delta (localized regime?)", np.inf)
    root, info = optimize.bisect(h, lo, hi, xtol=1e-300, rtol=max(tol * 1e-3, 4 * np.finfo(float).eps),
                                 maxiter=400, full_output=True)
    residual = abs(gap_map(root, grid, params) - root) / root
    return _finish(params, grid, root, iterations + info.iterations, residual, "bisection")


def solve_self_consistent(params: ModelParams, grid: ModeGrid | None = None, tol: float = DEFAULT_TOL,
                          max_iter: int = DEFAULT_MAX_ITER) -> PolaronSolution:
    """Damped fixed point Delta~ <- (1-eta) Delta~ + eta Delta exp(-2 sum f(Delta~)^2 / L).

    Iterates until both the step and the a-posteriori distance to the fixed
    point (step * q / (1 - q), q the observed contraction) are below ``tol``.
    Falls back to bisection on [1e-12 Delta, Delta] if the steps stop shrinking.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    if params.alpha > VALIDATED_ALPHA:
        warnings.warn(f"alpha={params.alpha} is beyond the validated polaron range alpha <= {VALIDATED_ALPHA}",
                      stacklevel=2)
    if grid is None:
        grid = quadrature_grid(params)
    if params.alpha == 0:
        return _finish(params, grid, params.delta, 1, 0.0, "fixed-point")
    if params.alpha >= 1 and not grid.uniform:
        # the continuum sum of f^2 diverges like alpha ln(1/Dt): only Dt = 0 solves it
        raise PolaronConvergenceError(f"alpha={params.alpha} >= 1: the gap renormalizes to zero (localized regime)",
                                      np.inf)

    x = params.delta
    prev = np.inf
    growing = 0
    residual = np.inf
    for it in range(1, max_iter + 1):
        x_new = (1 - DAMPING) * x + DAMPING * gap_map(x, grid, params)
        residual = abs(x_new - x) / x
        x = x_new
        q = residual / prev if prev > 0 else 0.0
        if residual == 0.0 or (residual <= tol and q < 1 and residual * q / (1 - q) <= tol):
            return _finish(params, grid, x, it, residual, "fixed-point")
        growing = growing + 1 if q >= 1 else 0
        if growing >= 3 or not x > 0:
            log.info("fixed point oscillating after %d steps; switching to bisection", it)
            return _bisect(params, grid, tol, it)
        prev = residual
    raise PolaronConvergenceError(
        f"polaron fixed point did not converge in {max_iter} steps (residual {residual:.3e}); "
        "alpha may be too close to the localization transition", residual)
