"""Qubit self-energy Sigma(omega) = delta_L(omega) - i Gamma(omega)/2.

The numeric route evaluates

    delta_L(omega) = (4 Dt^2 / pi) P int_0^kmax dk f_k^2 / (omega - omega_k)
    Gamma(omega)   = 8 Dt^2 f_{k0}^2 / |d omega/dk|_{k0}

(``Dt`` the renormalized gap), i.e. the ``(1/L) sum_k`` measure of ``model``.
The closed form is the large-cutoff Ohmic limit of the same integrals.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (Dispersion, ModelParams, dispersion, dispersion_curvature, group_velocity,
                    inverse_dispersion)
from .polaron import PolaronSolution, displacement_at, silbey_harris_displacement

BAND_EDGE_RTOL = 1e-6
# |k - k0| / k0 below which the regularized PV integrand is replaced by its limit
_NEAR_POLE = 1e-7


@dataclass(frozen=True)
class SelfEnergyValue:
    value: complex | np.ndarray

    @property
    def lamb_shift(self):
        return np.real(self.value)

    @property
    def decay_rate(self):
        return -2.0 * np.imag(self.value)

    @classmethod
    def from_parts(cls, lamb_shift, decay_rate):
        return cls(np.asarray(lamb_shift) - 0.5j * np.asarray(decay_rate))


def _as_positive(omega):
    omega = np.asarray(omega, dtype=float)
    if np.any(~(omega > 0)):
        raise ValueError("self-energy is only defined for real omega > 0")
    return omega


def _at_band_edge(omega, params):
    if params.dispersion is not Dispersion.COSINE_HARD:
        return np.zeros(np.shape(omega), dtype=bool)
    return np.abs(omega - params.omega_c) < BAND_EDGE_RTOL * params.omega_c


def sigma_ohmic_closed(omega, delta_tilde: float, alpha: float) -> SelfEnergyValue:
    """Cutoff-free Ohmic self-energy

    Sigma = 2 Dt^2 alpha / (omega + Dt)^2 * [omega ln(omega/Dt) - omega - Dt - i pi omega].
    """
    omega = _as_positive(omega)
    d = float(delta_tilde)
    pref = 2.0 * d * d * alpha / (omega + d) ** 2
    return SelfEnergyValue(pref * (omega * np.log(omega / d) - omega - d - 1j * np.pi * omega))


def decay_rate(omega, sol: PolaronSolution, params: ModelParams | None = None):
    """Gamma(omega) = 8 Dt^2 f(k0)^2 / |v(k0)|.

    Zero outside the band; ``inf`` flags the van Hove band edge of the
    hard-cutoff dispersion.
    """
    params = params or sol.grid.params
    omega = _as_positive(omega)
    dt = sol.delta_tilde
    k0 = inverse_dispersion(omega, params)
    inside = np.isfinite(k0)
    edge = _at_band_edge(omega, params)
    ok = inside & ~edge
    k_safe = np.where(ok, k0, 1.0)
    rate = 8.0 * dt * dt * displacement_at(k_safe, dt, params) ** 2 / group_velocity(k_safe, params)
    rate = np.where(ok, rate, 0.0)
    rate = np.where(edge, np.inf, rate)
    return rate if rate.ndim else float(rate)


def _quadrature_nodes(grid):
    """Grid nodes with k = 0 prepended, and weights for integrands nonzero at 0."""
    nodes = np.concatenate(([0.0], grid.momenta))
    if grid.uniform:
        w = np.full_like(nodes, grid.spacing)
        w[0] = w[-1] = 0.5 * grid.spacing
    else:
        # log grid: node 0 carries the k=0 half of the (0, k_min] trapezoid
        w = np.concatenate(([0.5 * grid.momenta[0]], grid.weights))
    return nodes, w


def lamb_shift_numeric(omega, sol: PolaronSolution, grid=None):
    """Principal-value Lamb shift by singularity subtraction.

    With k0 the on-shell momentum and v0 its group velocity,

        P int F/(omega - omega_k) = int [F/(omega - omega_k) - F0/(v0 (k0 - k))] dk
                                    + F0/v0 * ln(k0 / (kmax - k0)),

    where the bracket is smooth through k0 and goes to the trapezoid rule.
    """
    grid = grid or sol.grid
    params = grid.params
    omega = _as_positive(omega)
    if np.any(_at_band_edge(omega, params)):
        raise ValueError("Lamb shift diverges at the band edge")
    scalar = omega.ndim == 0
    omega = np.atleast_1d(omega)
    dt = sol.delta_tilde

    nodes, weights = _quadrature_nodes(grid)
    F = np.concatenate(([0.0], silbey_harris_displacement(dt, grid) ** 2))
    w_nodes = dispersion(nodes, params)
    k_top = nodes[-1]

    k0 = inverse_dispersion(omega, params)
    resonant = np.isfinite(k0) & (k0 < k_top)
    out = np.empty_like(omega)

    # off-shell (above the band): ordinary integral
    if np.any(~resonant):
        om = omega[~resonant]
        out[~resonant] = (F[None, :] / (om[:, None] - w_nodes[None, :])) @ weights

    if np.any(resonant):
        om = omega[resonant]
        k0r = k0[resonant]
        v0 = group_velocity(k0r, params)
        F0 = displacement_at(k0r, dt, params) ** 2
        h = 1e-5 * k0r
        dF = (displacement_at(k0r + h, dt, params) ** 2 - displacement_at(k0r - h, dt, params) ** 2) / (2 * h)
        curv = dispersion_curvature(k0r, params)
        limit = -dF / v0 + F0 * curv / (2 * v0 * v0)

        dk = nodes[None, :] - k0r[:, None]
        near = np.abs(dk) < _NEAR_POLE * k0r[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            reg = F[None, :] / (om[:, None] - w_nodes[None, :]) + (F0 / v0)[:, None] / dk
        reg = np.where(near, limit[:, None], reg)
        out[resonant] = reg @ weights + F0 / v0 * np.log(k0r / (k_top - k0r))

    out *= 4.0 * dt * dt / np.pi
    return float(out[0]) if scalar else out


def sigma_numeric(omega, sol: PolaronSolution, grid=None) -> SelfEnergyValue:
    grid = grid or sol.grid
    return SelfEnergyValue.from_parts(lamb_shift_numeric(omega, sol, grid), decay_rate(omega, sol, grid.params))
