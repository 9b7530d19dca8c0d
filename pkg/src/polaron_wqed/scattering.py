"""Single-photon scattering amplitudes and lineshape analytics."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .model import ModelParams
from .polaron import PolaronSolution, solve_self_consistent
from .selfenergy import SelfEnergyValue, sigma_numeric, sigma_ohmic_closed


class SigmaSource(str, enum.Enum):
    CLOSED_OHMIC = "closed"
    NUMERIC_GRID = "numeric"


@dataclass(frozen=True)
class ScatteringConfig:
    dephasing_rate: float = 0.0
    use_markov: bool = False
    sigma_source: SigmaSource = SigmaSource.CLOSED_OHMIC
    # diagnostic: drop the Lamb shift (real part of Sigma)
    zero_lamb_shift: bool = False

    def __post_init__(self):
        object.__setattr__(self, "sigma_source", SigmaSource(self.sigma_source))
        if not self.dephasing_rate >= 0:
            raise ValueError(f"dephasing rate must be >= 0, got {self.dephasing_rate}")


@dataclass(frozen=True)
class ScatteringAmplitudes:
    s: complex | np.ndarray
    r: complex | np.ndarray
    t: complex | np.ndarray

    @property
    def reflectivity(self):
        return np.abs(self.r) ** 2

    @property
    def transmissivity(self):
        return np.abs(self.t) ** 2


def apply_dephasing(sigma: SelfEnergyValue, gamma_phi: float) -> SelfEnergyValue:
    """Sigma -> Sigma - i Gamma_phi."""
    if gamma_phi < 0:
        raise ValueError("dephasing rate must be >= 0")
    return SelfEnergyValue(sigma.value - 1j * gamma_phi)


def phase_shift(omega, delta_tilde: float, sigma: SelfEnergyValue, config: ScatteringConfig = ScatteringConfig()):
    """Chiral amplitude

        s = [(w - Dt) Dt - (w + Dt) (Sigma* - i G_phi)] / [(w - Dt) Dt - (w + Dt) (Sigma - i G_phi)].

    The dephasing shift enters unconjugated in both places, so G_phi > 0
    removes flux (|s| < 1).
    """
    omega = np.asarray(omega, dtype=float)
    value = np.asarray(sigma.value, dtype=complex)
    if config.zero_lamb_shift:
        value = 1j * value.imag
    loss = 1j * config.dephasing_rate
    x = (omega - delta_tilde) * delta_tilde
    b = omega + delta_tilde
    num = x - b * (np.conj(value) - loss)
    den = x - b * (value - loss)
    if np.any(den == 0):
        raise ValueError("no coupling: degenerate 0/0 amplitude at omega = delta_tilde with Sigma = 0")
    s = num / den
    return s if s.ndim else complex(s)


def reflection_transmission(s) -> ScatteringAmplitudes:
    s = np.asarray(s, dtype=complex)
    r, t = 0.5 * (s - 1), 0.5 * (s + 1)
    if s.ndim == 0:
        return ScatteringAmplitudes(complex(s), complex(r), complex(t))
    return ScatteringAmplitudes(s, r, t)


def markov_reflection(omega, delta_tilde: float, gamma: float):
    """Lorentzian limit r = -i (w + Dt) G/2 / [(w - Dt) Dt + i (w + Dt) G/2]."""
    omega = np.asarray(omega, dtype=float)
    half = 0.5j * (omega + delta_tilde) * gamma
    r = -half / ((omega - delta_tilde) * delta_tilde + half)
    return r if r.ndim else complex(r)


@dataclass(frozen=True)
class Lineshape:
    omegas: np.ndarray
    amplitudes: ScatteringAmplitudes
    sigma: SelfEnergyValue
    delta_tilde: float
    omega_reson: float
    fwhm: float | None
    alpha_lower: float | None
    asymmetry: float | None
    diagnostic: str = ""

    @property
    def reflectivities(self):
        return self.amplitudes.reflectivity

    @property
    def transmissivities(self):
        return self.amplitudes.transmissivity


def _refine_peak(x, y, i):
    if i == 0 or i == len(x) - 1:
        return float(x[i])
    # parabola through three (possibly non-uniform) samples
    x0, x1, x2 = x[i - 1:i + 2]
    y0, y1, y2 = y[i - 1:i + 2]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
    if a >= 0:
        return float(x1)
    return float(np.clip(-b / (2 * a), x0, x2))


def _crossing(x, y, level, i0, step):
    """Linear interpolation of the first crossing of ``level`` walking from i0."""
    j = i0
    while 0 <= j + step < len(x):
        if y[j + step] < level <= y[j]:
            xa, xb, ya, yb = x[j], x[j + step], y[j], y[j + step]
            return float(xa + (level - ya) * (xb - xa) / (yb - ya))
        j += step
    return None


def lineshape_metrics(omegas, reflectivity):
    """(omega_reson, fwhm, alpha_lower, asymmetry, diagnostic) of a sampled R(omega)."""
    omegas = np.asarray(omegas, dtype=float)
    R = np.asarray(reflectivity, dtype=float)
    i = int(np.argmax(R))
    omega_reson = _refine_peak(omegas, R, i)
    half = 0.5 * R[i]
    left = _crossing(omegas, R, half, i, -1)
    right = _crossing(omegas, R, half, i, +1)
    if left is None or right is None:
        return omega_reson, None, None, None, "no half-height crossing inside the scan; widen scan"
    fwhm = right - left
    alpha_lower = fwhm / (np.pi * omega_reson)
    asymmetry = ((right - omega_reson) - (omega_reson - left)) / fwhm
    return omega_reson, fwhm, alpha_lower, asymmetry, ""


def self_energy(omegas, sol: PolaronSolution, params: ModelParams, config: ScatteringConfig) -> SelfEnergyValue:
    if config.sigma_source is SigmaSource.CLOSED_OHMIC:
        return sigma_ohmic_closed(omegas, sol.delta_tilde, params.alpha)
    return sigma_numeric(omegas, sol)


def scatter(omegas, sol: PolaronSolution, params: ModelParams, config: ScatteringConfig = ScatteringConfig()):
    """Amplitudes and the (undephased) self-energy on a frequency array."""
    omegas = np.asarray(omegas, dtype=float)
    sigma = self_energy(omegas, sol, params, config)
    if config.use_markov:
        gamma = float(self_energy(np.array([sol.delta_tilde]), sol, params, config).decay_rate[0])
        r = markov_reflection(omegas, sol.delta_tilde, gamma)
        amps = reflection_transmission(2 * r + 1)
    else:
        amps = reflection_transmission(phase_shift(omegas, sol.delta_tilde, sigma, config))
    return amps, sigma


def compute_lineshape(params: ModelParams, config: ScatteringConfig = ScatteringConfig(), omega_min: float = 0.01,
                      omega_max: float = 3.0, n_points: int = 400, sol: PolaronSolution | None = None) -> Lineshape:
    """Reflection scan with resonance (parabolic refinement of the argmax),
    FWHM (interpolated half-height crossings), alpha_lower = fwhm / (pi omega_reson)
    and asymmetry = (right - left half-width) / fwhm."""
    if not 0 < omega_min < omega_max:
        raise ValueError("need 0 < omega_min < omega_max")
    if n_points < 16:
        raise ValueError("n_points must be >= 16")
    if sol is None:
        sol = solve_self_consistent(params)
    omegas = np.linspace(omega_min, omega_max, n_points)
    amps, sigma = scatter(omegas, sol, params, config)
    omega_reson, fwhm, alpha_lower, asym, diag = lineshape_metrics(omegas, amps.reflectivity)
    return Lineshape(omegas, amps, sigma, sol.delta_tilde, omega_reson, fwhm, alpha_lower, asym, diag)
