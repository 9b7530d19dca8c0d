"""Exact single-excitation dynamics of the excitation-conserving polaron model.

Basis: index 0 is |e, vac>, index i >= 1 is |g, one photon in symmetric mode k_i>.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .model import Dispersion, ModelParams, build_grid, group_velocity, inverse_dispersion
from .polaron import PolaronSolution, solve_self_consistent


@dataclass(frozen=True)
class SingleExcitationState:
    amp_e: complex
    amp_photon: np.ndarray

    @classmethod
    def excited(cls, num_modes: int) -> "SingleExcitationState":
        return cls(1.0 + 0j, np.zeros(num_modes, dtype=complex))

    @classmethod
    def from_vector(cls, psi) -> "SingleExcitationState":
        psi = np.asarray(psi, dtype=complex)
        return cls(complex(psi[0]), psi[1:].copy())

    def vector(self) -> np.ndarray:
        return np.concatenate(([self.amp_e], self.amp_photon))

    @property
    def norm(self) -> float:
        return float(abs(self.amp_e) ** 2 + np.sum(np.abs(self.amp_photon) ** 2))


@dataclass(frozen=True)
class EmissionTrace:
    times: np.ndarray
    p_e: np.ndarray
    n_total: np.ndarray
    energy: np.ndarray
    frequencies: np.ndarray
    spectrum: np.ndarray
    delta_tilde: float
    recurrence_time: float


def build_hamiltonian_matrix(sol: PolaronSolution, grid=None, params: ModelParams | None = None,
                             include_v_local: bool = True) -> np.ndarray:
    """Single-excitation block of

        Dt/2 sz + V_local + sum_k w_k A+^dag A+ + (2 sqrt2 / sqrt L) sum_k Dt f_k (A+^dag s- + h.c.)

    with V_local = -4 sz Dt sum_kp f_k f_p A+_p^dag A+_k / L, which is a
    rank-one +4 Dt f f^T / L in the photon block (sz = -1).
    """
    grid = grid or sol.grid
    dt = sol.delta_tilde
    f = np.asarray(sol.f, dtype=float)
    if f.shape != grid.momenta.shape:
        raise ValueError("polaron solution does not match the grid")
    scaled = f * np.sqrt(grid.inv_length)  # f_k / sqrt(L)
    n = len(grid)
    H = np.zeros((n + 1, n + 1))
    H[0, 0] = 0.5 * dt
    H[1:, 1:] = np.diag(grid.frequencies - 0.5 * dt)
    if include_v_local:
        H[1:, 1:] += 4.0 * dt * np.outer(scaled, scaled)
    H[0, 1:] = H[1:, 0] = 2.0 * np.sqrt(2.0) * dt * scaled
    return H


class Propagator:
    """exp(-iHt) from one Hermitian eigendecomposition."""

    def __init__(self, H):
        self.H = np.asarray(H)
        self.energies, self.vectors = np.linalg.eigh(self.H)

    def __call__(self, psi, t):
        coeffs = self.vectors.conj().T @ psi
        t = np.atleast_1d(np.asarray(t, dtype=float))
        phases = np.exp(-1j * np.outer(t, self.energies))
        return (phases * coeffs[None, :]) @ self.vectors.T


def evolve(state: SingleExcitationState, H, t: float) -> SingleExcitationState:
    if not np.isclose(state.norm, 1.0, atol=1e-10):
        raise ValueError("state must be normalized")
    return SingleExcitationState.from_vector(Propagator(H)(state.vector(), t)[0])


def recurrence_time(grid, omega: float) -> float:
    """2 pi / (mode spacing in frequency near omega)."""
    params = grid.params
    k0 = inverse_dispersion(omega, params)
    if not np.isfinite(k0):
        k0 = grid.momenta[-1]
    spacing = abs(float(group_velocity(k0, params))) * grid.spacing
    return 2 * np.pi / spacing if spacing > 0 else np.inf


def emission_run(params: ModelParams, t_max: float = 30.0, n_samples: int = 301, sol: PolaronSolution | None = None,
                 include_v_local: bool = True) -> EmissionTrace:
    """Spontaneous emission from |e, vac>; times in units of 1/Delta are the
    physical times scaled by ``params.delta``."""
    if not t_max > 0:
        raise ValueError("t_max must be > 0")
    grid = sol.grid if sol is not None else build_grid(params)
    if not grid.uniform:
        raise ValueError("emission runs need a uniform mode grid")
    if sol is None:
        sol = solve_self_consistent(params, grid)
    t_rec = recurrence_time(grid, sol.delta_tilde)
    if t_max > 0.5 * t_rec:
        warnings.warn(f"t_max={t_max:g} exceeds half the finite-grid recurrence time {t_rec:.4g}; "
                      "increase num_modes", stacklevel=2)
    H = build_hamiltonian_matrix(sol, grid, params, include_v_local)
    prop = Propagator(H)
    times = np.linspace(0.0, t_max, n_samples)
    psi0 = SingleExcitationState.excited(len(grid)).vector()
    psis = prop(psi0, times)
    prob = np.abs(psis) ** 2
    p_e = prob[:, 0]
    n_total = prob.sum(axis=1)
    energy = np.einsum("ti,ij,tj->t", psis.conj(), H, psis).real
    return EmissionTrace(times, p_e, n_total, energy, np.asarray(grid.frequencies), prob[-1, 1:], sol.delta_tilde,
                         t_rec)


def fit_decay_rate(trace: EmissionTrace, lo: float = 0.1, hi: float = 0.8) -> float:
    """Population decay rate: minus the slope of a linear fit of ln p_e over
    the samples with lo <= p_e <= hi."""
    mask = (trace.p_e >= lo) & (trace.p_e <= hi)
    if mask.sum() < 3:
        raise ValueError("too few samples inside the fit window; lengthen the run")
    # only the first passage through the window; later samples may be revivals
    idx = np.flatnonzero(mask)
    breaks = np.flatnonzero(np.diff(idx) > 1)
    if breaks.size:
        idx = idx[:breaks[0] + 1]
    slope = np.polyfit(trace.times[idx], np.log(trace.p_e[idx]), 1)[0]
    return float(-slope)


def spectral_density(trace: EmissionTrace) -> np.ndarray:
    """Photon number per unit frequency, n_k / (v_k dk)."""
    df = np.gradient(trace.frequencies)
    return trace.spectrum / df


def spectrum_peak(trace: EmissionTrace) -> float:
    return float(trace.frequencies[np.argmax(trace.spectrum)])


def spectral_width(trace: EmissionTrace, lo: float = 0.25, hi: float = 0.75) -> float:
    """Inter-quantile width of the emitted-photon distribution in frequency."""
    cum = np.cumsum(trace.spectrum)
    cum = cum / cum[-1]
    return float(np.interp(hi, cum, trace.frequencies) - np.interp(lo, cum, trace.frequencies))


def default_emission_params(alpha: float, omega_c: float = 6.0, num_modes: int = 512, delta: float = 1.0):
    return ModelParams(alpha=alpha, omega_c=omega_c, delta=delta, dispersion=Dispersion.COSINE_HARD,
                       num_modes=num_modes)
