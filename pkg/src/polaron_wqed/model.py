"""Model parameters, dispersion families, Ohmic couplings and mode grids.

Sums over waveguide modes are normalised as ``(1/L) sum_k -> (1/pi) int_0^inf dk``,
so a grid mode of quadrature weight ``w`` carries ``1/L = w/pi``.  For the
hard-cutoff lattice with ``n`` positive modes on ``(0, pi]`` this is exactly
``L = n``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class Dispersion(str, enum.Enum):
    LINEAR_EXPONENTIAL = "linear"
    COSINE_HARD = "cosine"

    @classmethod
    def parse(cls, value: "str | Dispersion") -> "Dispersion":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {
            "linear": cls.LINEAR_EXPONENTIAL,
            "linearexponential": cls.LINEAR_EXPONENTIAL,
            "cosine": cls.COSINE_HARD,
            "cosinehard": cls.COSINE_HARD,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown dispersion {value!r}; expected 'linear' or 'cosine'") from None


# omega(k_max) / omega_c for the default LinearExponential grid; e^-40 ~ 4e-18.
DEFAULT_TAIL = 40.0


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs.  ``c=None`` resolves to 1 (linear) or the low-k group
    velocity ``omega_c/2`` (cosine), so that ``J(omega) ~ pi*alpha*omega`` at low
    frequency in both families."""

    alpha: float
    omega_c: float
    delta: float = 1.0
    dispersion: Dispersion = Dispersion.LINEAR_EXPONENTIAL
    c: float | None = None
    num_modes: int = 512
    k_max: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "dispersion", Dispersion.parse(self.dispersion))
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not self.omega_c > 0:
            raise ValueError(f"omega_c must be > 0, got {self.omega_c}")
        if not self.delta > 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if self.c is not None and not self.c > 0:
            raise ValueError(f"c must be > 0, got {self.c}")
        if int(self.num_modes) != self.num_modes or self.num_modes < 2:
            raise ValueError(f"num_modes must be an integer >= 2, got {self.num_modes}")
        if self.k_max is not None:
            if not self.k_max > 0:
                raise ValueError(f"k_max must be > 0, got {self.k_max}")
            if self.dispersion is Dispersion.COSINE_HARD and self.k_max > np.pi:
                raise ValueError("CosineHard momenta must lie in (0, pi]")

    @property
    def speed(self) -> float:
        if self.c is not None:
            return float(self.c)
        if self.dispersion is Dispersion.COSINE_HARD:
            return 0.5 * self.omega_c
        return 1.0

    @property
    def band_k_max(self) -> float:
        if self.k_max is not None:
            return float(self.k_max)
        if self.dispersion is Dispersion.COSINE_HARD:
            return float(np.pi)
        return DEFAULT_TAIL * self.omega_c / self.speed

    def replace(self, **changes) -> "ModelParams":
        from dataclasses import replace

        return replace(self, **changes)


def dispersion(k, params: ModelParams):
    k = np.asarray(k, dtype=float)
    if params.dispersion is Dispersion.COSINE_HARD:
        # sqrt((1 - cos k)/2) written as |sin(k/2)| to avoid cancellation at small k
        return params.omega_c * np.abs(np.sin(0.5 * k))
    return params.speed * np.abs(k)


def group_velocity(k, params: ModelParams):
    """d omega / dk for k > 0."""
    k = np.asarray(k, dtype=float)
    if params.dispersion is Dispersion.COSINE_HARD:
        return 0.5 * params.omega_c * np.cos(0.5 * k)
    return np.full_like(k, params.speed)


def dispersion_curvature(k, params: ModelParams):
    k = np.asarray(k, dtype=float)
    if params.dispersion is Dispersion.COSINE_HARD:
        return -0.25 * params.omega_c * np.sin(0.5 * k)
    return np.zeros_like(k)


def inverse_dispersion(omega, params: ModelParams):
    """Positive momentum k0 with omega(k0) = omega; NaN outside the band."""
    omega = np.asarray(omega, dtype=float)
    if params.dispersion is Dispersion.COSINE_HARD:
        x = omega / params.omega_c
        with np.errstate(invalid="ignore"):
            return np.where((x >= 0) & (x <= 1), 2.0 * np.arcsin(np.clip(x, 0, 1)), np.nan)
    return np.where(omega >= 0, omega / params.speed, np.nan)


def coupling(k, params: ModelParams):
    w = dispersion(k, params)
    g = np.sqrt(0.5 * np.pi * params.alpha * params.speed * w)
    if params.dispersion is Dispersion.LINEAR_EXPONENTIAL:
        g = g * np.exp(-0.5 * w / params.omega_c)
    return g


def spectral_density(omega, params: ModelParams):
    """Ohmic J(omega) = pi alpha omega exp(-omega/omega_c)."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("spectral density is defined for omega >= 0")
    return np.pi * params.alpha * omega * np.exp(-omega / params.omega_c)


@dataclass(frozen=True)
class ModeGrid:
    """Positive-momentum symmetric modes with per-mode quadrature weights."""

    params: ModelParams
    momenta: np.ndarray
    frequencies: np.ndarray
    couplings: np.ndarray
    weights: np.ndarray
    uniform: bool = field(default=True)

    def __len__(self):
        return len(self.momenta)

    @property
    def spacing(self) -> float:
        """Uniform momentum step; only meaningful for uniform grids."""
        return float(self.weights[0])

    @property
    def inv_length(self) -> np.ndarray:
        """Per-mode 1/L factor."""
        return self.weights / np.pi

    def mode_sum(self, values) -> float:
        """(1/L) sum_k values_k."""
        return float(np.sum(self.inv_length * values))


def _grid_from_momenta(params, momenta, weights, uniform):
    for arr in (momenta, weights):
        arr.setflags(write=False)
    freqs = dispersion(momenta, params)
    couplings = coupling(momenta, params)
    freqs.setflags(write=False)
    couplings.setflags(write=False)
    return ModeGrid(params, momenta, freqs, couplings, weights, uniform)


def build_grid(params: ModelParams) -> ModeGrid:
    """Uniform grid k_i = i * k_max / n, i = 1..n (k = 0 excluded)."""
    n = int(params.num_modes)
    if n < 2:
        raise ValueError("num_modes must be >= 2")
    k_max = params.band_k_max
    dk = k_max / n
    momenta = dk * np.arange(1, n + 1, dtype=float)
    momenta[-1] = k_max
    return _grid_from_momenta(params, momenta, np.full(n, dk), True)


def build_log_grid(params: ModelParams, k_min: float, per_decade: int = 400) -> ModeGrid:
    """Geometric grid on [k_min, k_max] for continuum quadratures.

    Weights are the trapezoid rule in ln k (spectrally accurate for smooth
    integrands decaying at both ends) plus a linear piece covering (0, k_min]
    for integrands vanishing at k = 0.
    """
    k_max = params.band_k_max
    if not 0 < k_min < k_max:
        raise ValueError("need 0 < k_min < k_max")
    n = max(int(np.ceil(per_decade * np.log10(k_max / k_min))), 2) + 1
    momenta = np.geomspace(k_min, k_max, n)
    du = np.log(k_max / k_min) / (n - 1)
    weights = momenta * du
    weights[0] = 0.5 * weights[0] + 0.5 * k_min
    weights[-1] *= 0.5
    return _grid_from_momenta(params, momenta, weights, False)


def spectral_density_from_modes(omega, grid: ModeGrid, width: float):
    """J(omega) = (2 pi / L) sum_k g_k^2 delta(omega - omega_k), with the delta
    broadened into a normalised Gaussian of the given width."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    diff = omega[:, None] - grid.frequencies[None, :]
    kernel = np.exp(-0.5 * (diff / width) ** 2) / (np.sqrt(2 * np.pi) * width)
    return 2 * np.pi * kernel @ (grid.inv_length * grid.couplings**2)
