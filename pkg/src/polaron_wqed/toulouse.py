"""Exact elastic single-photon amplitude at the Toulouse point alpha = 1/2."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams
from .polaron import asymptotic_gap
from .scattering import phase_shift, reflection_transmission
from .selfenergy import sigma_ohmic_closed

TOULOUSE_ALPHA = 0.5


@dataclass(frozen=True)
class ToulouseInput:
    delta: float
    omega_c: float
    k: float

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("incident momentum must be > 0")
        if not self.omega_c > 0:
            raise ValueError("omega_c must be > 0")


def w_param(inp: ToulouseInput):
    """w = pi Delta^2 / (4 omega_c k)."""
    k = np.asarray(inp.k, dtype=float)
    if np.any(~(k > 0)):
        raise ValueError("incident momentum must be > 0")
    w = np.pi * inp.delta**2 / (4.0 * inp.omega_c * k)
    return w if w.ndim else float(w)


def _check_w(w):
    w = np.asarray(w, dtype=float)
    if np.any(~(w > 0)):
        raise ValueError("w must be > 0")
    return w


_SERIES_W = 50.0
# 1 - P1 = x^6/90 - x^8/63 + 53 x^10/3150 - 1691 x^12/103950 + ..., x = 1/w
_SERIES_COEFFS = [576551 / 37837800, -1691 / 103950, 53 / 3150, -1 / 63, 1 / 90]


def _pieces(w):
    w = _check_w(w)
    theta = np.arctan(1.0 / (2.0 * w)) + np.arctan(w / (1.0 + 2.0 * w * w))
    log_term = -np.log1p(1.0 / (w * w))
    a = 4.0 * w * w / (1.0 + 4.0 * w * w)
    return w, theta, log_term, a


def s_minus_one(w):
    """s(w) - 1 = 2iw/(1+2iw) * [2i(arccot 2w + arctan(w/(1+2w^2))) + ln(w^2/(1+w^2))],
    formed without adding 1 so it keeps precision when s ~ 1."""
    w, theta, log_term, _ = _pieces(w)
    return 2j * w / (1.0 + 2j * w) * (2j * theta + log_term)


def s_toulouse(w):
    """Amplitude with its phase from 1 + (s - 1) and its modulus from the
    closed-form inelastic fraction; the plain sum can round |s| above 1."""
    s = 1.0 + s_minus_one(w)
    s = s * (abs_s(w) / np.abs(s))
    # rounding of the product may still land one ulp above the modulus
    over = np.abs(s) > 1.0
    s = np.where(over, s / np.abs(s) * (1.0 - np.finfo(float).epsneg), s)
    return s if s.ndim else complex(s)


def elastic_probability(s):
    """P1 = R + T = (1 + |s|^2) / 2."""
    return 0.5 * (1.0 + np.abs(s) ** 2)


def inelastic_fraction(w):
    """1 - P1 = (1 - |s|^2) / 2 in closed form.

    With theta the arc sum, l = ln(w^2/(1+w^2)) and a = 4w^2/(1+4w^2):
    Re(s-1) = a (l - theta/w) and |s-1|^2 = a (l^2 + 4 theta^2).
    """
    w, theta, log_term, a = _pieces(w)
    direct = a * (theta / w - log_term - 0.5 * log_term**2 - 2.0 * theta**2)
    # the direct form cancels to O(w^-6); switch to the large-w series
    x2 = 1.0 / np.maximum(w, _SERIES_W) ** 2
    series = x2**3 * np.polyval(_SERIES_COEFFS, x2)
    out = np.where(w > _SERIES_W, series, direct)
    return out if out.ndim else float(out)


def abs_s(w):
    """|s(w)| from the closed-form inelastic fraction."""
    return np.sqrt(1.0 - 2.0 * inelastic_fraction(w))


def rwa_gap(delta: float, omega_c: float) -> float:
    """Renormalized gap used on the polaron side of the comparison: the
    large-cutoff estimate e Delta^2 / omega_c at alpha = 1/2."""
    return asymptotic_gap(ModelParams(alpha=TOULOUSE_ALPHA, omega_c=omega_c, delta=delta))


def default_scan(delta: float, omega_c: float, n_points: int = 400, lo: float = 0.02, hi: float = 50.0):
    """Log-spaced frequencies spanning [lo, hi] x the Toulouse-point gap."""
    scale = rwa_gap(delta, omega_c)
    return np.geomspace(lo * scale, hi * scale, n_points)


def compare_with_polaron_rwa(delta: float, omega_c: float, omegas) -> dict[str, np.ndarray]:
    """Exact and polaron-RWA elastic curves on one grid (c = 1 so omega = k).

    Phases are unwrapped along the scan.
    """
    omegas = np.asarray(omegas, dtype=float)
    if np.any(omegas <= 0) or np.any(omegas >= omega_c):
        raise ValueError("scan must lie inside (0, omega_c)")
    w = w_param(ToulouseInput(delta, omega_c, 1.0)) / omegas
    exact = reflection_transmission(s_toulouse(w))
    dt = rwa_gap(delta, omega_c)
    rwa = reflection_transmission(phase_shift(omegas, dt, sigma_ohmic_closed(omegas, dt, TOULOUSE_ALPHA)))
    return {
        "omega": omegas,
        "R_exact": exact.reflectivity,
        "T_exact": exact.transmissivity,
        "arg_r_exact": np.unwrap(np.angle(exact.r)),
        "arg_t_exact": np.unwrap(np.angle(exact.t)),
        "R_rwa": rwa.reflectivity,
        "T_rwa": rwa.transmissivity,
        "P1_exact": 1.0 - inelastic_fraction(w),
        "abs_s_exact": abs_s(w),
    }
