import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polaron_wqed.model import ModelParams
from polaron_wqed.polaron import solve_self_consistent
from polaron_wqed.scattering import (ScatteringConfig, SigmaSource, apply_dephasing, compute_lineshape,
                                     lineshape_metrics, markov_reflection, phase_shift, reflection_transmission,
                                     scatter)
from polaron_wqed.selfenergy import SelfEnergyValue, sigma_ohmic_closed

finite = dict(allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(omega=st.floats(1e-3, 50), dt=st.floats(1e-3, 2), lamb=st.floats(-5, 5, **finite), gamma=st.floats(1e-6, 5))
def test_lossless_amplitude_is_unimodular(omega, dt, lamb, gamma):
    s = phase_shift(omega, dt, SelfEnergyValue.from_parts(lamb, gamma))
    assert abs(abs(s) - 1) <= 1e-12
    a = reflection_transmission(s)
    assert a.reflectivity + a.transmissivity == pytest.approx(1, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(omega=st.floats(1e-3, 50), dt=st.floats(1e-3, 2), lamb=st.floats(-5, 5, **finite), gamma=st.floats(1e-6, 5),
       phi=st.floats(1e-4, 5))
def test_dephasing_is_subunitary(omega, dt, lamb, gamma, phi):
    s = phase_shift(omega, dt, SelfEnergyValue.from_parts(lamb, gamma), ScatteringConfig(dephasing_rate=phi))
    assert abs(s) < 1
    a = reflection_transmission(s)
    assert a.reflectivity + a.transmissivity < 1


def test_apply_dephasing():
    s = apply_dephasing(SelfEnergyValue(0.1 - 0.2j), 0.3)
    assert s.value == pytest.approx(0.1 - 0.5j)
    with pytest.raises(ValueError):
        apply_dephasing(s, -1)
    with pytest.raises(ValueError):
        ScatteringConfig(dephasing_rate=-0.1)


def test_full_reflection_at_bare_resonance_without_lamb_shift():
    dt = 0.7
    sigma = sigma_ohmic_closed(dt, dt, 0.05)
    s = phase_shift(dt, dt, sigma, ScatteringConfig(zero_lamb_shift=True))
    assert s == pytest.approx(-1, abs=1e-14)
    assert reflection_transmission(s).reflectivity == pytest.approx(1, abs=1e-14)


def test_no_coupling_degenerate_point():
    with pytest.raises(ValueError, match="no coupling"):
        phase_shift(1.0, 1.0, SelfEnergyValue(0j))
    # away from the bare resonance an uncoupled qubit is transparent
    assert phase_shift(2.0, 1.0, SelfEnergyValue(0j)) == 1


def test_markov_formula_against_phase_shift_with_constant_rate():
    # with Sigma = -i Gamma / 2 constant the full amplitude is exactly the Lorentzian one
    dt, gamma = 1.0, 0.03
    omegas = np.linspace(0.5, 1.5, 101)
    s = phase_shift(omegas, dt, SelfEnergyValue(np.full(omegas.shape, -0.5j * gamma)))
    np.testing.assert_allclose(reflection_transmission(s).r, markov_reflection(omegas, dt, gamma), atol=1e-14)


def test_markov_limit_matches_without_lamb_shift():
    params = ModelParams(alpha=0.01, omega_c=100.0)
    sol = solve_self_consistent(params)
    dt = sol.delta_tilde
    omegas = np.linspace(0.5, 1.5, 201) * dt
    full, _ = scatter(omegas, sol, params, ScatteringConfig(zero_lamb_shift=True))
    markov, _ = scatter(omegas, sol, params, ScatteringConfig(use_markov=True))
    assert np.max(np.abs(full.reflectivity - markov.reflectivity)) <= 2e-3


def test_lineshape_metrics_on_a_lorentzian():
    x = np.linspace(0, 2, 20001)
    y = 0.01 / ((x - 1) ** 2 + 0.01)
    res, fwhm, al, asym, diag = lineshape_metrics(x, y)
    assert res == pytest.approx(1, abs=1e-8)
    assert fwhm == pytest.approx(0.2, rel=1e-6)
    assert al == pytest.approx(0.2 / np.pi, rel=1e-6)
    assert asym == pytest.approx(0, abs=1e-6)
    assert diag == ""


def test_lineshape_metrics_flags_truncated_scan():
    x = np.linspace(0.9, 1.1, 50)
    y = 0.01 / ((x - 1) ** 2 + 0.01)
    *_, fwhm, al, asym, diag = lineshape_metrics(x, y)
    assert fwhm is None and "widen" in diag


@pytest.mark.parametrize("alpha", [0.05, 0.1, 0.2])
def test_lineshape_resonance_and_width(alpha):
    params = ModelParams(alpha=alpha, omega_c=100.0)
    ls = compute_lineshape(params, n_points=2000)
    assert ls.diagnostic == ""
    assert np.max(ls.reflectivities) == pytest.approx(1, abs=1e-4)
    np.testing.assert_allclose(ls.reflectivities + ls.transmissivities, 1, atol=1e-12)
    # the Lamb shift pulls the resonance below the renormalized gap
    assert ls.omega_reson < ls.delta_tilde
    assert ls.fwhm > 0


def test_numeric_sigma_source_agrees_with_closed_form_at_large_cutoff():
    params = ModelParams(alpha=0.1, omega_c=1e6)
    sol = solve_self_consistent(params)
    a = compute_lineshape(params, ScatteringConfig(), sol=sol, omega_min=0.05, omega_max=3, n_points=300)
    b = compute_lineshape(params, ScatteringConfig(sigma_source=SigmaSource.NUMERIC_GRID), sol=sol,
                          omega_min=0.05, omega_max=3, n_points=300)
    assert np.max(np.abs(a.reflectivities - b.reflectivities)) < 1e-3


def test_invalid_scan():
    params = ModelParams(alpha=0.1, omega_c=100.0)
    with pytest.raises(ValueError):
        compute_lineshape(params, omega_min=2, omega_max=1)
    with pytest.raises(ValueError):
        compute_lineshape(params, n_points=4)
