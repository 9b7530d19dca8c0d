import warnings

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from polaron_wqed.dynamics import (Propagator, SingleExcitationState, build_hamiltonian_matrix,
                                   default_emission_params, emission_run, evolve, fit_decay_rate, recurrence_time,
                                   spectral_width, spectrum_peak)
from polaron_wqed.model import ModelParams, build_grid
from polaron_wqed.polaron import solve_self_consistent
from polaron_wqed.selfenergy import decay_rate, sigma_ohmic_closed


@pytest.fixture(scope="module")
def weak():
    params = default_emission_params(0.07)
    sol = solve_self_consistent(params, build_grid(params))
    return params, sol


def ode_oracle(H, psi0, times):
    """Independent 8th-order Runge-Kutta integration of i dpsi/dt = H psi."""
    res = solve_ivp(lambda t, y: -1j * (H @ y), (times[0], times[-1]), psi0.astype(complex), method="DOP853",
                    t_eval=times, rtol=1e-12, atol=1e-13)
    assert res.success
    return res.y.T


def test_propagator_matches_ode_oracle(weak):
    params, sol = weak
    H = build_hamiltonian_matrix(sol)
    psi0 = SingleExcitationState.excited(params.num_modes).vector()
    times = np.linspace(0, 30, 31)
    exact = Propagator(H)(psi0, times)
    oracle = ode_oracle(H, psi0, times)
    assert np.max(np.abs(exact - oracle)) <= 1e-6


def test_hamiltonian_structure(weak):
    params, sol = weak
    H = build_hamiltonian_matrix(sol)
    assert H.shape == (params.num_modes + 1,) * 2
    np.testing.assert_array_equal(H, H.T)
    assert H[0, 0] == pytest.approx(0.5 * sol.delta_tilde)
    bare = build_hamiltonian_matrix(sol, include_v_local=False)
    diff = H - bare
    assert np.all(diff[0] == 0) and np.linalg.matrix_rank(diff) == 1


def test_uncoupled_qubit_stays_excited():
    params = default_emission_params(0.0, num_modes=64)
    trace = emission_run(params, t_max=10, n_samples=11)
    np.testing.assert_allclose(trace.p_e, 1, atol=1e-14)
    assert trace.delta_tilde == 1.0


def test_state_helpers():
    st = SingleExcitationState.excited(3)
    assert st.norm == 1
    H = np.diag([1.0, 2.0, 3.0, 4.0])
    out = evolve(st, H, 2.0)
    assert out.amp_e == pytest.approx(np.exp(-2j))
    with pytest.raises(ValueError):
        evolve(SingleExcitationState(2.0, np.zeros(3, complex)), H, 1.0)


def test_conservation_and_spectrum(weak):
    params, sol = weak
    trace = emission_run(params, sol=sol)
    np.testing.assert_allclose(trace.n_total, 1, atol=1e-10)
    np.testing.assert_allclose(trace.energy, trace.energy[0], atol=1e-10)
    assert trace.p_e[0] == pytest.approx(1, abs=1e-12) and trace.p_e[-1] < 0.05
    assert 0 < spectral_width(trace) < 2


def test_population_rate_is_wigner_weisskopf_rate():
    # pole of (w - Dt) Dt - (w + Dt) Sigma: the qubit sees (1 + w/Dt) Sigma
    params = default_emission_params(0.01)
    sol = solve_self_consistent(params, build_grid(params))
    trace = emission_run(params, t_max=60, n_samples=601, sol=sol)
    dt = sol.delta_tilde
    # resonance of the pole equation with the closed-form Lamb shift
    omega_r = dt + 2 * sigma_ohmic_closed(dt, dt, params.alpha).lamb_shift
    expected = (1 + omega_r / dt) * decay_rate(omega_r, sol)
    assert fit_decay_rate(trace) == pytest.approx(expected, rel=0.03)


def test_spectral_broadening_monotone():
    widths = []
    for a in (0.01, 0.07, 0.35):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            trace = emission_run(default_emission_params(a))
        widths.append(spectral_width(trace))
    assert widths[0] < widths[1] < widths[2]


def test_v_local_shifts_the_strong_coupling_spectrum():
    params = default_emission_params(0.35)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = solve_self_consistent(params, build_grid(params))
        with_v = emission_run(params, sol=sol)
        without = emission_run(params, sol=sol, include_v_local=False)
    assert spectrum_peak(with_v) != spectrum_peak(without)
    assert 0.3 <= spectral_width(with_v) / sol.delta_tilde <= 3


def test_recurrence_guard():
    params = default_emission_params(0.07, num_modes=64)
    sol = solve_self_consistent(params, build_grid(params))
    assert recurrence_time(sol.grid, sol.delta_tilde) < 100
    with pytest.warns(UserWarning, match="recurrence"):
        emission_run(params, t_max=100, sol=sol)


def test_rejects_log_grid_and_bad_times():
    params = ModelParams(alpha=0.1, omega_c=10.0)
    with pytest.raises(ValueError, match="uniform"):
        emission_run(params, sol=solve_self_consistent(params))
    with pytest.raises(ValueError):
        emission_run(default_emission_params(0.01, num_modes=16), t_max=0)


def test_fit_window_too_short():
    params = default_emission_params(0.01, num_modes=64)
    trace = emission_run(params, t_max=1, n_samples=5)
    with pytest.raises(ValueError, match="too few"):
        fit_decay_rate(trace)
