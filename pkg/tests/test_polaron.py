import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polaron_wqed.model import Dispersion, ModelParams, build_grid
from polaron_wqed.polaron import (PolaronConvergenceError, asymptotic_gap, gap_map, quadrature_grid, renormalized_gap,
                                  silbey_harris_displacement, solve_self_consistent)


def bisection_oracle(params, grid, rtol=1e-13):
    """Plain hand-rolled bisection on h(x) = x - Delta exp(-2 sum f(x)^2 / L)."""
    def h(x):
        f = grid.couplings / (grid.frequencies + x)
        return x - params.delta * np.exp(-2.0 * np.sum(grid.weights / np.pi * f * f))

    lo, hi = 1e-12 * params.delta, params.delta
    assert h(lo) < 0 <= h(hi)
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if h(mid) < 0 else (lo, mid)
    return 0.5 * (lo + hi)


@pytest.mark.parametrize("alpha", [0.05, 0.1, 0.2, 0.3])
@pytest.mark.parametrize("omega_c", [10.0, 1e4])
def test_matches_bisection_oracle(alpha, omega_c):
    params = ModelParams(alpha=alpha, omega_c=omega_c)
    sol = solve_self_consistent(params)
    oracle = bisection_oracle(params, sol.grid)
    assert abs(sol.delta_tilde - oracle) / oracle <= 1e-10
    assert sol.residual <= 1e-10


def test_cosine_matches_bisection_oracle():
    params = ModelParams(alpha=0.2, omega_c=6.0, dispersion=Dispersion.COSINE_HARD, num_modes=512)
    sol = solve_self_consistent(params)
    assert sol.delta_tilde == pytest.approx(bisection_oracle(params, sol.grid), rel=1e-10)


def test_alpha_zero_is_trivial():
    sol = solve_self_consistent(ModelParams(alpha=0.0, omega_c=10.0, delta=2.0))
    assert sol.delta_tilde == 2.0 and sol.iterations == 1
    assert np.all(sol.f == 0)


def test_gap_decreases_with_alpha():
    gaps = [solve_self_consistent(ModelParams(alpha=a, omega_c=100.0)).delta_tilde for a in (0.0, 0.05, 0.1, 0.2, 0.3)]
    assert np.all(np.diff(gaps) < 0)
    assert all(0 < g <= 1 for g in gaps)


def test_fixed_point_is_self_consistent():
    params = ModelParams(alpha=0.15, omega_c=50.0)
    sol = solve_self_consistent(params)
    assert renormalized_gap(sol.f, sol.grid, params) == pytest.approx(sol.delta_tilde, rel=1e-10)
    np.testing.assert_allclose(sol.g_eff, sol.delta_tilde * sol.f)


def test_grid_refinement():
    params = ModelParams(alpha=0.2, omega_c=1e3)
    a = solve_self_consistent(params, quadrature_grid(params, 200)).delta_tilde
    b = solve_self_consistent(params, quadrature_grid(params, 400)).delta_tilde
    assert abs(a - b) / b <= 1e-4


def test_asymptotic_ratio_constant_in_cutoff():
    # the ratio to the large-cutoff estimate is an O(1) constant once omega_c >> Delta
    ratios = []
    for wc in (1e3, 1e4, 1e5, 1e6):
        p = ModelParams(alpha=0.25, omega_c=wc)
        ratios.append(solve_self_consistent(p).delta_tilde / asymptotic_gap(p))
    assert np.ptp(ratios) / np.mean(ratios) < 0.05


def test_displacement_peaks_near_gap():
    params = ModelParams(alpha=0.1, omega_c=100.0, num_modes=200_000, k_max=50.0)
    grid = build_grid(params)
    sol = solve_self_consistent(params, grid)
    k_peak = grid.momenta[np.argmax(sol.f)]
    # f ~ sqrt(k) / (k + Dt) peaks at k = Dt for a linear spectrum far below omega_c
    assert k_peak == pytest.approx(sol.delta_tilde, rel=0.02)


def test_strong_coupling_warns():
    with pytest.warns(UserWarning, match="validated"):
        solve_self_consistent(ModelParams(alpha=0.35, omega_c=6.0, dispersion=Dispersion.COSINE_HARD))


def test_localized_regime_raises():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(PolaronConvergenceError) as err:
            solve_self_consistent(ModelParams(alpha=1.2, omega_c=1e6))
    assert err.value.residual > 0


def test_invalid_inputs():
    grid = build_grid(ModelParams(alpha=0.1, omega_c=1.0, num_modes=8))
    with pytest.raises(ValueError):
        silbey_harris_displacement(0.0, grid)
    with pytest.raises(ValueError):
        solve_self_consistent(ModelParams(alpha=0.1, omega_c=1.0), tol=0)
    with pytest.raises(ValueError):
        asymptotic_gap(ModelParams(alpha=1.0, omega_c=10.0))


@settings(max_examples=25, deadline=None)
@given(alpha=st.floats(0.01, 0.3), omega_c=st.floats(2.0, 1e5))
def test_gap_map_properties(alpha, omega_c):
    params = ModelParams(alpha=alpha, omega_c=omega_c)
    sol = solve_self_consistent(params)
    assert 0 < sol.delta_tilde < params.delta
    # the map is increasing in the trial gap, so the root is unique
    xs = np.geomspace(1e-6, 1.0, 12) * params.delta
    vals = [gap_map(x, sol.grid, params) for x in xs]
    assert np.all(np.diff(vals) > 0)
