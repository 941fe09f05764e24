import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

import ansatz_gs as gs
import tim
from ansatz_gs import AnsatzKind, ChainParams, GridSpec
from errors import ConvergenceError, DomainError

frequencies = st.floats(min_value=0.05, max_value=5.0)
couplings = st.floats(min_value=0.0, max_value=3.0)


def lambert_critical_g(omega0, omega):
    # closed form of h_t = J for the LF couplings
    return 0.5 * omega * math.sqrt(special.lambertw(omega0 / omega).real)


def test_chain_params_validation():
    with pytest.raises(DomainError):
        ChainParams(omega0=1.0, omega=0.0, g=0.1)
    with pytest.raises(DomainError):
        ChainParams(omega0=-1.0, omega=1.0, g=0.1)
    with pytest.raises(DomainError):
        ChainParams(omega0=1.0, omega=1.0, g=float('nan'))
    with pytest.raises(DomainError):
        ChainParams(omega0=1.0, omega=1.0, g=0.1, N=1)
    with pytest.raises(DomainError):
        ChainParams(omega0=1.0, omega=1.0, g=0.1, d=2.0)
    assert ChainParams(omega0=0.5, omega=2.0, g=-3.0).scale == 3.0


# --- Lang-Firsov -----------------------------------------------------------

def test_lf_effective_couplings(ordered_chain):
    eff = gs.lf_effective(ordered_chain)
    assert eff.J == pytest.approx(0.72, rel=1e-14)
    assert eff.h_t == pytest.approx(0.118464, rel=1e-5)
    assert eff.h_l == 0.0


def test_lf_solve_ordered_point(ordered_chain):
    sol = gs.lf_solve(ordered_chain)
    assert sol.kind is AnsatzKind.LANG_FIRSOV
    assert sol.lam == pytest.approx(0.16454, rel=1e-4)
    assert sol.spin_magnetization == pytest.approx(0.99660, rel=1e-4)
    assert sol.ordered
    assert (sol.f_star, sol.alpha_star) == (0.6, 0.0)
    assert sol.to_dict()['lambda'] == sol.lam


def test_lf_decoupled_chain():
    sol = gs.lf_solve(ChainParams(omega0=1.3, omega=1.0, g=0.0))
    assert sol.energy_per_site == pytest.approx(-0.65)
    assert sol.lam == math.inf
    assert not sol.ordered
    assert sol.spin_magnetization == 0.0


def test_lf_zero_spin_frequency_is_exact():
    sol = gs.lf_solve(ChainParams(omega0=0.0, omega=2.0, g=0.7))
    assert sol.energy_per_site == pytest.approx(-4 * 0.49 / 2.0, rel=1e-12)
    assert sol.spin_magnetization == 1.0


@given(frequencies, frequencies, couplings)
def test_lf_boson_polarization_follows_magnetization(omega0, omega, g):
    sol = gs.lf_solve(ChainParams(omega0, omega, g))
    assert sol.boson_polarization == pytest.approx(2 * g / omega * sol.spin_magnetization, abs=1e-15)


def test_lf_critical_g_reference_value():
    assert gs.lf_critical_g(1.0, 1.0) == pytest.approx(0.3768, rel=1e-3)


@given(frequencies, frequencies)
def test_lf_critical_g_matches_lambert_form(omega0, omega):
    np.testing.assert_allclose(gs.lf_critical_g(omega0, omega), lambert_critical_g(omega0, omega), rtol=1e-9)


@given(frequencies, frequencies, st.sampled_from([1e-3, 0.1, 7.0, 1e3]))
def test_lf_critical_g_is_homogeneous(omega0, omega, s):
    np.testing.assert_allclose(gs.lf_critical_g(s * omega0, s * omega), s * gs.lf_critical_g(omega0, omega), rtol=1e-9)


def test_lf_critical_g_separates_phases():
    g_c = gs.lf_critical_g(1.0, 2.0)
    assert not gs.lf_solve(ChainParams(1.0, 2.0, g_c * (1 - 1e-6))).ordered
    assert gs.lf_solve(ChainParams(1.0, 2.0, g_c * (1 + 1e-6))).ordered
    assert gs.lf_critical_g(0.0, 2.0) == 0.0
    with pytest.raises(DomainError):
        gs.lf_critical_g(1.0, 0.0)


def test_lf_finite_energy_approaches_density(ordered_chain):
    e_inf = gs.lf_solve(ordered_chain).energy_per_site
    np.testing.assert_allclose(gs.lf_finite_energy(ordered_chain, 2048) / 2048, e_inf, rtol=1e-10)


# --- Silbey-Harris ---------------------------------------------------------

def test_sh_reduces_to_lf_at_polaron_point():
    rng = np.random.default_rng(7)
    for omega0, omega, g in rng.uniform([0.0, 0.05, 0.0], [3.0, 3.0, 2.0], size=(10_000, 3)):
        p = ChainParams(omega0, omega, g)
        assert abs(gs.sh_energy(p, g, 0.0) - gs.lf_solve(p).energy_per_site) <= 1e-12 * max(1.0, p.scale)


def test_sh_effective_couplings():
    eff = gs.sh_effective(ChainParams(1.0, 1.0, 0.6), 0.5, 0.1)
    assert eff.J == pytest.approx(-0.7)
    assert eff.h_t == pytest.approx(0.5 * math.exp(-1.0))
    assert eff.h_l == pytest.approx(0.04)


def test_sh_longitudinal_term_is_the_finite_size_gap():
    p = ChainParams(1.0, 1.0, 0.6)
    f, alpha = 0.5, 0.1
    eff = gs.sh_effective(p, f, alpha)
    expected = eff.h_l * tim.magnetization(eff.lam)
    diff = gs.sh_energy(p, f, alpha) - gs.sh_finite_energy(p, f, alpha, 1024) / 1024
    assert diff == pytest.approx(expected, abs=1e-12)


def test_sh_decoupled_chain():
    sol = gs.sh_solve(ChainParams(1.0, 1.0, 0.0))
    assert (sol.f_star, sol.alpha_star) == (0.0, 0.0)
    assert sol.energy_per_site == -0.5
    assert sol.converged


def test_sh_never_above_lf():
    for g in (0.1, 0.3, 0.5, 0.8):
        p = ChainParams(1.0, 1.0, g)
        assert gs.sh_solve(p).energy_per_site <= gs.lf_solve(p).energy_per_site + 1e-12


def test_sh_tracks_lf_for_fast_bosons():
    p = ChainParams(omega0=1.0, omega=1e4, g=0.5)
    sol = gs.sh_solve(p)
    assert abs(sol.f_star - p.g) <= 1e-3 * p.g

    deviations = [abs(gs.sh_solve(ChainParams(1.0, w, 0.5)).f_star - 0.5) for w in (10.0, 100.0, 1000.0)]
    assert deviations[0] > deviations[1] > deviations[2]


def test_sh_unpolarized_for_slow_bosons():
    g = gs.lf_critical_g(1.0, 0.05)
    sol = gs.sh_solve(ChainParams(omega0=1.0, omega=0.05, g=g))
    assert abs(sol.f_star) < abs(sol.f_star - g)
    assert not sol.ordered


def test_sh_reports_best_iterate_when_stuck(monkeypatch):
    monkeypatch.setitem(gs.SOLVER_CONFIG, 'maxiter', 3)
    with pytest.raises(ConvergenceError) as info:
        gs.sh_solve(ChainParams(1.0, 1.0, 0.6))
    best = info.value.best
    assert best.kind is AnsatzKind.SILBEY_HARRIS
    assert not best.converged


def test_sh_critical_g_near_lf_for_fast_bosons():
    np.testing.assert_allclose(gs.sh_critical_g(1.0, 20.0), gs.lf_critical_g(1.0, 20.0), rtol=1e-2)


def test_sh_critical_g_above_lf_for_slow_bosons():
    assert gs.sh_critical_g(1.0, 0.05) >= gs.lf_critical_g(1.0, 0.05)
    assert gs.sh_critical_g(0.0, 1.0) == 0.0


@pytest.mark.parametrize("g", [0.2, 0.6])
@pytest.mark.parametrize("s", [1e-3, 1e3])
def test_solutions_are_scale_covariant(g, s):
    p = ChainParams(1.0, 1.0, g)
    q = p.scaled(s)

    lf, lf_s = gs.lf_solve(p), gs.lf_solve(q)
    np.testing.assert_allclose(lf_s.energy_per_site / s, lf.energy_per_site, rtol=1e-9)
    np.testing.assert_allclose(lf_s.lam, lf.lam, rtol=1e-9)

    # a derivative-free minimizer only fixes the argmin to about sqrt(eps)
    sh, sh_s = gs.sh_solve(p), gs.sh_solve(q)
    np.testing.assert_allclose(sh_s.energy_per_site / s, sh.energy_per_site, rtol=1e-9)
    np.testing.assert_allclose(sh_s.f_star / s, sh.f_star, rtol=1e-6, atol=1e-9)
    np.testing.assert_allclose(sh_s.alpha_star, sh.alpha_star, rtol=1e-6, atol=1e-9)
    np.testing.assert_allclose(sh_s.spin_magnetization, sh.spin_magnetization, rtol=1e-6, atol=1e-9)
    assert sh_s.ordered == sh.ordered


def test_solution_finite_energy_dispatches(ordered_chain):
    lf = gs.solve(ordered_chain, AnsatzKind.LANG_FIRSOV)
    assert gs.solution_finite_energy(ordered_chain, lf, 8) == gs.lf_finite_energy(ordered_chain, 8)
    sh = gs.solve(ordered_chain, 'sh')
    assert gs.solution_finite_energy(ordered_chain, sh, 8) == pytest.approx(
        gs.sh_finite_energy(ordered_chain, sh.f_star, sh.alpha_star, 8))


# --- phase diagrams --------------------------------------------------------

def test_grid_validation():
    with pytest.raises(DomainError):
        GridSpec('hexagonal', (1.0,), (1.0,), (0.1,))
    with pytest.raises(DomainError):
        GridSpec('cartesian', (), (1.0,), (0.1,))
    with pytest.raises(DomainError):
        GridSpec('polar', (1.0,), (2.0,), (0.1,))


def test_single_point_sweep_matches_direct_solve(ordered_chain):
    grid = GridSpec('cartesian', (1.0,), (1.0,), (0.6,))
    (row,) = gs.phase_diagram(grid)
    assert row.index == (0, 0, 0)
    assert row.solutions['lf'] == gs.lf_solve(ordered_chain)
    assert row.solutions['sh'].energy_per_site == gs.sh_solve(ordered_chain).energy_per_site


def test_rows_are_row_major_with_coupling_innermost():
    grid = GridSpec('cartesian', (1.0, 2.0), (0.5,), (0.1, 0.2, 0.3))
    rows = gs.phase_diagram(grid, kinds=('lf',))
    assert [r.index for r in rows] == [(i, 0, k) for i in range(2) for k in range(3)]
    assert [r.g for r in rows] == [0.1, 0.2, 0.3] * 2


def test_worker_count_does_not_change_results():
    grid = GridSpec('cartesian', (0.5, 1.0, 2.0), (0.5, 1.0), (0.1, 0.4, 0.9))
    serial = gs.phase_diagram(grid, workers=1)
    parallel = gs.phase_diagram(grid, workers=2)
    assert serial == parallel


def test_failed_points_do_not_stop_the_sweep():
    grid = GridSpec('cartesian', (-1.0, 1.0), (1.0,), (0.3,))
    rows = gs.phase_diagram(grid, kinds=('lf',))
    assert rows[0].failed and 'lf' in rows[0].errors
    assert not rows[1].failed


def test_lf_order_flips_once_at_critical_coupling():
    couplings = tuple(np.linspace(0.05, 1.5, 30))
    grid = GridSpec('cartesian', (1.0, 2.0), (0.5,), couplings)
    rows = gs.phase_diagram(grid, kinds=('lf',))
    for omega in (1.0, 2.0):
        flags = [r.solutions['lf'].ordered for r in rows if r.omega == omega]
        g_c = gs.lf_critical_g(0.5, omega)
        assert flags == [g > g_c for g in couplings]


def test_polar_sweep_critical_line_falls_toward_zero_spin_frequency():
    thetas = (0.5, 0.3, 0.1, 0.02)
    points = [gs.polar_grid(1.0, t) for t in thetas]
    critical = [gs.lf_critical_g(omega0, omega) for omega, omega0 in points]
    assert critical == sorted(critical, reverse=True)

    grid = GridSpec('polar', (1.0,), thetas, (0.2,))
    rows = gs.phase_diagram(grid, kinds=('lf',))
    for row, (omega, omega0) in zip(rows, points):
        assert (row.omega, row.omega0) == (omega, omega0)
