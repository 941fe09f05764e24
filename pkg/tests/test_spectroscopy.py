import logging
import math

import numpy as np
import pytest

import ansatz_exc as exc
import spectroscopy as sp
from ansatz_gs import ChainParams
from ed_oracle import TruncationSpec, ground_state
from errors import DomainError
from spectroscopy import ProbeParams, ResonanceSet, SpectrumCurve


@pytest.fixture
def chain10():
    return ChainParams(omega0=0.5, omega=1.0, g=0.2, N=10)


# --- parameters and containers ---------------------------------------------

def test_probe_validation(caplog):
    with pytest.raises(DomainError):
        ProbeParams(eta=0.0)
    with pytest.raises(DomainError):
        ProbeParams(v_g=-1.0)
    with pytest.raises(DomainError):
        ProbeParams(g_p=-0.1)
    with caplog.at_level(logging.WARNING, logger='spectroscopy'):
        ProbeParams(alpha_p=0.5)
    assert 'linear-response' in caplog.text


def test_resonance_set_validation():
    with pytest.raises(DomainError):
        ResonanceSet.from_lists([1.0], [-0.1])
    with pytest.raises(DomainError):
        ResonanceSet.from_lists([1.0, 2.0], [0.1])
    with pytest.raises(DomainError):
        ResonanceSet.from_lists([1.0, 2.0], [0.1, 0.1], [('-', 0.0), ('-', 0.0)])
    res = ResonanceSet.from_lists([1.0, 2.0], [0.1, 0.2], [('-', 0.0), ('+', 0.5)])
    assert res.get('+', 0.5).energy == 2.0
    with pytest.raises(KeyError):
        res.get('+', 0.0)


def test_spectrum_curve_validation():
    with pytest.raises(DomainError):
        SpectrumCurve({'nu': [0.0, 0.0, 1.0]}, [1.0, 2.0, 3.0])
    with pytest.raises(DomainError):
        SpectrumCurve({'nu': [0.0, 1.0]}, [1.0, float('nan')])
    with pytest.raises(DomainError):
        SpectrumCurve({'qd': [0.0, 1.0], 'nu': [0.0, 1.0]}, np.zeros((2, 3)))
    curve = SpectrumCurve({'qd': [0.0, 1.0], 'nu': [0.0, 0.5, 1.0]}, np.arange(6.0).reshape(2, 3))
    rows = curve.to_rows()
    assert rows[4] == {'qd': 1.0, 'nu': 0.5, 'value': 4.0}
    assert 'code_version' in curve.metadata


# --- Fano transmission -----------------------------------------------------

def test_no_resonances_is_fully_transparent():
    omega = np.linspace(-3.0, 3.0, 101)
    np.testing.assert_array_equal(sp.transmission(ResonanceSet(), omega), 1.0)
    zero_width = ResonanceSet.from_lists([0.5, 1.0], [0.0, 0.0])
    np.testing.assert_array_equal(sp.transmission(zero_width, omega), 1.0)


def test_single_resonance_closed_form():
    res = ResonanceSet.from_lists([1.0], [0.05])
    omega = np.linspace(0.0, 2.0, 1000)
    expected = (omega - 1.0) ** 2 / ((omega - 1.0) ** 2 + 0.05 ** 2)
    np.testing.assert_allclose(sp.transmission(res, omega), expected, atol=1e-12)
    assert sp.transmission(res, [1.0])[0] == 0.0


def test_symmetric_pair_is_transparent_at_midpoint():
    res = ResonanceSet.from_lists([1.0, 2.0], [0.1, 0.1])
    assert sp.transmission(res, [1.5])[0] == 1.0
    x = np.linspace(0.01, 0.49, 50)
    np.testing.assert_allclose(sp.transmission(res, 1.5 + x), sp.transmission(res, 1.5 - x), atol=1e-12)


def test_transmission_is_bounded():
    rng = np.random.default_rng(3)
    res = ResonanceSet.from_lists(rng.uniform(0.0, 2.0, 10), rng.uniform(0.0, 0.1, 10))
    for _ in range(10):
        t = sp.transmission(res, rng.uniform(-1.0, 3.0, 100_000))
        assert np.all((t >= 0.0) & (t <= 1.0))


def test_uniform_resonances_on_finite_chain(chain10):
    res = sp.resonances_from_ansatz(chain10, ProbeParams(), couplings='uniform', gamma0=1e-4)
    assert len(res) == 10
    assert res.get('+', 0.0).width == 0.0
    assert all(r.width == 1e-4 for r in res if r.label != ('+', 0.0))

    report = sp.well_resolved_check(res)
    assert report.ok

    omega = np.linspace(0.2, 1.3, 40001)
    curve = sp.fano_transmission(res, omega)
    dips = sp.transmission_dips(curve)
    assert len(dips) == 9
    upper_zero = res.get('+', 0.0).energy
    assert np.min(np.abs(dips - upper_zero)) > 5e-3
    assert sp.transmission(res, [upper_zero])[0] > 0.99
    for r in res:
        if r.width > 0:
            assert sp.transmission(res, [r.energy])[0] == 0.0


def test_table_couplings(chain10):
    table = {(band, n): 0.001 * (n + 1) for band in ('-', '+') for n in range(5)}
    res = sp.resonances_from_ansatz(chain10, ProbeParams(), couplings='table', table=table)
    qd = 2 * math.pi * 3 / 10
    assert res.get('-', qd).width == pytest.approx(0.004)
    assert res.get('+', 0.0).width == 0.0
    del table[('-', 4)]
    with pytest.raises(DomainError):
        sp.resonances_from_ansatz(chain10, ProbeParams(), couplings='table', table=table)


def test_resonances_need_finite_chain():
    with pytest.raises(DomainError):
        sp.resonances_from_ansatz(ChainParams(0.5, 1.0, 0.2), ProbeParams(), gamma0=0.01)
    with pytest.raises(DomainError):
        sp.resonances_from_ansatz(ChainParams(0.5, 1.0, 0.2, N=4), ProbeParams(), couplings='guess')


def test_unresolved_resonances_are_flagged():
    res = ResonanceSet.from_lists([1.0, 1.001], [0.01, 0.01])
    report = sp.well_resolved_check(res)
    assert not report.ok
    assert report.ratios[('-', 0.0)] == pytest.approx(10.0)
    assert sp.well_resolved_check(ResonanceSet.from_lists([1.0], [0.5])).ok
    with pytest.raises(DomainError):
        sp.well_resolved_check(ResonanceSet())


@pytest.mark.slow
def test_oracle_widths_for_weakly_coupled_spins():
    p = ChainParams(omega0=0.5, omega=1.0, g=0.01, N=4)
    oracle = ground_state(p, TruncationSpec(n_max=4, N=4), k=20)
    probe = ProbeParams(g_p=0.1, v_g=2.0)
    res = sp.resonances_from_ansatz(p, probe, couplings='oracle', oracle=oracle)

    assert res.get('+', 0.0).width == 0.0
    # a bare spin flip at momentum q carries |<q|sx_q|0>|^2 = 1
    for qd in exc.momentum_grid(N=4):
        assert res.get('-', qd).width == pytest.approx(probe.g_p ** 2 / (4 * probe.v_g), rel=1e-2)

    stronger = sp.resonances_from_ansatz(p, ProbeParams(g_p=0.2, v_g=2.0), couplings='oracle', oracle=oracle)
    np.testing.assert_allclose(stronger.widths, 4 * res.widths, rtol=1e-12)


def test_oracle_size_must_match():
    p2 = ChainParams(omega0=0.5, omega=1.0, g=0.1, N=2)
    oracle = ground_state(p2, TruncationSpec(n_max=2, N=2))
    p4 = ChainParams(omega0=0.5, omega=1.0, g=0.1, N=4)
    with pytest.raises(DomainError):
        sp.resonances_from_ansatz(p4, ProbeParams(g_p=0.1), couplings='oracle', oracle=oracle)


# --- Kubo response ---------------------------------------------------------

def test_no_probe_coupling_leaves_only_static_peak():
    ordered = ChainParams(omega0=1.0, omega=1.0, g=0.6, N=10)
    nu = np.linspace(-0.5, 3.0, 351)
    for probe in (ProbeParams(g_p=0.0, alpha_p=0.1), ProbeParams(g_p=0.1, alpha_p=0.0)):
        curve = sp.kubo_response(ordered, probe, nu)
        qs = curve.axis['qd']
        at_pi = np.isclose(qs, math.pi)
        assert at_pi.sum() == 1
        np.testing.assert_array_equal(curve.values[~at_pi], 0.0)
        assert sp.static_weight(ordered) > 0.0
        expected = sp.static_weight(ordered) * sp.lorentzian(nu, 0.0, probe.eta)
        np.testing.assert_allclose(curve.values[at_pi][0], expected, rtol=1e-12)


def test_static_weight_tracks_boson_polarization():
    disordered = ChainParams(omega0=1.0, omega=1.0, g=0.2, N=10)
    assert sp.static_weight(disordered) == 0.0
    ordered = ChainParams(omega0=1.0, omega=1.0, g=0.6, N=16)
    assert sp.static_weight(ordered) > 0.0


def test_response_is_linear_in_probe_amplitude(chain10):
    nu = np.linspace(0.0, 2.0, 201)
    weak = sp.kubo_response(chain10, ProbeParams(g_p=0.05, alpha_p=0.01), nu)
    strong = sp.kubo_response(chain10, ProbeParams(g_p=0.05, alpha_p=0.02), nu)
    rows = ~np.isclose(weak.axis['qd'], math.pi)
    np.testing.assert_allclose(strong.values[rows], 2 * weak.values[rows], rtol=1e-9)


def test_peaks_sit_on_two_band_energies(chain10):
    probe = ProbeParams(g_p=0.05, alpha_p=0.01, eta=1e-4)
    nu = np.linspace(0.0, 2.0, 200_001)
    step = nu[1] - nu[0]
    curve = sp.kubo_response(chain10, probe, nu, chi=1.0)
    for i, qd in enumerate(curve.axis['qd']):
        if np.isclose(qd, math.pi):
            continue
        point = exc.band_point(chain10, qd)
        peak = nu[np.argmax(curve.values[i])]
        assert min(abs(peak - point.e_minus), abs(peak - point.e_plus)) <= step


def test_boson_like_band_carries_the_weight():
    p = ChainParams(omega0=2.0, omega=0.5, g=0.02)
    point = exc.band_point(p, math.pi / 2)
    lower, upper = sp.kubo_weights(point, chi=0.0)
    assert lower > 0.99
    assert upper < 0.01
    assert sum(sp.kubo_weights(point, chi=1.0)) == pytest.approx(2.0)


def test_kubo_needs_momentum_grid():
    with pytest.raises(DomainError):
        sp.kubo_response(ChainParams(0.5, 1.0, 0.2), ProbeParams(), [0.0, 1.0])
