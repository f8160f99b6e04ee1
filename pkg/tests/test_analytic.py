import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filamentlab.analytic import (
    HelixParams,
    SolitonParams,
    helix_curve,
    soliton_curve,
    soliton_field_values,
    soliton_max_speed,
    soliton_positions,
    wave_packet,
    wave_packet_quadrature,
    wave_packet_values,
)
from filamentlab.errors import DomainError, WindowTooNarrow
from filamentlab.geometry import compute_frenet


def test_helix_params_limits():
    with pytest.raises(DomainError):
        HelixParams(0.2, 1.0)
    with pytest.warns(UserWarning):
        hp = HelixParams(0.05, 1.0)
    assert hp.strongly_nonlinear
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert not HelixParams(0.01, 1.0).strongly_nonlinear
    assert HelixParams(0.01, 0.5).pitch == 2.0


def test_helix_initial_point_and_period():
    hp = HelixParams(0.01, 1.0)
    x = np.linspace(0, 5, 50)
    c0 = helix_curve(hp, 0.0, x)
    assert c0.nodes[0, 1] == pytest.approx(0.01)
    assert c0.nodes[0, 2] == 0.0
    cT = helix_curve(hp, hp.period, x)
    np.testing.assert_allclose(cT.nodes, c0.nodes, atol=1e-15)


def test_helix_handedness_mirror():
    x = np.linspace(0, 5, 50)
    right = helix_curve(HelixParams(0.01, 1.0), 0.0, x).nodes
    left = helix_curve(HelixParams(0.01, -1.0), 0.0, x).nodes
    np.testing.assert_allclose(left, right * [1, 1, -1])


def test_helix_rejects_unsorted_grid():
    with pytest.raises(ValueError):
        helix_curve(HelixParams(0.01, 1.0), 0.0, [0.0, 2.0, 1.0, 3.0])


def test_periodic_helix_needs_whole_turns():
    hp = HelixParams(0.01, 1.0)
    n = 64
    c = helix_curve(hp, 0.0, 2 * np.pi * np.arange(n) / n, periodic=True)
    assert c.closed and c.shift[0] == pytest.approx(2 * np.pi)
    with pytest.raises(ValueError):
        helix_curve(hp, 0.0, 5.0 * np.arange(n) / n, periodic=True)


def test_helix_satisfies_linear_equation():
    # phi_t = i nu phi_xx holds exactly for the small-amplitude form
    hp = HelixParams(0.01, 0.9, nu=0.7)
    x = np.linspace(0, 3, 7)
    dt = 1e-6
    phi = lambda t: helix_curve(hp, t, x).nodes[:, 1] + 1j * helix_curve(hp, t, x).nodes[:, 2]
    lhs = (phi(dt) - phi(-dt)) / (2 * dt)
    rhs = 1j * hp.nu * (-(hp.tau**2)) * phi(0.0)
    np.testing.assert_allclose(lhs, rhs, atol=1e-11)


def test_wave_packet_centre_value():
    v = wave_packet_values(0.02, 1.0, 0.1, 1.0, 0.0, [0.0])
    assert v[0] == pytest.approx(0.02)


def test_wave_packet_domain():
    with pytest.raises(DomainError):
        wave_packet_values(0.02, 1.0, 1.5, 1.0, 0.0, [0.0])


def test_wave_packet_matches_superposition():
    x = np.linspace(-50, 50, 201)
    q = wave_packet_quadrature(0.01, 1.0, 0.2, 1.0, 0.0, x)
    c = wave_packet_values(0.01, 1.0, 0.2, 1.0, 0.0, x)
    assert np.max(np.abs(q - c)) < 1e-8


def test_wave_packet_field_on_grid():
    n, L = 256, 200.0
    x = -L / 2 + L / n * np.arange(n)
    f = wave_packet(0.01, 1.0, 0.2, 1.0, 0.0, x)
    assert f.n == n and f.dx == pytest.approx(L / n)


def test_soliton_size_and_circle_identity():
    sp = SolitonParams(1.0, 0.5)
    assert sp.a == pytest.approx(1.6)
    assert sp.speed == 1.0


@settings(max_examples=50, deadline=None)
@given(kh=st.floats(0.05, 5.0), tau=st.floats(-5.0, 5.0))
def test_soliton_circle_identity_property(kh, tau):
    sp = SolitonParams(kh, tau)
    assert abs(sp.circle_residual()) <= 1e-12 * max(1.0, 1.0 / sp.a**2)


def test_soliton_from_size_round_trip():
    sp = SolitonParams.from_size(1.6, 1.0)
    assert sp.tau == pytest.approx(0.5)
    with pytest.raises(DomainError):
        SolitonParams.from_size(1.0, 3.0)


def test_soliton_window_check():
    sp = SolitonParams(1.0, 0.5)
    with pytest.raises(WindowTooNarrow):
        soliton_curve(sp, 0.0, np.linspace(-8, 8, 100))
    with pytest.raises(WindowTooNarrow):
        soliton_curve(sp, 0.0, np.linspace(-30, 30, 100), min_eta=5.0)
    # the hump moves: at t = 12 the right end is only 8 widths away
    with pytest.raises(WindowTooNarrow):
        soliton_curve(sp, 12.0, np.linspace(-20, 20, 400))


def test_soliton_is_unit_speed_and_solves_lia():
    # r_t = nu r_l x r_ll checked by centred differences on the closed form
    sp = SolitonParams(0.9, 0.4, nu=1.3)
    l = np.linspace(-3, 3, 13)
    h, dt = 1e-4, 1e-5
    r = lambda ll, t: soliton_positions(sp, t, ll)
    r_l = (r(l + h, 0) - r(l - h, 0)) / (2 * h)
    r_ll = (r(l + h, 0) - 2 * r(l, 0) + r(l - h, 0)) / h**2
    r_t = (r(l, dt) - r(l, -dt)) / (2 * dt)
    np.testing.assert_allclose(np.linalg.norm(r_l, axis=1), 1.0, atol=1e-7)
    np.testing.assert_allclose(r_t, sp.nu * np.cross(r_l, r_ll), atol=2e-5)


def test_soliton_curvature_profile():
    sp = SolitonParams(1.0, 0.5)
    l = np.linspace(-20, 20, 4001)
    fr = compute_frenet(soliton_curve(sp, 0.0, l))
    assert np.max(np.abs(fr.curvature - 2 * sp.kappa_hat / np.cosh(l))) < 1e-3
    core = np.abs(l) < 5
    assert np.max(np.abs(fr.torsion[core] - sp.tau)) < 1e-3


def test_soliton_peak_moves_at_two_nu_tau():
    sp = SolitonParams(1.0, 0.5)
    l = np.linspace(-30, 30, 6001)
    peaks = []
    for t in (0.0, 1.0, 2.0):
        amp = np.abs(soliton_field_values(sp, t, l))
        peaks.append(l[np.argmax(amp)])
    assert np.diff(peaks) == pytest.approx([1.0, 1.0], abs=1e-9)


def test_plane_loop_rotates_in_place():
    sp = SolitonParams(1.0, 0.0)
    l = np.linspace(-15, 15, 301)
    c0, c1 = soliton_curve(sp, 0.0, l).nodes, soliton_curve(sp, 0.7, l).nodes
    np.testing.assert_allclose(c1[:, 0], c0[:, 0])
    w0, w1 = c0[:, 1] + 1j * c0[:, 2], c1[:, 1] + 1j * c1[:, 2]
    np.testing.assert_allclose(w1, w0 * np.exp(1j * sp.nu * sp.kappa_hat**2 * 0.7), atol=1e-15)


def test_soliton_max_speed():
    assert soliton_max_speed(1.6) == pytest.approx(1.25)
    a = 1.6
    kh = np.linspace(1e-6, 2 / a, 200001)
    taus = np.sqrt(np.maximum(1 / a**2 - (kh - 1 / a) ** 2, 0.0))
    assert np.max(2 * taus) == pytest.approx(soliton_max_speed(a), abs=1e-10)
    assert soliton_max_speed(1e12) < 1e-11
    with pytest.raises(DomainError):
        soliton_max_speed(0.0)


def test_soliton_flattens_to_helix_curvature():
    # small kappa_hat / tau: the core curvature 2 kappa_hat = a tau^2 to leading order
    tau = 1.0
    for kh in (0.1, 0.01):
        sp = SolitonParams(kh, tau)
        assert 2 * kh == pytest.approx(sp.a * tau**2, rel=2 * (kh / tau) ** 2)
