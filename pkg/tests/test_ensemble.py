import numpy as np
import pytest

from filamentlab.analytic import SolitonParams, soliton_field
from filamentlab.ensemble import (
    EnsembleParams,
    aggregate_phase,
    center_of_mass_coefficient,
    collapse_demo,
    fit_dispersion,
    fit_sech,
    gaussian_packet,
    hartree_normalizations,
    packet_variance,
    sech_profile,
    summed_phase,
)
from filamentlab.errors import DomainError, NormalizationUnsatisfiable
from filamentlab.params import PhysicalParams


def test_ensemble_params_validation():
    with pytest.raises(DomainError):
        EnsembleParams(0)
    with pytest.raises(DomainError):
        EnsembleParams(2.5)
    with pytest.raises(DomainError):
        EnsembleParams(3, kappa_hat=0.0)
    assert EnsembleParams(4, tau=0.5).k == 2.0


def test_aggregate_phase_values():
    one = EnsembleParams(1, tau=0.7)
    assert aggregate_phase(one, 2.0, 3.0) == pytest.approx(0.7 * 2 - 0.49 * 3)
    assert aggregate_phase(EnsembleParams(4, tau=0.5), 1.0, 1.0) == pytest.approx(1.0)


def test_aggregate_phase_equals_direct_sum():
    rng = np.random.default_rng(11)
    for m in (1, 3, 10, 57):
        e = EnsembleParams(m, tau=rng.uniform(-2, 2), params=PhysicalParams(nu=rng.uniform(0.1, 3)))
        xs = rng.uniform(-10, 10, m)
        t = rng.uniform(0, 5)
        assert abs(summed_phase(e, xs, t) - aggregate_phase(e, xs.mean(), t)) < 1e-12 * max(1, m)
    with pytest.raises(ValueError):
        summed_phase(EnsembleParams(3), [1.0, 2.0], 0.0)


def test_aggregate_phase_coefficients():
    e = EnsembleParams(6, tau=0.3, params=PhysicalParams(nu=1.7))
    # exactly linear: coefficients recovered from differences
    kx = aggregate_phase(e, 1.0, 0.0) - aggregate_phase(e, 0.0, 0.0)
    wt = aggregate_phase(e, 0.0, 0.0) - aggregate_phase(e, 0.0, 1.0)
    assert kx == pytest.approx(e.k, rel=1e-15)
    assert wt == pytest.approx(1.7 / 6 * e.k**2, rel=1e-14)


def test_center_of_mass_coefficient():
    assert center_of_mass_coefficient(1, 1.3) == 1.3
    assert center_of_mass_coefficient(10, 1.0) == pytest.approx(0.1)
    with pytest.raises(DomainError):
        center_of_mass_coefficient(0, 1.0)


def test_packet_variance_of_gaussian():
    f = gaussian_packet(1.5, 2048, 60.0)
    assert packet_variance(f) == pytest.approx(2.25, rel=1e-12)


@pytest.mark.parametrize("m", [1, 4, 10])
def test_dispersion_fit_recovers_coefficient(m):
    fit = fit_dispersion(center_of_mass_coefficient(m, 1.0))
    assert fit.relative_error < 1e-3


@pytest.mark.parametrize("m", [1, 10])
def test_width_grows_linearly_at_late_times(m):
    # once D t >> sigma0 the width exponent d ln sigma / d ln t tends to 1 for any m
    D = center_of_mass_coefficient(m, 1.0)
    fit = fit_dispersion(D, t_end=50.0 / D, n_samples=11, n=32768)
    t, sig = fit.times[-2:], np.sqrt(fit.variances[-2:])
    exponent = np.diff(np.log(sig))[0] / np.diff(np.log(t))[0]
    assert exponent == pytest.approx(1.0, abs=1e-3)


def test_quadratic_term_scales_with_inverse_m_squared():
    q1 = fit_dispersion(1.0).quadratic
    q10 = fit_dispersion(0.1).quadratic
    assert q10 / q1 == pytest.approx(0.01, rel=1e-3)


def test_hartree_m100():
    r = hartree_normalizations(EnsembleParams(100))
    assert r.parent_half_norm == pytest.approx(3.96, abs=1e-10)
    assert r.splinter_residual < 1e-10
    assert r.scaling_residual < 1e-14 * max(1.0, r.splinter_norm * 99)
    assert r.parent_self_energy == pytest.approx(r.parent_self_energy_expected, rel=1e-10)


@pytest.mark.parametrize("m", [3, 10, 100])
def test_hartree_parent_limit(m):
    r = hartree_normalizations(EnsembleParams(m, kappa_hat=0.8))
    assert r.parent_residual < 1e-10
    assert r.parent_limit == pytest.approx(4 * 0.8 * (m - 1) / m)


def test_hartree_omega0_coefficient():
    assert EnsembleParams(3, kappa_hat=2.0).omega0_coefficient == pytest.approx(6 / 64)
    r = hartree_normalizations(EnsembleParams(3, kappa_hat=2.0), profile=lambda x: np.exp(-(x**2)))
    assert r.omega0 == pytest.approx(r.omega0_coefficient * r.quartic_integral)
    assert r.splinter_residual < 1e-10


def test_hartree_scaling_any_profile():
    r = hartree_normalizations(EnsembleParams(7), profile=lambda x: 1 / (1 + x**2))
    assert r.scaling_residual < 1e-14 * 7
    with pytest.raises(NormalizationUnsatisfiable):
        hartree_normalizations(EnsembleParams(7), profile=lambda x: 0 * x)


def test_sech_fit_of_exact_soliton():
    f = soliton_field(SolitonParams(1.3, 0.0), 0.0, 1024, 60.0, x0=-25.0)
    k, c, d = fit_sech(f)
    assert k == pytest.approx(1.3, rel=1e-10)
    assert c == pytest.approx(0.0, abs=1e-8)
    assert d < 1e-10
    prof = sech_profile(1.0, 4)
    assert prof(0.0) == pytest.approx(1.0)


def test_collapse_fixed_point():
    e = EnsembleParams(50)
    f0 = soliton_field(SolitonParams(1.0, 0.0), 0.0, 512, 40.0)
    tr = collapse_demo(e, f0, dt=1e-3, t_end=2.0, sample_every=500)
    assert np.max(tr.sech_distance) < 1e-6
    assert tr.norm_drift < 1e-12


def test_collapse_noisy_soliton_stays_close():
    rng = np.random.default_rng(4)
    base = soliton_field(SolitonParams(1.0, 0.0), 0.0, 512, 40.0)
    f0 = base.replace(base.values * (1 + 0.01 * rng.standard_normal(base.n)))
    tr = collapse_demo(EnsembleParams(50), f0, dt=1e-3, t_end=10.0, sample_every=1000)
    assert np.max(tr.sech_distance) < 0.05
    assert tr.norm_drift < 1e-10
