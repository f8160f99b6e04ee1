"""Many-splinter bookkeeping: aggregate phase, centre-of-mass dispersion, Hartree scaling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .errors import DomainError, NormalizationUnsatisfiable
from .nls import ComplexField, linear_propagate, nls_evolve
from .params import PhysicalParams


@dataclass(frozen=True)
class EnsembleParams:
    """``m`` identical splinters with common torsion ``tau`` from a parent of curvature scale ``kappa_hat``."""

    m: int
    tau: float = 0.5
    kappa_hat: float = 1.0
    params: PhysicalParams = field(default_factory=PhysicalParams)

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise DomainError("m must be a positive integer")
        if not self.kappa_hat > 0.0:
            raise DomainError("kappa_hat must be positive")

    @property
    def k(self) -> float:
        return self.m * self.tau

    @property
    def omega0_coefficient(self) -> float:
        """``m (m-1) (m-2) / (32 kappa_hat)``, to be multiplied by ``nu int |phi|^4``."""
        m = self.m
        return m * (m - 1) * (m - 2) / (32.0 * self.kappa_hat)


def aggregate_phase(e: EnsembleParams, x, t):
    """``k x - (nu/m) k^2 t`` with ``k = m tau``."""
    k = e.k
    return k * np.asarray(x, dtype=float) - e.params.nu / e.m * k * k * np.asarray(t, dtype=float)


def summed_phase(e: EnsembleParams, xs, t) -> float:
    """Direct sum of single-helix phases ``tau x_n - nu tau^2 t`` over the splinters."""
    xs = np.asarray(xs, dtype=float)
    if xs.size != e.m:
        raise ValueError(f"expected {e.m} positions, got {xs.size}")
    return float(np.sum(e.tau * xs - e.params.nu * e.tau**2 * t))


def center_of_mass_coefficient(m: int, nu: float) -> float:
    if m < 1:
        raise DomainError("m must be at least 1")
    return nu / m


def gaussian_packet(sigma0: float, n: int, length: float, k0: float = 0.0) -> ComplexField:
    """Packet whose density ``|psi|^2`` has standard deviation ``sigma0``."""
    return ComplexField.on_grid(lambda x: np.exp(-(x**2) / (4.0 * sigma0**2) + 1j * k0 * x), n, length)


def packet_variance(f: ComplexField) -> float:
    rho = f.rho
    norm = rho.sum()
    mean = (f.x * rho).sum() / norm
    return float(((f.x - mean) ** 2 * rho).sum() / norm)


@dataclass(frozen=True)
class DispersionFit:
    coefficient: float
    sigma0: float
    quadratic: float
    fitted: float
    times: np.ndarray
    variances: np.ndarray

    @property
    def relative_error(self) -> float:
        return abs(self.fitted - self.coefficient) / self.coefficient


def fit_dispersion(
    coefficient: float,
    sigma0: float = 1.0,
    t_end: float = 4.0,
    n_samples: int = 9,
    n: int = 4096,
    length: float | None = None,
) -> DispersionFit:
    """Spread a Gaussian under ``psi_t = i D psi_xx`` and recover ``D``.

    The variance obeys ``sigma0^2 + (D t / sigma0)^2``; a least-squares fit
    of ``sigma^2`` against ``(1, t^2)`` gives ``D = sigma0 sqrt(C)``.
    """
    if length is None:
        length = max(40.0 * sigma0, 16.0 * coefficient * t_end / sigma0 + 20.0 * sigma0)
    psi0 = gaussian_packet(sigma0, n, length)
    times = np.linspace(0.0, t_end, n_samples)
    var = np.array([packet_variance(linear_propagate(psi0, t, coefficient)) for t in times])
    design = np.column_stack([np.ones_like(times), times**2])
    (c0, c2), *_ = np.linalg.lstsq(design, var, rcond=None)
    return DispersionFit(coefficient, sigma0, float(c2), float(sigma0 * np.sqrt(c2)), times, var)


def sech_profile(kappa_hat: float, m: int):
    """Trial splinter ``(2 kappa_hat / sqrt(m)) sech(kappa_hat x)``."""
    return lambda x: 2.0 * kappa_hat / np.sqrt(m) / np.cosh(kappa_hat * x)


@dataclass(frozen=True)
class HartreeReport:
    m: int
    kappa_hat: float
    splinter_norm: float
    splinter_target: float
    splinter_residual: float
    scaling_residual: float
    parent_half_norm: float
    parent_limit: float
    parent_residual: float
    omega0_coefficient: float
    quartic_integral: float
    omega0: float
    parent_self_energy: float
    parent_self_energy_expected: float

    def to_dict(self) -> dict:
        return {k: (int(v) if k == "m" else float(v)) for k, v in self.__dict__.items()}


def hartree_normalizations(e: EnsembleParams, profile=None, n: int = 8192, length: float | None = None) -> HartreeReport:
    """Check the splinter and parent normalizations and evaluate ``omega0``.

    The trial profile is rescaled so ``int |phi|^2 = 8 kappa_hat / m``; the
    parent field ``(m-1)^(1/2) phi`` then has ``1/2 int |.|^2 = 4 kappa_hat (m-1)/m``.
    Integrals use the rectangle rule on a wide periodic grid.
    """
    kh, m = e.kappa_hat, e.m
    if length is None:
        length = 80.0 / kh
    dx = length / n
    x = -0.5 * length + dx * np.arange(n)
    raw = np.abs(np.asarray((profile or sech_profile(kh, m))(x), dtype=complex))
    norm_raw = dx * np.sum(raw**2)
    if not norm_raw > 0.0 or not np.isfinite(norm_raw):
        raise NormalizationUnsatisfiable("trial profile has zero or non-finite norm")
    target = 8.0 * kh / m
    phi = raw * np.sqrt(target / norm_raw)
    splinter = dx * np.sum(phi**2)
    parent = np.sqrt(m - 1.0) * phi
    parent_norm = dx * np.sum(parent**2)
    half = 0.5 * parent_norm
    limit = 4.0 * kh * (m - 1) / m
    quartic = dx * np.sum(phi**4)
    omega0 = e.params.nu * e.omega0_coefficient * quartic
    big = 2.0 * kh / np.cosh(kh * x)
    eps = 0.5 * e.params.zeta * e.params.nu**2 * dx * np.sum(big**2)
    return HartreeReport(
        m=m,
        kappa_hat=kh,
        splinter_norm=float(splinter),
        splinter_target=target,
        splinter_residual=float(abs(splinter - target)),
        scaling_residual=float(abs(parent_norm - (m - 1) * splinter)),
        parent_half_norm=float(half),
        parent_limit=limit,
        parent_residual=float(abs(half - limit)),
        omega0_coefficient=e.omega0_coefficient,
        quartic_integral=float(quartic),
        omega0=float(omega0),
        parent_self_energy=float(eps),
        parent_self_energy_expected=4.0 * e.params.zeta * e.params.nu**2 * kh,
    )


def _periodic_offset(x, center, length):
    return (x - center + 0.5 * length) % length - 0.5 * length


def fit_sech(f: ComplexField) -> tuple[float, float, float]:
    """Best fit of ``|phi|`` by ``2 k sech(k (x - c))``; returns ``(k, c, relative L2 distance)``."""
    amp = np.abs(f.values)
    j = int(np.argmax(amp))
    k0 = max(0.5 * amp[j], 1e-6)
    x, L = f.x, f.length

    def resid(p):
        k, c = p
        return 2.0 * k / np.cosh(k * _periodic_offset(x, c, L)) - amp

    sol = least_squares(resid, [k0, x[j]], x_scale=[k0, 1.0 / k0], xtol=1e-14, ftol=1e-14, gtol=1e-14)
    dist = np.sqrt(np.sum(sol.fun**2) / np.sum(amp**2))
    return float(sol.x[0]), float(sol.x[1]), float(dist)


@dataclass(frozen=True)
class CollapseTrajectory:
    times: np.ndarray
    fields: list
    sech_distance: np.ndarray
    fitted_kappa: np.ndarray
    norm: np.ndarray

    @property
    def norm_drift(self) -> float:
        return float(np.max(np.abs(self.norm - self.norm[0])) / self.norm[0])


def collapse_demo(
    e: EnsembleParams,
    initial: ComplexField,
    dt: float = 1e-3,
    t_end: float = 10.0,
    sample_every: int = 500,
) -> CollapseTrajectory:
    """Evolve the reduced single-body equation and track distance to a sech profile."""
    n_steps = int(round(t_end / dt))
    samples = nls_evolve(initial, dt, n_steps, e.params, sample_every=sample_every)
    times, fields, dist, kap, norm = [], [], [], [], []
    for t, f in samples:
        k, _, d = fit_sech(f)
        times.append(t)
        fields.append(f)
        dist.append(d)
        kap.append(k)
        norm.append(f.norm2())
    return CollapseTrajectory(np.array(times), fields, np.array(dist), np.array(kap), np.array(norm))
