"""Closed-form filament solutions: rotating helix, wave packet, one-soliton."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from .errors import DomainError, WindowTooNarrow
from .geometry import DiscreteCurve
from .nls import ComplexField

SOLITON_MIN_ETA = 10.0


@dataclass(frozen=True)
class HelixParams:
    """Helix ``y + i z = a exp(i (tau x - nu tau^2 t))``; tau > 0 is right-handed."""

    a: float
    tau: float
    nu: float = 1.0

    def __post_init__(self):
        if not self.a > 0.0:
            raise DomainError("helix amplitude must be positive")
        if self.tau == 0.0:
            raise DomainError("helix torsion must be nonzero")
        if self.a * abs(self.tau) > 0.1:
            raise DomainError(f"a*|tau| = {self.a * abs(self.tau):.3g} exceeds 0.1; not a small disturbance")
        if self.strongly_nonlinear:
            warnings.warn(f"a*|tau| = {self.a * abs(self.tau):.3g} > 0.01", stacklevel=2)

    @property
    def strongly_nonlinear(self) -> bool:
        return self.a * abs(self.tau) > 0.01

    @property
    def pitch(self) -> float:
        return 1.0 / abs(self.tau)

    @property
    def omega(self) -> float:
        return self.nu * self.tau**2

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega

    @property
    def curvature(self) -> float:
        """Small-amplitude curvature ``a tau^2``."""
        return self.a * self.tau**2

    def exact_curvature(self) -> float:
        return self.a * self.tau**2 / (1.0 + (self.a * self.tau) ** 2)

    def exact_torsion(self) -> float:
        return self.tau / (1.0 + (self.a * self.tau) ** 2)

    def exact_omega(self) -> float:
        """Rotation rate of the helix under the full induction law."""
        return self.nu * self.tau**2 / (1.0 + (self.a * self.tau) ** 2) ** 1.5


def helix_curve(p: HelixParams, t: float, x_grid, periodic: bool = False) -> DiscreteCurve:
    """Sample the rotating helix at time ``t``.

    With ``periodic=True`` the grid must be uniform and cover a whole number
    of turns; the result is a closed curve shifted by one grid period along x.
    """
    x = np.asarray(x_grid, dtype=float)
    if np.any(np.diff(x) <= 0.0):
        raise ValueError("x_grid must be strictly increasing")
    phase = p.tau * x - p.nu * p.tau**2 * t
    nodes = np.column_stack([x, p.a * np.cos(phase), p.a * np.sin(phase)])
    if not periodic:
        return DiscreteCurve(nodes)
    dx = np.diff(x)
    if np.ptp(dx) > 1e-9 * dx.mean():
        raise ValueError("periodic helix needs a uniform grid")
    period = x[-1] - x[0] + dx.mean()
    turns = p.tau * period / (2.0 * np.pi)
    if abs(turns - round(turns)) > 1e-9:
        raise ValueError("grid period must hold a whole number of helix turns")
    return DiscreteCurve(nodes, closed=True, shift=[period, 0.0, 0.0])


def wave_packet_values(a, tau0, dtau, nu, t, x) -> np.ndarray:
    """Sinc-envelope packet; the envelope rides at the group velocity ``2 nu tau0``."""
    if not 0.0 < dtau < tau0:
        raise DomainError("wave packet needs 0 < dtau < tau0")
    x = np.asarray(x, dtype=float)
    arg = (x - 2.0 * nu * tau0 * t) * dtau
    # np.sinc(z) = sin(pi z) / (pi z), with the removable point handled
    envelope = np.sinc(arg / np.pi)
    return a * envelope * np.exp(1j * (tau0 * x - nu * tau0**2 * t))


def wave_packet(a, tau0, dtau, nu, t, x_grid) -> ComplexField:
    x = np.asarray(x_grid, dtype=float)
    return ComplexField.from_samples(x, wave_packet_values(a, tau0, dtau, nu, t, x))


def wave_packet_quadrature(a, tau0, dtau, nu, t, x, epsabs: float = 1e-14) -> np.ndarray:
    """Superpose helix modes with a flat spectrum over ``[tau0 - dtau, tau0 + dtau]``.

    The flat spectral density is ``a / (2 dtau)`` so that the amplitude at the
    packet centre is ``a`` at ``t = 0``.
    """
    x = np.asarray(x, dtype=float)
    c = a / (2.0 * dtau)

    def integrand(q):
        ph = q * x - nu * q * q * t
        return np.concatenate([np.cos(ph), np.sin(ph)])

    val, _ = quad_vec(integrand, tau0 - dtau, tau0 + dtau, epsabs=epsabs, epsrel=1e-13, limit=2000)
    n = x.size
    return c * (val[:n] + 1j * val[n:])


@dataclass(frozen=True)
class SolitonParams:
    """One-soliton filament with curvature ``2 kappa_hat sech(eta)`` and torsion ``tau``."""

    kappa_hat: float
    tau: float
    nu: float = 1.0

    def __post_init__(self):
        if not self.kappa_hat > 0.0:
            raise DomainError("kappa_hat must be positive")

    @property
    def a(self) -> float:
        """Half of the redundant length, ``2 kappa_hat / (kappa_hat^2 + tau^2)``."""
        return 2.0 * self.kappa_hat / (self.kappa_hat**2 + self.tau**2)

    @property
    def speed(self) -> float:
        return 2.0 * self.nu * self.tau

    @property
    def phase_rate(self) -> float:
        return self.nu * (self.kappa_hat**2 - self.tau**2)

    def circle_residual(self) -> float:
        """``(kappa_hat - 1/a)^2 + tau^2 - 1/a^2``, zero for every soliton."""
        inv = 1.0 / self.a
        return (self.kappa_hat - inv) ** 2 + self.tau**2 - inv**2

    def eta(self, l, t):
        return self.kappa_hat * (np.asarray(l, dtype=float) - self.speed * t)

    def theta(self, l, t):
        return self.tau * np.asarray(l, dtype=float) + self.phase_rate * t

    @classmethod
    def from_size(cls, a: float, kappa_hat: float, nu: float = 1.0, sign: int = 1) -> "SolitonParams":
        """Torsion from the size relation at fixed ``a``; needs ``0 < kappa_hat <= 2/a``."""
        disc = 1.0 / a**2 - (kappa_hat - 1.0 / a) ** 2
        if disc < 0.0:
            raise DomainError("kappa_hat must lie in (0, 2/a]")
        return cls(kappa_hat, sign * np.sqrt(disc), nu)


def soliton_positions(p: SolitonParams, t: float, l) -> np.ndarray:
    l = np.asarray(l, dtype=float)
    eta = p.eta(l, t)
    w = p.a / np.cosh(eta) * np.exp(1j * p.theta(l, t))
    return np.column_stack([l - p.a * np.tanh(eta), w.real, w.imag])


def soliton_curve(
    p: SolitonParams,
    t: float,
    l_grid,
    periodic: bool = False,
    min_eta: float = SOLITON_MIN_ETA,
) -> DiscreteCurve:
    """Sample the soliton filament at time ``t`` on the arc-length grid ``l_grid``.

    The grid must reach ``|eta| >= min_eta`` on both sides of the hump. With
    ``periodic=True`` (uniform grid) the curve is closed with an axial shift
    equal to the x-extent of one grid period.
    """
    l = np.asarray(l_grid, dtype=float)
    if min_eta < SOLITON_MIN_ETA:
        raise WindowTooNarrow(f"min_eta must be at least {SOLITON_MIN_ETA}")
    eta = p.eta(l, t)
    reach = min(-eta[0], eta[-1])
    if reach < min_eta:
        raise WindowTooNarrow(f"grid reaches |eta| = {reach:.3g} < {min_eta}")
    nodes = soliton_positions(p, t, l)
    if not periodic:
        return DiscreteCurve(nodes)
    dl = np.diff(l)
    if np.ptp(dl) > 1e-9 * dl.mean():
        raise ValueError("periodic soliton needs a uniform grid")
    end = soliton_positions(p, t, [l[-1] + dl.mean()])[0]
    return DiscreteCurve(nodes, closed=True, shift=[end[0] - nodes[0, 0], 0.0, 0.0])


def soliton_field_values(p: SolitonParams, t: float, l) -> np.ndarray:
    return 2.0 * p.kappa_hat / np.cosh(p.eta(l, t)) * np.exp(1j * p.theta(l, t))


def soliton_field(p: SolitonParams, t: float, n: int, length: float, x0: float | None = None) -> ComplexField:
    """Exact NLS soliton ``2 kappa_hat sech(eta) exp(i theta)`` on a periodic grid."""
    return ComplexField.on_grid(lambda l: soliton_field_values(p, t, l), n, length, x0)


def soliton_max_speed(a: float, nu: float = 1.0) -> float:
    """Largest translation speed ``2 nu / a`` among solitons with redundant length ``2a``."""
    if not a > 0.0:
        raise DomainError("a must be positive")
    return 2.0 * nu / a
