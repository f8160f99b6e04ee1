"""Particle model of the loop: size optimum, splitting, elementary segment, action scale."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DomainError
from .params import PhysicalParams


def _positive(name: str, value: float) -> None:
    if not value > 0.0:
        raise DomainError(f"{name} must be positive, got {value!r}")


def segment_energy(a: float, params: PhysicalParams) -> float:
    """Line energy ``2 a xi`` of the redundant segment."""
    return 2.0 * a * params.xi


def distortion_energy(a: float, params: PhysicalParams) -> float:
    """Plane-loop self-energy ``8 zeta nu^2 / a``."""
    _positive("a", a)
    return 8.0 * params.zeta * params.nu**2 / a


def loop_total_energy(a: float, params: PhysicalParams) -> float:
    _positive("a", a)
    return segment_energy(a, params) + distortion_energy(a, params)


def optimal_loop_size(params: PhysicalParams) -> float:
    """Closed-form minimiser ``2 nu sqrt(zeta / xi)``."""
    return 2.0 * params.nu * np.sqrt(params.zeta / params.xi)


def ring_total_energy(R: float, params: PhysicalParams) -> float:
    """``2 pi xi R + pi zeta nu^2 / R``."""
    _positive("R", R)
    return 2.0 * np.pi * params.xi * R + np.pi * params.zeta * params.nu**2 / R


def optimal_ring_radius(params: PhysicalParams) -> float:
    """Stationary point ``nu sqrt(zeta / (2 xi))`` of the ring energy."""
    return params.nu * np.sqrt(params.zeta / (2.0 * params.xi))


def _argmin(func, deriv, scale: float) -> float:
    # golden section locates the basin; its resolution is ~sqrt(eps) relative,
    # so the root of the analytic derivative is polished with Brent's method
    res = minimize_scalar(func, bracket=(0.1 * scale, scale, 10.0 * scale), method="golden", tol=1e-10)
    x = float(res.x)
    lo, hi = 0.5 * x, 2.0 * x
    if deriv(lo) < 0.0 < deriv(hi):
        x = brentq(deriv, lo, hi, xtol=1e-15 * x, rtol=4 * np.finfo(float).eps)
    return x


def loop_argmin(params: PhysicalParams) -> float:
    """Numerical minimiser of the loop energy."""
    scale = params.nu * np.sqrt(params.zeta / params.xi)
    return _argmin(
        lambda a: loop_total_energy(a, params) if a > 0 else np.inf,
        lambda a: 2.0 * params.xi - 8.0 * params.zeta * params.nu**2 / a**2,
        scale,
    )


def ring_argmin(params: PhysicalParams) -> float:
    """Numerical minimiser of the ring energy."""
    scale = params.nu * np.sqrt(params.zeta / params.xi)
    return _argmin(
        lambda R: ring_total_energy(R, params) if R > 0 else np.inf,
        lambda R: 2.0 * np.pi * params.xi - np.pi * params.zeta * params.nu**2 / R**2,
        scale,
    )


def split_penalty(alpha: float) -> float:
    """``1/alpha + 1/(1 - alpha)``: distortion energy after a split, in units of the parent's."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie strictly between 0 and 1")
    return 1.0 / alpha + 1.0 / (1.0 - alpha)


def energy_scan(a_values, params: PhysicalParams) -> np.ndarray:
    """Rows ``(a, total, segment_term, distortion_term)``."""
    a = np.asarray(a_values, dtype=float)
    if np.any(a <= 0.0):
        raise DomainError("scan values must be positive")
    seg = 2.0 * a * params.xi
    dist = 8.0 * params.zeta * params.nu**2 / a
    return np.column_stack([a, seg + dist, seg, dist])


@dataclass(frozen=True)
class LoopModel:
    a: float
    params: PhysicalParams = PhysicalParams()

    def __post_init__(self):
        _positive("a", self.a)

    @property
    def segment_energy(self) -> float:
        return segment_energy(self.a, self.params)

    @property
    def distortion_energy(self) -> float:
        return distortion_energy(self.a, self.params)

    @property
    def total_energy(self) -> float:
        return self.segment_energy + self.distortion_energy

    @property
    def segment_mass(self) -> float:
        """Fluid mass ``2 zeta a`` carried by the whole redundant segment."""
        return 2.0 * self.params.zeta * self.a

    @property
    def disturbance_mass(self) -> float:
        """Mass ``zeta a`` assigned to the moving disturbance."""
        return self.params.zeta * self.a

    def split(self, alpha: float) -> dict:
        """Energies after splitting into loops of size ``alpha a`` and ``(1 - alpha) a``."""
        penalty = split_penalty(alpha)
        parts = (LoopModel(alpha * self.a, self.params), LoopModel((1.0 - alpha) * self.a, self.params))
        return {
            "segment_energy": sum(p.segment_energy for p in parts),
            "distortion_energy": sum(p.distortion_energy for p in parts),
            "penalty": penalty,
            "expected_distortion": penalty * self.distortion_energy,
        }


def elementary_segment(params: PhysicalParams) -> float:
    """Smallest loop ``a0 = 2 nu / c``, the one whose peak speed reaches ``c``."""
    return 2.0 * params.nu / params.c


def velocity_bound(a: float, beta: float, nu: float) -> float:
    """Upper speed ``(2 nu / a) beta`` of a soliton kept asymptotic to within ``beta``."""
    _positive("a", a)
    return 2.0 * nu / a * beta


def hbar_calibration(params: PhysicalParams) -> float:
    """Action scale ``2 nu zeta a0``."""
    return 2.0 * params.nu * params.zeta * elementary_segment(params)


def segment_momentum(k: float, params: PhysicalParams) -> float:
    """``p = 2 nu zeta a0 k``."""
    return hbar_calibration(params) * k


def segment_energy_from_momentum(p: float, m: int, params: PhysicalParams) -> float:
    """``E = p^2 / (2 m zeta a0)``."""
    if m < 1:
        raise DomainError("m must be at least 1")
    return p * p / (2.0 * m * params.zeta * elementary_segment(params))
