"""Hasimoto map and a split-step Fourier solver for the filament NLS.

The wave function ``Phi = kappa * exp(i * int tau dl)`` of a filament moving
under local induction obeys

    Phi_t = i nu (Phi_ll + |Phi|^2 Phi / 2 - g U Phi / nu^2)

on a periodic grid, where ``g`` is the potential coupling (see
``nls_step``).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numba
import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import NonUniformGrid, UndefinedFrame
from .geometry import DiscreteCurve, FrenetData
from .params import PhysicalParams

log = logging.getLogger(__name__)

RHO_FLOOR = 1e-20

# Coupling that makes the hydrodynamic force rho * dU/dl and keeps
# int rho [ (v^2 + w^2 - nu^2 rho)/2 + U ] dl invariant.
HYDRO_POTENTIAL_COUPLING = 0.5


@dataclass(frozen=True)
class ComplexField:
    """Complex values on a uniform periodic grid ``x0 + j * dx``."""

    values: np.ndarray
    x0: float = 0.0
    dx: float = 1.0
    periodic: bool = True

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.ndim != 1:
            raise ValueError("field values must be one-dimensional")
        n = vals.size
        if n < 2 or n & (n - 1):
            raise ValueError(f"node count must be a power of two, got {n}")
        if not self.dx > 0.0:
            raise ValueError("dx must be positive")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "dx", float(self.dx))

    @classmethod
    def from_samples(cls, x, values, rtol: float = 1e-9) -> "ComplexField":
        x = np.asarray(x, dtype=float)
        dx = np.diff(x)
        if dx.size == 0 or np.any(np.abs(dx - dx.mean()) > rtol * abs(dx.mean())):
            raise NonUniformGrid("sample positions are not uniformly spaced")
        return cls(values, x0=x[0], dx=float(dx.mean()))

    @classmethod
    def on_grid(cls, func, n: int, length: float, x0: float | None = None) -> "ComplexField":
        """Sample ``func(x)`` on ``n`` nodes covering a period of ``length``."""
        dx = length / n
        start = -0.5 * length if x0 is None else x0
        x = start + dx * np.arange(n)
        return cls(func(x), x0=start, dx=dx)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def length(self) -> float:
        return self.n * self.dx

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n, self.dx)

    @property
    def rho(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def replace(self, values) -> "ComplexField":
        return ComplexField(values, self.x0, self.dx, self.periodic)

    def integral(self, density) -> float:
        """Periodic rectangle rule, spectrally accurate for smooth data."""
        return float(np.sum(density) * self.dx)

    def derivative(self) -> np.ndarray:
        return spectral_derivative(self.values, self.dx)

    def norm2(self) -> float:
        return self.integral(self.rho)


def spectral_derivative(values, dx: float) -> np.ndarray:
    values = np.asarray(values)
    n = values.size
    k = 2.0 * np.pi * np.fft.fftfreq(n, dx)
    if n % 2 == 0:
        k[n // 2] = 0.0
    return np.fft.ifft(1j * k * np.fft.fft(values))


def spectral_shift(values, dx: float, delta: float) -> np.ndarray:
    """Periodic band-limited interpolation at ``x + delta``."""
    values = np.asarray(values)
    n = values.size
    k = 2.0 * np.pi * np.fft.fftfreq(n, dx)
    spec = np.fft.fft(values)
    if n % 2 == 0:
        spec[n // 2] = 0.0
    return np.fft.ifft(spec * np.exp(1j * k * delta))


def phase_gradient(values, dx: float, rho_floor: float = RHO_FLOOR):
    """``Im(conj(Phi) Phi_l) / |Phi|^2``; NaN where ``|Phi|^2 < rho_floor``."""
    values = np.asarray(values)
    rho = np.abs(values) ** 2
    flux = np.imag(np.conj(values) * spectral_derivative(values, dx))
    out = np.full(values.shape, np.nan)
    ok = rho >= rho_floor
    out[ok] = flux[ok] / rho[ok]
    return out


@dataclass(frozen=True)
class HydroFields:
    """Density, flow velocity and diffusion velocity. NaN where undefined."""

    rho: np.ndarray
    v: np.ndarray
    w: np.ndarray
    undefined: np.ndarray


def hydro_fields(field: ComplexField, params: PhysicalParams, rho_floor: float = RHO_FLOOR) -> HydroFields:
    """``rho = |Phi|^2``, ``v = 2 nu tau`` and ``w = -nu rho_l / rho``."""
    phi = field.values
    dphi = field.derivative()
    rho = np.abs(phi) ** 2
    ok = rho >= rho_floor
    v = np.full(rho.shape, np.nan)
    w = np.full(rho.shape, np.nan)
    # products keep the ratios stable deep in decaying tails
    flux = np.imag(np.conj(phi) * dphi)
    drho = 2.0 * np.real(np.conj(phi) * dphi)
    v[ok] = 2.0 * params.nu * flux[ok] / rho[ok]
    w[ok] = -params.nu * drho[ok] / rho[ok]
    return HydroFields(rho=rho, v=v, w=w, undefined=~ok)


def hasimoto_map(frenet: FrenetData, omega: float = 0.0, t: float = 0.0, rtol: float = 1e-6) -> ComplexField:
    """``Phi = kappa * exp(i (int_0^l tau dl - omega t))`` on the curve's node grid.

    The arc-length grid must be uniform. Nodes with zero curvature carry
    ``Phi = 0``; a zero-curvature gap between curved stretches makes the
    phase ambiguous and raises ``UndefinedFrame``.
    """
    s = np.asarray(frenet.arclength)
    ds = np.diff(s)
    if np.any(np.abs(ds - ds.mean()) > rtol * ds.mean()):
        raise NonUniformGrid("hasimoto_map needs a uniform arc-length grid; resample first")
    kappa = np.asarray(frenet.curvature)
    defined = ~np.asarray(frenet.undefined)
    idx = np.flatnonzero(defined)
    if idx.size:
        interior = np.zeros_like(defined)
        interior[idx[0] : idx[-1] + 1] = True
        if np.any(interior & ~defined):
            raise UndefinedFrame("curvature vanishes inside the support; phase is ambiguous")
    tau = np.where(defined, frenet.torsion, 0.0)
    phase = cumulative_trapezoid(tau, s, initial=0.0) - omega * t
    amp = np.where(defined, kappa, 0.0)
    return ComplexField(amp * np.exp(1j * phase), x0=float(s[0]), dx=float(ds.mean()))


@numba.njit(cache=True)
def _orthonormalize(y):
    # Gram-Schmidt on (e, n); b = e x n keeps the triad right-handed
    ne = np.sqrt(y[3] ** 2 + y[4] ** 2 + y[5] ** 2)
    for c in range(3):
        y[3 + c] /= ne
    d = y[3] * y[6] + y[4] * y[7] + y[5] * y[8]
    for c in range(3):
        y[6 + c] -= d * y[3 + c]
    nn = np.sqrt(y[6] ** 2 + y[7] ** 2 + y[8] ** 2)
    for c in range(3):
        y[6 + c] /= nn
    y[9] = y[4] * y[8] - y[5] * y[7]
    y[10] = y[5] * y[6] - y[3] * y[8]
    y[11] = y[3] * y[7] - y[4] * y[6]


@numba.njit(cache=True)
def _frenet_march(kap, tau, kap_mid, tau_mid, h, y0):
    # y = (r, e, n, b); r' = e, e' = k n, n' = -k e + t b, b' = -t n
    n_nodes = kap.size
    out = np.empty((n_nodes, 3))
    y = y0.copy()
    out[0] = y[0:3]
    k1 = np.empty(12)
    k2 = np.empty(12)
    k3 = np.empty(12)
    k4 = np.empty(12)
    tmp = np.empty(12)

    def rhs(y, k, t, dst):
        for c in range(3):
            dst[c] = y[3 + c]
            dst[3 + c] = k * y[6 + c]
            dst[6 + c] = -k * y[3 + c] + t * y[9 + c]
            dst[9 + c] = -t * y[6 + c]

    for j in range(n_nodes - 1):
        rhs(y, kap[j], tau[j], k1)
        for c in range(12):
            tmp[c] = y[c] + 0.5 * h * k1[c]
        rhs(tmp, kap_mid[j], tau_mid[j], k2)
        for c in range(12):
            tmp[c] = y[c] + 0.5 * h * k2[c]
        rhs(tmp, kap_mid[j], tau_mid[j], k3)
        for c in range(12):
            tmp[c] = y[c] + h * k3[c]
        rhs(tmp, kap[j + 1], tau[j + 1], k4)
        for c in range(12):
            y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c])
        _orthonormalize(y)
        out[j + 1] = y[0:3]
    return out


def _fill_undefined(tau: np.ndarray) -> np.ndarray:
    good = np.flatnonzero(np.isfinite(tau))
    if good.size == tau.size:
        return tau
    if good.size == 0:
        return np.zeros_like(tau)
    idx = np.arange(tau.size)
    pos = np.searchsorted(good, idx)
    right = good[np.minimum(pos, good.size - 1)]
    left = good[np.maximum(pos - 1, 0)]
    pick = np.where(np.abs(idx - left) <= np.abs(right - idx), left, right)
    return tau[pick]


def reconstruct_curve(
    field: ComplexField,
    r0=(0.0, 0.0, 0.0),
    frame0=None,
    rho_floor: float = RHO_FLOOR,
) -> DiscreteCurve:
    """Integrate the Frenet-Serret system with ``kappa = |Phi|`` and
    ``tau = d(arg Phi)/dl`` from the initial point ``r0`` and the orthonormal
    triad ``frame0 = (e, n, b)`` (default: the coordinate axes).

    Classical RK4 in arc length with band-limited midpoint values. Where the
    amplitude vanishes the torsion is taken from the nearest node where it
    is defined.
    """
    frame0 = np.eye(3) if frame0 is None else np.asarray(frame0, dtype=float)
    if frame0.shape != (3, 3) or not np.allclose(frame0 @ frame0.T, np.eye(3), atol=1e-10):
        raise ValueError("frame0 must be an orthonormal triad (rows e, n, b)")
    phi = field.values
    phi_mid = spectral_shift(phi, field.dx, 0.5 * field.dx)
    kap = np.abs(phi)
    kap_mid = np.abs(phi_mid)
    tau = phase_gradient(phi, field.dx, rho_floor)
    tau_mid = phase_gradient(phi_mid, field.dx, rho_floor)
    missing = int((~np.isfinite(tau)).sum() + (~np.isfinite(tau_mid)).sum())
    if missing:
        log.warning("phase undefined at %d samples; using nearest defined torsion", missing)
        both = _fill_undefined(np.ravel(np.column_stack([tau, tau_mid])))
        tau, tau_mid = both[0::2].copy(), both[1::2].copy()
    y0 = np.concatenate([np.asarray(r0, dtype=float), frame0.ravel()])
    nodes = _frenet_march(kap, tau, kap_mid, tau_mid, field.dx, y0)
    return DiscreteCurve(nodes, closed=False, axis=frame0[0])


def _nonlinear_rate(phi, params: PhysicalParams, potential, coupling, nonlinear: bool):
    rate = np.zeros(phi.shape)
    if nonlinear:
        rate = rate + 0.5 * np.abs(phi) ** 2
    if potential is not None:
        rate = rate - coupling * np.asarray(potential, dtype=float) / params.nu**2
    return params.nu * rate


def nls_step(
    field: ComplexField,
    dt: float,
    params: PhysicalParams,
    potential=None,
    nonlinear: bool = True,
    potential_coupling: float = HYDRO_POTENTIAL_COUPLING,
) -> ComplexField:
    """One Strang step: half phase rotation, exact linear step, half rotation.

    The pointwise part ``nu (|Phi|^2/2 - g U/nu^2)`` leaves ``|Phi|``
    unchanged and is applied exactly. ``potential_coupling`` ``g`` defaults
    to 1/2, the value consistent with a force ``rho dU/dl`` in the momentum
    balance; ``g = 1`` gives the coefficient ``1/nu^2`` in front of ``U``.
    """
    return nls_evolve(field, dt, 1, params, potential, nonlinear, potential_coupling)[-1][1]


def nls_evolve(
    field: ComplexField,
    dt: float,
    n_steps: int,
    params: PhysicalParams,
    potential=None,
    nonlinear: bool = True,
    potential_coupling: float = HYDRO_POTENTIAL_COUPLING,
    sample_every: int | None = None,
    t0: float = 0.0,
):
    """Run ``n_steps`` Strang steps; return ``[(t, field), ...]`` samples.

    Samples are taken at the start and every ``sample_every`` steps (and
    always at the end). Adjacent half rotations are fused.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    every = n_steps if not sample_every else int(sample_every)
    lin = np.exp(-1j * params.nu * field.k**2 * dt)
    phi = np.array(field.values)
    samples = [(t0, field)]
    phi = phi * np.exp(0.5j * dt * _nonlinear_rate(phi, params, potential, potential_coupling, nonlinear))
    for step in range(1, n_steps + 1):
        phi = np.fft.ifft(lin * np.fft.fft(phi))
        rate = _nonlinear_rate(phi, params, potential, potential_coupling, nonlinear)
        if step % every == 0 or step == n_steps:
            out = phi * np.exp(0.5j * dt * rate)
            samples.append((t0 + step * dt, field.replace(out)))
            if step == n_steps:
                break
            phi = out * np.exp(0.5j * dt * rate)
        else:
            phi = phi * np.exp(1j * dt * rate)
    return samples


def linear_propagate(field: ComplexField, t: float, diffusivity: float) -> ComplexField:
    """Exact solution of ``phi_t = i D phi_xx``: each mode times ``exp(-i D k^2 t)``."""
    spec = np.fft.fft(field.values) * np.exp(-1j * diffusivity * field.k**2 * t)
    return field.replace(np.fft.ifft(spec))


def curve_field(curve: DiscreteCurve, omega: float = 0.0, t: float = 0.0) -> ComplexField:
    """Convenience: Frenet analysis followed by the Hasimoto map."""
    from .geometry import compute_frenet

    return hasimoto_map(compute_frenet(curve), omega, t)
