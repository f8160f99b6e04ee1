"""Measurements on simulated curves and fields: peak positions, speeds, rotation rates."""

from __future__ import annotations

import numpy as np

from .geometry import DiscreteCurve, compute_frenet
from .nls import ComplexField


def fit_rate(times, values) -> float:
    """Least-squares slope of ``values`` against ``times``."""
    slope, _ = np.polyfit(np.asarray(times, dtype=float), np.asarray(values, dtype=float), 1)
    return float(slope)


def curve_peak_position(curve: DiscreteCurve, half_width: float) -> float:
    """Centroid of ``kappa^2`` in arc length (from node 0) within ``half_width`` of the maximum."""
    fr = compute_frenet(curve)
    w = np.nan_to_num(fr.curvature, nan=0.0) ** 2
    s = fr.arclength
    j = int(np.argmax(w))
    sel = np.abs(s - s[j]) <= half_width
    return float(np.sum(s[sel] * w[sel]) / np.sum(w[sel]))


def field_peak_position(field: ComplexField, half_width: float) -> float:
    """Centroid of ``|Phi|^2`` within ``half_width`` of its maximum, periodic-aware."""
    rho = field.rho
    x = field.x
    j = int(np.argmax(rho))
    d = (x - x[j] + 0.5 * field.length) % field.length - 0.5 * field.length
    sel = np.abs(d) <= half_width
    return float(x[j] + np.sum(d[sel] * rho[sel]) / np.sum(rho[sel]))


def helix_phase(curve: DiscreteCurve, x_labels, tau: float) -> float:
    """Mean rotation angle of the nodes relative to ``a exp(i tau x)``."""
    phi = curve.nodes[:, 1] + 1j * curve.nodes[:, 2]
    return float(np.angle(np.sum(phi * np.exp(-1j * tau * np.asarray(x_labels)))))


def helix_rotation_rate(times, curves, x_labels, tau: float) -> float:
    """Angular velocity from an unwrapped linear fit of the helix phase."""
    ph = np.unwrap([helix_phase(c, x_labels, tau) for c in curves])
    return -fit_rate(times, ph)
