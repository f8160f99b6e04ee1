"""Discrete space curves and their Frenet-Serret analysis.

Curves are polylines. Derivatives in arc length use second-order
three-point stencils on the (possibly non-uniform) polyline arc-length
grid, one-sided at the ends of open curves.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .errors import DegenerateSegment, NotAsymptoticallyStraight

CURVATURE_FLOOR = 1e-12

_X_AXIS = np.array([1.0, 0.0, 0.0])

# 8-point Gauss-Legendre rule on [0, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DiscreteCurve:
    """Ordered 3D nodes sampling a filament.

    ``closed`` curves are cyclic with no duplicated endpoint. A closed
    curve may carry a translation ``shift``: node ``N`` is identified with
    ``nodes[0] + shift``, which represents one period of an infinite
    periodic filament such as a helix.
    """

    nodes: np.ndarray
    closed: bool = False
    axis: np.ndarray = field(default_factory=lambda: _X_AXIS.copy())
    shift: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 3:
            raise ValueError(f"nodes must have shape (N, 3), got {nodes.shape}")
        if nodes.shape[0] < 4:
            raise ValueError("a curve needs at least 4 nodes")
        if not np.all(np.isfinite(nodes)):
            raise ValueError("nodes must be finite")
        axis = np.asarray(self.axis, dtype=float)
        norm = np.linalg.norm(axis)
        if axis.shape != (3,) or norm == 0.0:
            raise ValueError("axis must be a nonzero 3-vector")
        shift = np.asarray(self.shift, dtype=float)
        if shift.shape != (3,):
            raise ValueError("shift must be a 3-vector")
        if not self.closed and np.any(shift != 0.0):
            raise ValueError("shift is only meaningful for closed curves")
        object.__setattr__(self, "nodes", _frozen(nodes))
        object.__setattr__(self, "axis", _frozen(axis / norm))
        object.__setattr__(self, "shift", _frozen(shift))
        if np.any(self.segment_lengths() == 0.0):
            raise DegenerateSegment("two consecutive nodes coincide")

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    def segments(self) -> np.ndarray:
        """Segment vectors; closed curves include the closing segment."""
        seg = np.diff(self.nodes, axis=0)
        if self.closed:
            closing = self.nodes[0] + self.shift - self.nodes[-1]
            seg = np.vstack([seg, closing])
        return seg

    def segment_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.segments(), axis=1)

    def length(self) -> float:
        """Polyline length."""
        return float(self.segment_lengths().sum())

    def with_nodes(self, nodes) -> "DiscreteCurve":
        return DiscreteCurve(nodes, closed=self.closed, axis=self.axis, shift=self.shift)

    def transformed(self, rotation, translation=(0.0, 0.0, 0.0)) -> "DiscreteCurve":
        """Apply a rigid motion ``x -> R x + t``."""
        rot = np.asarray(rotation, dtype=float)
        t = np.asarray(translation, dtype=float)
        return DiscreteCurve(
            self.nodes @ rot.T + t,
            closed=self.closed,
            axis=rot @ self.axis,
            shift=rot @ self.shift,
        )


@dataclass(frozen=True)
class FrenetData:
    """Per-node Frenet-Serret frame. Undefined entries are NaN."""

    arclength: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    binormal: np.ndarray
    curvature: np.ndarray
    torsion: np.ndarray
    undefined: np.ndarray

    @property
    def spacing(self) -> np.ndarray:
        return np.diff(self.arclength)


def _derivative(values, seglen, closed, offset=None):
    """Second-order derivative along the curve in arc length.

    ``values`` has one row per node; ``seglen`` are the polyline segment
    lengths (``N`` for closed curves, ``N - 1`` for open ones). ``offset``
    is added to the neighbour across the seam of a shifted closed curve.
    """
    values = np.asarray(values, dtype=float)
    shape = (-1,) + (1,) * (values.ndim - 1)
    if closed:
        fwd = np.roll(values, -1, axis=0)
        bwd = np.roll(values, 1, axis=0)
        if offset is not None:
            fwd[-1] = fwd[-1] + offset
            bwd[0] = bwd[0] - offset
        h2 = seglen.reshape(shape)
        h1 = np.roll(seglen, 1).reshape(shape)
        return (
            -h2 / (h1 * (h1 + h2)) * bwd
            + (h2 - h1) / (h1 * h2) * values
            + h1 / (h2 * (h1 + h2)) * fwd
        )

    out = np.empty_like(values)
    h1 = seglen[:-1].reshape(shape)
    h2 = seglen[1:].reshape(shape)
    f0, f1, f2 = values[:-2], values[1:-1], values[2:]
    out[1:-1] = -h2 / (h1 * (h1 + h2)) * f0 + (h2 - h1) / (h1 * h2) * f1 + h1 / (h2 * (h1 + h2)) * f2
    a, b = seglen[0], seglen[1]
    out[0] = (
        -(2 * a + b) / (a * (a + b)) * values[0]
        + (a + b) / (a * b) * values[1]
        - a / (b * (a + b)) * values[2]
    )
    a, b = seglen[-2], seglen[-1]
    out[-1] = (
        (2 * b + a) / (b * (a + b)) * values[-1]
        - (a + b) / (a * b) * values[-2]
        + b / (a * (a + b)) * values[-3]
    )
    return out


def _rowdot(u, v):
    return np.einsum("ij,ij->i", u, v)


def compute_frenet(curve: DiscreteCurve, curvature_floor: float = CURVATURE_FLOOR) -> FrenetData:
    """Tangent, normal, binormal, curvature and torsion at every node.

    The tangent is the normalized arc-length derivative of the nodes, the
    curvature vector is the derivative of the tangent (projected normal to
    it), and the torsion is ``-(db/ds) . n``. A right-handed helix has
    positive torsion. Where ``kappa < curvature_floor`` the normal,
    binormal and torsion are NaN and flagged in ``undefined``.
    """
    seglen = curve.segment_lengths()
    if np.any(seglen == 0.0):
        raise DegenerateSegment("two consecutive nodes coincide")
    closed = curve.closed
    s = np.concatenate([[0.0], np.cumsum(seglen[: curve.n_nodes - 1])])

    dr = _derivative(curve.nodes, seglen, closed, offset=curve.shift)
    e = dr / np.linalg.norm(dr, axis=1)[:, None]

    de = _derivative(e, seglen, closed)
    kvec = de - _rowdot(de, e)[:, None] * e
    kappa = np.linalg.norm(kvec, axis=1)
    flat = kappa < curvature_floor

    with np.errstate(invalid="ignore", divide="ignore"):
        n = kvec / kappa[:, None]
    n[flat] = np.nan
    b = np.cross(e, n)

    db = _derivative(b, seglen, closed)
    tau = -_rowdot(db, n)

    undefined = flat | ~np.isfinite(tau)
    n[undefined] = np.nan
    b[undefined] = np.nan
    tau[undefined] = np.nan
    kappa = np.where(flat, 0.0, kappa)
    return FrenetData(
        arclength=_frozen(s),
        tangent=_frozen(e),
        normal=_frozen(n),
        binormal=_frozen(b),
        curvature=_frozen(kappa),
        torsion=_frozen(tau),
        undefined=_frozen(undefined, dtype=bool),
    )


class _SplineCurve:
    """Spline interpolant through the nodes, chord-length parametrized."""

    def __init__(self, curve: DiscreteCurve, kind: str = "cubic"):
        if kind not in ("cubic", "pchip"):
            raise ValueError(f"unknown spline kind {kind!r}")
        self.curve = curve
        seglen = curve.segment_lengths()
        knots = np.concatenate([[0.0], np.cumsum(seglen)])
        if curve.closed:
            self.knots = knots
            self.total = knots[-1]
            pts = np.vstack([curve.nodes, curve.nodes[:1] + curve.shift])
            pts = pts - np.outer(knots / self.total, curve.shift)
            if kind == "cubic":
                self._spline = CubicSpline(knots, pts, bc_type="periodic")
            else:
                # no periodic mode for PCHIP: pad with wrapped nodes
                pad = 3
                uu = np.concatenate([knots[-pad - 1 : -1] - self.total, knots, knots[1 : pad + 1] + self.total])
                pp = np.vstack([pts[-pad - 1 : -1], pts, pts[1 : pad + 1]])
                self._spline = PchipInterpolator(uu, pp)
        else:
            self.knots = knots[: curve.n_nodes]
            self.total = self.knots[-1]
            if kind == "cubic":
                self._spline = CubicSpline(self.knots, curve.nodes, bc_type="not-a-knot")
            else:
                self._spline = PchipInterpolator(self.knots, curve.nodes)
        self._dspline = self._spline.derivative()
        self._cum = np.concatenate([[0.0], np.cumsum(self._interval_lengths())])

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        pts = self._spline(u)
        if self.curve.closed:
            pts = pts + np.multiply.outer(u / self.total, self.curve.shift)
        return pts

    def speed(self, u):
        d = self._dspline(u)
        if self.curve.closed:
            d = d + self.curve.shift / self.total
        return np.linalg.norm(d, axis=-1)

    def _interval_lengths(self):
        lo, hi = self.knots[:-1], self.knots[1:]
        h = hi - lo
        pts = lo[:, None] + h[:, None] * _GL_X[None, :]
        return (self.speed(pts) * _GL_W[None, :]).sum(axis=1) * h

    @property
    def arc_length(self) -> float:
        return float(self._cum[-1])

    def arc_at(self, u):
        """Spline arc length from the first node to parameter ``u``."""
        u = np.asarray(u, dtype=float)
        k = np.clip(np.searchsorted(self.knots, u, side="right") - 1, 0, len(self.knots) - 2)
        lo = self.knots[k]
        h = u - lo
        pts = lo[..., None] + h[..., None] * _GL_X
        return self._cum[k] + (self.speed(pts) * _GL_W).sum(axis=-1) * h

    def param_at(self, s):
        """Invert ``arc_at`` by safeguarded Newton inside each knot interval."""
        s = np.asarray(s, dtype=float)
        k = np.clip(np.searchsorted(self._cum, s, side="right") - 1, 0, len(self.knots) - 2)
        lo, hi = self.knots[k].copy(), self.knots[k + 1].copy()
        frac = (s - self._cum[k]) / np.maximum(self._cum[k + 1] - self._cum[k], 1e-300)
        u = lo + frac * (hi - lo)
        tol = 4.0 * np.finfo(float).eps * max(self.arc_length, 1.0)
        for _ in range(60):
            f = self.arc_at(u) - s
            if np.all(np.abs(f) <= tol):
                break
            lo = np.where(f < 0.0, u, lo)
            hi = np.where(f > 0.0, u, hi)
            v = self.speed(u)
            cand = u - f / np.where(v > 0.0, v, 1.0)
            # fall back to bisection where Newton leaves the bracket (zero speed at corners)
            bad = (v <= 0.0) | (cand <= lo) | (cand >= hi)
            u = np.where(np.abs(f) <= tol, u, np.where(bad, 0.5 * (lo + hi), cand))
        return u


def arc_length(curve: DiscreteCurve, method: str = "spline", kind: str = "cubic") -> float:
    """Curve length: ``"polyline"`` or the length of the ``kind`` spline interpolant."""
    if method == "polyline":
        return curve.length()
    if method == "spline":
        return _SplineCurve(curve, kind).arc_length
    raise ValueError(f"unknown arc-length method {method!r}")


def resample_uniform(
    curve: DiscreteCurve, n_nodes: int, kind: str = "cubic", tol: float = 1e-13
) -> DiscreteCurve:
    """Place ``n_nodes`` nodes on a spline interpolant with equal segment lengths.

    Nodes start equally spaced in spline arc length and are then nudged
    along the spline until all chords agree. The first node is kept (and
    the last one for open curves). ``kind="cubic"`` is the C2 interpolant;
    ``kind="pchip"`` is shape preserving and keeps polygon corners.
    """
    if n_nodes < 4:
        raise ValueError("n_nodes must be at least 4")
    spl = _SplineCurve(curve, kind)
    total = spl.arc_length
    if curve.closed:
        s = np.arange(n_nodes) * (total / n_nodes)
        movable = slice(1, None)
    else:
        s = np.linspace(0.0, total, n_nodes)
        movable = slice(1, -1)

    def chords(pts):
        seg = np.diff(pts, axis=0)
        if curve.closed:
            seg = np.vstack([seg, pts[0] + curve.shift - pts[-1]])
        return np.linalg.norm(seg, axis=1)

    pts = spl(spl.param_at(s))
    for _ in range(100):
        c = chords(pts)
        if c.std() < tol * c.mean():
            break
        offsets = np.arange(len(c) + 1) * c.mean() - np.concatenate([[0.0], np.cumsum(c)])
        s = s.copy()
        s[movable] = s[movable] + offsets[:n_nodes][movable]
        pts = spl(spl.param_at(s))
    return curve.with_nodes(pts)


def redundant_length(
    curve: DiscreteCurve,
    axis=None,
    tangent_tol: float = 1e-3,
    method: str = "spline",
) -> float:
    """Excess arc length over the end-to-end extent along ``axis``.

    The curve must be open with both end tangents within ``tangent_tol``
    of the axis direction.
    """
    if curve.closed:
        raise NotAsymptoticallyStraight("redundant length needs an open curve")
    axis = curve.axis if axis is None else np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    seg = curve.segments()
    for end in (seg[0], seg[-1]):
        dev = np.linalg.norm(end / np.linalg.norm(end) - axis)
        if dev > tangent_tol:
            raise NotAsymptoticallyStraight(f"end tangent deviates from axis by {dev:.3g}")
    extent = float(np.dot(curve.nodes[-1] - curve.nodes[0], axis))
    return arc_length(curve, method) - extent
