"""CSV and JSON writers. Floats are written with 17 significant digits, LF line endings."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .geometry import DiscreteCurve, compute_frenet
from .nls import ComplexField, hydro_fields
from .params import PhysicalParams

FLOAT_FMT = "%.17g"


def write_table(path, header: str, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    with open(path, "w", newline="\n") as fh:
        np.savetxt(fh, rows, fmt=FLOAT_FMT, delimiter=",", header=header, comments="")
    return path


def read_table(path) -> tuple[list[str], np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def curve_rows(curve: DiscreteCurve) -> np.ndarray:
    fr = compute_frenet(curve)
    return np.column_stack([fr.arclength, curve.nodes, fr.curvature, fr.torsion])


def write_curve(path, curve: DiscreteCurve) -> Path:
    """Curve snapshot ``s,x,y,z,kappa,tau``; undefined torsion is written as ``nan``."""
    return write_table(path, "s,x,y,z,kappa,tau", curve_rows(curve))


def write_field(path, field: ComplexField, params: PhysicalParams) -> Path:
    """Field snapshot ``l,re,im,rho,v,w``."""
    h = hydro_fields(field, params)
    rows = np.column_stack([field.x, field.values.real, field.values.imag, h.rho, h.v, h.w])
    return write_table(path, "l,re,im,rho,v,w", rows)


def write_conservation(path, report) -> Path:
    return write_table(path, "t,mass,momentum,energy", report.rows())


def write_energy_scan(path, rows) -> Path:
    return write_table(path, "a,total,segment_term,distortion_term", rows)


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")
    return path


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_trajectory(directory, states, stem: str = "curve") -> Path:
    """One curve CSV per state plus ``index.json``; ``states`` yields ``(t, curve)``."""
    directory = Path(directory)
    entries = []
    for i, (t, curve) in enumerate(states):
        name = f"{stem}_{i:05d}.csv"
        write_curve(directory / name, curve)
        entries.append({"index": i, "time": float(t), "file": name})
    return write_json(directory / "index.json", {"snapshots": entries})
