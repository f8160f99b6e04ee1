from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class PhysicalParams:
    """Material constants of the filament model.

    nu    -- self-induction coefficient (length^2 / time)
    zeta  -- linear fluid density along the filament (mass / length)
    xi    -- line energy density (energy / length)
    c     -- perturbation wave speed (length / time)
    """

    nu: float = 1.0
    zeta: float = 1.0
    xi: float = 1.0
    c: float = 10.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value > 0.0:
                raise ValueError(f"{name} must be strictly positive, got {value!r}")

    def to_dict(self) -> dict:
        return asdict(self)
