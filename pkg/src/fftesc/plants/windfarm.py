"""Top-hat (Jensen) wake model of a wind farm driven by axial induction factors.

Wind blows along +x.  A turbine at ``x_j`` casts a wake whose diameter grows
linearly as ``D_j + 2 k (x - x_j)``; a downstream rotor sees the squared-sum
of the partial-overlap deficits of all upwind turbines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

POWER_UNITS = {"W": 1.0, "kW": 1e-3, "MW": 1e-6}

#: Admissible range of the axial induction factor.
INDUCTION_RANGE = (0.0, 0.5)


@dataclass(frozen=True)
class Turbine:
    x: float
    y: float
    diameter: float

    def __post_init__(self) -> None:
        if not self.diameter > 0:
            raise ValueError(f"rotor diameter must be positive, got {self.diameter}")

    @property
    def area(self) -> float:
        return math.pi * self.diameter**2 / 4.0


@dataclass(frozen=True)
class WindFarm:
    turbines: tuple[Turbine, ...]
    roughness: float
    free_stream: float
    air_density: float
    power_unit: str = "W"

    def __post_init__(self) -> None:
        object.__setattr__(self, "turbines", tuple(self.turbines))
        if not self.turbines:
            raise ValueError("a wind farm needs at least one turbine")
        if not self.roughness > 0:
            raise ValueError("roughness coefficient must be positive")
        if not self.free_stream >= 0:
            raise ValueError("free-stream velocity must be non-negative")
        if not self.air_density > 0:
            raise ValueError("air density must be positive")
        if self.power_unit not in POWER_UNITS:
            raise ValueError(f"power_unit must be one of {sorted(POWER_UNITS)}")

    @property
    def n_inputs(self) -> int:
        return len(self.turbines)

    def cost(self, u: Sequence[float]) -> float:
        """Total farm power expressed in ``power_unit``."""
        return farm_power(self, u) * POWER_UNITS[self.power_unit]


def circle_overlap_area(r1: float, r2: float, dist: float) -> float:
    """Area of the lens shared by two circles with centres ``dist`` apart."""
    if dist >= r1 + r2:
        return 0.0
    if dist <= abs(r1 - r2):
        return math.pi * min(r1, r2) ** 2
    a1 = math.acos((dist**2 + r1**2 - r2**2) / (2.0 * dist * r1))
    a2 = math.acos((dist**2 + r2**2 - r1**2) / (2.0 * dist * r2))
    tri = 0.5 * math.sqrt(
        max(0.0, (-dist + r1 + r2) * (dist + r1 - r2) * (dist - r1 + r2) * (dist + r1 + r2))
    )
    return r1**2 * a1 + r2**2 * a2 - tri


def wake_overlap(farm: WindFarm, j: int, i: int) -> float:
    """Area of rotor ``i`` covered by the wake of upwind turbine ``j``."""
    tj, ti = farm.turbines[j], farm.turbines[i]
    dx = ti.x - tj.x
    if dx <= 0:
        return 0.0
    wake_radius = (tj.diameter + 2.0 * farm.roughness * dx) / 2.0
    return circle_overlap_area(wake_radius, ti.diameter / 2.0, abs(ti.y - tj.y))


def velocity_deficit(farm: WindFarm, u: Sequence[float], i: int) -> float:
    """Aggregated fractional velocity deficit at turbine ``i``."""
    ti = farm.turbines[i]
    total = 0.0
    for j, tj in enumerate(farm.turbines):
        dx = ti.x - tj.x
        if dx <= 0:
            continue
        overlap = wake_overlap(farm, j, i)
        if overlap == 0.0:
            continue
        expansion = (tj.diameter / (tj.diameter + 2.0 * farm.roughness * dx)) ** 2
        total += (u[j] * expansion * overlap / ti.area) ** 2
    return 2.0 * math.sqrt(total)


def power_coefficient(u: float) -> float:
    return 4.0 * u * (1.0 - u) ** 2


def turbine_power(farm: WindFarm, u: Sequence[float], i: int) -> float:
    """Power of turbine ``i`` in W."""
    # Overlapping wakes can push the combined deficit past 1; the rotor then stalls.
    v = max(0.0, farm.free_stream * (1.0 - velocity_deficit(farm, u, i)))
    t = farm.turbines[i]
    return 0.5 * farm.air_density * t.area * power_coefficient(u[i]) * v**3


def farm_power(farm: WindFarm, u: Sequence[float]) -> float:
    """Total farm power in W."""
    x = np.asarray(u, dtype=np.float64)
    if x.shape != (farm.n_inputs,):
        raise ValueError(f"expected {farm.n_inputs} induction factors, got shape {x.shape}")
    return sum(turbine_power(farm, x, i) for i in range(farm.n_inputs))


def six_turbine_layout(
    diameter: float = 80.0, roughness: float = 0.075, free_stream: float = 8.0
) -> WindFarm:
    """Six turbines in two rows of three, 400 m apart along the wind, rows 200 m apart."""
    coords = [(0, 200), (400, 200), (800, 200), (0, 0), (400, 0), (800, 0)]
    return WindFarm(
        turbines=tuple(Turbine(float(x), float(y), diameter) for x, y in coords),
        roughness=roughness,
        free_stream=free_stream,
        air_density=1.225,
        power_unit="MW",
    )
