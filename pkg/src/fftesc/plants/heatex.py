"""Parallel heat-recovery network: one cold stream split over ``n`` exchangers.

Each branch is a counter-current exchanger between its share ``u_i w_c`` of
the cold stream and one hot stream.  The mean temperature difference uses
the cube-root approximation of the log-mean, which makes the outlet
temperatures implicit in the duty; each branch solves ``Q = UA * dT_lm(Q)``
for ``Q`` on ``[0, Q_pinch]``.

Units: ``ua`` in W/degC, flows in kg/s, ``heat_capacity`` in kJ/kg/degC.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .base import PlantError

DEFAULT_SPLIT_FLOOR = 1e-3


class FlowType(str, Enum):
    COUNTER_CURRENT = "counter_current"


@dataclass(frozen=True)
class Branch:
    hot_inlet_temp: float
    ua: float = 5e4
    hot_flow: float = 15.0

    def __post_init__(self) -> None:
        if self.ua < 0:
            raise ValueError("UA must be non-negative")
        if not self.hot_flow > 0:
            raise ValueError("hot-stream flow must be positive")


@dataclass(frozen=True)
class ExchangerOutlets:
    cold_out: float
    hot_out: float
    duty: float
    #: True if roundoff pushed an outlet past an inlet and it was clamped back.
    clamped: bool = False


@dataclass(frozen=True)
class HeatExchangerNetwork:
    branches: tuple[Branch, ...]
    cold_inlet_temp: float = 60.0
    cold_flow: float = 100.0
    heat_capacity: float = 4.2
    flow_type: FlowType = FlowType.COUNTER_CURRENT
    split_floor: float = DEFAULT_SPLIT_FLOOR

    def __post_init__(self) -> None:
        object.__setattr__(self, "branches", tuple(self.branches))
        object.__setattr__(self, "flow_type", FlowType(self.flow_type))
        if len(self.branches) < 2:
            raise ValueError("a split network needs at least two branches")
        if not self.cold_flow > 0 or not self.heat_capacity > 0:
            raise ValueError("cold flow and heat capacity must be positive")
        if not 0 < self.split_floor < 1.0 / len(self.branches):
            raise ValueError("split floor must be positive and below 1/n")

    @property
    def n_inputs(self) -> int:
        return len(self.branches) - 1

    def splits(self, u: Sequence[float]) -> np.ndarray:
        """All ``n`` split ratios; the last closes the mass balance."""
        x = np.asarray(u, dtype=np.float64)
        if x.shape != (self.n_inputs,):
            raise ValueError(f"expected {self.n_inputs} split ratios, got shape {x.shape}")
        full = np.append(x, 1.0 - x.sum())
        if np.any(full < self.split_floor) or not np.all(np.isfinite(full)):
            raise PlantError(
                f"split ratios {full.tolist()} violate closure or the floor {self.split_floor}"
            )
        return full

    def cost(self, u: Sequence[float]) -> float:
        return network_end_temperature(self, u)


def mean_temperature_difference(dt1: float, dt2: float) -> float:
    """Cube-root approximation of the log-mean temperature difference."""
    prod = max(dt1, 0.0) * max(dt2, 0.0) * (dt1 + dt2) / 2.0
    return float(np.cbrt(max(prod, 0.0)))


def exchanger_outlets(
    branch: Branch,
    split: float,
    cold_inlet: float,
    cold_flow: float,
    heat_capacity: float,
    split_floor: float = DEFAULT_SPLIT_FLOOR,
) -> ExchangerOutlets:
    """Outlet temperatures of one counter-current exchanger."""
    if split < split_floor:
        raise PlantError(f"split {split} is below the floor {split_floor}")
    th, tc = branch.hot_inlet_temp, cold_inlet
    if th < tc:
        raise PlantError(f"hot inlet {th} is colder than cold inlet {tc}")
    c_cold = split * cold_flow * heat_capacity * 1e3
    c_hot = branch.hot_flow * heat_capacity * 1e3
    q_pinch = min(c_cold, c_hot) * (th - tc)
    if branch.ua == 0.0 or q_pinch == 0.0:
        return ExchangerOutlets(cold_out=tc, hot_out=th, duty=0.0)

    span = th - tc

    def residual(q: float) -> float:
        # differences formed directly; going through outlet temperatures cancels badly near pinch
        return branch.ua * mean_temperature_difference(span - q / c_cold, span - q / c_hot) - q

    # residual(0) = UA (th - tc) > 0 and residual(q_pinch) = -q_pinch < 0.
    q, info = brentq(residual, 0.0, q_pinch, xtol=1e-12, full_output=True, maxiter=200)
    if not info.converged:
        raise PlantError(f"duty solver did not converge: {info.flag}")
    q = _polish(residual, q, q_pinch)
    cold_out = tc + q / c_cold
    hot_out = th - q / c_hot
    clamped = not (tc <= cold_out <= th and tc <= hot_out <= th)
    if clamped:
        cold_out = min(max(cold_out, tc), th)
        hot_out = min(max(hot_out, tc), th)
    return ExchangerOutlets(cold_out=cold_out, hot_out=hot_out, duty=q, clamped=clamped)


def _polish(residual, q: float, q_max: float, reach: int = 16) -> float:
    """Best float within ``reach`` ulps of ``q``; near pinch one ulp moves the residual a lot."""
    best, best_r = q, abs(residual(q))
    for direction in (-np.inf, np.inf):
        x = q
        for _ in range(reach):
            x = float(np.nextafter(x, direction))
            if not 0.0 <= x <= q_max:
                break
            r = abs(residual(x))
            if r < best_r:
                best, best_r = x, r
    return best


def network_end_temperature(net: HeatExchangerNetwork, u: Sequence[float]) -> float:
    """Mixed cold-stream temperature for the first ``n-1`` split ratios ``u``."""
    splits = net.splits(u)
    total = 0.0
    for i, (branch, s) in enumerate(zip(net.branches, splits)):
        try:
            out = exchanger_outlets(
                branch, s, net.cold_inlet_temp, net.cold_flow, net.heat_capacity, net.split_floor
            )
        except PlantError as exc:
            raise PlantError(f"branch {i + 1}: {exc}") from exc
        total += s * out.cold_out
    return total


def eight_branch_network() -> HeatExchangerNetwork:
    """Eight branches with the bundled hot-stream inlet temperatures."""
    temps = (120.0, 130.0, 120.0, 140.0, 120.0, 125.0, 115.0, 110.0)
    return HeatExchangerNetwork(branches=tuple(Branch(t) for t in temps))
