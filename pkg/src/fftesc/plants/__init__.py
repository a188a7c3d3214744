"""Simulated static plants: quadratic map, wind farm, heat-recovery network."""

from .base import Plant, PlantError
from .disturbance import (
    Disturbance,
    DisturbanceError,
    apply_disturbance,
    set_parameter,
    validate_schedule,
)
from .heatex import (
    Branch,
    ExchangerOutlets,
    FlowType,
    HeatExchangerNetwork,
    exchanger_outlets,
    eight_branch_network,
    mean_temperature_difference,
    network_end_temperature,
)
from .quadratic import QuadraticMap, quadratic_cost
from .windfarm import (
    Turbine,
    WindFarm,
    circle_overlap_area,
    six_turbine_layout,
    farm_power,
    power_coefficient,
    turbine_power,
    velocity_deficit,
    wake_overlap,
)

__all__ = [
    "Branch",
    "Disturbance",
    "DisturbanceError",
    "ExchangerOutlets",
    "FlowType",
    "HeatExchangerNetwork",
    "Plant",
    "PlantError",
    "QuadraticMap",
    "Turbine",
    "WindFarm",
    "apply_disturbance",
    "circle_overlap_area",
    "six_turbine_layout",
    "eight_branch_network",
    "exchanger_outlets",
    "farm_power",
    "mean_temperature_difference",
    "network_end_temperature",
    "power_coefficient",
    "quadratic_cost",
    "set_parameter",
    "turbine_power",
    "validate_schedule",
    "velocity_deficit",
    "wake_overlap",
]
