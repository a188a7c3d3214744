"""Step-indexed parameter changes applied to a plant between controller steps."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any, Sequence


class DisturbanceError(KeyError):
    """A disturbance names a parameter the plant does not have."""


@dataclass(frozen=True)
class Disturbance:
    """Set the plant parameter at dotted ``path`` to ``value`` at ``step``.

    Path segments are dataclass field names or 0-based sequence indices,
    e.g. ``"branches.0.hot_inlet_temp"``.
    """

    step: int
    path: str
    value: Any


def _replace(obj: Any, parts: Sequence[str], value: Any, full: str) -> Any:
    head, rest = parts[0], parts[1:]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        names = {f.name for f in dataclasses.fields(obj)}
        if head not in names:
            raise DisturbanceError(f"unknown parameter path {full!r}: no field {head!r}")
        new = value if not rest else _replace(getattr(obj, head), rest, value, full)
        return dataclasses.replace(obj, **{head: new})
    if isinstance(obj, (tuple, list)):
        try:
            idx = int(head)
            item = obj[idx]
        except (ValueError, IndexError):
            raise DisturbanceError(f"unknown parameter path {full!r}: bad index {head!r}")
        if idx < 0:
            raise DisturbanceError(f"unknown parameter path {full!r}: negative index")
        new = value if not rest else _replace(item, rest, value, full)
        seq = list(obj)
        seq[idx] = new
        return type(obj)(seq)
    raise DisturbanceError(f"unknown parameter path {full!r}: {head!r} is not a container")


def set_parameter(plant: Any, path: str, value: Any) -> Any:
    """Copy of ``plant`` with the parameter at ``path`` replaced."""
    parts = path.split(".")
    if not path or any(p == "" for p in parts):
        raise DisturbanceError(f"malformed parameter path {path!r}")
    return _replace(plant, parts, value, path)


def validate_schedule(plant: Any, schedule: Sequence[Disturbance]) -> None:
    """Raise :class:`DisturbanceError` if any path in ``schedule`` is unknown."""
    probe = plant
    for d in schedule:
        probe = set_parameter(probe, d.path, d.value)


def apply_disturbance(plant: Any, schedule: Sequence[Disturbance], step: int) -> Any:
    """Apply every scheduled change due at ``step``, in listed order."""
    for d in schedule:
        if d.step == step:
            plant = set_parameter(plant, d.path, d.value)
    return plant
