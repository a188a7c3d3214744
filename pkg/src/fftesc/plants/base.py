"""Common plant interface."""

from __future__ import annotations

from typing import Protocol, Sequence, runtime_checkable


class PlantError(RuntimeError):
    """A plant could not produce a cost sample for the given input."""


@runtime_checkable
class Plant(Protocol):
    """A static map from an input vector to one scalar cost sample."""

    @property
    def n_inputs(self) -> int: ...

    def cost(self, u: Sequence[float]) -> float: ...
