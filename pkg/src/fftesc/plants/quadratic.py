from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class QuadraticMap:
    """Separable quadratic ``sum_i c_i (u_i - u*_i)**2 + offset``.

    ``curvature`` and ``optimum`` are scalars for a single input, or
    equal-length tuples for several.
    """

    curvature: float | tuple[float, ...]
    optimum: float | tuple[float, ...]
    offset: float = 0.0

    def __post_init__(self) -> None:
        c = np.atleast_1d(np.asarray(self.curvature, dtype=np.float64))
        u = np.atleast_1d(np.asarray(self.optimum, dtype=np.float64))
        if c.shape != u.shape or c.ndim != 1:
            raise ValueError("curvature and optimum must have matching lengths")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(u)) and np.isfinite(self.offset)):
            raise ValueError("quadratic map parameters must be finite")

    @property
    def _c(self) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.curvature, dtype=np.float64))

    @property
    def _u(self) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.optimum, dtype=np.float64))

    @property
    def n_inputs(self) -> int:
        return self._c.size

    def cost(self, u: Sequence[float] | float) -> float:
        return quadratic_cost(self, u)

    def gradient(self, u: Sequence[float] | float) -> np.ndarray:
        x = np.atleast_1d(np.asarray(u, dtype=np.float64))
        return 2.0 * self._c * (x - self._u)


def quadratic_cost(qmap: QuadraticMap, u: Sequence[float] | float) -> float:
    x = np.atleast_1d(np.asarray(u, dtype=np.float64))
    if x.shape != (qmap.n_inputs,):
        raise ValueError(f"expected {qmap.n_inputs} inputs, got shape {x.shape}")
    return float(np.sum(qmap._c * (x - qmap._u) ** 2) + qmap.offset)
