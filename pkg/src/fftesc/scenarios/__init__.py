"""Scenario files shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

NAMES = ("appendix_a", "example1_windfarm", "example1_windfarm_noisy", "example2_heatex")


def path(name: str) -> Path:
    """Filesystem path of the bundled scenario ``name``."""
    if name not in NAMES:
        raise KeyError(f"no bundled scenario {name!r}; choose from {NAMES}")
    return Path(str(resources.files(__name__).joinpath(f"{name}.json")))
