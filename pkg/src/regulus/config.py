"""Tunable constants.

The underlying results are stated with absolute constants that are either
unspecified ("sufficiently large") or astronomically large (10^7, 10^8).
Everything here is a desk-scale stand-in; every output produced under these
values is certified by direct checking, so a poor choice costs retries or
route failures, never correctness.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass


@dataclass(frozen=True)
class ConstantsConfig:
    # near-regularization
    slack: float = 4.0  # allowed gap between max degree and d' (theory values are 10^7 and 10^8)
    c_scale: float = 0.05  # constant c in d' >= c d / lambda^3 and |H| >= c |G| / lambda^10
    shortcut_factor: float = 1.0  # maximal-matching shortcut when d < shortcut_factor * slack * lambda^3
    eps_d_floor: float | None = None  # None -> shortcut_factor * slack / 100
    correction_tolerance: float = 50.0  # multiplier on |G| exp(-eps d / 1000)
    retry_budget: int = 25
    # exact searches
    search_budget: int = 200_000  # node limit for backtracking searches
    matching_cap: int = 1_000_000
    # sunflower constant; reporting only
    alpha: float = 2.0
    # Erdos-Sauer pipeline scalings (theory: C/4, 100, C/100 with C huge)
    es_degree_scale: float = 1.0
    es_t0_scale: float = 1.0
    es_case1_scale: float = 0.04
    jsr_log_factor: float = 16.0
    jsr_ratio: float = 64.0

    def __post_init__(self) -> None:
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if value is not None and value <= 0:
                raise ValueError(f"{f.name} must be positive, got {value}")

    @property
    def floor(self) -> float:
        """Minimum eps*d accepted by a single randomized step."""
        if self.eps_d_floor is not None:
            return self.eps_d_floor
        return self.shortcut_factor * self.slack / 100

    def replace(self, **changes) -> "ConstantsConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULT = ConstantsConfig()


def time_hint() -> float | None:
    """Global wall-clock hint in seconds from ``REGULUS_BUDGET_SECS``."""
    raw = os.environ.get("REGULUS_BUDGET_SECS")
    if not raw:
        return None
    value = float(raw)
    return value if value > 0 else None
