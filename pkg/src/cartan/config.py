"""Numerical tolerances and defaults shared across modules.

Exact (rational) code paths never consult these; they only govern sampled,
integrated or optimized quantities.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    rk4_step: float = 1e-4
    horizontality: float = 1e-6
    height_check: float = 1e-6
    sign_deadband: float = 1e-12
    endpoint: float = 1e-9
    cc_slack: float = 1.1
    junction_factor: float = 4.0
    coincidence_tau: float = 1e-8
    badintersect_slack: float = 0.02


DEFAULTS = Tolerances()

DEFAULT_KAPPA = 1
COINCIDENCE_GRID = {1: 100_000, 2: 100_000, 3: 10_000}
