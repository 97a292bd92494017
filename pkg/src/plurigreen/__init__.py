"""Numerical bounds for pluricomplex Green functions, Kobayashi and Caratheodory
functions, Azukawa/Royden indicatrices and the pluripotential compactification."""

from .bounds import caratheodory_bound, chain_bounds, green_interval, psh_lower_bound, pushforward_upper_bound
from .config import RunConfig, SearchBudget
from .disks import kobayashi_bound, royden_bound, upper_bound_green
from .geometry import Ball, HartogsPgvlu, PlanarComplement, Polydisk, Pushforward, SublevelDcg, unit_bidisk, unit_disk
from .intervals import BoundInterval, InfeasibleError, SoundnessError

__all__ = [
    "Ball",
    "BoundInterval",
    "HartogsPgvlu",
    "InfeasibleError",
    "PlanarComplement",
    "Polydisk",
    "Pushforward",
    "RunConfig",
    "SearchBudget",
    "SoundnessError",
    "SublevelDcg",
    "caratheodory_bound",
    "chain_bounds",
    "green_interval",
    "kobayashi_bound",
    "psh_lower_bound",
    "pushforward_upper_bound",
    "royden_bound",
    "unit_bidisk",
    "unit_disk",
    "upper_bound_green",
]
