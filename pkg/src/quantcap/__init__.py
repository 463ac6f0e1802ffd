"""Capacity bounds and achievable rates for MIMO channels with one-bit quantizers.

The geometry of a receiver with analog combining ``V`` and thresholds ``t``
is the hyperplane arrangement ``{V H x = -t}``; its cells are the
distinguishable outputs, and separable unit-sphere packings inside the power
ball give both input constellations and capacity bounds.
"""

from .bounds import (
    BoundReport,
    PowerAllocation,
    prop1_upper,
    prop2_bounds,
    prop3_upper,
    theorem1_upper,
    unquantized_capacity,
    waterfilling,
)
from .configs import (
    Architecture,
    ChannelInstance,
    InvalidConfig,
    ReceiverConfig,
    build_config,
    induced_arrangement,
)
from .counting import RegionCountQuery, r_central, r_general, r_parallel
from .geometry import (
    Cell,
    HyperplaneArrangement,
    InvalidArrangement,
    count_cells,
    enumerate_cells,
    is_general_position,
    max_margin_center,
)
from .kernels import BACKEND
from .packing import Packing, log_r_ssps, pack_margin, r_ssps_oracle, validate_packing
from .simulate import (
    RateCurve,
    mutual_information,
    optimize_input,
    rate_curve,
    transition_exact,
    transition_mc,
)

__version__ = "0.1.0"

__all__ = [
    "Architecture",
    "BACKEND",
    "BoundReport",
    "Cell",
    "ChannelInstance",
    "HyperplaneArrangement",
    "InvalidArrangement",
    "InvalidConfig",
    "Packing",
    "PowerAllocation",
    "RateCurve",
    "ReceiverConfig",
    "RegionCountQuery",
    "build_config",
    "count_cells",
    "enumerate_cells",
    "induced_arrangement",
    "is_general_position",
    "log_r_ssps",
    "max_margin_center",
    "mutual_information",
    "optimize_input",
    "pack_margin",
    "prop1_upper",
    "prop2_bounds",
    "prop3_upper",
    "r_central",
    "r_general",
    "r_parallel",
    "r_ssps_oracle",
    "rate_curve",
    "theorem1_upper",
    "transition_exact",
    "transition_mc",
    "unquantized_capacity",
    "validate_packing",
    "waterfilling",
]
