"""Sub-channel assignment and power allocation for multi-band links."""

from ._core import (  # noqa: F401
    Allocation,
    AssignmentResult,
    ChannelParams,
    ChannelRealization,
    GuardExceededError,
    InfeasibleError,
    RateReport,
    Strategy,
    ValidationError,
    WaterFillResult,
    ZeroGainPolicy,
    allocate,
    brute_force_assignment,
    concentrate_on_best,
    count_partitions,
    dump_instance,
    equal_split,
    exact_sum_rate,
    normalized_gain,
    realization_from_squared_gains,
    sample_realization,
    solve_assignment,
    sweep_csv,
    water_fill,
)

__version__ = "0.1.0"
