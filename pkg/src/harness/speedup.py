"""
Speedup of a biased run over its unbiased twin
"""
import time
from dataclasses import dataclass

from utils.errors import InvalidInputError

CLOCK_RESOLUTION = time.get_clock_info('perf_counter').resolution


@dataclass(frozen=True)
class Speedup:
    """
    Attributes:
        time: base wall time / biased wall time
        evaluations: base evaluations / biased evaluations
        clamped: a wall time was below clock resolution and was floored to it
    """

    time: float
    evaluations: float
    clamped: bool = False


def measure_speedup(base, biased):
    """
    Multiplicative speedup of `biased` over `base`, in time and in evaluations

    Both runs must come from the same instance and host. Times below the
    clock resolution are floored to it and the result is flagged.

    Args:
        base: RunResult of the unbiased run
        biased: RunResult of the biased run

    Returns:
        Speedup
    """
    if base.instance_id != biased.instance_id:
        raise InvalidInputError(f'runs of different instances: {base.instance_id!r} vs {biased.instance_id!r}')
    base_time = max(base.wall_time, CLOCK_RESOLUTION)
    biased_time = max(biased.wall_time, CLOCK_RESOLUTION)
    clamped = base_time != base.wall_time or biased_time != biased.wall_time
    if biased.evaluations <= 0 or base.evaluations <= 0:
        raise InvalidInputError('runs without fitness evaluations have no speedup')
    return Speedup(base_time / biased_time, base.evaluations / biased.evaluations, clamped)
