"""
Run configuration for hBOA
"""
import math
from dataclasses import dataclass
from typing import Optional

from algorithms.bias.bias_table import BiasTable
from utils.errors import ConfigurationError

KAPPA_SWEEP = (1, 3, 5, 7, 9)
HARVEST_POLICIES = ('none', 'final', 'all')


def delay_for(n):
    """Sporadic model-building delay ceil(sqrt(n) / 2), at least 1"""
    return max(1, math.ceil(math.sqrt(n) / 2))


def should_rebuild(iteration, n, sporadic):
    """True when the structure is learned anew at this iteration"""
    if iteration < 0:
        raise ConfigurationError(f'iteration must be non-negative, got {iteration}')
    return not sporadic or iteration % delay_for(n) == 0


@dataclass(frozen=True)
class HboaConfig:
    """
    Attributes:
        population_size: N
        max_iterations: Iteration cap; None means n
        kappa: Bias strength; 0 disables the bias
        bias: BiasTable used when kappa > 0
        sporadic: Rebuild structure only every delay_for(n) iterations
        window: RTS window; None means default_window(n, N)
        offspring_fraction: Offspring per iteration as a fraction of N
        seed: Seed of the run's RngStream when none is passed to run()
        harvest: Which models a run returns: 'none', 'final' or 'all'
        max_splits: Optional cap on splits per learned network
        penalty_factor: Complexity penalty per leaf is penalty_factor * log2(N)
    """

    population_size: int = 100
    max_iterations: Optional[int] = None
    kappa: float = 0.0
    bias: Optional[BiasTable] = None
    sporadic: bool = False
    window: Optional[int] = None
    offspring_fraction: float = 0.5
    seed: int = 0
    harvest: str = 'final'
    max_splits: Optional[int] = None
    penalty_factor: float = 0.5

    def __post_init__(self):
        if self.population_size < 2:
            raise ConfigurationError(f'population size must be at least 2, got {self.population_size}')
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ConfigurationError(f'max_iterations must be positive, got {self.max_iterations}')
        if self.kappa < 0:
            raise ConfigurationError(f'kappa must be non-negative, got {self.kappa}')
        if self.kappa > 0 and self.bias is None:
            raise ConfigurationError('kappa > 0 needs a bias table')
        if self.window is not None and self.window < 1:
            raise ConfigurationError(f'RTS window must be positive, got {self.window}')
        if not 0 < self.offspring_fraction <= 1:
            raise ConfigurationError(f'offspring fraction must lie in (0, 1], got {self.offspring_fraction}')
        if self.harvest not in HARVEST_POLICIES:
            raise ConfigurationError(f'harvest must be one of {HARVEST_POLICIES}, got {self.harvest!r}')
        if self.max_splits is not None and self.max_splits < 0:
            raise ConfigurationError(f'max_splits must be non-negative, got {self.max_splits}')
        if self.penalty_factor < 0:
            raise ConfigurationError(f'penalty factor must be non-negative, got {self.penalty_factor}')

    def iteration_cap(self, n):
        return self.max_iterations if self.max_iterations is not None else n

    def offspring_count(self):
        return max(1, round(self.offspring_fraction * self.population_size))

    def check_bias(self, n):
        """
        Raises:
            ConfigurationError: bias table unusable for problem size n
        """
        if self.bias is not None:
            self.bias.check_compatible(n)
