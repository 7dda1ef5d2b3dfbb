"""
Problem: an instance seen through its ADF
"""
from dataclasses import dataclass, replace
from typing import Any, Optional

from algorithms.core.adf import AdfSpec
from utils.errors import InvalidInputError

LOCAL_SEARCH_POLICIES = ('hc', 'repair', 'none')


@dataclass(frozen=True)
class Problem:
    """
    Objective, instance and improvement policy handed to hBOA

    Attributes:
        family: Registry name ('spin', 'mvc', 'maxsat', 'onemax')
        instance: The generated instance (SpinGlass3D, VertexCoverInstance, ...)
        adf: AdfSpec view of the objective (maximised)
        known_optimum: Optimum fitness when known
        local_search: 'hc' (bit-flip hill climbing), 'repair' or 'none'
        instance_id: Identifier used by harvesting and reports
    """

    family: str
    instance: Any
    adf: AdfSpec
    known_optimum: Optional[float] = None
    local_search: str = 'hc'
    instance_id: str = ''

    def __post_init__(self):
        if self.local_search not in LOCAL_SEARCH_POLICIES:
            raise InvalidInputError(f'unknown local search policy {self.local_search!r}')

    @property
    def n(self):
        return self.adf.n

    def with_optimum(self, value):
        return replace(self, known_optimum=None if value is None else float(value))

    def with_local_search(self, policy):
        return replace(self, local_search=policy)

    def with_id(self, instance_id):
        return replace(self, instance_id=str(instance_id))

    def is_optimal(self, fitness, tolerance=1e-9):
        """True when a known optimum exists and fitness reaches it"""
        if self.known_optimum is None or fitness is None:
            return False
        return fitness >= self.known_optimum - tolerance
