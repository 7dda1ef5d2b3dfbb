"""
Candidate solutions and populations
"""
import numpy as np

from utils.errors import InvalidInputError


def as_bits(bits):
    """Copy any 0/1 sequence into a read-only uint8 array"""
    arr = np.array(bits, dtype=np.uint8).reshape(-1)
    if arr.size and arr.max() > 1:
        raise InvalidInputError('bits must be 0 or 1')
    arr.flags.writeable = False
    return arr


class Solution:
    """
    Fixed-length bit string with cached fitness

    The bit array is read-only, so the length never changes after
    construction. `fitness` is None until the solution is evaluated.
    """

    __slots__ = ('bits', 'fitness')

    def __init__(self, bits, fitness=None):
        self.bits = as_bits(bits)
        self.fitness = None if fitness is None else float(fitness)

    @property
    def n(self):
        return int(self.bits.size)

    @property
    def evaluated(self):
        return self.fitness is not None

    def set_fitness(self, value):
        self.fitness = float(value)
        return self

    def copy(self):
        return Solution(self.bits, self.fitness)

    def key(self):
        """Hashable genotype"""
        return self.bits.tobytes()

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Solution):
            return NotImplemented
        return self.fitness == other.fitness and np.array_equal(self.bits, other.bits)

    def __repr__(self):
        text = ''.join(str(int(b)) for b in self.bits[:64])
        if self.n > 64:
            text += '...'
        return f'Solution({text}, fitness={self.fitness})'


class Population:
    """
    Ordered multiset of evaluated solutions with a fixed capacity

    Members are kept as an N x n bit matrix plus a fitness vector so that
    niching and selection can work on whole arrays.

    Args:
        n: String length shared by all members
        capacity: Maximum number of members
    """

    def __init__(self, n, capacity):
        if capacity < 1:
            raise InvalidInputError(f'population capacity must be positive, got {capacity}')
        self.n = int(n)
        self.capacity = int(capacity)
        self._bits = np.zeros((self.capacity, self.n), dtype=np.uint8)
        self._fitness = np.zeros(self.capacity, dtype=np.float64)
        self._size = 0

    @classmethod
    def from_solutions(cls, solutions, capacity=None):
        solutions = list(solutions)
        if not solutions:
            raise InvalidInputError('cannot build a population from zero solutions')
        pop = cls(solutions[0].n, capacity or len(solutions))
        for s in solutions:
            pop.append(s)
        return pop

    def append(self, s):
        if self._size >= self.capacity:
            raise InvalidInputError('population is full')
        self._check(s)
        self._bits[self._size] = s.bits
        self._fitness[self._size] = s.fitness
        self._size += 1

    def replace(self, index, s):
        self._check(s)
        self._bits[index] = s.bits
        self._fitness[index] = s.fitness

    def _check(self, s):
        if s.n != self.n:
            raise InvalidInputError(f'solution length {s.n} does not match population n={self.n}')
        if not s.evaluated:
            raise InvalidInputError('only evaluated solutions enter a population')

    @property
    def bits(self):
        """Read-only view of the member bit matrix"""
        view = self._bits[:self._size]
        view.flags.writeable = False
        return view

    @property
    def fitness(self):
        view = self._fitness[:self._size]
        view.flags.writeable = False
        return view

    def best_index(self):
        """Index of the first member with maximum fitness"""
        return int(np.argmax(self._fitness[:self._size]))

    def best(self):
        return self[self.best_index()]

    def is_collapsed(self):
        """True when every member is bit-identical"""
        if self._size <= 1:
            return True
        return bool(np.all(self._bits[:self._size] == self._bits[0]))

    def __len__(self):
        return self._size

    def __getitem__(self, index):
        if index < 0:
            index += self._size
        if not 0 <= index < self._size:
            raise IndexError(index)
        return Solution(self._bits[index], self._fitness[index])

    def __iter__(self):
        for i in range(self._size):
            yield self[i]


class EvaluationCounter:
    """Running count of fitness evaluations; fractional for partial re-evaluation"""

    __slots__ = ('total',)

    def __init__(self):
        self.total = 0.0

    def add(self, amount=1.0):
        self.total += float(amount)

    def __float__(self):
        return float(self.total)
