"""
Additively decomposable fitness functions
"""
import itertools

import numpy as np

from utils.errors import InvalidInputError


class AdfSpec:
    """
    Objective written as a sum of subfunctions over variable subsets

    Each subfunction is stored as a lookup table with 2^|S_i| entries. The
    first variable of S_i is the most significant bit of the table index.

    Args:
        n: Number of variables
        subsets: Sequence of m variable-index tuples
        tables: Sequence of m tables, table i has 2^len(subsets[i]) entries
    """

    def __init__(self, n, subsets, tables):
        self.n = int(n)
        self.subsets = tuple(tuple(int(v) for v in s) for s in subsets)
        self.tables = tuple(np.asarray(t, dtype=np.float64).reshape(-1) for t in tables)
        self._validate()
        self._build_index()

    @classmethod
    def from_callables(cls, n, subsets, functions):
        """
        Tabulate evaluator callables, each taking a tuple of bits for its subset
        """
        tables = []
        for subset, f in zip(subsets, functions):
            table = [f(assignment) for assignment in itertools.product((0, 1), repeat=len(subset))]
            tables.append(table)
        return cls(n, subsets, tables)

    def _validate(self):
        if self.n < 1:
            raise InvalidInputError(f'ADF needs at least one variable, got n={self.n}')
        if not self.subsets:
            raise InvalidInputError('ADF needs at least one subfunction')
        if len(self.subsets) != len(self.tables):
            raise InvalidInputError('one table per subset is required')
        for k, (subset, table) in enumerate(zip(self.subsets, self.tables)):
            if not subset:
                raise InvalidInputError(f'subset {k} is empty')
            if len(set(subset)) != len(subset):
                raise InvalidInputError(f'subset {k} repeats a variable')
            if min(subset) < 0 or max(subset) >= self.n:
                raise InvalidInputError(f'subset {k} references a variable outside 0..{self.n - 1}')
            if table.size != 1 << len(subset):
                raise InvalidInputError(f'table {k} has {table.size} entries, expected {1 << len(subset)}')

    def _build_index(self):
        m = len(self.subsets)
        self.arity = np.array([len(s) for s in self.subsets], dtype=np.int64)
        width = int(self.arity.max())
        self._vars = np.zeros((m, width), dtype=np.int64)
        self._weights = np.zeros((m, width), dtype=np.int64)
        self._tables = np.zeros((m, 1 << width), dtype=np.float64)
        for k, subset in enumerate(self.subsets):
            r = len(subset)
            self._vars[k, :r] = subset
            self._weights[k, :r] = [1 << (r - 1 - p) for p in range(r)]
            self._tables[k, :1 << r] = self.tables[k]
        self._mask = self._weights > 0

        touching = [[] for _ in range(self.n)]
        for k, subset in enumerate(self.subsets):
            for v in subset:
                touching[v].append(k)
        self._touching = [np.array(t, dtype=np.int64) for t in touching]

    @property
    def m(self):
        return len(self.subsets)

    def touching(self, variable):
        """Indices of subfunctions whose subset contains the variable"""
        return self._touching[variable]

    def table_indices(self, bits, subfunctions=None):
        """Table index of every (selected) subfunction for one bit string"""
        if subfunctions is None:
            return (bits[self._vars] * self._weights).sum(axis=1)
        return (bits[self._vars[subfunctions]] * self._weights[subfunctions]).sum(axis=1)

    def contributions(self, bits, subfunctions=None):
        """Per-subfunction contributions f_i for one bit string"""
        idx = self.table_indices(np.asarray(bits, dtype=np.int64), subfunctions)
        rows = np.arange(self.m) if subfunctions is None else subfunctions
        return self._tables[rows, idx]

    def evaluate_bits(self, bits):
        return float(self.contributions(bits).sum())

    def evaluate_matrix(self, bits):
        """
        Fitness of every row of an N x n bit matrix

        Returns:
            Float array of length N
        """
        bits = np.asarray(bits, dtype=np.int64)
        idx = (bits[:, self._vars] * self._weights).sum(axis=2)
        return self._tables[np.arange(self.m), idx].sum(axis=1)

    def flip_deltas(self, bits, subfunctions):
        """
        Change of each selected subfunction when each of its variables flips

        Returns:
            (vars, deltas): both shaped (len(subfunctions), width); padded
            positions carry a zero delta
        """
        vars_ = self._vars[subfunctions]
        weights = self._weights[subfunctions]
        current = bits[vars_]
        idx = (current * weights).sum(axis=1)
        flipped = idx[:, None] + np.where(current == 1, -weights, weights)
        rows = self._tables[subfunctions]
        before = np.take_along_axis(rows, idx[:, None], axis=1)
        after = np.take_along_axis(rows, flipped, axis=1)
        deltas = np.where(self._mask[subfunctions], after - before, 0.0)
        return vars_, deltas

    def __repr__(self):
        return f'AdfSpec(n={self.n}, m={self.m})'


def evaluate_adf(adf, s):
    """
    Evaluate a solution as the sum of the ADF's subfunction contributions

    Time Complexity: O(sum |S_i|)

    Args:
        adf: AdfSpec
        s: Solution of length adf.n; its fitness is set in place

    Returns:
        The fitness value
    """
    if s.n != adf.n:
        raise InvalidInputError(f'solution has length {s.n}, ADF expects n={adf.n}')
    value = adf.evaluate_bits(s.bits)
    s.set_fitness(value)
    return value
