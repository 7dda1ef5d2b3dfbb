"""
Variable distances from the ADF interaction graph
"""
from collections import deque
from dataclasses import dataclass

import numpy as np

from utils.errors import InvalidInputError


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """
    Shortest-path edge counts between variables; n when no path exists

    Attributes:
        n: Number of variables
        d: n x n uint16 array, read-only
    """

    n: int
    d: np.ndarray

    def __call__(self, i, j):
        return int(self.d[i, j])

    def __eq__(self, other):
        if not isinstance(other, DistanceMatrix):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.d, other.d)


def build_interaction_graph(adf):
    """
    Undirected graph with an edge {i, j} iff some subset holds both

    Args:
        adf: AdfSpec

    Returns:
        Adjacency list: dict mapping every variable to a sorted list of neighbours
    """
    neighbours = {v: set() for v in range(adf.n)}
    for subset in adf.subsets:
        for i in subset:
            for j in subset:
                if i != j:
                    neighbours[i].add(j)
    return {v: sorted(adj) for v, adj in neighbours.items()}


def _bfs_lengths(adj_list, start, n):
    """Edge counts from start by breadth-first search; n marks unreachable"""
    lengths = np.full(n, n, dtype=np.uint16)
    lengths[start] = 0
    queue = deque([start])
    visited = set([start])

    while queue:
        current = queue.popleft()
        for neighbor in adj_list[current]:
            if neighbor not in visited:
                visited.add(neighbor)
                lengths[neighbor] = lengths[current] + 1
                queue.append(neighbor)

    return lengths


def compute_distance_matrix(adf):
    """
    Distance D(X_i, X_j) for all pairs by one breadth-first search per variable

    Time Complexity: O(n (n + E))
    Space Complexity: O(n^2)

    Args:
        adf: AdfSpec

    Returns:
        DistanceMatrix
    """
    n = adf.n
    if n > np.iinfo(np.uint16).max:
        raise InvalidInputError(f'distance matrix supports n <= 65535, got {n}')
    adj_list = build_interaction_graph(adf)
    d = np.empty((n, n), dtype=np.uint16)
    for start in range(n):
        d[start] = _bfs_lengths(adj_list, start, n)
    d.flags.writeable = False
    return DistanceMatrix(n, d)


def dump_distance_matrix(dmat):
    """
    Lower-triangular text listing, one row per variable

    Returns:
        String; row i lists D(i, 0) .. D(i, i-1)
    """
    lines = [f'distance {dmat.n}']
    for i in range(dmat.n):
        lines.append(f'{i}: ' + ' '.join(str(int(v)) for v in dmat.d[i, :i]))
    return '\n'.join(lines) + '\n'
