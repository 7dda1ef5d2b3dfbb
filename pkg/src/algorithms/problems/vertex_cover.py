"""
Minimum vertex cover on random graphs with fixed edge-to-node ratio
"""
import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from algorithms.core.adf import AdfSpec
from algorithms.core.solution import Solution
from algorithms.problems.problem import Problem
from utils.errors import InvalidInputError, OracleRefusalError


@dataclass(frozen=True)
class VertexCoverInstance:
    """
    Undirected simple graph; bit v = 1 puts vertex v in the cover

    Attributes:
        n: Vertex count
        edges: Sorted tuple of (u, v) pairs with u < v
        c: Edges-to-vertices ratio the graph was drawn with
    """

    n: int
    edges: tuple
    c: float

    @cached_property
    def adjacency(self):
        """Neighbour tuple per vertex"""
        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def edge_array(self):
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)


def make_graph(n, edges, c=None):
    """Normalise an edge list into a VertexCoverInstance"""
    normalised = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise InvalidInputError(f'self-loop on vertex {u}')
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidInputError(f'edge ({u}, {v}) outside 0..{n - 1}')
        pair = (min(u, v), max(u, v))
        if pair in normalised:
            raise InvalidInputError(f'duplicate edge {pair}')
        normalised.add(pair)
    if c is None:
        c = len(normalised) / n if n else 0.0
    return VertexCoverInstance(int(n), tuple(sorted(normalised)), float(c))


def gen_mvc(n, c, rng):
    """
    Draw round(c n) distinct edges uniformly from all vertex pairs

    Args:
        n: Vertex count
        c: Edges-to-vertices ratio
        rng: RngStream

    Returns:
        VertexCoverInstance
    """
    m = int(round(c * n))
    pairs = list(itertools.combinations(range(n), 2))
    if m > len(pairs) or m < 0:
        raise InvalidInputError(f'cannot place {m} edges on {n} vertices (max {len(pairs)})')
    chosen = rng.choice(len(pairs), size=m, replace=False) if m else []
    return make_graph(n, [pairs[int(k)] for k in chosen], c)


def vertex_cover_adf(inst):
    """
    -x_v per vertex plus a penalty of n + 1 per uncovered edge

    On feasible covers the fitness is -(cover size).
    """
    penalty = float(inst.n + 1)
    subsets = [(v,) for v in range(inst.n)]
    tables = [[0.0, -1.0]] * inst.n
    for u, v in inst.edges:
        subsets.append((u, v))
        tables.append([-penalty, 0.0, 0.0, 0.0])
    return AdfSpec(inst.n, subsets, tables)


def vertex_cover_problem(inst, instance_id=''):
    return Problem('mvc', inst, vertex_cover_adf(inst), local_search='repair', instance_id=instance_id)


def is_cover(inst, bits):
    edges = inst.edge_array
    if edges.size == 0:
        return True
    return bool(np.all((bits[edges[:, 0]] == 1) | (bits[edges[:, 1]] == 1)))


def repair_cover(inst, s, rng):
    """
    Turn any bit string into a feasible, inclusion-minimal cover

    Phase 1 repeatedly picks an uncovered edge uniformly at random and adds
    one of its endpoints by a fair coin. Phase 2 visits the vertices in
    random order and drops every vertex whose neighbours are all covered.

    Args:
        inst: VertexCoverInstance
        s: Solution of length inst.n
        rng: RngStream

    Returns:
        New Solution with fitness -(cover size)
    """
    if s.n != inst.n:
        raise InvalidInputError(f'solution has length {s.n}, graph has {inst.n} vertices')
    bits = np.array(s.bits, dtype=np.uint8)
    edges = inst.edge_array

    if edges.size:
        uncovered = np.flatnonzero((bits[edges[:, 0]] == 0) & (bits[edges[:, 1]] == 0))
        while uncovered.size:
            u, v = edges[uncovered[int(rng.integers(0, uncovered.size))]]
            bits[u if rng.coin() else v] = 1
            uncovered = uncovered[(bits[edges[uncovered, 0]] == 0) & (bits[edges[uncovered, 1]] == 0)]

    adjacency = inst.adjacency
    for v in rng.permutation(inst.n):
        if bits[v] and all(bits[u] for u in adjacency[v]):
            bits[v] = 0

    return Solution(bits, -float(bits.sum()))


def _greedy_matching_size(graph):
    matched = set()
    size = 0
    for v in sorted(graph):
        if v in matched:
            continue
        for u in sorted(graph[v]):
            if u not in matched:
                matched.update((u, v))
                size += 1
                break
    return size


def _without(graph, removed):
    reduced = {}
    for v, neighbours in graph.items():
        if v in removed:
            continue
        rest = neighbours - removed
        if rest:
            reduced[v] = rest
    return reduced


def min_vertex_cover(inst, max_n=60):
    """
    Exact minimum vertex cover by branch and bound

    Branches on a maximum-degree vertex (take it, or take all of its
    neighbours), forces the neighbour of any degree-1 vertex and prunes
    with a greedy maximal-matching lower bound.

    Args:
        inst: VertexCoverInstance
        max_n: Refuse larger graphs

    Returns:
        Sorted tuple of cover vertices
    """
    if inst.n > max_n:
        raise OracleRefusalError(f'branch and bound refuses n={inst.n} > {max_n}')

    graph = {v: set(neighbours) for v, neighbours in enumerate(inst.adjacency) if neighbours}
    best = [set(v for e in inst.edges for v in e)]

    def search(graph, cover):
        if not graph:
            if len(cover) < len(best[0]):
                best[0] = set(cover)
            return
        if len(cover) + _greedy_matching_size(graph) >= len(best[0]):
            return

        for v in sorted(graph):
            if len(graph[v]) == 1:
                u = next(iter(graph[v]))
                search(_without(graph, {u}), cover | {u})
                return

        v = max(sorted(graph), key=lambda x: len(graph[x]))
        search(_without(graph, {v}), cover | {v})
        neighbours = set(graph[v])
        search(_without(graph, neighbours | {v}), cover | neighbours)

    search(graph, frozenset())
    return tuple(sorted(best[0]))


def get_problem_info():
    """Return problem metadata"""
    return {
        'name': 'Minimum Vertex Cover',
        'category': 'Graph',
        'description': 'Smallest vertex set touching every edge of a random graph with |E| = c n.',
        'extension': '.graph',
        'local_search': 'repair',
    }
