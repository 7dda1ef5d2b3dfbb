"""
Ancestral sampling from a decision-tree network
"""
import numpy as np

from algorithms.core.solution import Solution
from utils.errors import InvalidInputError


def sample_matrix(net, count, rng):
    """
    Draw `count` bit strings as a count x n uint8 matrix

    Variables are filled in topological order; each row takes the leaf its
    already-sampled parents route it to and draws X_j = 1 with the leaf's
    smoothed probability (m1 + 1) / (m0 + m1 + 2). One rng.random(count) call
    per variable.
    """
    if count < 0:
        raise InvalidInputError(f'sample count must be non-negative, got {count}')
    out = np.zeros((count, net.n), dtype=np.uint8)
    for j in net.topological_order():
        tree = net.trees[j]
        u = rng.random(count)
        if tree.nodes[0].is_leaf:
            out[:, j] = u < tree.nodes[0].probability_one()
            continue
        p = np.empty(count)
        for node_id, rows in tree.partition(out).items():
            node = tree.nodes[node_id]
            if node.is_leaf:
                p[rows] = node.probability_one()
        out[:, j] = u < p
    return out


def sample_network(net, count, rng):
    """
    Args:
        net: Acyclic BayesNetDT
        count: Number of samples
        rng: RngStream

    Returns:
        List of unevaluated Solutions
    """
    return [Solution(row) for row in sample_matrix(net, count, rng)]
