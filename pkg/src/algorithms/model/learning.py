"""
Greedy split learning of decision-tree Bayesian networks
"""
import logging
from collections import deque

import numpy as np

from algorithms.bias.bias_table import log_prior_delta
from algorithms.model.bde import ScoreParams, bde_leaf_logscore
from algorithms.model.decision_tree import BayesNetDT
from utils.errors import IllegalSplitError, InvalidInputError

logger = logging.getLogger(__name__)

# Gains are compared after rounding so that float noise cannot break ties
_GAIN_DECIMALS = 10


def as_matrix(selected):
    """N x n uint8 matrix from a list of Solutions or an array"""
    if isinstance(selected, np.ndarray):
        data = selected
    else:
        selected = list(selected)
        if not selected:
            raise InvalidInputError('cannot learn from an empty selection')
        lengths = {s.n for s in selected}
        if len(lengths) != 1:
            raise InvalidInputError(f'selected solutions have mixed lengths {sorted(lengths)}')
        data = np.stack([s.bits for s in selected])
    if data.ndim != 2 or data.shape[0] == 0:
        raise InvalidInputError('training data must be a non-empty N x n matrix')
    return np.ascontiguousarray(data, dtype=np.uint8)


def _check_bias(bias, kappa, dmat, n):
    if kappa < 0:
        raise InvalidInputError(f'kappa must be non-negative, got {kappa}')
    if bias is not None and kappa > 0:
        if dmat is None:
            raise InvalidInputError('a distance matrix is required with a bias table')
        if dmat.n != n:
            raise InvalidInputError(f'distance matrix has n={dmat.n}, data has n={n}')


def _reaches(network, source, target):
    """True iff target is reachable from source along parent -> child edges"""
    children = [[] for _ in range(network.n)]
    for i, j in network.edges():
        children[i].append(j)
    queue = deque([source])
    visited = {source}
    while queue:
        current = queue.popleft()
        if current == target:
            return True
        for nxt in children[current]:
            if nxt not in visited:
                visited.add(nxt)
                queue.append(nxt)
    return False


def _child_counts(column, bits):
    """((m0, m1) for variable = 0, (m0, m1) for variable = 1) of a leaf"""
    ones = bits == 1
    c11 = int(column[ones].sum())
    c01 = int(column[~ones].sum())
    n1 = int(ones.sum())
    n0 = int(column.size - n1)
    return (n0 - c01, c01), (n1 - c11, c11)


def split_gain(tree, leaf, candidate, data, params=None, bias=None, kappa=0.0, dmat=None, network=None):
    """
    Change in network score from splitting `leaf` of `tree` on `candidate`

    The BDe terms of the two children replace the leaf's, one more leaf pays
    the complexity penalty, and with a bias the split adds
    kappa * log P_k(d, j) for d = D(candidate, j) and k = 1 + the number of
    splits already in the tree at distance d.

    Args:
        tree: DecisionTree for target j
        leaf: Leaf node id
        candidate: Split variable i
        data: N x n training matrix (or list of Solutions)
        params: ScoreParams; derived from N when omitted
        bias: Optional BiasTable
        kappa: Bias strength
        dmat: DistanceMatrix, required with a bias
        network: Enclosing BayesNetDT; when given the split is checked for cycles

    Returns:
        float gain

    Raises:
        IllegalSplitError: target or path variable, or a cycle in network
    """
    data = as_matrix(data)
    params = params or ScoreParams.for_size(data.shape[0])
    _check_bias(bias, kappa, dmat, data.shape[1])
    j = tree.target
    if not tree.nodes[leaf].is_leaf:
        raise IllegalSplitError(f'node {leaf} of tree {j} is not a leaf')
    if candidate == j or candidate in tree.path_variables(leaf):
        raise IllegalSplitError(f'variable {candidate} cannot split leaf {leaf} of tree {j}')
    if network is not None and _reaches(network, j, candidate):
        raise IllegalSplitError(f'edge {candidate} -> {j} would close a cycle')

    rows = tree.partition(data)[leaf]
    column = data[rows, j]
    (a0, a1), (b0, b1) = _child_counts(column, data[rows, candidate])
    m1 = int(column.sum())
    gain = (bde_leaf_logscore(a0, a1, params.alpha) + bde_leaf_logscore(b0, b1, params.alpha)
            - bde_leaf_logscore(rows.size - m1, m1, params.alpha) - params.penalty_nat)
    if bias is not None and kappa:
        d = dmat(candidate, j)
        k_prev = sum(1 for _, variable in tree.splits if dmat(variable, j) == d)
        gain += kappa * log_prior_delta(bias, j, d, k_prev)
    return gain


class GreedyLearner:
    """
    Applies the globally best positive-gain legal split until none remains

    Every leaf caches its training rows and the raw gain of each candidate
    variable (BDe change minus penalty, -inf where the variable is the target
    or already on the path). The distance bias enters per (tree, candidate)
    and changes only when that tree gains a split. Legality is read from a
    reachability matrix of the parent graph: i may split in T_j iff j does
    not reach i.

    Ties go to the lowest target j, then the lowest split variable i, then
    the oldest leaf.
    """

    def __init__(self, data, params, bias=None, kappa=0.0, dmat=None):
        self.data = data
        self.N, self.n = data.shape
        self.params = params
        self.bias = bias if (bias is not None and kappa) else None
        self.kappa = float(kappa)
        self.dmat = dmat
        self.net = BayesNetDT.empty(self.n)
        self.reach = np.zeros((self.n, self.n), dtype=bool)
        self.split_counts = np.zeros((self.n, self.n + 1), dtype=np.int64)
        self.leaf_rows = [dict() for _ in range(self.n)]
        self.leaf_gains = [dict() for _ in range(self.n)]
        self.bias_vec = np.zeros((self.n, self.n))
        self.best = [None] * self.n

        all_rows = np.arange(self.N)
        for j, tree in enumerate(self.net.trees):
            m1 = int(data[:, j].sum())
            tree.nodes[0].m0, tree.nodes[0].m1 = self.N - m1, m1
            self._cache_leaf(j, 0, all_rows)
            self._refresh_bias(j)
            self._refresh_best(j)

    def _cache_leaf(self, j, leaf, rows):
        tree = self.net.trees[j]
        node = tree.nodes[leaf]
        X = self.data[rows]
        y = X[:, j].astype(bool)
        n1 = X.sum(axis=0, dtype=np.int64)
        c11 = X[y].sum(axis=0, dtype=np.int64)
        c01 = int(y.sum()) - c11
        n0 = rows.size - n1
        alpha = self.params.alpha
        raw = (bde_leaf_logscore(n0 - c01, c01, alpha) + bde_leaf_logscore(n1 - c11, c11, alpha)
               - bde_leaf_logscore(node.m0, node.m1, alpha) - self.params.penalty_nat)
        raw = np.atleast_1d(np.asarray(raw, dtype=np.float64)).copy()
        raw[j] = -np.inf
        for variable in tree.path_variables(leaf):
            raw[variable] = -np.inf
        self.leaf_rows[j][leaf] = rows
        self.leaf_gains[j][leaf] = raw

    def _refresh_bias(self, j):
        if self.bias is None:
            return
        for i in range(self.n):
            if i == j:
                continue
            d = self.dmat(i, j)
            self.bias_vec[j, i] = self.kappa * log_prior_delta(self.bias, j, d, int(self.split_counts[j, d]))

    def _refresh_best(self, j):
        """Cache (gain, i, leaf) of the best legal split in T_j, or None"""
        leaves = sorted(self.leaf_gains[j])
        grid = np.round(np.stack([self.leaf_gains[j][leaf] for leaf in leaves]) + self.bias_vec[j],
                        _GAIN_DECIMALS)
        grid[:, self.reach[j]] = -np.inf
        # candidate-major order: lowest i first, then oldest leaf
        flat = int(np.argmax(grid.T))
        i, position = divmod(flat, len(leaves))
        gain = grid[position, i]
        self.best[j] = (float(gain), i, leaves[position]) if np.isfinite(gain) else None

    def _add_edge(self, i, j):
        sources = self.reach[:, i].copy()
        sources[i] = True
        targets = self.reach[j].copy()
        targets[j] = True
        self.reach |= np.outer(sources, targets)

    def step(self):
        """
        Apply the best split if its gain is positive

        Returns:
            (j, i, leaf, gain) of the applied split, or None when learning is done
        """
        choice = None
        for j, best in enumerate(self.best):
            if best is not None and (choice is None or best[0] > choice[0]):
                choice = (best[0], best[1], best[2], j)
        if choice is None or choice[0] <= 0:
            return None
        gain, i, leaf, j = choice

        tree = self.net.trees[j]
        rows = self.leaf_rows[j].pop(leaf)
        del self.leaf_gains[j][leaf]
        bits = self.data[rows, i]
        counts0, counts1 = _child_counts(self.data[rows, j], bits)
        child0, child1 = tree.split_leaf(leaf, i, counts0, counts1)
        self._cache_leaf(j, child0, rows[bits == 0])
        self._cache_leaf(j, child1, rows[bits == 1])

        self._add_edge(i, j)
        if self.dmat is not None:
            self.split_counts[j, self.dmat(i, j)] += 1
        self._refresh_bias(j)
        self._refresh_best(j)
        for other, best in enumerate(self.best):
            if other != j and best is not None and self.reach[other, best[1]]:
                self._refresh_best(other)

        logger.debug('split T_%d on X_%d at leaf %d (gain %.6f)', j, i, leaf, gain)
        return j, i, leaf, gain

    def run(self, max_splits=None):
        applied = 0
        while max_splits is None or applied < max_splits:
            if self.step() is None:
                break
            applied += 1
        return self.net


def learn_network(selected, params=None, bias=None, kappa=0.0, dmat=None, max_splits=None):
    """
    Learn a network from selected solutions by greedy splitting

    Args:
        selected: List of Solutions (or an N x n bit matrix)
        params: ScoreParams; defaults to ScoreParams.for_size(N)
        bias: Optional BiasTable; ignored when kappa is 0
        kappa: Bias strength (>= 0)
        dmat: DistanceMatrix of the instance, required with a bias
        max_splits: Optional cap on accepted splits

    Returns:
        BayesNetDT with leaf counts of the training data
    """
    data = as_matrix(selected)
    params = params or ScoreParams.for_size(data.shape[0])
    _check_bias(bias, kappa, dmat, data.shape[1])
    net = GreedyLearner(data, params, bias, kappa, dmat).run(max_splits)
    logger.debug('learned network with %d splits from %d rows', net.num_splits(), data.shape[0])
    return net


def refit_parameters(net, selected):
    """
    Same structure, leaf counts recomputed from selected

    Returns:
        New BayesNetDT; net is left untouched
    """
    data = as_matrix(selected)
    if data.shape[1] != net.n:
        raise InvalidInputError(f'network has n={net.n}, data has n={data.shape[1]}')
    refit = net.copy()
    for tree in refit.trees:
        tree.set_counts(data)
    return refit
