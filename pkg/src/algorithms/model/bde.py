"""
Bayesian-Dirichlet scoring of decision-tree networks
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from algorithms.bias.bias_table import log_prior_delta
from utils.errors import InvalidInputError


@dataclass(frozen=True)
class ScoreParams:
    """
    Attributes:
        N: Training-set size
        penalty: Complexity penalty per leaf in log2 units (0.5 log2 N)
        alpha: Dirichlet pseudo-count per target value
    """

    N: int
    penalty: float
    alpha: float = 1.0

    def __post_init__(self):
        if self.N < 1:
            raise InvalidInputError(f'training size must be positive, got {self.N}')
        if self.penalty < 0:
            raise InvalidInputError(f'penalty must be non-negative, got {self.penalty}')

    @classmethod
    def for_size(cls, N, factor=0.5):
        return cls(int(N), factor * math.log2(N) if N > 1 else 0.0)

    @property
    def penalty_nat(self):
        """Penalty per leaf in natural-log units"""
        return self.penalty * math.log(2.0)


def bde_leaf_logscore(m0, m1, alpha=1.0):
    """
    Log marginal likelihood of a leaf's target counts under a Beta(alpha, alpha) prior

    log[ G(2a)/G(2a+m0+m1) * G(a+m0)/G(a) * G(a+m1)/G(a) ]

    Works elementwise on arrays.
    """
    m0 = np.asarray(m0, dtype=np.float64)
    m1 = np.asarray(m1, dtype=np.float64)
    value = (gammaln(2 * alpha) - gammaln(2 * alpha + m0 + m1)
             + gammaln(alpha + m0) - gammaln(alpha)
             + gammaln(alpha + m1) - gammaln(alpha))
    return value if value.ndim else float(value)


def structure_log_prior(net, bias, kappa, dmat):
    """kappa * sum over all splits of log P_k(d, j), k counted per (tree, distance)"""
    if bias is None or kappa == 0:
        return 0.0
    total = 0.0
    for tree in net.trees:
        seen = {}
        for _, variable, _ in tree.split_records():
            d = dmat(variable, tree.target)
            total += kappa * log_prior_delta(bias, tree.target, d, seen.get(d, 0))
            seen[d] = seen.get(d, 0) + 1
    return total


def network_score(net, data, params, bias=None, kappa=0.0, dmat=None):
    """
    Full log score recomputed from scratch

    Sum of leaf BDe terms for data, minus the penalty per leaf, plus the
    kappa-weighted distance prior. Only differences between networks matter.
    """
    data = np.asarray(data, dtype=np.uint8)
    score = 0.0
    leaves = 0
    for tree in net.trees:
        column = data[:, tree.target]
        parts = tree.partition(data)
        for leaf in tree.leaves():
            rows = parts[leaf]
            m1 = int(column[rows].sum())
            score += bde_leaf_logscore(rows.size - m1, m1, params.alpha)
            leaves += 1
    return score - params.penalty_nat * leaves + structure_log_prior(net, bias, kappa, dmat)
