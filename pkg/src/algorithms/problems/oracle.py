"""
Exact optima for desk-scale instances
"""
import logging

import numpy as np

from algorithms.problems.spin_glass import layer_optimum
from algorithms.problems.vertex_cover import min_vertex_cover
from utils.errors import OracleRefusalError

logger = logging.getLogger(__name__)

EXHAUSTIVE_MAX_N = 30
BRANCH_AND_BOUND_MAX_N = 60
_CHUNK_BITS = 16


def exhaustive_optimum(adf, max_n=EXHAUSTIVE_MAX_N):
    """
    Maximum of the ADF over all 2^n bit strings, enumerated in chunks

    Returns:
        (optimum fitness, one optimal bit array)
    """
    n = adf.n
    if n > max_n:
        raise OracleRefusalError(f'exhaustive search refuses n={n} > {max_n}')
    chunk = 1 << min(n, _CHUNK_BITS)
    shifts = np.arange(n - 1, -1, -1)
    best_value, best_bits = -np.inf, None
    for start in range(0, 1 << n, chunk):
        states = np.arange(start, start + chunk, dtype=np.int64)
        bits = (states[:, None] >> shifts) & 1
        values = adf.evaluate_matrix(bits)
        k = int(np.argmax(values))
        if values[k] > best_value:
            best_value, best_bits = float(values[k]), bits[k].astype(np.uint8)
    return best_value, best_bits


def brute_force_optimum(problem):
    """
    Exact optimum fitness of a problem

    Vertex cover uses branch and bound (n <= 60), L=3 spin glasses the layer
    dynamic programme, MAXSAT its colouring certificate when present, and
    anything else exhaustive enumeration (n <= 30).

    Raises:
        OracleRefusalError: instance exceeds every exact method's cap
    """
    family = problem.family
    if family == 'mvc':
        cover = min_vertex_cover(problem.instance, max_n=BRANCH_AND_BOUND_MAX_N)
        return -float(len(cover))
    if family == 'spin' and problem.instance.L == 3:
        return layer_optimum(problem.instance)
    if family == 'onemax':
        return float(problem.n)
    if family == 'maxsat' and problem.instance.known_optimum is not None:
        return float(problem.instance.known_optimum)
    value, _ = exhaustive_optimum(problem.adf)
    logger.debug('Exhaustive optimum of %s: %s', problem.instance_id or family, value)
    return value
