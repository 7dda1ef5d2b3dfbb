"""
Onemax: separable test objective
"""
from algorithms.core.adf import AdfSpec
from algorithms.problems.problem import Problem


def make_onemax(n):
    """
    One single-variable subfunction per bit, optimum n at all ones

    Args:
        n: String length

    Returns:
        Problem with known optimum n and hill climbing enabled
    """
    adf = AdfSpec(n, [(i,) for i in range(n)], [[0.0, 1.0]] * n)
    return Problem('onemax', n, adf, known_optimum=float(n), local_search='hc', instance_id=f'onemax-n{n}')


def get_problem_info():
    """Return problem metadata"""
    return {
        'name': 'Onemax',
        'category': 'Separable',
        'description': 'Number of ones; solved by bit-flip hill climbing alone.',
        'extension': None,
        'local_search': 'hc',
    }
