"""
Restricted tournament replacement (niching)
"""
import numpy as np

from utils.errors import InvalidInputError


def default_window(n, population_size):
    """RTS window w = min(n, N/20), at least 1"""
    return max(1, min(int(n), int(population_size) // 20))


def rts_incorporate(pop, cand, window, rng):
    """
    Let a candidate compete against its nearest member of a random window

    Draws `window` members without replacement, finds the one closest to
    the candidate in Hamming distance (ties go to the first drawn) and
    replaces it if the candidate is strictly fitter.

    Args:
        pop: Population (modified in place)
        cand: Evaluated Solution
        window: Window size w, 1 <= w <= |pop|
        rng: RngStream

    Returns:
        True if a member was replaced
    """
    if not 1 <= window <= len(pop):
        raise InvalidInputError(f'RTS window {window} outside 1..{len(pop)}')
    if not cand.evaluated:
        raise InvalidInputError('RTS candidate must be evaluated')

    drawn = rng.choice(len(pop), size=window, replace=False)
    distances = np.count_nonzero(pop.bits[drawn] != cand.bits, axis=1)
    nearest = int(drawn[int(np.argmin(distances))])

    if cand.fitness > pop.fitness[nearest]:
        pop.replace(nearest, cand)
        return True
    return False
