"""
Binary tournament selection without replacement
"""
from utils.errors import InvalidInputError, InvalidStateError


def binary_tournament_select(pop, count, rng):
    """
    Select `count` winners of binary tournaments

    Each pass shuffles the population and pairs consecutive members, so no
    member meets itself and every member plays at most once per pass. A new
    pass starts when fewer than two members are left in the pool.

    Time Complexity: O(count + N)

    Args:
        pop: Population
        count: Number of winners
        rng: RngStream; also flips the coin for equal fitness

    Returns:
        List of Solution copies
    """
    size = len(pop)
    if size == 0:
        raise InvalidStateError('cannot select from an empty population')
    if count < 1:
        raise InvalidInputError(f'count must be at least 1, got {count}')

    fitness = pop.fitness
    if size == 1:
        return [pop[0] for _ in range(count)]

    winners = []
    pool = []
    while len(winners) < count:
        if len(pool) < 2:
            pool = list(rng.permutation(size))
        a = int(pool.pop())
        b = int(pool.pop())
        if fitness[a] > fitness[b]:
            winners.append(a)
        elif fitness[b] > fitness[a]:
            winners.append(b)
        else:
            winners.append(a if rng.coin() else b)

    return [pop[i] for i in winners]
