"""
Bisection of the minimal population size reaching 10 successes out of 10
"""
import logging
from dataclasses import dataclass, replace
from typing import Optional

from algorithms.hboa.hboa import run
from utils.errors import ConfigurationError, UnsolvableAtCapError

logger = logging.getLogger(__name__)

START_SIZE = 32
SIZE_CAP = 2 ** 20
TOLERANCE = 1.05
TRIALS = 10


@dataclass(frozen=True)
class BisectionResult:
    """
    Attributes:
        population_size: Smallest tested N with TRIALS successes
        bracket: (largest failing N or None, population_size)
        trials: Independent runs required to succeed
        tolerance: Bracket ratio at convergence
        mean_evaluations: Mean evaluations of the passing runs at population_size
    """

    population_size: int
    bracket: tuple
    trials: int
    tolerance: float
    mean_evaluations: Optional[float] = None


def _trial_seeds(rng, trials, round_key):
    return [rng.child(round_key, t) for t in range(trials)]


def passes(problem, cfg, N, rngs, runner=run):
    """
    True when every run at population size N succeeds

    Returns:
        (passed, list of RunResults up to the first failure)
    """
    sized = replace(cfg, population_size=N, harvest='none')
    results = []
    for trial_rng in rngs:
        result = runner(problem, sized, trial_rng)
        results.append(result)
        if not result.success:
            return False, results
    return True, results


def bisect_population(problem, cfg, rng, trials=TRIALS, start=START_SIZE, cap=SIZE_CAP,
                      tolerance=TOLERANCE, runner=run):
    """
    Doubling from `start` until all trials succeed, then binary search
    between the last failing and first passing size until high / low <= tolerance

    The same trial seeds are used at every size.

    Args:
        problem: Problem with a known optimum
        cfg: HboaConfig template; population_size is overridden
        rng: RngStream; trial t runs on rng.child(0, t)
        trials: Runs that must all succeed
        start: First population size
        cap: Largest population size tried
        tolerance: Bracket ratio at which the search stops
        runner: Callable (problem, cfg, rng) -> RunResult

    Returns:
        BisectionResult

    Raises:
        ConfigurationError: the problem has no known optimum
        UnsolvableAtCapError: doubling passed the cap without success
    """
    if problem.known_optimum is None:
        raise ConfigurationError('bisection needs a problem with a known optimum')
    rngs = _trial_seeds(rng, trials, 0)

    def mean_evaluations(results):
        return sum(r.evaluations for r in results) / len(results)

    low = None
    high = start
    ok, results = passes(problem, cfg, high, rngs, runner)
    while not ok:
        low = high
        high *= 2
        if high > cap:
            raise UnsolvableAtCapError(f'no population up to {cap} solves {problem.instance_id or problem.family} '
                                       f'{trials}/{trials} times')
        logger.info('bisection doubling: N=%d failed, trying %d', low, high)
        ok, results = passes(problem, cfg, high, rngs, runner)
    best_results = results

    while low is not None and high / low > tolerance:
        mid = (low + high) // 2
        if mid in (low, high):
            break
        ok, results = passes(problem, cfg, mid, rngs, runner)
        if ok:
            high, best_results = mid, results
        else:
            low = mid
        logger.info('bisection bracket (%d, %d]', low, high)

    return BisectionResult(high, (low, high), trials, tolerance, mean_evaluations(best_results))


def verify_population(problem, cfg, N, rng, trials=TRIALS, runner=run):
    """Re-run at N on fresh seeds rng.child(1, t); True when all succeed"""
    ok, _ = passes(problem, cfg, N, _trial_seeds(rng, trials, 1), runner)
    return ok
