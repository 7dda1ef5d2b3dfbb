"""
Hierarchical Bayesian optimization algorithm
"""
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from algorithms.core.replacement import default_window, rts_incorporate
from algorithms.core.rng import RngStream
from algorithms.core.selection import binary_tournament_select
from algorithms.core.solution import EvaluationCounter, Population, Solution
from algorithms.graph.distance import compute_distance_matrix
from algorithms.hboa.config import HboaConfig, should_rebuild
from algorithms.model.bde import ScoreParams
from algorithms.model.dump import dump_network
from algorithms.model.learning import learn_network, refit_parameters
from algorithms.model.sampling import sample_matrix
from algorithms.problems.local_search import improve_solution
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TraceRow:
    """One line of a run trace; iteration 0 is the initial population"""

    iteration: int
    best_fitness: float
    evaluations: float
    rebuild: Optional[bool]
    splits: int


@dataclass(frozen=True)
class RunResult:
    """
    Attributes:
        best: Best solution found
        best_fitness: Its fitness
        success: best_fitness reaches the problem's known optimum
        iterations: Completed model-building iterations
        evaluations: Fitness evaluations, fractional for hill climbing
        wall_time: Seconds spent in the run
        population_size: N
        termination: 'optimum', 'collapsed' or 'max_iterations'
        trace: TraceRow per iteration
        models: ModelDumps kept by the harvest policy
        instance_id: Problem instance id
    """

    best: Solution
    best_fitness: float
    success: bool
    iterations: int
    evaluations: float
    wall_time: float
    population_size: int
    termination: str
    trace: tuple = ()
    models: tuple = ()
    instance_id: str = ''


def _prepare(problem, cfg):
    """Validate the configuration against the problem; returns (window, dmat)"""
    n = problem.n
    cfg.check_bias(n)
    window = cfg.window if cfg.window is not None else default_window(n, cfg.population_size)
    if window > cfg.population_size:
        raise ConfigurationError(f'RTS window {window} exceeds population size {cfg.population_size}')
    dmat = compute_distance_matrix(problem.adf) if cfg.bias is not None and cfg.kappa > 0 else None
    return window, dmat


def hboa_steps(problem, cfg, rng, dmat=None):
    """
    hBOA as a generator of per-iteration states

    Time Complexity: per iteration, dominated by greedy model learning

    Args:
        problem: Problem to maximise
        cfg: HboaConfig
        rng: RngStream owned by this run
        dmat: Precomputed DistanceMatrix of the problem (optional)

    Yields:
        Dictionary with 'action' ('init', 'iteration' or 'done'), 'iteration',
        'best', 'best_fitness', 'evaluations', 'rebuild', 'splits', 'model',
        'population' and 'description'; 'done' adds 'reason'
    """
    window, computed = _prepare(problem, cfg)
    dmat = dmat if dmat is not None else computed
    n = problem.n
    N = cfg.population_size
    counter = EvaluationCounter()
    params = ScoreParams.for_size(N, cfg.penalty_factor)
    bias = cfg.bias if cfg.kappa > 0 else None

    pop = Population(n, N)
    for row in rng.bits((N, n)):
        pop.append(improve_solution(problem, Solution(row), rng, counter))
    best = pop.best()

    def state(action, iteration, rebuild, net, description, **extra):
        return dict(action=action, iteration=iteration, best=best, best_fitness=best.fitness,
                    evaluations=counter.total, rebuild=rebuild,
                    splits=net.num_splits() if net is not None else 0, model=net,
                    population=pop, description=description, **extra)

    yield state('init', 0, None, None, f'Initial population of {N}, best fitness {best.fitness}')

    def finished():
        if problem.is_optimal(best.fitness):
            return 'optimum'
        if pop.is_collapsed():
            return 'collapsed'
        return None

    net = None
    iteration = 0
    cap = cfg.iteration_cap(n)
    reason = finished()
    while reason is None and iteration < cap:
        selected = binary_tournament_select(pop, N, rng)
        rebuild = net is None or should_rebuild(iteration, n, cfg.sporadic)
        if rebuild:
            net = learn_network(selected, params, bias, cfg.kappa, dmat, cfg.max_splits)
        else:
            net = refit_parameters(net, selected)

        for row in sample_matrix(net, cfg.offspring_count(), rng):
            child = improve_solution(problem, Solution(row), rng, counter)
            rts_incorporate(pop, child, window, rng)
        iteration += 1

        candidate = pop.best()
        if candidate.fitness > best.fitness:
            best = candidate
        reason = finished()
        yield state('iteration', iteration, rebuild, net,
                    f'Iteration {iteration}: {"rebuilt" if rebuild else "refit"} model with '
                    f'{net.num_splits()} splits, best fitness {best.fitness}')

    reason = reason or 'max_iterations'
    yield state('done', iteration, None, net, f'Stopped after {iteration} iterations ({reason})', reason=reason)


def run(problem, cfg, rng=None, dmat=None):
    """
    Run hBOA to termination

    Stops on the known optimum, on a population of copies of one string, or
    after the iteration cap (n by default).

    Args:
        problem: Problem
        cfg: HboaConfig
        rng: RngStream; RngStream(cfg.seed) when omitted
        dmat: Precomputed DistanceMatrix (optional)

    Returns:
        RunResult

    Raises:
        ConfigurationError: bias table incompatible with the problem, before
            any evaluation takes place
    """
    if not isinstance(cfg, HboaConfig):
        raise ConfigurationError('run() needs an HboaConfig')
    rng = rng if rng is not None else RngStream(cfg.seed)
    started = time.perf_counter()

    trace = []
    models = []
    final = None
    for step in hboa_steps(problem, cfg, rng, dmat):
        logger.debug(step['description'])
        if step['action'] == 'done':
            final = step
            break
        trace.append(TraceRow(step['iteration'], step['best_fitness'], step['evaluations'],
                              step['rebuild'], step['splits']))
        if cfg.harvest == 'all' and step['rebuild']:
            models.append(dump_network(step['model'], problem.instance_id, step['iteration']))

    wall_time = time.perf_counter() - started
    if cfg.harvest == 'final' and final['model'] is not None:
        models.append(dump_network(final['model'], problem.instance_id, final['iteration']))
    elif cfg.harvest == 'all' and final['model'] is not None and not trace[-1].rebuild:
        models.append(dump_network(final['model'], problem.instance_id, final['iteration']))

    result = RunResult(best=final['best'], best_fitness=final['best_fitness'],
                       success=problem.is_optimal(final['best_fitness']), iterations=final['iteration'],
                       evaluations=final['evaluations'], wall_time=wall_time,
                       population_size=cfg.population_size, termination=final['reason'],
                       trace=tuple(trace), models=tuple(models), instance_id=problem.instance_id)
    logger.info('%s: best %s, success %s, %d iterations, %.1f evaluations (%s)',
                problem.instance_id or problem.family, result.best_fitness, result.success,
                result.iterations, result.evaluations, result.termination)
    return result


def format_trace(result):
    """Trace as text: a header line, then one row per iteration"""
    lines = ['# iteration best_fitness evaluations rebuild splits']
    for row in result.trace:
        rebuild = '-' if row.rebuild is None else int(row.rebuild)
        lines.append(f'{row.iteration} {row.best_fitness!r} {row.evaluations!r} {rebuild} {row.splits}')
    lines.append(f'# success={int(result.success)} termination={result.termination} '
                 f'iterations={result.iterations} evaluations={result.evaluations!r}')
    return '\n'.join(lines) + '\n'


def write_trace(result, path):
    Path(path).write_text(format_trace(result))
    return Path(path)
