"""
Crossvalidated and cross-size transfer experiments
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from algorithms.bias.bias_table import DEFAULT_EPSILON, compute_pk, pool_across_sizes
from algorithms.bias.split_stats import accumulate_stats
from algorithms.core.adf import evaluate_adf
from algorithms.core.rng import RngStream
from algorithms.core.solution import Solution
from algorithms.graph.distance import compute_distance_matrix
from algorithms.hboa.hboa import run
from algorithms.problems.local_search import hill_climb
from algorithms.problems.oracle import brute_force_optimum
from harness.bisection import bisect_population
from harness.report import aggregate, make_row
from harness.speedup import measure_speedup
from utils.errors import ConfigurationError, InvalidInputError, OracleRefusalError

logger = logging.getLogger(__name__)

ARMS = ('dbb', 'smb', 'dbb+smb')
HC_RESTARTS = 200

# Child-stream keys of the master RngStream
_FOLD_KEY, _HARVEST_KEY, _PAIRED_KEY, _ORACLE_KEY, _SIZING_KEY = range(5)


@dataclass(frozen=True)
class ExperimentReport:
    """
    Attributes:
        rows: ReportRow per instance and kappa
        arm: 'dbb' (distance-based bias), 'smb' (sporadic model building) or 'dbb+smb'
        kappas: Bias strengths swept
        folds: instance id -> fold (-1 for cross-size transfer)
        tables: fold -> BiasTable used for it
    """

    rows: tuple
    arm: str
    kappas: tuple
    folds: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)

    def summary(self):
        return aggregate(self.rows)


def hill_climb_prepass(problem, rng, restarts=HC_RESTARTS):
    """Best fitness over `restarts` hill climbs from uniform random strings"""
    best = None
    for _ in range(restarts):
        s = Solution(rng.bits(problem.n))
        evaluate_adf(problem.adf, s)
        value = hill_climb(problem, s).fitness
        best = value if best is None else max(best, value)
    return best


def resolve_optimum(problem, rng=None, require=True, restarts=HC_RESTARTS):
    """
    Attach an optimum to a problem that lacks one

    Known optimum first, then the exact oracle; MAXSAT instances beyond the
    oracle fall back to the best of a multi-restart hill-climbing pre-pass.

    Args:
        problem: Problem
        rng: RngStream for the pre-pass
        require: Re-raise the oracle's refusal instead of returning the
            problem unchanged

    Returns:
        Problem, with known_optimum set when one could be established
    """
    if problem.known_optimum is not None:
        return problem
    try:
        value = brute_force_optimum(problem)
    except OracleRefusalError:
        if problem.family == 'maxsat':
            value = hill_climb_prepass(problem, rng or RngStream(0), restarts)
            logger.info('%s: best-known optimum %s from %d hill climbs', problem.instance_id, value, restarts)
        elif require:
            raise
        else:
            logger.warning('%s: no exact optimum; runs stop on collapse or the iteration cap',
                           problem.instance_id or problem.family)
            return problem
    return problem.with_optimum(value)


def assign_folds(count, folds, rng):
    """
    Random near-equal partition of `count` instances into `folds` folds

    Returns:
        List mapping instance index -> fold

    Raises:
        InvalidInputError: some fold would be empty
    """
    if folds < 2:
        raise InvalidInputError(f'crossvalidation needs at least 2 folds, got {folds}')
    if count < folds:
        raise InvalidInputError(f'{count} instances leave a fold with zero instances ({folds} folds)')
    assignment = [0] * count
    for position, index in enumerate(rng.permutation(count)):
        assignment[int(index)] = position % folds
    return assignment


def _map(fn, jobs, workers):
    """Ordered map, over a process pool when workers > 1"""
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(job) for job in jobs]


def _sized(cfg, problem, sizes):
    if sizes and problem.instance_id in sizes:
        return replace(cfg, population_size=sizes[problem.instance_id])
    return cfg


def _harvest_job(job):
    problem, cfg, seed = job
    result = run(problem, cfg, RngStream(seed))
    return result.success, result.models


def harvest_models(problems, cfg, rng, workers=1, sizes=None):
    """
    Unbiased runs whose final models feed the bias statistics

    Only successful runs contribute.

    Returns:
        List of (ModelDump, DistanceMatrix) per contributing model, in
        instance order
    """
    harvest_cfg = replace(cfg, kappa=0.0, bias=None, sporadic=False,
                          harvest='final' if cfg.harvest == 'none' else cfg.harvest)
    jobs = [(p, _sized(harvest_cfg, p, sizes), rng.child(_HARVEST_KEY, i).seed) for i, p in enumerate(problems)]
    entries = []
    for problem, (success, models) in zip(problems, _map(_harvest_job, jobs, workers)):
        if not success:
            logger.info('%s: harvest run failed, no models kept', problem.instance_id)
            continue
        dmat = compute_distance_matrix(problem.adf)
        entries.extend((model, dmat) for model in models)
    return entries


def paired_runs(problem, base_cfg, treated_cfgs, seed, dmat=None):
    """
    One base run and every treated run on one instance with the same seed,
    back to back in this process

    Returns:
        (base RunResult, list of (treated RunResult, Speedup) in treated_cfgs order)
    """
    dmat = dmat if dmat is not None else compute_distance_matrix(problem.adf)
    base = run(problem, base_cfg, RngStream(seed), dmat)
    pairs = []
    for treated_cfg in treated_cfgs:
        treated = run(problem, treated_cfg, RngStream(seed), dmat)
        pairs.append((treated, measure_speedup(base, treated)))
    return base, pairs


def _paired_job(job):
    problem, base_cfg, treatments, seed, fold = job
    base, pairs = paired_runs(problem, base_cfg, [cfg for _, cfg in treatments], seed)
    return [make_row(problem, kappa, fold, base, treated, speedup)
            for (kappa, _), (treated, speedup) in zip(treatments, pairs)]


def _treatments(base_cfg, arm, kappas, table):
    if arm == 'smb':
        return [(0.0, replace(base_cfg, sporadic=True))]
    sporadic = arm == 'dbb+smb'
    return [(float(k), replace(base_cfg, kappa=float(k), bias=table, sporadic=sporadic)) for k in kappas]


def _check_arm(arm, kappas):
    if arm not in ARMS:
        raise InvalidInputError(f'unknown arm {arm!r}; choose from {ARMS}')
    if arm != 'smb' and (not kappas or min(kappas) <= 0):
        raise InvalidInputError(f'biased arms need positive kappas, got {kappas}')


def _check_unique(problems):
    ids = [p.instance_id for p in problems]
    if len(set(ids)) != len(ids) or '' in ids:
        raise InvalidInputError('instances need distinct, non-empty ids')
    return ids


def size_instances(problems, cfg, rng, workers=1):
    """Bisected population size per instance id; optima are resolved first"""
    problems = [resolve_optimum(p, rng.child(_ORACLE_KEY, i)) for i, p in enumerate(problems)]
    jobs = [(p, cfg, rng.child(_SIZING_KEY, i).seed) for i, p in enumerate(problems)]
    return dict(zip((p.instance_id for p in problems), _map(_size_job, jobs, workers)))


def _size_job(job):
    problem, cfg, seed = job
    return bisect_population(problem, cfg, RngStream(seed)).population_size


def crossvalidate(problems, cfg, rng, kappas=(5,), folds=10, arm='dbb', workers=1, sizes=None,
                  epsilon=DEFAULT_EPSILON, bias_override=None):
    """
    k-fold crossvalidated transfer on same-size instances

    Each fold's bias table is computed from the final models of runs on the
    other folds' instances only; every instance is then run unbiased and
    biased with the same seed, one after the other in the same process.

    Args:
        problems: Problems with distinct instance ids
        cfg: Base HboaConfig (kappa 0)
        rng: Master RngStream
        kappas: Bias strengths to sweep
        folds: Number of folds
        arm: 'dbb', 'smb' or 'dbb+smb'
        workers: Process-pool size for instance jobs
        sizes: Optional instance id -> population size
        epsilon: Floor of the bias tables
        bias_override: Table used for every fold instead of harvesting

    Returns:
        ExperimentReport
    """
    _check_arm(arm, kappas)
    ids = _check_unique(problems)
    problems = [resolve_optimum(p, rng.child(_ORACLE_KEY, i), require=False) for i, p in enumerate(problems)]
    assignment = assign_folds(len(problems), folds, rng.child(_FOLD_KEY))

    tables = {}
    if arm != 'smb':
        if bias_override is not None:
            tables = {f: bias_override for f in range(folds)}
        else:
            harvested = harvest_models(problems, cfg, rng, workers, sizes)
            for f in range(folds):
                held_out = {ids[i] for i in range(len(ids)) if assignment[i] == f}
                entries = [(m, d) for m, d in harvested if m.instance_id not in held_out]
                if not entries:
                    raise ConfigurationError(f'no successful harvest runs outside fold {f}; '
                                             'increase the population size')
                tables[f] = compute_pk(accumulate_stats(entries), epsilon)
                logger.info('fold %d: bias from %d models', f, len(entries))

    jobs = []
    for i, problem in enumerate(problems):
        base = _sized(replace(cfg, kappa=0.0, bias=None, sporadic=False, harvest='none'), problem, sizes)
        jobs.append((problem, base, _treatments(base, arm, kappas, tables.get(assignment[i])),
                     rng.child(_PAIRED_KEY, i).seed, assignment[i]))
    rows = [row for batch in _map(_paired_job, jobs, workers) for row in batch]
    used = (0.0,) if arm == 'smb' else tuple(float(k) for k in kappas)
    return ExperimentReport(tuple(rows), arm, used, dict(zip(ids, assignment)), tables)


def cross_size_transfer(sources, targets, cfg, rng, kappas=(5,), arm='dbb', workers=1, sizes=None,
                        epsilon=DEFAULT_EPSILON, bias=None):
    """
    Bias pooled over smaller source instances applied to larger targets

    Args:
        sources: Problems the statistics are harvested from
        targets: Problems that are run unbiased and biased
        bias: Prebuilt table used instead of harvesting; a per-(d, j)
            table of another size fails with a configuration error

    Returns:
        ExperimentReport with fold -1 on every row
    """
    _check_arm(arm, kappas)
    source_ids = set(_check_unique(sources)) if sources else set()
    target_ids = _check_unique(targets)
    if source_ids & set(target_ids):
        raise InvalidInputError('source and target instances overlap')
    if sources and max(p.n for p in sources) > min(p.n for p in targets):
        raise InvalidInputError('source instances must not be larger than the targets')

    if arm != 'smb' and bias is None:
        if not sources:
            raise InvalidInputError('cross-size transfer needs source instances or a bias table')
        sources = [resolve_optimum(p, rng.child(_ORACLE_KEY, i)) for i, p in enumerate(sources)]
        entries = harvest_models(sources, cfg, rng, workers, sizes)
        if not entries:
            raise ConfigurationError('no successful source runs to harvest; increase the population size')
        bias = pool_across_sizes(accumulate_stats(entries, allow_mixed_sizes=True), epsilon)
        logger.info('pooled bias from %d source models (source n=%d)', len(entries), bias.source_n)
    if arm != 'smb':
        for problem in targets:
            bias.check_compatible(problem.n)

    targets = [resolve_optimum(p, rng.child(_ORACLE_KEY, 1000 + i), require=False) for i, p in enumerate(targets)]
    jobs = []
    for i, problem in enumerate(targets):
        base = _sized(replace(cfg, kappa=0.0, bias=None, sporadic=False, harvest='none'), problem, sizes)
        jobs.append((problem, base, _treatments(base, arm, kappas, bias), rng.child(_PAIRED_KEY, i).seed, -1))
    rows = [row for batch in _map(_paired_job, jobs, workers) for row in batch]
    used = (0.0,) if arm == 'smb' else tuple(float(k) for k in kappas)
    return ExperimentReport(tuple(rows), arm, used, {t: -1 for t in target_ids}, {-1: bias})
