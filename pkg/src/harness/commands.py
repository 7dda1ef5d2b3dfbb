"""
Handlers of the command-line subcommands
"""
import logging
from dataclasses import replace
from pathlib import Path

from algorithms.bias.bias_table import compute_pk, load_bias, pool_across_sizes, save_bias
from algorithms.bias.split_stats import accumulate_stats
from algorithms.core.rng import RngStream
from algorithms.graph.distance import compute_distance_matrix
from algorithms.hboa.config import HboaConfig
from algorithms.hboa.hboa import format_trace, run, write_trace
from algorithms.model.dump import load_model_dumps, save_model_dumps
from algorithms.problem_registry import generate_instances, get_problem_family
from algorithms.problems.instance_io import FORMATS, load_instance, save_instance
from harness.bisection import bisect_population, verify_population
from harness.experiments import (crossvalidate, cross_size_transfer, harvest_models, resolve_optimum,
                                 size_instances)
from harness.report import aggregate, read_report, write_report, write_summary
from utils.errors import ConfigurationError, InvalidInputError

logger = logging.getLogger(__name__)


def hboa_config(args, **overrides):
    """HboaConfig from the shared hBOA options"""
    cfg = HboaConfig(population_size=args.population, max_iterations=args.max_iterations,
                     sporadic=args.sporadic, window=args.window,
                     offspring_fraction=args.offspring_fraction, seed=args.seed,
                     harvest=args.harvest, max_splits=args.max_splits, penalty_factor=args.penalty_factor)
    return replace(cfg, **overrides) if overrides else cfg


def instance_paths(paths):
    """Files as given; directories expand to their instance files, sorted"""
    found = []
    for entry in paths or ():
        entry = Path(entry)
        if entry.is_dir():
            found.extend(sorted(p for p in entry.iterdir() if p.suffix in FORMATS))
        elif entry.exists():
            found.append(entry)
        else:
            raise InvalidInputError(f'no such instance file or directory: {entry}')
    return found


def load_problems(paths):
    problems = [load_instance(path) for path in instance_paths(paths)]
    if not problems:
        raise InvalidInputError('no instances given')
    return problems


def _family_parameters(args, family):
    wanted = get_problem_family(family)['parameters']
    return {name: getattr(args, name) for name in wanted if getattr(args, name, None) is not None}


def _generated_or_loaded(args, rng):
    if args.instances:
        return load_problems(args.instances)
    if not args.problem:
        raise InvalidInputError('give --instances or --problem')
    count = args.folds if args.count is None else args.count
    return generate_instances(args.problem, count, rng, **_family_parameters(args, args.problem))


def cmd_gen(args):
    family = get_problem_family(args.family)
    extension = family['info']['extension']
    if extension is None:
        raise ConfigurationError(f'{args.family} instances have no file format')
    if not args.out:
        raise InvalidInputError('gen needs --out')
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    count = 1 if args.count is None else args.count
    problems = generate_instances(args.family, count, RngStream(args.seed),
                                  **_family_parameters(args, args.family))
    for problem in problems:
        save_instance(problem, out / f'{problem.instance_id}{extension}')
    print(f'wrote {len(problems)} instances to {out}')
    return 0


def cmd_run(args):
    if not args.instance:
        raise InvalidInputError('run needs --instance')
    problem = load_instance(args.instance)
    problem = resolve_optimum(problem, RngStream(args.seed).child(3), require=False)
    bias = load_bias(args.bias) if args.bias else None
    cfg = hboa_config(args, kappa=args.kappa, bias=bias)
    result = run(problem, cfg, RngStream(args.seed))
    if args.trace:
        write_trace(result, args.trace)
    else:
        print(format_trace(result), end='')
    if args.models_out:
        save_model_dumps(result.models, args.models_out)
    return 0


def cmd_bisect(args):
    if not args.instance:
        raise InvalidInputError('bisect needs --instance')
    rng = RngStream(args.seed)
    problem = resolve_optimum(load_instance(args.instance), rng.child(3))
    cfg = hboa_config(args, harvest='none')
    result = bisect_population(problem, cfg, rng, trials=args.trials, start=args.start)
    print(f'{problem.instance_id} N={result.population_size} bracket={result.bracket}')
    if args.verify and not verify_population(problem, cfg, result.population_size, rng, args.trials):
        logger.warning('%s: N=%d failed re-verification on fresh seeds', problem.instance_id,
                       result.population_size)
        return 1
    return 0


def cmd_harvest(args):
    if not args.out:
        raise InvalidInputError('harvest needs --out')
    problems = load_problems(args.instances)
    rng = RngStream(args.seed)
    if args.models_in:
        by_id = {p.instance_id: p for p in problems}
        entries = []
        dmats = {}
        for dump in load_model_dumps(args.models_in):
            if dump.instance_id not in by_id:
                raise InvalidInputError(f'model of unknown instance {dump.instance_id!r}')
            if dump.instance_id not in dmats:
                dmats[dump.instance_id] = compute_distance_matrix(by_id[dump.instance_id].adf)
            entries.append((dump, dmats[dump.instance_id]))
    else:
        problems = [resolve_optimum(p, rng.child(3, i)) for i, p in enumerate(problems)]
        cfg = hboa_config(args)
        sizes = size_instances(problems, cfg, rng, args.workers) if args.bisect else None
        entries = harvest_models(problems, cfg, rng, args.workers, sizes)
    if args.models_out:
        save_model_dumps([model for model, _ in entries], args.models_out)

    pooled = args.mode == 'pooled'
    stats = accumulate_stats(entries, allow_mixed_sizes=pooled)
    if stats.model_count == 0:
        raise ConfigurationError('no models harvested')
    table = pool_across_sizes(stats, args.epsilon) if pooled else compute_pk(stats, args.epsilon)
    save_bias(table, args.out)
    print(f'bias table from {stats.model_count} models written to {args.out}')
    return 0


def _write_experiment(report, args):
    write_report(report.rows, args.report, timing=args.timing == 'on')
    if args.summary:
        write_summary(aggregate(report.rows), args.summary)
    for entry in report.summary():
        print(f"{entry['problem']} kappa={entry['kappa']:g}: median evaluation speedup "
              f"{entry['median_speedup_evals']:.3f}, improved {entry['improved_fraction']:.0%}")


def cmd_xval(args):
    rng = RngStream(args.seed)
    problems = _generated_or_loaded(args, rng.child(9))
    cfg = hboa_config(args)
    sizes = size_instances(problems, cfg, rng, args.workers) if args.bisect else None
    report = crossvalidate(problems, cfg, rng, kappas=tuple(args.kappa), folds=args.folds, arm=args.arm,
                           workers=args.workers, sizes=sizes, epsilon=args.epsilon)
    _write_experiment(report, args)
    return 0


def cmd_transfer(args):
    rng = RngStream(args.seed)
    targets = load_problems(args.target)
    sources = load_problems(args.source) if args.source else []
    bias = load_bias(args.bias) if args.bias else None
    cfg = hboa_config(args)
    sizes = size_instances(targets, cfg, rng, args.workers) if args.bisect else None
    report = cross_size_transfer(sources, targets, cfg, rng, kappas=tuple(args.kappa), arm=args.arm,
                                 workers=args.workers, sizes=sizes, epsilon=args.epsilon, bias=bias)
    _write_experiment(report, args)
    return 0


def cmd_report(args):
    rows = []
    for path in args.inputs:
        rows.extend(read_report(path))
    summary = aggregate(rows)
    if args.out:
        write_summary(summary, args.out)
    for entry in summary:
        print(f"{entry['problem']} kappa={entry['kappa']:g} instances={entry['instances']} "
              f"median={entry['median_speedup_evals']:.3f} mean={entry['mean_speedup_evals']:.3f} "
              f"improved={entry['improved_fraction']:.0%}")
    return 0


COMMANDS = {
    'gen': cmd_gen,
    'run': cmd_run,
    'bisect': cmd_bisect,
    'harvest': cmd_harvest,
    'xval': cmd_xval,
    'transfer': cmd_transfer,
    'report': cmd_report,
}
