"""
Tests for the hBOA loop, its configuration and run traces
"""
import pytest

from algorithms.bias.bias_table import BiasTable, all_ones_table
from algorithms.core.rng import RngStream
from algorithms.hboa.config import HboaConfig, delay_for, should_rebuild
from algorithms.hboa.hboa import format_trace, hboa_steps, run, write_trace
from algorithms.problems.onemax import make_onemax
from algorithms.problems.spin_glass import gen_spin_glass, layer_optimum, spin_glass_problem
from algorithms.problems.vertex_cover import gen_mvc, min_vertex_cover, vertex_cover_problem
from utils.errors import ConfigurationError


def plain_onemax(n=30):
    """Onemax without hill climbing, so hBOA has to iterate"""
    return make_onemax(n).with_local_search('none')


def small_mvc(seed=0, n=20):
    inst = gen_mvc(n, 2.0, RngStream(seed))
    return vertex_cover_problem(inst, f'mvc-{seed}').with_optimum(-len(min_vertex_cover(inst)))


# --- sporadic schedule ------------------------------------------------------------

def test_rebuild_every_iteration_without_sporadic():
    assert all(should_rebuild(t, 64, False) for t in range(20))


def test_sporadic_delay_for_n_64():
    assert delay_for(64) == 4
    assert [t for t in range(13) if should_rebuild(t, 64, True)] == [0, 4, 8, 12]


def test_sporadic_delay_for_n_200():
    assert delay_for(200) == 8
    assert delay_for(1) == 1


def test_negative_iteration_is_rejected():
    with pytest.raises(ConfigurationError):
        should_rebuild(-1, 10, True)


# --- configuration ------------------------------------------------------------------

@pytest.mark.parametrize('kwargs', [
    dict(population_size=1),
    dict(max_iterations=0),
    dict(kappa=-1.0),
    dict(kappa=5.0),
    dict(window=0),
    dict(offspring_fraction=0.0),
    dict(offspring_fraction=1.5),
    dict(harvest='some'),
    dict(max_splits=-1),
    dict(penalty_factor=-0.1),
])
def test_invalid_configurations(kwargs):
    with pytest.raises(ConfigurationError):
        HboaConfig(**kwargs)


def test_config_derived_values():
    cfg = HboaConfig(population_size=41)
    assert cfg.iteration_cap(27) == 27
    assert cfg.offspring_count() == 20
    assert HboaConfig(population_size=2, offspring_fraction=0.1).offspring_count() == 1
    assert HboaConfig(max_iterations=5).iteration_cap(27) == 5


def test_incompatible_bias_fails_before_any_evaluation(monkeypatch):
    def never(*args, **kwargs):
        raise AssertionError('evaluated before the bias was checked')

    monkeypatch.setattr('algorithms.hboa.hboa.improve_solution', never)
    table = BiasTable('pair', {(1, 0): (0.5,)}, 1e-4, 10)
    with pytest.raises(ConfigurationError):
        run(make_onemax(20), HboaConfig(kappa=5.0, bias=table))


def test_window_larger_than_population_is_rejected():
    with pytest.raises(ConfigurationError):
        run(make_onemax(10), HboaConfig(population_size=4, window=5))


def test_run_needs_a_config():
    with pytest.raises(ConfigurationError):
        run(make_onemax(10), {'population_size': 10})


# --- runs -----------------------------------------------------------------------------

def test_hill_climbing_solves_onemax_in_the_initial_population():
    result = run(make_onemax(20), HboaConfig(population_size=20), RngStream(1))
    assert result.success
    assert result.iterations == 0
    assert result.termination == 'optimum'
    assert result.best_fitness == 20.0
    assert result.models == ()
    assert len(result.trace) == 1


def test_onemax_without_local_search_improves_through_the_model():
    result = run(plain_onemax(30), HboaConfig(population_size=120), RngStream(2))
    assert result.iterations >= 1
    assert result.best_fitness > result.trace[0].best_fitness


def test_zero_kappa_and_all_ones_bias_give_identical_traces():
    problem = plain_onemax(30)
    base = run(problem, HboaConfig(population_size=60), RngStream(3))
    biased = run(problem, HboaConfig(population_size=60, kappa=5.0, bias=all_ones_table(30)), RngStream(3))
    assert base.trace == biased.trace
    assert base.evaluations == biased.evaluations
    assert list(base.best.bits) == list(biased.best.bits)


def test_same_seed_reproduces_the_run():
    problem = small_mvc(1)
    cfg = HboaConfig(population_size=50)
    first, second = run(problem, cfg, RngStream(4)), run(problem, cfg, RngStream(4))
    assert first.trace == second.trace
    assert first.models == second.models
    assert format_trace(first) == format_trace(second)


def test_seed_from_config_when_no_stream_is_given():
    problem = plain_onemax(20)
    cfg = HboaConfig(population_size=30, seed=9)
    assert run(problem, cfg).trace == run(problem, cfg, RngStream(9)).trace


def test_best_fitness_never_decreases_and_iterations_are_capped():
    problem = plain_onemax(25)
    result = run(problem, HboaConfig(population_size=16), RngStream(5))
    fitness = [row.best_fitness for row in result.trace]
    assert fitness == sorted(fitness)
    assert result.iterations <= problem.n
    assert result.termination in ('optimum', 'collapsed', 'max_iterations')

    capped = run(problem, HboaConfig(population_size=16, max_iterations=2), RngStream(5))
    assert capped.iterations <= 2


def test_evaluations_grow_with_every_iteration():
    result = run(plain_onemax(30), HboaConfig(population_size=40), RngStream(6))
    evaluations = [row.evaluations for row in result.trace]
    assert evaluations[0] == 40
    assert all(b - a == 20 for a, b in zip(evaluations, evaluations[1:]))


def test_run_without_optimum_stops_on_cap_or_collapse():
    problem = plain_onemax(12).with_optimum(None)
    result = run(problem, HboaConfig(population_size=20), RngStream(7))
    assert not result.success
    assert result.termination in ('collapsed', 'max_iterations')
    assert result.iterations <= 12


def test_steps_start_with_init_and_end_with_done():
    actions = [step['action'] for step in hboa_steps(plain_onemax(20), HboaConfig(population_size=30),
                                                    RngStream(8))]
    assert actions[0] == 'init'
    assert actions[-1] == 'done'
    assert set(actions[1:-1]) <= {'iteration'}


def test_sporadic_runs_refit_between_rebuilds():
    problem = plain_onemax(30)
    result = run(problem, HboaConfig(population_size=40, sporadic=True), RngStream(9))
    flags = [row.rebuild for row in result.trace[1:]]
    assert flags == [should_rebuild(t, problem.n, True) for t in range(len(flags))]


# --- harvest policies and traces --------------------------------------------------------

def test_harvest_none_keeps_no_models():
    result = run(plain_onemax(30), HboaConfig(population_size=40, harvest='none'), RngStream(10))
    assert result.models == ()


def test_harvest_final_keeps_the_last_model():
    result = run(plain_onemax(30), HboaConfig(population_size=40), RngStream(10))
    assert len(result.models) == 1
    assert result.models[0].iteration == result.iterations
    assert result.models[0].instance_id == 'onemax-n30'
    assert len(result.models[0].splits) == result.trace[-1].splits


def test_harvest_all_keeps_every_rebuilt_model():
    result = run(plain_onemax(30), HboaConfig(population_size=40, harvest='all'), RngStream(10))
    assert len(result.models) == result.iterations
    assert [m.iteration for m in result.models] == list(range(1, result.iterations + 1))


def test_trace_text(tmp_path):
    result = run(plain_onemax(20), HboaConfig(population_size=30), RngStream(11))
    text = format_trace(result)
    lines = text.splitlines()
    assert lines[0].startswith('# iteration')
    assert lines[1].split()[0] == '0' and lines[1].split()[3] == '-'
    assert lines[-1].startswith(f'# success={int(result.success)}')
    assert len(lines) == len(result.trace) + 2
    assert write_trace(result, tmp_path / 'trace.txt').read_text() == text


# --- small instances against exact optima -------------------------------------------------

def test_mvc_runs_reach_the_branch_and_bound_optimum():
    problem = small_mvc(2)
    successes = sum(run(problem, HboaConfig(population_size=100), RngStream(seed)).success for seed in range(3))
    assert successes == 3


@pytest.mark.slow
def test_spin_glass_runs_reach_the_exact_ground_state():
    for seed in range(3):
        sg = gen_spin_glass(3, RngStream(seed))
        problem = spin_glass_problem(sg, f'spin-{seed}').with_optimum(layer_optimum(sg))
        result = run(problem, HboaConfig(population_size=200), RngStream(seed))
        assert result.best_fitness == problem.known_optimum
