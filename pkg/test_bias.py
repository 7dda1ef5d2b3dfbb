"""
Tests for split statistics, the P_k(d, j) tables and their file format
"""
import math
from collections import Counter

import numpy as np
import pytest

from algorithms.bias.bias_table import (BiasTable, all_ones_table, compute_pk, load_bias, log_prior_delta,
                                        pool_across_sizes, save_bias)
from algorithms.bias.split_stats import SplitStats, accumulate_stats
from algorithms.core.adf import AdfSpec
from algorithms.core.rng import RngStream
from algorithms.graph.distance import compute_distance_matrix
from algorithms.model.bde import structure_log_prior
from algorithms.model.decision_tree import BayesNetDT
from algorithms.model.dump import ModelDump
from algorithms.model.learning import learn_network
from utils.errors import ConfigurationError, InvalidInputError, ParseError, VersionError

EPS = 1e-4


def ring_dmat(n):
    return compute_distance_matrix(AdfSpec(n, [(v, (v + 1) % n) for v in range(n)], [np.zeros(4)] * n))


def stats_of(*histograms, n=4):
    return SplitStats(tuple(histograms), (n,) * len(histograms))


def random_network(rng, n):
    data = rng.bits((120, n))
    for v in range(1, n):
        keep = rng.random(120) < 0.85
        data[keep, v] = data[keep, v - 1]
    return learn_network(data)


# --- compute_pk -----------------------------------------------------------------

def test_single_split_in_single_model():
    table = compute_pk(stats_of({(1, 2): 1}), EPS)
    assert table.probability(1, 2, 1) == 1.0
    assert table.probability(1, 2, 2) == EPS


def test_two_models_hand_computed():
    table = compute_pk(stats_of({(2, 0): 2}, {}), EPS)
    assert table.probability(2, 0, 1) == 0.5
    assert table.probability(2, 0, 2) == 1.0
    assert table.probability(2, 0, 3) == EPS


def test_never_split_cell_reads_epsilon():
    table = compute_pk(stats_of({(1, 0): 1}, {(1, 0): 3}), EPS)
    assert table.probability(3, 1, 1) == EPS
    assert table.probability(1, 0, 1) == 1.0
    assert table.probability(1, 0, 2) == 0.5
    assert table.probability(1, 0, 3) == 1.0
    assert table.probability(1, 0, 4) == EPS


def test_compute_pk_needs_a_model():
    with pytest.raises(InvalidInputError):
        compute_pk(SplitStats(), EPS)


def test_identical_models_give_certain_first_splits():
    histogram = {(1, 0): 2, (2, 3): 1}
    table = compute_pk(stats_of(*[histogram] * 7), EPS)
    assert table.probability(1, 0, 1) == 1.0
    assert table.probability(1, 0, 2) == 1.0
    assert table.probability(1, 0, 3) == EPS
    assert table.probability(2, 3, 1) == 1.0
    assert table.probability(2, 3, 2) == EPS


def test_every_probability_lies_in_range():
    rng = RngStream(1)
    histograms = []
    for _ in range(25):
        cells = {}
        for _ in range(int(rng.integers(0, 8))):
            cells[(int(rng.integers(1, 5)), int(rng.integers(0, 4)))] = int(rng.integers(1, 5))
        histograms.append(cells)
    for table in (compute_pk(stats_of(*histograms), EPS), pool_across_sizes(stats_of(*histograms), EPS)):
        for sequence in table.probabilities.values():
            assert all(EPS <= p <= 1.0 for p in sequence)


# --- pooling ------------------------------------------------------------------

def test_pooled_ratio_counts_every_variable():
    table = pool_across_sizes(stats_of({(2, 4): 1}, n=10), EPS)
    assert table.mode == 'pooled'
    assert table.probability(2, 0, 1) == pytest.approx(1 / 10)
    assert table.probability(2, 7, 1) == pytest.approx(1 / 10)


def test_pooled_all_variables_split_once():
    table = pool_across_sizes(stats_of({(1, 0): 1, (1, 1): 1, (1, 2): 1}, n=3), EPS)
    assert table.probability(1, 0, 1) == 1.0
    assert table.probability(1, 0, 2) == EPS


def test_pooled_table_clamps_distance_to_source_size():
    stats = SplitStats(({(4, 0): 1},), (4,))
    table = pool_across_sizes(stats, EPS)
    assert table.source_n == 4
    assert table.probability(9, 0, 1) == table.probability(4, 0, 1)
    table.check_compatible(9)


def test_pair_table_rejects_other_sizes():
    table = compute_pk(stats_of({(1, 0): 1}, n=4), EPS)
    table.check_compatible(4)
    with pytest.raises(ConfigurationError):
        table.check_compatible(5)


def test_pooled_table_from_one_size_biases_that_size():
    rng = RngStream(2)
    n = 6
    dmat = ring_dmat(n)
    entries = [(random_network(rng, n), dmat) for _ in range(4)]
    table = pool_across_sizes(accumulate_stats(entries), EPS)
    data = rng.bits((80, n))
    net = learn_network(data, bias=table, kappa=5.0, dmat=dmat)
    assert net.is_acyclic()
    assert all(EPS <= table.probability(d, 0, k) <= 1 for d in range(1, n + 1) for k in range(1, 5))


# --- log prior ------------------------------------------------------------------

def test_all_ones_table_is_a_no_op():
    table = all_ones_table(5)
    assert all(log_prior_delta(table, j, d, k) == 0.0 for j in range(5) for d in range(1, 6) for k in range(4))


def test_log_prior_delta_reads_next_k():
    table = BiasTable('pair', {(1, 0): (0.5, 0.25)}, EPS, 3)
    assert log_prior_delta(table, 0, 1, 0) == pytest.approx(math.log(0.5))
    assert log_prior_delta(table, 0, 1, 1) == pytest.approx(math.log(0.25))
    assert log_prior_delta(table, 0, 1, 2) == pytest.approx(math.log(EPS))


def test_summed_deltas_equal_the_whole_prior():
    rng = RngStream(3)
    n = 7
    dmat = ring_dmat(n)
    table = compute_pk(accumulate_stats([(random_network(rng, n), dmat) for _ in range(6)]), 0.01)
    for _ in range(5):
        net = random_network(rng, n)
        product = 1.0
        for tree in net.trees:
            per_distance = Counter(dmat(i, tree.target) for _, i in tree.splits)
            for d, count in per_distance.items():
                for k in range(1, count + 1):
                    product *= table.probability(d, tree.target, k)
        assert structure_log_prior(net, table, 1.0, dmat) == pytest.approx(math.log(product))
        assert structure_log_prior(net, table, 2.5, dmat) == pytest.approx(2.5 * math.log(product))


def test_table_validation():
    with pytest.raises(InvalidInputError):
        BiasTable('triple', {}, EPS, 3)
    with pytest.raises(InvalidInputError):
        BiasTable('pair', {}, 0.0, 3)
    with pytest.raises(InvalidInputError):
        BiasTable('pair', {}, 1.5, 3)


# --- split statistics -------------------------------------------------------------

def test_zero_models_give_empty_stats():
    stats = accumulate_stats([])
    assert stats.model_count == 0
    assert stats.source_n == 0


def test_single_split_gives_single_cell():
    net = BayesNetDT.empty(4)
    net.trees[2].split_leaf(0, 0)
    stats = accumulate_stats([(net, ring_dmat(4))])
    assert stats.histograms == ({(2, 2): 1},)
    assert stats.sizes == (4,)


def test_totals_match_per_model_recount():
    rng = RngStream(4)
    n = 8
    dmat = ring_dmat(n)
    nets = [random_network(rng, n) for _ in range(10)]
    stats = accumulate_stats([(net, dmat) for net in nets])
    assert stats.model_count == 10
    for net, histogram in zip(nets, stats.histograms):
        recount = Counter()
        for tree in net.trees:
            for _, i in tree.splits:
                recount[(dmat(i, tree.target), tree.target)] += 1
        assert histogram == dict(recount)
        assert sum(histogram.values()) == net.num_splits()


def test_mixed_sizes_need_pooling():
    entries = [(ModelDump(4, ()), ring_dmat(4)), (ModelDump(6, ()), ring_dmat(6))]
    with pytest.raises(InvalidInputError):
        accumulate_stats(entries)
    stats = accumulate_stats(entries, allow_mixed_sizes=True)
    assert stats.sizes == (4, 6)
    assert stats.source_n == 6


def test_merge_is_associative():
    a, b, c = stats_of({(1, 0): 1}), stats_of({(2, 1): 2}), stats_of({})
    assert a.merge(b).merge(c) == a.merge(b.merge(c))
    assert a.merge(b).model_count == 2


# --- file format ----------------------------------------------------------------

def test_round_trip_preserves_table(tmp_path):
    rng = RngStream(5)
    n = 6
    dmat = ring_dmat(n)
    stats = accumulate_stats([(random_network(rng, n), dmat) for _ in range(5)])
    for table in (compute_pk(stats, EPS), pool_across_sizes(stats, 0.003)):
        path = save_bias(table, tmp_path / f'{table.mode}.bias')
        loaded = load_bias(path)
        assert loaded == table
        assert loaded.mode == table.mode


def test_mode_is_read_from_header(tmp_path):
    path = tmp_path / 'pooled.bias'
    path.write_text('hboa-bias 1\nmode pooled\nn 5\nepsilon 0.001\n1 1 0.5\n1 2 0.25\n')
    table = load_bias(path)
    assert table.mode == 'pooled'
    assert table.probability(1, 3, 2) == 0.25


def test_version_mismatch_is_reported(tmp_path):
    path = tmp_path / 'future.bias'
    path.write_text('hboa-bias 2\nmode pair\nn 5\nepsilon 0.001\n')
    with pytest.raises(VersionError):
        load_bias(path)


@pytest.mark.parametrize('body, line', [
    ('1 0 1 0.5\n1 0 3 0.5\n', 6),
    ('1 0 1 1.5\n', 5),
    ('1 0 1\n', 5),
    ('1 0 x 0.5\n', 5),
])
def test_malformed_rows_name_their_line(tmp_path, body, line):
    path = tmp_path / 'bad.bias'
    path.write_text('hboa-bias 1\nmode pair\nn 5\nepsilon 0.001\n' + body)
    with pytest.raises(ParseError) as info:
        load_bias(path)
    assert info.value.line == line


def test_compute_pk_matches_survival_counts_on_random_corpora():
    rng = RngStream(6)
    for _ in range(50):
        models = int(rng.integers(1, 12))
        histograms = []
        for _ in range(models):
            cells = {}
            for _ in range(int(rng.integers(0, 10))):
                cells[(int(rng.integers(1, 6)), int(rng.integers(0, 5)))] = int(rng.integers(1, 6))
            histograms.append(cells)
        table = compute_pk(stats_of(*histograms, n=5), EPS)
        for d in range(1, 6):
            for j in range(5):
                counts = [h.get((d, j), 0) for h in histograms]
                for k in range(1, 8):
                    survivors = sum(1 for s in counts if s >= k)
                    at_risk = sum(1 for s in counts if s >= k - 1)
                    expected = max(EPS, survivors / at_risk) if at_risk else EPS
                    assert table.probability(d, j, k) == expected
