"""
Tests for decision-tree networks: BDe scoring, greedy learning, sampling, refit and dumps
"""
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from algorithms.bias.bias_table import BiasTable, all_ones_table
from algorithms.core.adf import AdfSpec
from algorithms.core.rng import RngStream
from algorithms.core.solution import Solution
from algorithms.graph.distance import compute_distance_matrix
from algorithms.model.bde import ScoreParams, bde_leaf_logscore, network_score
from algorithms.model.decision_tree import BayesNetDT, DecisionTree
from algorithms.model.dump import (ModelDump, dump_network, load_model_dumps, model_split_histogram,
                                   save_model_dumps)
from algorithms.model.learning import GreedyLearner, learn_network, refit_parameters, split_gain
from algorithms.model.sampling import sample_matrix, sample_network
from utils.errors import IllegalSplitError, InvalidInputError, ParseError, VersionError


def chain_dmat(n):
    return compute_distance_matrix(AdfSpec(n, [(v, v + 1) for v in range(n - 1)],
                                           [np.zeros(4)] * (n - 1)))


def correlated_data(rng, N, n, noise=0.1):
    """Each variable copies its left neighbour with probability 1 - noise"""
    data = rng.bits((N, n))
    for v in range(1, n, 2):
        flips = rng.random(N) < noise
        data[:, v] = data[:, v - 1] ^ flips
    return data


def three_variable_net():
    t0 = DecisionTree(0, 30, 10)
    t1 = DecisionTree(1, 25, 17)
    t1.split_leaf(0, 0, (5, 15), (20, 2))
    t2 = DecisionTree(2, 20, 20)
    c0, c1 = t2.split_leaf(0, 1, (8, 8), (12, 12))
    t2.split_leaf(c1, 0, (2, 10), (10, 2))
    return BayesNetDT([t0, t1, t2])


def exact_joint(net):
    """Probability of each of the 2^n strings, by walking every tree"""
    joint = {}
    for state in itertools.product((0, 1), repeat=net.n):
        p = 1.0
        for tree in net.trees:
            node = tree.nodes[0]
            while not node.is_leaf:
                node = tree.nodes[node.children[state[node.split]]]
            q = node.probability_one()
            p *= q if state[tree.target] else 1 - q
        joint[state] = p
    return joint


def route_counts(tree, data):
    """(m0, m1) per leaf by routing every row from the root"""
    counts = {leaf: [0, 0] for leaf in tree.leaves()}
    for row in data:
        node_id = 0
        while not tree.nodes[node_id].is_leaf:
            node = tree.nodes[node_id]
            node_id = node.children[row[node.split]]
        counts[node_id][int(row[tree.target])] += 1
    return counts


def legal_splits(net, data, **score):
    """(j, leaf, i, gain) of every split that keeps the network legal"""
    found = []
    for tree in net.trees:
        for leaf in tree.leaves():
            for i in range(net.n):
                try:
                    gain = split_gain(tree, leaf, i, data, network=net, **score)
                except IllegalSplitError:
                    continue
                found.append((tree.target, leaf, i, gain))
    return found


def with_split(net, j, leaf, i):
    result = net.copy()
    result.trees[j].split_leaf(leaf, i)
    return result


# --- BDe ----------------------------------------------------------------------

def test_bde_empty_leaf_is_zero():
    assert bde_leaf_logscore(0, 0) == 0.0


def test_bde_single_observation():
    assert bde_leaf_logscore(1, 0) == pytest.approx(math.log(0.5))
    assert bde_leaf_logscore(0, 1) == pytest.approx(math.log(0.5))


def test_bde_two_and_two_matches_beta_integral():
    integral, _ = quad(lambda p: p ** 2 * (1 - p) ** 2, 0, 1)
    assert bde_leaf_logscore(2, 2) == pytest.approx(math.log(integral))
    assert bde_leaf_logscore(2, 2) == pytest.approx(math.log(1 / 30))


def test_bde_matches_sequential_predictive_product():
    for m0, m1 in itertools.product(range(6), repeat=2):
        p = Fraction(1)
        seen = [0, 0]
        for value in [0] * m0 + [1] * m1:
            p *= Fraction(seen[value] + 1, seen[0] + seen[1] + 2)
            seen[value] += 1
        assert bde_leaf_logscore(m0, m1) == pytest.approx(math.log(p))


def test_bde_works_on_arrays():
    values = bde_leaf_logscore(np.array([0, 1, 2]), np.array([0, 0, 2]))
    assert values.shape == (3,)
    assert values[2] == pytest.approx(math.log(1 / 30))


def test_score_params_validation():
    assert ScoreParams.for_size(16).penalty == pytest.approx(2.0)
    assert ScoreParams.for_size(1).penalty == 0.0
    with pytest.raises(InvalidInputError):
        ScoreParams(0, 1.0)
    with pytest.raises(InvalidInputError):
        ScoreParams(10, -1.0)


# --- split_gain -----------------------------------------------------------------

def test_split_on_independent_variable_loses():
    data = RngStream(1).bits((2000, 2))
    assert split_gain(DecisionTree(1), 0, 0, data) < 0


def test_split_on_perfect_predictor_wins():
    rng = RngStream(2)
    data = np.zeros((50, 2), dtype=np.uint8)
    data[:, 0] = rng.bits(50)
    data[:, 1] = data[:, 0]
    assert split_gain(DecisionTree(1), 0, 0, data) > 0


def test_illegal_splits_are_rejected():
    data = RngStream(3).bits((20, 3))
    tree = DecisionTree(2)
    with pytest.raises(IllegalSplitError):
        split_gain(tree, 0, 2, data)
    c0, _ = tree.split_leaf(0, 0)
    with pytest.raises(IllegalSplitError):
        split_gain(tree, c0, 0, data)
    with pytest.raises(IllegalSplitError):
        split_gain(tree, 0, 1, data)

    net = BayesNetDT.empty(3)
    net.trees[1].split_leaf(0, 0)
    net.trees[2].split_leaf(0, 1)
    with pytest.raises(IllegalSplitError):
        split_gain(net.trees[0], 0, 2, data, network=net)
    assert isinstance(split_gain(net.trees[2], 1, 0, data, network=net), float)


def test_split_gain_equals_full_score_difference():
    rng = RngStream(4)
    n = 4
    dmat = chain_dmat(n)
    bias = BiasTable('pair', {(d, j): tuple(float(p) for p in np.clip(rng.random(3), 0.01, 1.0))
                              for d in range(1, n + 1) for j in range(n)}, 0.01, n)
    for _ in range(15):
        N = int(rng.integers(4, 17))
        data = correlated_data(rng, N, n, noise=0.3)
        params = ScoreParams.for_size(N)
        net = BayesNetDT.empty(n)
        for _ in range(3):
            splits = legal_splits(net, data, params=params)
            j, leaf, i, _ = splits[int(rng.integers(len(splits)))]
            net.trees[j].split_leaf(leaf, i)
        for kappa in (0.0, 3.0):
            score = dict(params=params, bias=bias, kappa=kappa, dmat=dmat)
            before = network_score(net, data, **score)
            for j, leaf, i, gain in legal_splits(net, data, **score):
                after = network_score(with_split(net, j, leaf, i), data, **score)
                assert gain == pytest.approx(after - before, abs=1e-9)


def test_bias_needs_distance_matrix():
    data = RngStream(5).bits((10, 3))
    with pytest.raises(InvalidInputError):
        split_gain(DecisionTree(1), 0, 0, data, bias=all_ones_table(3), kappa=1.0)
    with pytest.raises(InvalidInputError):
        split_gain(DecisionTree(1), 0, 0, data, bias=all_ones_table(3), kappa=1.0, dmat=chain_dmat(4))
    with pytest.raises(InvalidInputError):
        learn_network(data, kappa=-1.0)


# --- greedy learning ------------------------------------------------------------

def test_first_greedy_split_matches_exhaustive_rescoring():
    rng = RngStream(6)
    for _ in range(40):
        data = correlated_data(rng, 8, 3, noise=0.2)
        params = ScoreParams.for_size(8)
        empty = BayesNetDT.empty(3)
        base = network_score(empty, data, params)
        oracle = {(j, i): round(network_score(with_split(empty, j, 0, i), data, params) - base, 10)
                  for j in range(3) for i in range(3) if i != j}
        best = max(oracle.values())
        step = GreedyLearner(data, params).step()
        if best <= 0:
            assert step is None
        else:
            j, i, leaf, gain = step
            assert leaf == 0
            assert gain == pytest.approx(best)
            assert oracle[j, i] == pytest.approx(best, abs=1e-9)


def test_every_greedy_split_is_the_best_legal_one():
    rng = RngStream(7)
    for _ in range(20):
        data = correlated_data(rng, 16, 4, noise=0.15)
        params = ScoreParams(16, 0.5)
        learner = GreedyLearner(data, params)
        while True:
            candidates = legal_splits(learner.net, data, params=params)
            best = max((round(g, 10) for *_, g in candidates), default=-math.inf)
            step = learner.step()
            if step is None:
                assert best <= 0
                break
            assert step[3] == pytest.approx(best)
            assert learner.net.is_acyclic()


def test_uniform_data_with_large_penalty_gives_empty_network():
    data = RngStream(8).bits((200, 6))
    net = learn_network(data, params=ScoreParams(200, 50.0))
    assert net.num_splits() == 0
    assert all(tree.nodes[0].m0 + tree.nodes[0].m1 == 200 for tree in net.trees)


def test_copied_variable_creates_an_edge():
    rng = RngStream(9)
    data = rng.bits((300, 3))
    data[:, 1] = data[:, 0]
    edges = learn_network(data).edges()
    assert (0, 1) in edges or (1, 0) in edges


def test_learned_network_is_acyclic_with_consistent_counts():
    rng = RngStream(10)
    data = correlated_data(rng, 120, 8, noise=0.05)
    net = learn_network([Solution(row) for row in data])
    assert net.is_acyclic()
    assert net.num_splits() > 0
    for tree in net.trees:
        counts = route_counts(tree, data)
        for leaf in tree.leaves():
            assert [tree.nodes[leaf].m0, tree.nodes[leaf].m1] == counts[leaf]


def test_epsilon_bias_never_adds_splits():
    rng = RngStream(11)
    n = 8
    dmat = chain_dmat(n)
    floor = BiasTable('pair', {}, 1e-4, n)
    for _ in range(5):
        data = correlated_data(rng, 100, n, noise=0.1)
        plain = learn_network(data)
        biased = learn_network(data, bias=floor, kappa=9.0, dmat=dmat)
        assert biased.num_splits() <= plain.num_splits()


def test_all_ones_bias_leaves_structure_unchanged():
    rng = RngStream(12)
    data = correlated_data(rng, 100, 8, noise=0.1)
    dmat = chain_dmat(8)
    plain = learn_network(data)
    biased = learn_network(data, bias=all_ones_table(8), kappa=5.0, dmat=dmat)
    assert plain.split_records() == biased.split_records()


def test_max_splits_caps_learning():
    data = correlated_data(RngStream(13), 200, 8, noise=0.05)
    assert learn_network(data, max_splits=2).num_splits() == 2


def test_learning_rejects_empty_selection():
    with pytest.raises(InvalidInputError):
        learn_network([])
    with pytest.raises(InvalidInputError):
        learn_network([Solution([0, 1]), Solution([1, 1, 0])])


# --- sampling -----------------------------------------------------------------

def test_empty_network_samples_uniform_bits():
    out = sample_matrix(BayesNetDT.empty(5), 100000, RngStream(14))
    assert np.all(np.abs(out.mean(axis=0) - 0.5) < 0.02)


def test_deterministic_leaves_are_followed():
    t0 = DecisionTree(0, 100, 100)
    t1 = DecisionTree(1, 100, 100)
    t1.split_leaf(0, 0, (100, 0), (0, 100))
    out = sample_matrix(BayesNetDT([t0, t1]), 20000, RngStream(15))
    assert np.mean(out[:, 0] == out[:, 1]) >= 0.97


def test_sampled_joint_matches_factorized_distribution():
    net = three_variable_net()
    out = sample_matrix(net, 200000, RngStream(16))
    codes = out[:, 0] * 4 + out[:, 1] * 2 + out[:, 2]
    empirical = np.bincount(codes, minlength=8) / out.shape[0]
    exact = exact_joint(net)
    tv = 0.5 * sum(abs(empirical[a * 4 + b * 2 + c] - p) for (a, b, c), p in exact.items())
    assert tv < 0.01


def test_sample_network_returns_unevaluated_solutions():
    samples = sample_network(three_variable_net(), 5, RngStream(17))
    assert len(samples) == 5
    assert all(s.n == 3 and not s.evaluated for s in samples)
    assert sample_matrix(BayesNetDT.empty(3), 0, RngStream(0)).shape == (0, 3)
    with pytest.raises(InvalidInputError):
        sample_matrix(BayesNetDT.empty(3), -1, RngStream(0))


def test_sampling_is_reproducible():
    net = three_variable_net()
    assert np.array_equal(sample_matrix(net, 500, RngStream(3)), sample_matrix(net, 500, RngStream(3)))


# --- refit --------------------------------------------------------------------

def test_refit_on_training_data_is_identity():
    data = correlated_data(RngStream(18), 150, 6)
    net = learn_network(data)
    refit = refit_parameters(net, data)
    for a, b in zip(net.trees, refit.trees):
        assert [(x.m0, x.m1) for x in a.nodes] == [(x.m0, x.m1) for x in b.nodes]


def test_refit_on_zeros_clears_every_m1():
    net = learn_network(correlated_data(RngStream(19), 150, 6))
    refit = refit_parameters(net, np.zeros((40, 6), dtype=np.uint8))
    assert all(node.m1 == 0 for tree in refit.trees for node in tree.nodes)
    assert net.split_records() == refit.split_records()


def test_refit_matches_row_routing():
    rng = RngStream(20)
    net = learn_network(correlated_data(rng, 150, 6))
    fresh = rng.bits((77, 6))
    refit = refit_parameters(net, fresh)
    for tree in refit.trees:
        counts = route_counts(tree, fresh)
        for leaf in tree.leaves():
            assert [tree.nodes[leaf].m0, tree.nodes[leaf].m1] == counts[leaf]


def test_refit_leaves_original_untouched_and_checks_size():
    net = three_variable_net()
    before = [(x.m0, x.m1) for x in net.trees[2].nodes]
    refit_parameters(net, np.ones((10, 3), dtype=np.uint8))
    assert [(x.m0, x.m1) for x in net.trees[2].nodes] == before
    with pytest.raises(InvalidInputError):
        refit_parameters(net, np.ones((10, 4), dtype=np.uint8))


def test_refit_on_own_samples_reproduces_leaf_probabilities():
    net = three_variable_net()
    refit = refit_parameters(net, sample_matrix(net, 100000, RngStream(21)))
    for a, b in zip(net.trees, refit.trees):
        for leaf in a.leaves():
            assert abs(a.nodes[leaf].probability_one() - b.nodes[leaf].probability_one()) < 0.02


# --- split histograms and dumps ---------------------------------------------------

def test_histogram_of_empty_network_is_empty():
    assert model_split_histogram(BayesNetDT.empty(4), chain_dmat(4)) == {}


def test_histogram_counts_single_split():
    net = BayesNetDT.empty(3)
    net.trees[1].split_leaf(0, 0)
    assert model_split_histogram(net, chain_dmat(3)) == {(1, 1): 1}


def test_histogram_matches_tree_walk():
    rng = RngStream(22)
    dmat = chain_dmat(8)
    for _ in range(10):
        net = learn_network(correlated_data(rng, 100, 8, noise=0.2), params=ScoreParams(100, 1.0))
        walked = {}
        for tree in net.trees:
            for node in tree.nodes:
                if not node.is_leaf:
                    key = (dmat(node.split, tree.target), tree.target)
                    walked[key] = walked.get(key, 0) + 1
        assert model_split_histogram(net, dmat) == walked
        assert model_split_histogram(dump_network(net), dmat) == walked


def test_histogram_checks_size():
    with pytest.raises(InvalidInputError):
        model_split_histogram(BayesNetDT.empty(3), chain_dmat(4))


def test_model_dumps_round_trip(tmp_path):
    rng = RngStream(23)
    dumps = [dump_network(learn_network(correlated_data(rng, 80, 6)), f'inst-{k}', k) for k in range(3)]
    dumps.append(ModelDump(6, (), 'empty', 9))
    path = save_model_dumps(dumps, tmp_path / 'models.txt')
    assert load_model_dumps(path) == dumps


def test_model_dump_version_and_truncation(tmp_path):
    path = tmp_path / 'models.txt'
    path.write_text('hboa-models 2\n')
    with pytest.raises(VersionError):
        load_model_dumps(path)
    path.write_text('hboa-models 1\nmodel n=3 iteration=0 splits=2 instance=a\n1 0 0\n')
    with pytest.raises(ParseError) as info:
        load_model_dumps(path)
    assert info.value.line == 4


def test_model_dump_rejects_bad_split():
    with pytest.raises(InvalidInputError):
        ModelDump(3, ((1, 1, 0),))
    with pytest.raises(InvalidInputError):
        ModelDump(3, ((0, 3, 0),))
