"""
Split probabilities P_k(d, j) and the structural log-prior they define
"""
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

from utils.errors import ConfigurationError, InvalidInputError, ParseError, VersionError

FORMAT_VERSION = 1
DEFAULT_EPSILON = 1e-4
MODES = ('pair', 'pooled')


@dataclass(frozen=True, eq=False)
class BiasTable:
    """
    Probability of a k-th split at distance d in the tree of X_j

    Attributes:
        mode: 'pair' (indexed by (d, j)) or 'pooled' (indexed by d only)
        probabilities: key -> tuple (P_1, P_2, ...); key is (d, j) or d
        epsilon: Floor returned for missing keys and k beyond a key's tuple
        source_n: Problem size the statistics were harvested at
    """

    mode: str
    probabilities: dict
    epsilon: float
    source_n: int

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidInputError(f'unknown bias mode {self.mode!r}')
        if not 0 < self.epsilon <= 1:
            raise InvalidInputError(f'epsilon must lie in (0, 1], got {self.epsilon}')

    def probability(self, d, j, k):
        """P_k(d, j); pooled tables ignore j and clamp d to source_n"""
        if self.mode == 'pooled':
            key = min(int(d), self.source_n)
        else:
            key = (int(d), int(j))
        sequence = self.probabilities.get(key)
        if sequence is None or not 1 <= k <= len(sequence):
            return self.epsilon
        return sequence[k - 1]

    def check_compatible(self, n):
        """
        Raises:
            ConfigurationError: a per-(d, j) table applied to a different size
        """
        if self.mode == 'pair' and n != self.source_n:
            raise ConfigurationError(
                f'per-(d, j) bias table harvested at n={self.source_n} cannot bias n={n}; use a pooled table')

    def __eq__(self, other):
        if not isinstance(other, BiasTable):
            return NotImplemented
        return (self.mode, self.epsilon, self.source_n, self.probabilities) == \
            (other.mode, other.epsilon, other.source_n, other.probabilities)


def all_ones_table(n, mode='pair'):
    """Table whose every lookup is exactly 1 (epsilon = 1); a no-op bias"""
    return BiasTable(mode, {}, 1.0, int(n))


def _survival_ratios(values, population, epsilon):
    """
    P_k = |{s >= k}| / |{s >= k-1}| for k = 1 .. max(values) + 1

    Args:
        values: Nonzero split counts
        population: Number of counted items including those with s = 0
    """
    top = max(values)
    ratios = []
    for k in range(1, top + 2):
        numerator = sum(1 for s in values if s >= k)
        denominator = population if k == 1 else sum(1 for s in values if s >= k - 1)
        ratio = numerator / denominator if denominator else 0.0
        ratios.append(min(1.0, max(epsilon, ratio)))
    return tuple(ratios)


def compute_pk(stats, epsilon=DEFAULT_EPSILON):
    """
    Per-(d, j) probabilities from a model corpus

    Cells no model ever split are left out and therefore read as epsilon.

    Args:
        stats: SplitStats with at least one model
        epsilon: Floor for zero or undefined ratios

    Returns:
        BiasTable in 'pair' mode
    """
    if stats.model_count < 1:
        raise InvalidInputError('compute_pk needs at least one model')
    values = defaultdict(list)
    for histogram in stats.histograms:
        for key, s in histogram.items():
            if s > 0:
                values[key].append(s)
    probabilities = {key: _survival_ratios(v, stats.model_count, epsilon) for key, v in sorted(values.items())}
    return BiasTable('pair', probabilities, float(epsilon), stats.source_n)


def pool_across_sizes(stats, epsilon=DEFAULT_EPSILON):
    """
    Per-distance probabilities pooled over models and target variables

    P_k(d) = |{(m, j) : s(m, d, j) >= k}| / |{(m, j) : s(m, d, j) >= k-1}|,
    where (m, j) ranges over every variable of every model.

    Returns:
        BiasTable in 'pooled' mode
    """
    if stats.model_count < 1:
        raise InvalidInputError('pool_across_sizes needs at least one model')
    values = defaultdict(list)
    for histogram in stats.histograms:
        for (d, _), s in histogram.items():
            if s > 0:
                values[d].append(s)
    pairs = sum(stats.sizes)
    probabilities = {d: _survival_ratios(v, pairs, epsilon) for d, v in sorted(values.items())}
    return BiasTable('pooled', probabilities, float(epsilon), stats.source_n)


def log_prior_delta(table, j, d, k_prev):
    """
    log P_k(d, j) for the next split at distance d in T_j, where k = k_prev + 1

    Summed over every split of a network this is the log of the structural
    prior up to its normalising constant.
    """
    return math.log(table.probability(d, j, k_prev + 1))


def save_bias(table, path):
    """Write a versioned text table; floats use repr so the round trip is lossless"""
    lines = [f'hboa-bias {FORMAT_VERSION}', f'mode {table.mode}', f'n {table.source_n}',
             f'epsilon {table.epsilon!r}']
    if table.mode == 'pair':
        lines.append('# d j k P')
        for (d, j), sequence in sorted(table.probabilities.items()):
            lines.extend(f'{d} {j} {k} {p!r}' for k, p in enumerate(sequence, start=1))
    else:
        lines.append('# d k P')
        for d, sequence in sorted(table.probabilities.items()):
            lines.extend(f'{d} {k} {p!r}' for k, p in enumerate(sequence, start=1))
    Path(path).write_text('\n'.join(lines) + '\n')
    return Path(path)


def _header_value(words, name, number, path):
    if len(words) != 2 or words[0] != name:
        raise ParseError(f'expected "{name} <value>"', path=path, line=number)
    return words[1]


def load_bias(path):
    """
    Read a table written by save_bias

    Raises:
        VersionError: unsupported format version
        ParseError: any other malformation, with its line number
    """
    with open(path) as handle:
        lines = [(number, line.split()) for number, line in enumerate(handle, start=1)]
    lines = [(number, words) for number, words in lines if words and not words[0].startswith('#')]
    if len(lines) < 4:
        raise ParseError('truncated header', path=path, line=(lines[-1][0] + 1) if lines else 1)

    number, words = lines[0]
    if len(words) != 2 or words[0] != 'hboa-bias':
        raise ParseError('not a bias table', path=path, line=number)
    if words[1] != str(FORMAT_VERSION):
        raise VersionError(f'unsupported bias table version {words[1]} (expected {FORMAT_VERSION})',
                           path=path, line=number)
    mode = _header_value(lines[1][1], 'mode', lines[1][0], path)
    if mode not in MODES:
        raise ParseError(f'unknown mode {mode!r}', path=path, line=lines[1][0])
    try:
        source_n = int(_header_value(lines[2][1], 'n', lines[2][0], path))
        epsilon = float(_header_value(lines[3][1], 'epsilon', lines[3][0], path))
    except ValueError:
        raise ParseError('malformed header value', path=path, line=lines[3][0]) from None

    width = 4 if mode == 'pair' else 3
    sequences = defaultdict(list)
    for number, words in lines[4:]:
        if len(words) != width:
            raise ParseError(f'expected {width} fields, found {len(words)}', path=path, line=number)
        try:
            ints = [int(w) for w in words[:-1]]
            p = float(words[-1])
        except ValueError:
            raise ParseError('malformed row', path=path, line=number) from None
        key = tuple(ints[:-1]) if mode == 'pair' else ints[0]
        k = ints[-1]
        if k != len(sequences[key]) + 1:
            raise ParseError(f'k={k} out of sequence', path=path, line=number)
        if not epsilon <= p <= 1.0:
            raise ParseError(f'probability {p} outside [{epsilon}, 1]', path=path, line=number)
        sequences[key].append(p)

    probabilities = {key: tuple(seq) for key, seq in sorted(sequences.items())}
    return BiasTable(mode, probabilities, epsilon, source_n)
