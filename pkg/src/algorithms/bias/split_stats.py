"""
Per-model split histograms s(m, d, j) harvested from model dumps
"""
from dataclasses import dataclass

from algorithms.model.dump import model_split_histogram
from utils.errors import InvalidInputError


@dataclass(frozen=True)
class SplitStats:
    """
    Attributes:
        histograms: One dict (d, j) -> s per model, nonzero cells only
        sizes: Problem size n of each model
    """

    histograms: tuple = ()
    sizes: tuple = ()

    @property
    def model_count(self):
        return len(self.histograms)

    @property
    def source_n(self):
        """Largest model size; 0 for empty stats"""
        return max(self.sizes, default=0)

    def merge(self, other):
        """Concatenate two corpora (associative)"""
        return SplitStats(self.histograms + other.histograms, self.sizes + other.sizes)


def accumulate_stats(entries, allow_mixed_sizes=False):
    """
    Histogram every model of a corpus

    Args:
        entries: Iterable of (model, DistanceMatrix) pairs; model is a
            ModelDump or a BayesNetDT
        allow_mixed_sizes: Accept models of differing n (pooling only)

    Returns:
        SplitStats

    Raises:
        InvalidInputError: mixed sizes without allow_mixed_sizes
    """
    histograms = []
    sizes = []
    for model, dmat in entries:
        histograms.append(model_split_histogram(model, dmat))
        sizes.append(model.n)
    if len(set(sizes)) > 1 and not allow_mixed_sizes:
        raise InvalidInputError(f'models of mixed sizes {sorted(set(sizes))}; pool to combine them')
    return SplitStats(tuple(histograms), tuple(sizes))
