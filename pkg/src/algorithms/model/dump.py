"""
Model dumps: the split structure of learned networks, as consumed by bias harvesting
"""
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from utils.errors import InvalidInputError, ParseError, VersionError

FORMAT_VERSION = 1


@dataclass(frozen=True)
class ModelDump:
    """
    Attributes:
        n: Number of variables of the network
        splits: Tuple of (j, i, depth), tree by tree in creation order
        instance_id: Instance the model was learned on
        iteration: hBOA iteration that built the structure
    """

    n: int
    splits: tuple
    instance_id: str = ''
    iteration: int = 0

    def __post_init__(self):
        for j, i, depth in self.splits:
            if not (0 <= j < self.n and 0 <= i < self.n) or i == j or depth < 0:
                raise InvalidInputError(f'invalid split ({j}, {i}, {depth}) for n={self.n}')


def dump_network(net, instance_id='', iteration=0):
    return ModelDump(net.n, tuple(net.split_records()), instance_id, iteration)


def model_split_histogram(model, dmat):
    """
    s(d, j): number of splits in T_j on a variable at distance d from X_j

    Args:
        model: BayesNetDT or ModelDump
        dmat: DistanceMatrix of the model's instance

    Returns:
        dict (d, j) -> count, nonzero cells only
    """
    records = model.splits if isinstance(model, ModelDump) else model.split_records()
    if model.n != dmat.n:
        raise InvalidInputError(f'model has n={model.n}, distance matrix has n={dmat.n}')
    return dict(Counter((dmat(i, j), j) for j, i, _ in records))


def save_model_dumps(dumps, path):
    lines = [f'hboa-models {FORMAT_VERSION}']
    for dump in dumps:
        lines.append(f'model n={dump.n} iteration={dump.iteration} splits={len(dump.splits)} '
                     f'instance={dump.instance_id}')
        lines.extend(f'{j} {i} {depth}' for j, i, depth in dump.splits)
    Path(path).write_text('\n'.join(lines) + '\n')
    return Path(path)


def _model_header(words, path, number):
    fields = {}
    for word in words[1:]:
        key, sep, value = word.partition('=')
        if not sep:
            raise ParseError(f'expected key=value, found {word!r}', path=path, line=number)
        fields[key] = value
    try:
        return (int(fields['n']), int(fields['iteration']), int(fields['splits']),
                fields.get('instance', ''))
    except (KeyError, ValueError):
        raise ParseError('model header needs integer n, iteration and splits', path=path, line=number) from None


def load_model_dumps(path):
    """
    Read every model of a dump file

    Raises:
        VersionError: unsupported version
        ParseError: malformed header or split line, truncated model
    """
    with open(path) as handle:
        lines = [(number, line.split()) for number, line in enumerate(handle, start=1)]
    lines = [(number, words) for number, words in lines if words and not words[0].startswith('#')]
    if not lines or lines[0][1][0] != 'hboa-models' or len(lines[0][1]) != 2:
        raise ParseError('not a model dump file', path=path, line=lines[0][0] if lines else 1)
    if lines[0][1][1] != str(FORMAT_VERSION):
        raise VersionError(f'unsupported model dump version {lines[0][1][1]}', path=path, line=lines[0][0])

    dumps = []
    position = 1
    while position < len(lines):
        number, words = lines[position]
        if words[0] != 'model':
            raise ParseError('expected a "model" header', path=path, line=number)
        n, iteration, count, instance_id = _model_header(words, path, number)
        body = lines[position + 1:position + 1 + count]
        if len(body) != count or any(w[0] == 'model' for _, w in body):
            end = body[-1][0] + 1 if body else number + 1
            raise ParseError(f'truncated model: expected {count} splits', path=path, line=end)
        splits = []
        for split_number, split_words in body:
            if len(split_words) != 3:
                raise ParseError('expected "j i depth"', path=path, line=split_number)
            try:
                splits.append(tuple(int(w) for w in split_words))
            except ValueError:
                raise ParseError('non-integer split field', path=path, line=split_number) from None
        try:
            dumps.append(ModelDump(n, tuple(splits), instance_id, iteration))
        except InvalidInputError as exc:
            raise ParseError(str(exc), path=path, line=number) from None
        position += 1 + count
    return dumps
