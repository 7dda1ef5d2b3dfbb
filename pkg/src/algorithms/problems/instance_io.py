"""
Plain-text instance formats

- spin glass: header `sg3 L`, then `x y z axis J` lines
- graph: header `graph n m`, then m lines `u v` (0-based)
- MAXSAT: DIMACS CNF
"""
from pathlib import Path

import numpy as np

from algorithms.problems.maxsat import MaxSatInstance, maxsat_problem
from algorithms.problems.spin_glass import AXES, SpinGlass3D, spin_glass_problem
from algorithms.problems.vertex_cover import VertexCoverInstance, make_graph, vertex_cover_problem
from utils.errors import InvalidInputError, ParseError

FORMATS = {'.sg3': 'sg3', '.graph': 'graph', '.cnf': 'cnf'}


def _instance_of(obj):
    return getattr(obj, 'instance', obj)


def save_instance(inst, path):
    """
    Write an instance (or a Problem wrapping one) in its family's format

    Returns:
        Path written
    """
    inst = _instance_of(inst)
    path = Path(path)
    if isinstance(inst, SpinGlass3D):
        lines = [f'sg3 {inst.L}']
        for x in range(inst.L):
            for y in range(inst.L):
                for z in range(inst.L):
                    for axis in range(AXES):
                        lines.append(f'{x} {y} {z} {axis} {int(inst.couplings[x, y, z, axis])}')
    elif isinstance(inst, VertexCoverInstance):
        lines = [f'graph {inst.n} {len(inst.edges)}', f'# c {inst.c!r}']
        lines.extend(f'{u} {v}' for u, v in inst.edges)
    elif isinstance(inst, MaxSatInstance):
        lines = []
        if inst.p is not None:
            lines.append(f'c p {inst.p!r}')
        if inst.known_optimum is not None:
            lines.append(f'c optimum {inst.known_optimum}')
        lines.append(f'p cnf {inst.nv} {len(inst.clauses)}')
        lines.extend(' '.join(str(l) for l in clause) + ' 0' for clause in inst.clauses)
    else:
        raise InvalidInputError(f'cannot save instances of type {type(inst).__name__}')
    path.write_text('\n'.join(lines) + '\n')
    return path


def detect_format(path):
    suffix = Path(path).suffix.lower()
    if suffix in FORMATS:
        return FORMATS[suffix]
    with open(path) as handle:
        for line in handle:
            words = line.split()
            if not words or words[0] in ('#', 'c'):
                continue
            if words[0] == 'sg3':
                return 'sg3'
            if words[0] == 'graph':
                return 'graph'
            if words[0] == 'p':
                return 'cnf'
            break
    raise ParseError('cannot detect instance format', path=path)


def _content_lines(path, comment):
    """(line number, words) for every non-blank, non-comment line"""
    with open(path) as handle:
        for number, line in enumerate(handle, start=1):
            words = line.split()
            if words and not words[0].startswith(comment):
                yield number, words


def _ints(words, count, path, number):
    if len(words) != count:
        raise ParseError(f'expected {count} fields, found {len(words)}', path=path, line=number)
    try:
        return [int(w) for w in words]
    except ValueError:
        raise ParseError(f'non-integer field in {" ".join(words)!r}', path=path, line=number) from None


def _count_lines(path):
    with open(path) as handle:
        return sum(1 for _ in handle)


def _load_spin_glass(path):
    lines = _content_lines(path, '#')
    number, header = next(lines, (1, []))
    if len(header) != 2 or header[0] != 'sg3':
        raise ParseError('expected header "sg3 L"', path=path, line=number)
    L = _ints(header[1:], 1, path, number)[0]
    if L < 3:
        raise ParseError(f'lattice side L={L} below 3', path=path, line=number)

    couplings = np.zeros((L, L, L, AXES), dtype=np.int8)
    for number, words in lines:
        x, y, z, axis, J = _ints(words, 5, path, number)
        if not (0 <= x < L and 0 <= y < L and 0 <= z < L and 0 <= axis < AXES):
            raise ParseError('site or axis out of range', path=path, line=number)
        if J not in (-1, 1):
            raise ParseError(f'coupling {J} is not +-1', path=path, line=number)
        if couplings[x, y, z, axis]:
            raise ParseError('duplicate coupling', path=path, line=number)
        couplings[x, y, z, axis] = J
    missing = int(np.count_nonzero(couplings == 0))
    if missing:
        raise ParseError(f'truncated: {missing} of {couplings.size} couplings missing',
                         path=path, line=_count_lines(path) + 1)
    couplings.flags.writeable = False
    return spin_glass_problem(SpinGlass3D(L, couplings))


def _load_graph(path):
    c = None
    with open(path) as handle:
        for line in handle:
            words = line.split()
            if len(words) == 3 and words[0] == '#' and words[1] == 'c':
                c = float(words[2])
    lines = _content_lines(path, '#')
    number, header = next(lines, (1, []))
    if len(header) != 3 or header[0] != 'graph':
        raise ParseError('expected header "graph n m"', path=path, line=number)
    n, m = _ints(header[1:], 2, path, number)
    edges = []
    seen = set()
    for number, words in lines:
        if len(edges) == m:
            raise ParseError(f'more than the declared {m} edges', path=path, line=number)
        u, v = _ints(words, 2, path, number)
        pair = (min(u, v), max(u, v))
        if u == v or not (0 <= u < n and 0 <= v < n) or pair in seen:
            raise ParseError(f'invalid edge ({u}, {v})', path=path, line=number)
        seen.add(pair)
        edges.append(pair)
    if len(edges) != m:
        raise ParseError(f'truncated: {len(edges)} of {m} edges', path=path, line=_count_lines(path) + 1)
    try:
        inst = make_graph(n, edges, c)
    except InvalidInputError as exc:
        raise ParseError(str(exc), path=path) from None
    return vertex_cover_problem(inst)


def _load_cnf(path):
    p = None
    known = None
    header = None
    clauses = []
    current = []
    last = 0
    with open(path) as handle:
        for number, line in enumerate(handle, start=1):
            last = number
            words = line.split()
            if not words or words[0] == '%':
                continue
            if words[0] == 'c':
                if len(words) == 3 and words[1] == 'p':
                    p = float(words[2])
                elif len(words) == 3 and words[1] == 'optimum':
                    known = int(words[2])
                continue
            if words[0] == 'p':
                if header is not None or len(words) != 4 or words[1] != 'cnf':
                    raise ParseError('expected a single header "p cnf nv nclauses"', path=path, line=number)
                header = _ints(words[2:], 2, path, number)
                continue
            if header is None:
                raise ParseError('clause before "p cnf" header', path=path, line=number)
            for literal in _ints(words, len(words), path, number):
                if literal == 0:
                    if not current:
                        raise ParseError('empty clause', path=path, line=number)
                    clauses.append(tuple(current))
                    current = []
                elif abs(literal) > header[0]:
                    raise ParseError(f'literal {literal} exceeds nv={header[0]}', path=path, line=number)
                else:
                    current.append(literal)
    if header is None:
        raise ParseError('missing "p cnf" header', path=path, line=last + 1)
    if current:
        clauses.append(tuple(current))
    if len(clauses) != header[1]:
        raise ParseError(f'truncated: {len(clauses)} of {header[1]} clauses', path=path, line=last + 1)
    return maxsat_problem(MaxSatInstance(header[0], tuple(clauses), p, known))


_LOADERS = {'sg3': _load_spin_glass, 'graph': _load_graph, 'cnf': _load_cnf}


def load_instance(path, format=None):
    """
    Read an instance file into a Problem

    Args:
        path: File path; the stem becomes the instance id
        format: 'sg3', 'graph' or 'cnf'; detected from the suffix or the
            header when omitted

    Returns:
        Problem
    """
    fmt = format or detect_format(path)
    if fmt not in _LOADERS:
        raise InvalidInputError(f'unknown instance format {fmt!r}')
    return _LOADERS[fmt](path).with_id(Path(path).stem)
