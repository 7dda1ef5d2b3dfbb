"""
Problem Registry - Central registry for all benchmark problem families
"""
from algorithms.problems.maxsat import gen_maxsat_morph, maxsat_problem, get_problem_info as maxsat_info
from algorithms.problems.onemax import make_onemax, get_problem_info as onemax_info
from algorithms.problems.spin_glass import gen_spin_glass, spin_glass_problem, get_problem_info as spin_info
from algorithms.problems.vertex_cover import gen_mvc, vertex_cover_problem, get_problem_info as mvc_info
from utils.errors import InvalidInputError


def _generate_spin(rng, L=3, **_):
    return spin_glass_problem(gen_spin_glass(int(L), rng)), f'spin-L{int(L)}'


def _generate_mvc(rng, n=20, c=2.0, **_):
    return vertex_cover_problem(gen_mvc(int(n), float(c), rng)), f'mvc-n{int(n)}-c{float(c):g}'


def _generate_maxsat(rng, nv=36, p=0.125, **_):
    return maxsat_problem(gen_maxsat_morph(int(nv), float(p), rng)), f'maxsat-nv{int(nv)}-p{float(p):g}'


def _generate_onemax(rng, n=20, **_):
    problem = make_onemax(int(n))
    return problem, problem.instance_id


# Registry of all available problem families
PROBLEMS = {
    'spin': {
        'generate': _generate_spin,
        'parameters': ('L',),
        'info': spin_info()
    },
    'mvc': {
        'generate': _generate_mvc,
        'parameters': ('n', 'c'),
        'info': mvc_info()
    },
    'maxsat': {
        'generate': _generate_maxsat,
        'parameters': ('nv', 'p'),
        'info': maxsat_info()
    },
    'onemax': {
        'generate': _generate_onemax,
        'parameters': ('n',),
        'info': onemax_info()
    },
}


def get_problem_family(name):
    """
    Get a family's registry entry by name

    Args:
        name: Family name ('spin', 'mvc', 'maxsat', 'onemax')

    Returns:
        Registry dict with 'generate', 'parameters' and 'info'
    """
    if name not in PROBLEMS:
        raise InvalidInputError(f'unknown problem family {name!r}; available: {", ".join(PROBLEMS)}')
    return PROBLEMS[name]


def get_available_families():
    """
    Get list of registered problem family names

    Returns:
        List of family names
    """
    return list(PROBLEMS.keys())


def generate_instances(name, count, rng, **parameters):
    """
    Generate `count` instances of a family with ids '<family-params>-<index>'

    Each instance draws from its own child stream of rng, so instance k is
    the same whatever `count` is.

    Returns:
        List of Problem
    """
    generate = get_problem_family(name)['generate']
    problems = []
    for index in range(count):
        problem, stem = generate(rng.child(index), **parameters)
        problems.append(problem.with_id(f'{stem}-{index:03d}'))
    return problems
