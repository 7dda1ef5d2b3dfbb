"""
MAXSAT instances from graph colouring on morphed ring lattices
"""
import itertools
from dataclasses import dataclass
from typing import Optional

from algorithms.core.adf import AdfSpec
from algorithms.problems.problem import Problem
from utils.errors import InvalidInputError

COLORS = 3
LATTICE_OFFSETS = (1, 2)
COLORING_NODE_LIMIT = 200000


@dataclass(frozen=True)
class MaxSatInstance:
    """
    CNF formula over nv propositions; fitness = number of satisfied clauses

    Attributes:
        nv: Proposition count
        clauses: Tuple of clauses, each a tuple of DIMACS literals (+-(var + 1))
        p: Morphing parameter the graph was drawn with (None when loaded)
        known_optimum: Clause count when a colouring certifies satisfiability
    """

    nv: int
    clauses: tuple
    p: Optional[float] = None
    known_optimum: Optional[int] = None

    def __post_init__(self):
        for k, clause in enumerate(self.clauses):
            if not clause:
                raise InvalidInputError(f'clause {k} is empty')
            for literal in clause:
                if literal == 0 or abs(literal) > self.nv:
                    raise InvalidInputError(f'clause {k} literal {literal} outside 1..{self.nv}')


def ring_lattice(nodes, offsets=LATTICE_OFFSETS):
    """Edges (v, v + o mod nodes) for every offset, as sorted unique pairs"""
    edges = []
    seen = set()
    for v in range(nodes):
        for offset in offsets:
            u = (v + offset) % nodes
            pair = (min(u, v), max(u, v))
            if u != v and pair not in seen:
                seen.add(pair)
                edges.append(pair)
    return edges


def morph_graph(nodes, p, rng, offsets=LATTICE_OFFSETS):
    """
    Replace each lattice edge, with probability p, by a uniformly random non-edge

    Returns:
        List of edges in lattice order (replacements take the slot of the edge
        they replace)
    """
    edges = ring_lattice(nodes, offsets)
    present = set(edges)
    for k, edge in enumerate(edges):
        if rng.random() >= p:
            continue
        candidates = [pair for pair in itertools.combinations(range(nodes), 2)
                      if pair not in present and pair != edge]
        if not candidates:
            continue
        new = candidates[int(rng.integers(0, len(candidates)))]
        present.discard(edge)
        present.add(new)
        edges[k] = new
    return edges


def coloring_clauses(nodes, edges, colors=COLORS):
    """
    One-hot colouring encoding

    Proposition v * colors + c means "node v has colour c". Each node gets
    an at-least-one-colour clause; each edge forbids equal colours.
    """
    clauses = []
    for v in range(nodes):
        clauses.append(tuple(v * colors + c + 1 for c in range(colors)))
    for u, v in edges:
        for c in range(colors):
            clauses.append((-(u * colors + c + 1), -(v * colors + c + 1)))
    return clauses


def find_coloring(nodes, edges, colors=COLORS, node_limit=COLORING_NODE_LIMIT):
    """
    Backtracking colouring search choosing the most saturated node first

    Returns:
        List of colours per node, or None if none was found within the limit
    """
    adjacency = [set() for _ in range(nodes)]
    for u, v in edges:
        adjacency[u].add(v)
        adjacency[v].add(u)
    coloring = [-1] * nodes
    expanded = [0]

    def pick():
        best, best_key = None, None
        for v in range(nodes):
            if coloring[v] >= 0:
                continue
            used = {coloring[u] for u in adjacency[v] if coloring[u] >= 0}
            key = (len(used), len(adjacency[v]), -v)
            if best_key is None or key > best_key:
                best, best_key = v, key
        return best

    def assign():
        v = pick()
        if v is None:
            return True
        expanded[0] += 1
        if expanded[0] > node_limit:
            return False
        used = {coloring[u] for u in adjacency[v]}
        for c in range(colors):
            if c in used:
                continue
            coloring[v] = c
            if assign():
                return True
            if expanded[0] > node_limit:
                break
        coloring[v] = -1
        return False

    return list(coloring) if assign() else None


def gen_maxsat_morph(nv, p, rng, colors=COLORS):
    """
    Colouring of a morphed ring lattice mapped to CNF

    Args:
        nv: Proposition count, divisible by the number of colours
        p: Edge replacement probability, 0 <= p <= 1/2
        rng: RngStream
        colors: Number of colours k (propositions per node)

    Returns:
        MaxSatInstance with nv / k + k |E| clauses
    """
    if nv % colors:
        raise InvalidInputError(f'nv={nv} is not divisible by {colors} colours')
    if not 0 <= p <= 0.5:
        raise InvalidInputError(f'morphing parameter p={p} outside [0, 1/2]')
    nodes = nv // colors
    edges = morph_graph(nodes, p, rng)
    clauses = coloring_clauses(nodes, edges, colors)
    known = len(clauses) if find_coloring(nodes, edges, colors) is not None else None
    return MaxSatInstance(nv, tuple(clauses), float(p), known)


def clause_satisfied(clause, assignment):
    """assignment maps variable index -> bit"""
    return any((assignment[abs(l) - 1] == 1) == (l > 0) for l in clause)


def maxsat_adf(inst):
    """One 0/1 subfunction per clause over its distinct variables"""
    subsets = []
    tables = []
    for clause in inst.clauses:
        variables = tuple(dict.fromkeys(abs(l) - 1 for l in clause))
        table = []
        for values in itertools.product((0, 1), repeat=len(variables)):
            assignment = dict(zip(variables, values))
            table.append(1.0 if clause_satisfied(clause, assignment) else 0.0)
        subsets.append(variables)
        tables.append(table)
    return AdfSpec(inst.nv, subsets, tables)


def maxsat_problem(inst, instance_id=''):
    optimum = None if inst.known_optimum is None else float(inst.known_optimum)
    return Problem('maxsat', inst, maxsat_adf(inst), known_optimum=optimum,
                   local_search='hc', instance_id=instance_id)


def get_problem_info():
    """Return problem metadata"""
    return {
        'name': 'Morphed-Graph MAXSAT',
        'category': 'Satisfiability',
        'description': '3-colouring of ring lattices with a fraction p of random edges, as CNF.',
        'extension': '.cnf',
        'local_search': 'hc',
    }
