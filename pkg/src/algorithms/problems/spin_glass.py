"""
Three-dimensional +-J Ising spin glass with periodic boundaries
"""
from dataclasses import dataclass

import numpy as np

from algorithms.core.adf import AdfSpec
from algorithms.problems.problem import Problem
from utils.errors import InvalidInputError, OracleRefusalError

AXES = 3


@dataclass(frozen=True, eq=False)
class SpinGlass3D:
    """
    Cubic lattice of L^3 spins, one coupling per site per positive axis

    couplings[x, y, z, axis] couples site (x, y, z) with its neighbour one
    step further along `axis` (wrapping around).
    """

    L: int
    couplings: np.ndarray

    @property
    def n(self):
        return self.L ** 3

    def site(self, x, y, z):
        L = self.L
        return ((x % L) * L + (y % L)) * L + (z % L)

    def edges(self):
        """
        Yields:
            (i, j, J) for every coupling in (x, y, z, axis) order
        """
        L = self.L
        for x in range(L):
            for y in range(L):
                for z in range(L):
                    for axis in range(AXES):
                        step = [0, 0, 0]
                        step[axis] = 1
                        yield (self.site(x, y, z),
                               self.site(x + step[0], y + step[1], z + step[2]),
                               int(self.couplings[x, y, z, axis]))

    def __eq__(self, other):
        if not isinstance(other, SpinGlass3D):
            return NotImplemented
        return self.L == other.L and np.array_equal(self.couplings, other.couplings)


def gen_spin_glass(L, rng, fixed_coupling=None):
    """
    Draw every coupling independently as +1 or -1 with probability 1/2

    Args:
        L: Lattice side, at least 3 (L=2 would duplicate periodic edges)
        rng: RngStream
        fixed_coupling: Force every coupling to this value (+1 gives the
            ferromagnet); no random draws are made

    Returns:
        SpinGlass3D with 3 L^3 couplings
    """
    if L < 3:
        raise InvalidInputError(f'spin glass side must be at least 3, got L={L}')
    shape = (L, L, L, AXES)
    if fixed_coupling is not None:
        if fixed_coupling not in (-1, 1):
            raise InvalidInputError('fixed coupling must be +1 or -1')
        couplings = np.full(shape, fixed_coupling, dtype=np.int8)
    else:
        couplings = np.where(rng.random(shape) < 0.5, 1, -1).astype(np.int8)
    couplings.flags.writeable = False
    return SpinGlass3D(L, couplings)


def spin_glass_adf(sg):
    """
    One subfunction J s_i s_j per coupling with s = 2b - 1

    Table order (b_i, b_j) = 00, 01, 10, 11.
    """
    subsets = []
    tables = []
    for i, j, J in sg.edges():
        subsets.append((i, j))
        tables.append([J, -J, -J, J])
    return AdfSpec(sg.n, subsets, tables)


def spin_glass_problem(sg, instance_id=''):
    return Problem('spin', sg, spin_glass_adf(sg), local_search='hc', instance_id=instance_id)


def layer_optimum(sg, max_layer_bits=12):
    """
    Exact maximum of sum J s_i s_j by dynamic programming over x-layers

    Fixes the first layer, sweeps the remaining layers with a max-plus
    recursion and closes the periodic boundary. Equivalent to exhaustive
    enumeration of all 2^n states.

    Time Complexity: O(2^(3 L^2) / 2^(L^2) * L) per instance, fine for L = 3

    Args:
        sg: SpinGlass3D

    Returns:
        Optimum fitness
    """
    L = sg.L
    q = L * L
    if q > max_layer_bits:
        raise OracleRefusalError(f'layer dynamic programme refuses L={L} ({q} spins per layer)')

    states = np.arange(1 << q)
    # spins[state, y*L+z] in {-1, +1}; bit q-1-k holds spin k
    bits = (states[:, None] >> (q - 1 - np.arange(q))) & 1
    spins = (2 * bits - 1).astype(np.float64)

    J = sg.couplings.astype(np.float64)
    grid = np.arange(q).reshape(L, L)
    right_y = np.roll(grid, -1, axis=0).reshape(-1)
    right_z = np.roll(grid, -1, axis=1).reshape(-1)

    intra = []
    inter = []
    for x in range(L):
        jy = J[x, :, :, 1].reshape(-1)
        jz = J[x, :, :, 2].reshape(-1)
        intra.append((spins * jy * spins[:, right_y]).sum(axis=1) + (spins * jz * spins[:, right_z]).sum(axis=1))
        jx = J[x, :, :, 0].reshape(-1)
        inter.append((spins * jx) @ spins.T)

    best = -np.inf
    for first in states:
        value = intra[0][first] + inter[0][first, :] + intra[1]
        for x in range(2, L):
            value = (value[:, None] + inter[x - 1]).max(axis=0) + intra[x]
        total = (value + inter[L - 1][:, first]).max()
        best = max(best, total)
    return float(best)


def get_problem_info():
    """Return problem metadata"""
    return {
        'name': '3D +-J Spin Glass',
        'category': 'Lattice',
        'description': 'Ising spin glass on an L x L x L torus with random +-1 couplings.',
        'extension': '.sg3',
        'local_search': 'hc',
    }
