"""
Decision trees and the Bayesian network they define
"""
from collections import deque

import numpy as np

from utils.errors import InvalidInputError


class TreeNode:
    """Internal node (split set) or leaf (counts of target values reaching it)"""

    __slots__ = ('depth', 'parent', 'split', 'children', 'm0', 'm1')

    def __init__(self, depth, parent=None, m0=0, m1=0):
        self.depth = depth
        self.parent = parent
        self.split = None
        self.children = None
        self.m0 = int(m0)
        self.m1 = int(m1)

    @property
    def is_leaf(self):
        return self.split is None

    def probability_one(self):
        """Laplace-smoothed p(X_j = 1) at this node"""
        return (self.m1 + 1) / (self.m0 + self.m1 + 2)


class DecisionTree:
    """
    Local structure p(X_j | parents) for one target variable

    Node 0 is the root. Splits are recorded in creation order as
    (node id, split variable).
    """

    def __init__(self, target, m0=0, m1=0):
        self.target = int(target)
        self.nodes = [TreeNode(0, None, m0, m1)]
        self.splits = []

    def leaves(self):
        return [k for k, node in enumerate(self.nodes) if node.is_leaf]

    def path_variables(self, node_id):
        """Split variables on the path from the root to node_id"""
        variables = set()
        node = self.nodes[node_id]
        while node.parent is not None:
            parent = self.nodes[node.parent]
            variables.add(parent.split)
            node = parent
        return variables

    def split_leaf(self, leaf, variable, counts0=(0, 0), counts1=(0, 0)):
        """
        Turn a leaf into an internal node splitting on `variable`

        Args:
            leaf: Leaf node id
            variable: Split variable (not the target, not on the leaf's path)
            counts0, counts1: (m0, m1) of the children for variable = 0 / 1

        Returns:
            (child0 id, child1 id)
        """
        node = self.nodes[leaf]
        if not node.is_leaf:
            raise InvalidInputError(f'node {leaf} of tree {self.target} is not a leaf')
        if variable == self.target or variable in self.path_variables(leaf):
            raise InvalidInputError(f'variable {variable} cannot split leaf {leaf} of tree {self.target}')
        first = len(self.nodes)
        self.nodes.append(TreeNode(node.depth + 1, leaf, *counts0))
        self.nodes.append(TreeNode(node.depth + 1, leaf, *counts1))
        node.split = int(variable)
        node.children = (first, first + 1)
        self.splits.append((leaf, int(variable)))
        return node.children

    def partition(self, data):
        """
        Rows of an N x n bit matrix reaching every node

        Only the columns of split variables are read.

        Returns:
            dict node id -> row index array
        """
        parts = {}
        stack = [(0, np.arange(data.shape[0]))]
        while stack:
            node_id, rows = stack.pop()
            parts[node_id] = rows
            node = self.nodes[node_id]
            if node.is_leaf:
                continue
            bit = data[rows, node.split]
            stack.append((node.children[1], rows[bit == 1]))
            stack.append((node.children[0], rows[bit == 0]))
        return parts

    def set_counts(self, data):
        """Recompute (m0, m1) at every node from data"""
        column = data[:, self.target]
        for node_id, rows in self.partition(data).items():
            node = self.nodes[node_id]
            node.m1 = int(column[rows].sum())
            node.m0 = int(rows.size - node.m1)

    def parents(self):
        return {variable for _, variable in self.splits}

    def split_records(self):
        """(target, split variable, depth of the split node) in creation order"""
        return [(self.target, variable, self.nodes[node_id].depth) for node_id, variable in self.splits]

    def copy(self):
        tree = DecisionTree(self.target)
        tree.nodes = []
        for node in self.nodes:
            clone = TreeNode(node.depth, node.parent, node.m0, node.m1)
            clone.split = node.split
            clone.children = node.children
            tree.nodes.append(clone)
        tree.splits = list(self.splits)
        return tree


class BayesNetDT:
    """
    One decision tree per variable; X_i is a parent of X_j iff it splits in T_j
    """

    def __init__(self, trees):
        self.trees = list(trees)
        for j, tree in enumerate(self.trees):
            if tree.target != j:
                raise InvalidInputError(f'tree {j} targets variable {tree.target}')

    @classmethod
    def empty(cls, n, data=None):
        """Single-leaf trees, with leaf counts from data when given"""
        net = cls([DecisionTree(j) for j in range(n)])
        if data is not None:
            for tree in net.trees:
                tree.set_counts(data)
        return net

    @property
    def n(self):
        return len(self.trees)

    def parent_sets(self):
        return [tree.parents() for tree in self.trees]

    def edges(self):
        """Directed edges (i, j) of the implied parent graph"""
        return {(i, j) for j, parents in enumerate(self.parent_sets()) for i in parents}

    def num_splits(self):
        return sum(len(tree.splits) for tree in self.trees)

    def topological_order(self):
        """
        Kahn's algorithm over the parent graph

        Raises:
            InvalidInputError: the parent graph has a cycle
        """
        parents = self.parent_sets()
        children = [[] for _ in range(self.n)]
        indegree = [len(p) for p in parents]
        for j, ps in enumerate(parents):
            for i in ps:
                children[i].append(j)

        queue = deque(j for j in range(self.n) if indegree[j] == 0)
        order = []
        while queue:
            current = queue.popleft()
            order.append(current)
            for child in sorted(children[current]):
                indegree[child] -= 1
                if indegree[child] == 0:
                    queue.append(child)

        if len(order) != self.n:
            raise InvalidInputError('parent graph of the network has a cycle')
        return order

    def is_acyclic(self):
        try:
            self.topological_order()
        except InvalidInputError:
            return False
        return True

    def split_records(self):
        """(j, i, depth) for every split, tree by tree in creation order"""
        records = []
        for tree in self.trees:
            records.extend(tree.split_records())
        return records

    def copy(self):
        return BayesNetDT([tree.copy() for tree in self.trees])
