from fractions import Fraction
import json
import logging
import random
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .graph import Metric
from ..utilities import fraction_to_json, parse_fraction

LOGGER = logging.getLogger(__name__)

RADIUS_DENOMINATOR = 1024

NestedChildren = List['NestedChildren']


class Hst:
    """
    rooted alpha-HST; node ``0`` is the root and nodes are numbered in preorder

    every edge from a node at level ``j`` to its child weighs ``alpha ** (depth - 1 - j)``, and every leaf is at level ``depth``
    """

    def __init__(self, alpha: Any, children: NestedChildren, leaf_map: Dict[int, int] = None):
        """
        :param alpha: ratio between the weights of consecutive levels, greater than 1
        :param children: nested lists, where every node is the list of its children and a leaf is ``[]``
        :param leaf_map: map of leaf id to graph node id; defaults to numbering leaves in preorder
        """

        alpha = parse_fraction(alpha)
        if alpha <= 1:
            raise ValueError(f'alpha must be greater than 1, not {alpha}')
        self.__alpha = alpha

        self.__parent = []
        self.__children = []
        self.__level = []
        self.__nested = children

        stack = [(children, None, 0)]
        while len(stack) > 0:
            node_children, parent, level = stack.pop()
            node = len(self.__parent)
            self.__parent.append(parent)
            self.__children.append([])
            self.__level.append(level)
            if parent is not None:
                self.__children[parent].append(node)
            for child in reversed(node_children):
                stack.append((child, node, level + 1))

        self.__leaves = [node for node in self.nodes if len(self.__children[node]) == 0]
        depths = {self.__level[leaf] for leaf in self.__leaves}
        if len(depths) != 1:
            raise ValueError(f'all leaves must share one depth, found depths {sorted(depths)}')
        self.__depth = depths.pop()

        self.__edge_weights = [alpha ** (self.__depth - 1 - level) for level in range(self.__depth)]
        self.__half_diameters = [
            sum(self.__edge_weights[level:], Fraction(0)) for level in range(self.__depth + 1)
        ]

        if leaf_map is None:
            leaf_map = {leaf: index for index, leaf in enumerate(self.__leaves)}
        leaf_map = {int(leaf): int(node) for leaf, node in leaf_map.items()}
        if sorted(leaf_map) != self.__leaves:
            raise ValueError(f'leaf map keys {sorted(leaf_map)} do not match leaves {self.__leaves}')
        if sorted(leaf_map.values()) != list(range(len(self.__leaves))):
            raise ValueError(f'leaf map is not a bijection onto 0..{len(self.__leaves) - 1}')
        self.__leaf_map = leaf_map
        self.__graph_leaf = {node: leaf for leaf, node in leaf_map.items()}

    @property
    def alpha(self) -> Fraction:
        return self.__alpha

    @property
    def depth(self) -> int:
        return self.__depth

    @property
    def root(self) -> int:
        return 0

    @property
    def nodes(self) -> range:
        return range(len(self.__parent))

    @property
    def leaves(self) -> List[int]:
        return list(self.__leaves)

    @property
    def leaf_map(self) -> Dict[int, int]:
        return dict(self.__leaf_map)

    @property
    def edges(self) -> List[Tuple[int, int]]:
        """
        ``(parent, child)`` pairs in preorder of the child
        """

        return [(self.__parent[node], node) for node in self.nodes if self.__parent[node] is not None]

    def __validate_node(self, node: int):
        if not 0 <= node < len(self.__parent):
            raise KeyError(f'"{node}" not in HST nodes 0..{len(self.__parent) - 1}')

    def parent(self, node: int) -> Optional[int]:
        self.__validate_node(node)
        return self.__parent[node]

    def children(self, node: int) -> List[int]:
        self.__validate_node(node)
        return list(self.__children[node])

    def neighbors(self, node: int) -> List[int]:
        parent = self.parent(node)
        return ([] if parent is None else [parent]) + self.children(node)

    def level(self, node: int) -> int:
        self.__validate_node(node)
        return self.__level[node]

    def height(self, node: int) -> int:
        return self.depth - self.level(node)

    def is_leaf(self, node: int) -> bool:
        self.__validate_node(node)
        return len(self.__children[node]) == 0

    def is_edge(self, u: int, v: int) -> bool:
        return self.parent(u) == v or self.parent(v) == u

    def edge_weight(self, u: int, v: int) -> Fraction:
        if self.parent(v) == u:
            return self.__edge_weights[self.__level[u]]
        if self.parent(u) == v:
            return self.__edge_weights[self.__level[v]]
        raise KeyError(f'"{(u, v)}" not in HST edges')

    def level_weight(self, level: int) -> Fraction:
        """
        weight of every edge between level ``level`` and level ``level + 1``
        """

        return self.__edge_weights[level]

    def ancestors(self, node: int) -> List[int]:
        """
        :return: path from the parent of ``node`` up to the root
        """

        ancestors = []
        parent = self.parent(node)
        while parent is not None:
            ancestors.append(parent)
            parent = self.__parent[parent]
        return ancestors

    def is_ancestor(self, ancestor: int, node: int) -> bool:
        """
        whether ``ancestor`` is ``node`` or lies on its path to the root
        """

        return ancestor == node or ancestor in self.ancestors(node)

    def lowest_common_ancestor(self, u: int, v: int) -> int:
        self.__validate_node(u)
        self.__validate_node(v)
        while self.__level[u] > self.__level[v]:
            u = self.__parent[u]
        while self.__level[v] > self.__level[u]:
            v = self.__parent[v]
        while u != v:
            u = self.__parent[u]
            v = self.__parent[v]
        return u

    def path(self, u: int, v: int) -> List[int]:
        """
        :return: the unique tree path from ``u`` to ``v``, both inclusive
        """

        ancestor = self.lowest_common_ancestor(u, v)
        upward = [u]
        while upward[-1] != ancestor:
            upward.append(self.__parent[upward[-1]])
        downward = [v]
        while downward[-1] != ancestor:
            downward.append(self.__parent[downward[-1]])
        return upward + list(reversed(downward[:-1]))

    def subtree_nodes(self, node: int) -> List[int]:
        self.__validate_node(node)
        nodes = []
        stack = [node]
        while len(stack) > 0:
            current = stack.pop()
            nodes.append(current)
            stack.extend(reversed(self.__children[current]))
        return nodes

    def subtree_leaves(self, node: int) -> List[int]:
        return [current for current in self.subtree_nodes(node) if self.is_leaf(current)]

    def graph_node_of(self, leaf: int) -> int:
        if leaf not in self.__leaf_map:
            raise KeyError(f'"{leaf}" not in HST leaves')
        return self.__leaf_map[leaf]

    def leaf_of(self, graph_node: int) -> int:
        if graph_node not in self.__graph_leaf:
            raise KeyError(f'"{graph_node}" not in graph nodes of HST')
        return self.__graph_leaf[graph_node]

    def distance(self, u: int, v: int) -> Fraction:
        return hst_distance(self, u, v)

    def separation(self, node: int) -> Fraction:
        """
        distance between two leaves whose lowest common ancestor is ``node``
        """

        return 2 * self.__half_diameters[self.level(node)]

    def to_json(self) -> Dict[str, Any]:
        return {
            'alpha': fraction_to_json(self.alpha),
            'depth': self.depth,
            'children': self.__nested,
            'leaf_map': {str(leaf): node for leaf, node in sorted(self.__leaf_map.items())},
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> 'Hst':
        try:
            hst = cls(data['alpha'], data['children'], data.get('leaf_map'))
        except (KeyError, TypeError) as error:
            raise ValueError(f'malformed HST JSON: {error}')
        if 'depth' in data and int(data['depth']) != hst.depth:
            raise ValueError(f'declared depth {data["depth"]} does not match tree depth {hst.depth}')
        return hst

    def __len__(self) -> int:
        return len(self.__parent)

    def __contains__(self, node: int) -> bool:
        return isinstance(node, int) and 0 <= node < len(self.__parent)

    def __eq__(self, other: 'Hst') -> bool:
        return isinstance(other, Hst) and self.to_json() == other.to_json()

    def __str__(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}(alpha={self.alpha}, depth={self.depth}, leaves={len(self.__leaves)})'


def build_explicit_hst(alpha: Any, depth: int, branching: Sequence[int]) -> Hst:
    """
    build a complete alpha-HST with a fixed number of children per level

    :param alpha: level ratio
    :param depth: number of levels below the root
    :param branching: number of children of every node on each level, from the root downward
    :return: HST whose leaves map to graph nodes in preorder
    """

    if len(branching) != depth:
        raise ValueError(f'{len(branching)} branching factors given for depth {depth}')
    if any(count < 1 for count in branching):
        raise ValueError(f'branching factors must be positive: {list(branching)}')

    def subtree(level: int) -> NestedChildren:
        if level == depth:
            return []
        return [subtree(level + 1) for _ in range(branching[level])]

    return Hst(alpha, subtree(0))


def embed_frt(metric: Metric, alpha: Any = 2, seed: int = 0) -> Hst:
    """
    randomized hierarchical ball partitioning of a normalized metric into a dominating alpha-HST

    :param metric: metric with minimum off-diagonal distance at least 1
    :param alpha: level ratio
    :param seed: random seed
    :return: HST with one leaf per metric point
    """

    alpha = parse_fraction(alpha)
    if alpha <= 1:
        raise ValueError(f'alpha must be greater than 1, not {alpha}')
    if metric.min_distance is not None and metric.min_distance < 1:
        raise ValueError(f'metric must be normalized, minimum distance is {metric.min_distance}')

    if metric.size == 1:
        return Hst(alpha, [], {0: 0})

    rng = random.Random(seed)
    permutation = list(range(metric.size))
    rng.shuffle(permutation)
    beta = 1 + Fraction(rng.randrange(RADIUS_DENOMINATOR), RADIUS_DENOMINATOR)

    depth = 1
    while alpha ** (depth - 1) < metric.diameter:
        depth += 1

    LOGGER.debug(f'embedding {metric.size} points with depth {depth} and radius scale {beta}')

    leaf_points = []

    def partition(points: List[int], level: int) -> NestedChildren:
        if level == depth:
            leaf_points.append(points[0])
            return []
        if level + 1 == depth:
            clusters = [[point] for point in sorted(points)]
        else:
            radius = beta * alpha ** (depth - 2 - level) / 2
            remaining = set(points)
            clusters = []
            for center in permutation:
                cluster = sorted(
                    point for point in remaining if metric.distance(center, point) <= radius
                )
                if len(cluster) > 0:
                    clusters.append(cluster)
                    remaining.difference_update(cluster)
                if len(remaining) == 0:
                    break
        return [partition(cluster, level + 1) for cluster in clusters]

    children = partition(sorted(range(metric.size)), 0)
    leaves = Hst(alpha, children).leaves
    return Hst(alpha, children, dict(zip(leaves, leaf_points)))


def hst_distance(hst: Hst, u: int, v: int) -> Fraction:
    """
    :param hst: HST
    :param u: leaf id
    :param v: leaf id
    :return: total weight of the tree path between the two leaves
    """

    for node in (u, v):
        if not hst.is_leaf(node):
            raise ValueError(f'node {node} is not a leaf')
    if u == v:
        return Fraction(0)
    return hst.separation(hst.lowest_common_ancestor(u, v))


def subtree_diameter(hst: Hst, node: int) -> Fraction:
    """
    longest leaf-to-leaf distance inside the subtree rooted at ``node``
    """

    while len(hst.children(node)) == 1:
        node = hst.children(node)[0]
    if hst.is_leaf(node):
        return Fraction(0)
    return hst.separation(node)
