from enum import Enum
from fractions import Fraction
import json
import logging
import math
import random
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from ..utilities import fraction_to_json, parse_fraction

LOGGER = logging.getLogger(__name__)

Edge = Tuple[int, int, Fraction]


class GraphModel(Enum):
    COMPLETE_UNIFORM = 'complete-uniform'
    ERDOS_RENYI = 'erdos-renyi'


class WeightedGraph:
    """
    undirected network with exact positive edge weights
    """

    def __init__(self, node_count: int, edges: Sequence[Tuple[int, int, Any]] = None):
        """
        :param node_count: number of nodes, identified by ``0 .. node_count - 1``
        :param edges: ``(u, v, weight)`` triples
        """

        if node_count < 1:
            raise ValueError(f'graph must have at least one node, not {node_count}')
        if edges is None:
            edges = []

        self.__node_count = int(node_count)
        self.__edges = {}
        for u, v, weight in edges:
            u, v = int(u), int(v)
            weight = parse_fraction(weight)
            for node in (u, v):
                if not 0 <= node < self.__node_count:
                    raise KeyError(f'"{node}" not in nodes 0..{self.__node_count - 1}')
            if u == v:
                raise ValueError(f'self-loop edge at node {u}')
            if weight <= 0:
                raise ValueError(f'edge ({u}, {v}) has non-positive weight {weight}')
            key = (min(u, v), max(u, v))
            if key in self.__edges:
                raise ValueError(f'duplicate edge {key}')
            self.__edges[key] = weight

    @property
    def node_count(self) -> int:
        return self.__node_count

    @property
    def edges(self) -> List[Edge]:
        return [(u, v, weight) for (u, v), weight in sorted(self.__edges.items())]

    def weight(self, u: int, v: int) -> Fraction:
        key = (min(u, v), max(u, v))
        if key not in self.__edges:
            raise KeyError(f'"{key}" not in edges')
        return self.__edges[key]

    @property
    def min_weight(self) -> Optional[Fraction]:
        if len(self.__edges) == 0:
            return None
        return min(self.__edges.values())

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.node_count))
        graph.add_weighted_edges_from(self.edges)
        return graph

    @property
    def is_connected(self) -> bool:
        return nx.is_connected(self.to_networkx())

    @property
    def is_normalized(self) -> bool:
        return self.min_weight is None or self.min_weight >= 1

    def to_json(self) -> Dict[str, Any]:
        return {
            'n': self.node_count,
            'edges': [[u, v, *fraction_to_json(weight)] for u, v, weight in self.edges],
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> 'WeightedGraph':
        try:
            node_count = data['n']
            edges = [(edge[0], edge[1], Fraction(edge[2], edge[3])) for edge in data['edges']]
        except (KeyError, IndexError, TypeError) as error:
            raise ValueError(f'malformed graph JSON: {error}')
        return cls(node_count, edges)

    def __iter__(self) -> Iterator[Edge]:
        yield from self.edges

    def __len__(self) -> int:
        return len(self.__edges)

    def __eq__(self, other: 'WeightedGraph') -> bool:
        return isinstance(other, WeightedGraph) and self.to_json() == other.to_json()

    def __str__(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.node_count}, {len(self)} edges)'


class Metric:
    """
    finite metric space over points ``0 .. size - 1`` with exact distances
    """

    def __init__(self, distances: Sequence[Sequence[Any]]):
        self.__distances = tuple(tuple(parse_fraction(value) for value in row) for row in distances)
        if len(self.__distances) == 0:
            raise ValueError('metric must have at least one point')
        for row in self.__distances:
            if len(row) != len(self.__distances):
                raise ValueError('distance matrix must be square')

    @classmethod
    def uniform(cls, size: int, distance: Fraction = 1) -> 'Metric':
        return cls(
            [[0 if u == v else distance for v in range(size)] for u in range(size)]
        )

    @property
    def size(self) -> int:
        return len(self.__distances)

    def distance(self, u: int, v: int) -> Fraction:
        return self.__distances[u][v]

    def __getitem__(self, pair: Tuple[int, int]) -> Fraction:
        u, v = pair
        return self.__distances[u][v]

    @property
    def diameter(self) -> Fraction:
        return max(max(row) for row in self.__distances)

    @property
    def min_distance(self) -> Optional[Fraction]:
        off_diagonal = [
            self.__distances[u][v]
            for u in range(self.size)
            for v in range(self.size)
            if u != v
        ]
        return min(off_diagonal) if len(off_diagonal) > 0 else None

    def check(self) -> Optional[Tuple[int, int, int]]:
        """
        verify the metric axioms

        :return: first ``(u, v, w)`` triple violating zero diagonal, symmetry, positivity, or triangle inequality; ``None`` if valid
        """

        points = range(self.size)
        for u in points:
            if self.__distances[u][u] != 0:
                return u, u, u
            for v in points:
                if self.__distances[u][v] != self.__distances[v][u]:
                    return u, v, u
                if u != v and self.__distances[u][v] < 1:
                    return u, v, v
                for w in points:
                    if self.__distances[u][w] > self.__distances[u][v] + self.__distances[v][w]:
                        return u, v, w
        return None

    def __eq__(self, other: 'Metric') -> bool:
        return isinstance(other, Metric) and self.__distances == other.__distances

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}(size={self.size})'


def normalize_weights(graph: WeightedGraph) -> WeightedGraph:
    """
    scale all edge weights so the smallest weight is exactly 1

    :param graph: connected graph with positive weights
    :return: normalized graph
    """

    if not graph.is_connected:
        raise ValueError(f'cannot normalize disconnected graph {graph!r}')
    scale = graph.min_weight
    if scale is None:
        return WeightedGraph(graph.node_count)
    return WeightedGraph(graph.node_count, [(u, v, weight / scale) for u, v, weight in graph])


def metric_closure(graph: WeightedGraph) -> Metric:
    """
    all-pairs shortest-path distances of a normalized graph

    :param graph: normalized connected graph
    :return: shortest-path metric
    """

    if not graph.is_normalized:
        raise ValueError(f'graph {graph!r} must be normalized before taking its metric closure')
    lengths = dict(nx.all_pairs_dijkstra_path_length(graph.to_networkx(), weight='weight'))
    points = range(graph.node_count)
    try:
        return Metric([[lengths[u][v] for v in points] for u in points])
    except KeyError as error:
        raise ValueError(f'graph {graph!r} is disconnected; node {error} unreachable')


def random_spanning_tree(node_count: int, rng: random.Random) -> List[Tuple[int, int]]:
    """
    uniformly random labelled spanning tree over ``node_count`` nodes, via a uniform Prufer sequence
    """

    if node_count < 2:
        return []
    sequence = [rng.randrange(node_count) for _ in range(node_count - 2)]
    tree = nx.from_prufer_sequence(sequence)
    return sorted((min(u, v), max(u, v)) for u, v in tree.edges)


def random_graph(
    node_count: int,
    model: GraphModel,
    seed: int,
    max_weight: int = 1,
    probability: float = None,
) -> WeightedGraph:
    """
    generate a connected, normalized random graph deterministically from a seed

    :param node_count: number of nodes
    :param model: random graph model
    :param seed: random seed
    :param max_weight: integer weights are drawn uniformly from ``1 .. max_weight``
    :param probability: edge probability of the Erdos-Renyi model; defaults to ``2 ln n / n``
    :return: connected normalized graph
    """

    if not isinstance(model, GraphModel):
        model = GraphModel(model)
    if node_count < 1:
        raise ValueError(f'node count must be positive, not {node_count}')
    if max_weight < 1:
        raise ValueError(f'maximum weight must be at least 1, not {max_weight}')

    rng = random.Random(seed)
    if model == GraphModel.COMPLETE_UNIFORM:
        pairs = [(u, v) for u in range(node_count) for v in range(u + 1, node_count)]
    else:
        if probability is None:
            probability = min(1.0, 2 * math.log(node_count) / node_count) if node_count > 1 else 0.0
        sample = nx.gnp_random_graph(node_count, probability, seed=rng.getrandbits(32))
        pairs = sorted((min(u, v), max(u, v)) for u, v in sample.edges)
        if node_count > 1 and not nx.is_connected(sample):
            LOGGER.debug(f'adding a random spanning tree to disconnected sample of {node_count} nodes')
            pairs = sorted(set(pairs) | set(random_spanning_tree(node_count, rng)))

    edges = [(u, v, Fraction(rng.randint(1, max_weight))) for u, v in pairs]
    return normalize_weights(WeightedGraph(node_count, edges))
