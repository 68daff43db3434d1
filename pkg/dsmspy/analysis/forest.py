from dataclasses import dataclass
from fractions import Fraction
import json
import logging
import random
from typing import Any, Dict, Hashable, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx

from ..network.graph import Metric
from ..network.hst import Hst
from ..protocol.base import Request, ScheduleForest
from ..utilities import fraction_to_json

LOGGER = logging.getLogger(__name__)

BRUTEFORCE_LIMIT = 12

Distance = Union[Metric, Hst]
Pair = Tuple[int, int]


class InstanceTooLarge(ValueError):
    pass


class UnionFind:
    def __init__(self):
        self.forest = {}

    def find(self, key: Hashable) -> Hashable:
        if key not in self.forest:
            self.forest[key] = key

        root = key
        while root != self.forest[root]:
            root = self.forest[root]

        # path compression
        while key != self.forest[key]:
            self.forest[key], key = root, self.forest[key]

        return root

    def union(self, a: Hashable, b: Hashable) -> bool:
        """
        :return: whether ``a`` and ``b`` were in different sets
        """

        root_a = self.find(a)
        root_b = self.find(b)
        if root_a == root_b:
            return False
        self.forest[root_b] = root_a
        return True


class RequestForest:
    """
    forest over requests; valid when it spans all requests with one tree per dummy request
    """

    def __init__(self, requests: Sequence[Request], edges: Sequence[Pair] = None):
        self.__requests = {request.id: request for request in requests}
        self.__edges = [tuple(edge) for edge in (edges if edges is not None else [])]
        for edge in self.__edges:
            for request in edge:
                if request not in self.__requests:
                    raise KeyError(f'"{request}" not in forest requests')

    @classmethod
    def from_schedule(cls, forest: ScheduleForest, requests: Sequence[Request]) -> 'RequestForest':
        return cls(requests, forest.pairs())

    @property
    def requests(self) -> List[Request]:
        return list(self.__requests.values())

    def request(self, request_id: int) -> Request:
        return self.__requests[request_id]

    @property
    def edges(self) -> List[Pair]:
        return list(self.__edges)

    @property
    def component_heads(self) -> List[int]:
        return [request.id for request in self.__requests.values() if request.is_dummy]

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.__requests)
        graph.add_edges_from(self.__edges)
        return graph

    def components(self) -> Dict[Optional[int], Set[int]]:
        """
        connected components keyed by the dummy they contain; a dummy-free component is keyed ``None``
        """

        components = {}
        for component in nx.connected_components(self.to_networkx()):
            heads = [request for request in component if self.__requests[request].is_dummy]
            components.setdefault(heads[0] if len(heads) == 1 else None, set()).update(component)
        return components

    def component_of(self, request_id: int) -> Optional[int]:
        for head, component in self.components().items():
            if request_id in component:
                return head
        return None

    def violations(self) -> List[str]:
        """
        reasons why this is not a spanning forest with exactly one dummy per tree
        """

        graph = self.to_networkx()
        reasons = []
        if len(set(frozenset(edge) for edge in self.__edges)) != len(self.__edges):
            reasons.append('duplicate edges')
        if len(graph) > 0 and not nx.is_forest(graph):
            reasons.append('contains a cycle')
        for component in nx.connected_components(graph):
            dummies = sorted(request for request in component if self.__requests[request].is_dummy)
            if len(dummies) != 1:
                reasons.append(f'component {sorted(component)} contains {len(dummies)} dummies')
        return reasons

    @property
    def is_valid(self) -> bool:
        return len(self.violations()) == 0

    def validate(self):
        violations = self.violations()
        if len(violations) > 0:
            raise ValueError(f'not a spanning forest with one dummy per tree: {"; ".join(violations)}')

    def replaced(self, removed: Sequence[Pair], added: Sequence[Pair]) -> 'RequestForest':
        removed = [tuple(edge) for edge in removed]
        return RequestForest(
            self.requests,
            [edge for edge in self.__edges if edge not in removed] + [tuple(edge) for edge in added],
        )

    def weight(self, metric: Distance) -> Fraction:
        return forest_weight(self, metric)

    def to_json(self, metric: Distance = None) -> Dict[str, Any]:
        data = {'edges': [list(edge) for edge in self.__edges]}
        if metric is not None:
            data['weight'] = fraction_to_json(self.weight(metric))
        return data

    def __len__(self) -> int:
        return len(self.__edges)

    def __contains__(self, edge: Pair) -> bool:
        return tuple(edge) in self.__edges

    def __eq__(self, other: 'RequestForest') -> bool:
        return (
            isinstance(other, RequestForest)
            and set(map(frozenset, self.__edges)) == set(map(frozenset, other.__edges))
            and set(self.__requests) == set(other.__requests)
        )

    def __str__(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({len(self.__requests)} requests, edges={self.__edges})'


@dataclass(frozen=True)
class ExchangeVerdict:
    holds: bool
    edge: Optional[Pair] = None
    replacement: Optional[Pair] = None
    ratio: Optional[Fraction] = None


def _request_pool(requests: Sequence[Request], dummies: Sequence[Request]) -> List[Request]:
    pool = {request.id: request for request in dummies}
    for request in requests:
        pool.setdefault(request.id, request)
    for request in pool.values():
        if request.id in {dummy.id for dummy in dummies} and not request.is_dummy:
            raise ValueError(f'request {request.id} is listed as a dummy but is not one')
    return sorted(pool.values(), key=lambda request: request.id)


def _distance(metric: Distance, a: Request, b: Request) -> Fraction:
    return Fraction(metric.distance(a.node, b.node))


def forest_weight(forest: RequestForest, metric: Distance) -> Fraction:
    """
    total distance between the endpoints of every forest edge

    :param forest: request forest
    :param metric: graph metric or HST whose points host the requests
    :return: exact weight
    """

    return sum(
        (_distance(metric, forest.request(a), forest.request(b)) for a, b in forest.edges),
        Fraction(0),
    )


def min_k_forest(requests: Sequence[Request], dummies: Sequence[Request], metric: Distance) -> RequestForest:
    """
    minimum-weight spanning forest with one dummy per tree, by Kruskal on the graph whose dummies are merged into one vertex

    :param requests: requests, dummies may be included
    :param dummies: dummy requests
    :param metric: distances between request locations
    :return: minimum forest
    """

    pool = _request_pool(requests, dummies)
    sets = UnionFind()
    dummy_ids = [request.id for request in pool if request.is_dummy]
    for dummy in dummy_ids[1:]:
        sets.union(dummy_ids[0], dummy)

    candidates = sorted(
        (_distance(metric, a, b), a.id, b.id)
        for index, a in enumerate(pool)
        for b in pool[index + 1:]
        if not (a.is_dummy and b.is_dummy)
    )
    edges = [(a, b) for _, a, b in candidates if sets.union(a, b)]
    return RequestForest(pool, edges)


def min_k_forest_bruteforce(
    requests: Sequence[Request],
    dummies: Sequence[Request],
    metric: Distance,
    limit: int = BRUTEFORCE_LIMIT,
) -> RequestForest:
    """
    minimum-weight spanning forest with one dummy per tree, by exhaustive search over predecessor assignments

    requests sharing a location are interchangeable at distance 0, so the search runs over one representative per location and chains the others behind it afterwards; every representative picks a predecessor among all other representatives and dummies, assignments that close a cycle are discarded, and a partial assignment is cut when its weight plus the weight of a minimum spanning tree joining its components cannot improve on the best complete assignment

    :param requests: requests, dummies may be included
    :param dummies: dummy requests
    :param metric: distances between request locations
    :param limit: largest number of non-dummy requests searched
    :return: minimum forest, with edges oriented ``(predecessor, successor)``
    """

    pool = _request_pool(requests, dummies)
    movers = [request for request in pool if not request.is_dummy]
    if len(movers) > limit:
        raise InstanceTooLarge(f'{len(movers)} requests exceed the exhaustive search limit of {limit}')
    dummy_ids = [request.id for request in pool if request.is_dummy]
    if len(dummy_ids) == 0:
        raise ValueError('at least one dummy request is required')

    # co-located requests follow the dummy or the lowest request at their location
    chains = {}
    for request in sorted(pool, key=lambda request: (not request.is_dummy, request.id)):
        chains.setdefault(request.node, []).append(request)
    representatives = [chain[0] for chain in chains.values()]
    movers = sorted(
        (request for request in representatives if not request.is_dummy), key=lambda request: request.id
    )
    searched = sorted(representatives, key=lambda request: request.id)

    candidates = {
        request.id: sorted(
            (_distance(metric, other, request), other.id) for other in searched if other.id != request.id
        )
        for request in movers
    }
    links = sorted(
        (_distance(metric, a, b), a.id, b.id)
        for index, a in enumerate(searched)
        for b in searched[index + 1:]
        if not (a.is_dummy and b.is_dummy)
    )

    predecessors = {}
    best = {'weight': None, 'predecessors': {}}

    def closes_cycle(successor: int, predecessor: int) -> bool:
        while predecessor in predecessors:
            if predecessor == successor:
                return True
            predecessor = predecessors[predecessor]
        return predecessor == successor

    def completion_bound(index: int) -> Fraction:
        # every unassigned representative roots its own component; the dummies form one more
        sets = UnionFind()
        for dummy in dummy_ids[1:]:
            sets.union(dummy_ids[0], dummy)
        for successor, predecessor in predecessors.items():
            sets.union(successor, predecessor)
        needed = len(movers) - index
        bound = Fraction(0)
        for distance, a, b in links:
            if needed == 0:
                break
            if sets.union(a, b):
                bound += distance
                needed -= 1
        return bound

    def search(index: int, weight: Fraction):
        if best['weight'] is not None and weight + completion_bound(index) >= best['weight']:
            return
        if index == len(movers):
            best['weight'] = weight
            best['predecessors'] = dict(predecessors)
            return
        successor = movers[index].id
        for distance, predecessor in candidates[successor]:
            if closes_cycle(successor, predecessor):
                continue
            predecessors[successor] = predecessor
            search(index + 1, weight + distance)
            del predecessors[successor]

    search(0, Fraction(0))
    edges = [(predecessor, successor) for successor, predecessor in best['predecessors'].items()]
    for chain in chains.values():
        edges.extend((chain[index].id, chain[index + 1].id) for index in range(len(chain) - 1))
    return RequestForest(pool, sorted(edges))


def build_locality_forest(
    hst: Hst, requests: Sequence[Request], dummies: Sequence[Request], tie_seed: int = None
) -> RequestForest:
    """
    bottom-up forest in which every component restricted to any subtree stays connected, and components coexisting in a subtree each hold a dummy

    inside every subtree the dummy-free components are chained together, and each is attached to the tail of a dummy component when the subtree holds one; every component is kept as a path, so the result is also a serving order

    :param hst: HST whose leaves host the requests
    :param requests: requests, dummies may be included
    :param dummies: dummy requests
    :param tie_seed: seed for choosing which dummy component absorbs a dummy-free one; ``None`` takes the lowest dummy
    :return: locality-based forest
    """

    pool = _request_pool(requests, dummies)
    at_leaf = {}
    for request in pool:
        if request.node not in hst or not hst.is_leaf(request.node):
            raise ValueError(f'request {request.id} is at {request.node}, which is not a leaf')
        at_leaf.setdefault(request.node, []).append(request)

    rng = random.Random(tie_seed) if tie_seed is not None else None
    edges = []

    def components(node: int) -> List[Dict[str, Any]]:
        if hst.is_leaf(node):
            residents = sorted(at_leaf.get(node, []), key=lambda request: (not request.is_dummy, request.id))
            if len(residents) == 0:
                return []
            for previous, current in zip(residents, residents[1:]):
                edges.append((previous.id, current.id))
            return [{
                'dummy': residents[0].id if residents[0].is_dummy else None,
                'head': residents[0].id,
                'tail': residents[-1].id,
            }]

        parts = [part for child in hst.children(node) for part in components(child)]
        anchored = [part for part in parts if part['dummy'] is not None]
        loose = [part for part in parts if part['dummy'] is None]
        if len(anchored) == 0:
            for previous, current in zip(loose, loose[1:]):
                edges.append((previous['tail'], current['head']))
            if len(loose) == 0:
                return []
            return [{'dummy': None, 'head': loose[0]['head'], 'tail': loose[-1]['tail']}]
        for part in loose:
            target = anchored[0] if rng is None else rng.choice(anchored)
            edges.append((target['tail'], part['head']))
            target['tail'] = part['tail']
        return anchored

    components(hst.root)
    return RequestForest(pool, edges)


def _subtree_members(forest: RequestForest, hst: Hst) -> Dict[int, Dict[Optional[int], Set[int]]]:
    components = forest.components()
    members = {}
    for node in hst.nodes:
        leaves = set(hst.subtree_leaves(node))
        members[node] = {
            head: {request for request in component if forest.request(request).node in leaves}
            for head, component in components.items()
        }
        members[node] = {head: inside for head, inside in members[node].items() if len(inside) > 0}
    return members


def check_intra_component(forest: RequestForest, hst: Hst) -> List[Tuple[int, Optional[int]]]:
    """
    :return: ``(subtree, dummy)`` pairs whose component restricted to the subtree is disconnected
    """

    graph = forest.to_networkx()
    witnesses = []
    for node, components in _subtree_members(forest, hst).items():
        for head, inside in sorted(components.items(), key=lambda item: (item[0] is None, item[0] or 0)):
            if not nx.is_connected(graph.subgraph(inside)):
                witnesses.append((node, head))
    return witnesses


def check_inter_component(forest: RequestForest, hst: Hst) -> List[Tuple[int, Optional[int]]]:
    """
    :return: ``(subtree, dummy)`` pairs where several components share the subtree but the component's dummy lies outside it
    """

    witnesses = []
    for node, components in _subtree_members(forest, hst).items():
        if len(components) < 2:
            continue
        for head, inside in sorted(components.items(), key=lambda item: (item[0] is None, item[0] or 0)):
            if head is None or head not in inside:
                witnesses.append((node, head))
    return witnesses


def verify_exchange_property(forest: RequestForest, metric: Distance, lam: Any = 1) -> ExchangeVerdict:
    """
    for every edge, find the lightest replacement that reconnects the forest after the edge is removed, and require ``lam`` times its weight to be at least the removed weight; with ``lam = 1`` this certifies a minimum forest

    :param forest: spanning forest with one dummy per tree
    :param metric: distances between request locations
    :param lam: approximation factor, at least 1
    :return: verdict with the first counterexample, if any
    """

    lam = Fraction(lam)
    if lam < 1:
        raise ValueError(f'exchange factor must be at least 1, not {lam}')
    forest.validate()

    requests = forest.requests
    worst = Fraction(0)
    for edge in forest.edges:
        graph = forest.to_networkx()
        graph.remove_edge(*edge)
        sides = [nx.node_connected_component(graph, end) for end in edge]
        detached = [
            side for side in sides if not any(forest.request(request).is_dummy for request in side)
        ][0]
        replacement = min(
            (_distance(metric, forest.request(inside), outside), inside, outside.id)
            for inside in sorted(detached)
            for outside in requests
            if outside.id not in detached
        )
        removed_weight = _distance(metric, forest.request(edge[0]), forest.request(edge[1]))
        replacement_weight, inside, outside = replacement
        if replacement_weight == 0:
            ratio = Fraction(1) if removed_weight == 0 else None
        else:
            ratio = removed_weight / replacement_weight
        if ratio is None or lam * replacement_weight < removed_weight:
            return ExchangeVerdict(False, edge, (inside, outside), ratio)
        worst = max(worst, ratio)
    return ExchangeVerdict(True, ratio=worst)


def opt_lower_bound(
    requests: Sequence[Request],
    dummies: Sequence[Request],
    metric: Distance,
    limit: int = BRUTEFORCE_LIMIT,
) -> Fraction:
    """
    weight of a minimum spanning forest with one dummy per tree, which no schedule of a one-shot instance can undercut
    """

    if any(request.time != 0 for request in requests):
        raise ValueError('lower bound applies only to one-shot instances')
    return forest_weight(min_k_forest_bruteforce(requests, dummies, metric, limit), metric)
