import json
from typing import Any, Dict, List, Sequence, Tuple, Union

from .latency import LatencyModel
from ..network.graph import metric_closure, normalize_weights, WeightedGraph
from ..network.hst import embed_frt, Hst
from ..protocol.base import Request
from ..protocol.policy import LowestIdPolicy, TiePolicy
from ..utilities import parse_fraction

Placement = Union[Request, Tuple[int, Any], Tuple[int, Any, str]]


class Scenario:
    """
    complete input of one execution: overlay tree, initial servers, requests, latency model and tie policy
    """

    def __init__(
        self,
        hst: Hst,
        server_leaves: Sequence[int],
        requests: Sequence[Placement] = None,
        latency: LatencyModel = None,
        tie_policy: TiePolicy = None,
        seed: int = 0,
    ):
        """
        :param hst: overlay tree
        :param server_leaves: initial server leaves; dummy request ``z`` is placed at ``server_leaves[z]``
        :param requests: ``Request`` objects, or ``(leaf, time[, label])`` placements numbered after the dummies
        :param latency: latency model, synchronous by default
        :param tie_policy: tie policy, lowest id by default
        :param seed: scenario seed, recorded for provenance
        """

        self.hst = hst
        self.server_leaves = list(server_leaves)
        self.latency = latency if latency is not None else LatencyModel.synchronous()
        self.tie_policy = tie_policy if tie_policy is not None else LowestIdPolicy()
        self.seed = seed

        if len(self.server_leaves) == 0:
            raise ValueError('at least one server is required')
        if len(set(self.server_leaves)) != len(self.server_leaves):
            raise ValueError(f'server leaves must be distinct: {self.server_leaves}')

        self.__dummies = [
            Request(index, leaf, 0, is_dummy=True, label=f'server {index}')
            for index, leaf in enumerate(self.server_leaves)
        ]
        self.__requests = []
        for placement in requests if requests is not None else []:
            if not isinstance(placement, Request):
                next_id = len(self.__dummies) + len(self.__requests)
                leaf, time, *label = placement
                placement = Request(next_id, leaf, time, label=label[0] if len(label) > 0 else None)
            self.__requests.append(placement)

        identifiers = [request.id for request in self.all_requests]
        if len(set(identifiers)) != len(identifiers):
            raise ValueError(f'request ids must be unique: {identifiers}')
        for request in self.all_requests:
            if request.node not in hst or not hst.is_leaf(request.node):
                raise ValueError(f'request {request.id} is at {request.node}, which is not a leaf')
        for request in self.__requests:
            if request.is_dummy:
                raise ValueError(f'request {request.id} cannot be a dummy; dummies come from server leaves')

    @property
    def dummies(self) -> List[Request]:
        return list(self.__dummies)

    @property
    def requests(self) -> List[Request]:
        """
        non-dummy requests
        """

        return list(self.__requests)

    @property
    def all_requests(self) -> List[Request]:
        return self.__dummies + self.__requests

    @property
    def one_shot(self) -> bool:
        return all(request.time == 0 for request in self.__requests)

    def request(self, request_id: int) -> Request:
        for request in self.all_requests:
            if request.id == request_id:
                return request
        raise KeyError(f'"{request_id}" not in scenario requests')

    def to_json(self) -> Dict[str, Any]:
        return {
            'hst': self.hst.to_json(),
            'servers': self.server_leaves,
            'requests': [request.to_json() for request in self.__requests],
            'latency': self.latency.to_json(),
            'tie_policy': self.tie_policy.to_json(),
            'seed': self.seed,
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> 'Scenario':
        """
        read a scenario with either an embedded HST, or a graph with an embedding seed whose server and request locations are graph nodes
        """

        if 'hst' in data:
            hst = Hst.from_json(data['hst'])

            def locate(node: Any) -> int:
                return int(node)

        elif 'graph' in data:
            graph = normalize_weights(WeightedGraph.from_json(data['graph']))
            hst = embed_frt(
                metric_closure(graph),
                parse_fraction(data.get('alpha', 2)),
                int(data.get('embedding_seed', 0)),
            )

            def locate(node: Any) -> int:
                return hst.leaf_of(int(node))

        else:
            raise ValueError('scenario must contain either "hst" or "graph"')

        server_leaves = [locate(node) for node in data['servers']]
        requests = []
        for index, entry in enumerate(data.get('requests', [])):
            requests.append(
                Request(
                    id=int(entry.get('id', len(server_leaves) + index)),
                    node=locate(entry['node']),
                    time=parse_fraction(entry.get('time', 0)),
                    label=entry.get('label'),
                )
            )

        return cls(
            hst,
            server_leaves,
            requests,
            latency=LatencyModel.from_json(data.get('latency', 'synchronous')),
            tie_policy=TiePolicy.from_json(data.get('tie_policy', 'lowest-id')),
            seed=int(data.get('seed', 0)),
        )

    def __str__(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self) -> str:
        return (
            f'{self.__class__.__name__}({self.hst!r}, servers={self.server_leaves}, '
            f'{len(self.__requests)} requests, {self.latency!r}, {self.tie_policy!r})'
        )
