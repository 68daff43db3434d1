from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, TYPE_CHECKING

import networkx as nx

from ..network.hst import hst_distance
from ..protocol.overlay import OverlayState

if TYPE_CHECKING:
    from ..simulation.trace import Trace


class CheckMode(Enum):
    OFF = 'off'
    INLINE = 'inline'
    SAMPLED = 'sampled'


@dataclass
class CheckReport:
    """
    named verdicts with witnesses for the failed checks
    """

    verdicts: Dict[str, bool] = field(default_factory=dict)
    witnesses: Dict[str, Any] = field(default_factory=dict)
    first_violation: Optional[int] = None

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    @property
    def failures(self) -> List[str]:
        return [name for name, verdict in self.verdicts.items() if not verdict]

    def record(self, name: str, witnesses: List[Any]):
        self.verdicts[name] = len(witnesses) == 0
        if len(witnesses) > 0:
            self.witnesses[name] = witnesses

    def merge(self, other: 'CheckReport') -> 'CheckReport':
        first_violations = [
            index for index in (self.first_violation, other.first_violation) if index is not None
        ]
        return CheckReport(
            {**self.verdicts, **other.verdicts},
            {**self.witnesses, **other.witnesses},
            min(first_violations) if len(first_violations) > 0 else None,
        )

    def to_json(self) -> Dict[str, Any]:
        return {
            'passed': self.passed,
            'verdicts': dict(sorted(self.verdicts.items())),
            'witnesses': {name: _jsonable(value) for name, value in sorted(self.witnesses.items())},
            'first_violation': self.first_violation,
        }


def _jsonable(value: Any) -> Any:
    if isinstance(value, (list, tuple, set, frozenset)):
        values = [_jsonable(entry) for entry in value]
        return sorted(values) if isinstance(value, (set, frozenset)) else values
    if isinstance(value, dict):
        return {str(key): _jsonable(entry) for key, entry in value.items()}
    return value


def check_state(state: OverlayState) -> CheckReport:
    """
    check the overlay invariants: link sets are non-empty and valid, every tree edge carries exactly one link or one message, the links are acyclic apart from leaf self-loops, and every leaf can follow links to a leaf pointing to itself

    :param state: overlay state
    :return: report; never raises for a broken state
    """

    hst = state.hst
    report = CheckReport()

    report.record('links_non_empty', [node for node in hst.nodes if len(state.links(node)) == 0])
    report.record(
        'links_valid',
        [
            node
            for node in hst.nodes
            for link in state.links(node)
            if not (link in hst.neighbors(node) or (link == node and hst.is_leaf(node)))
        ],
    )

    crowded = []
    for parent, child in hst.edges:
        carriers = (
            int(state.points_to(parent, child))
            + int(state.points_to(child, parent))
            + len(state.messages_on(parent, child))
        )
        if carriers != 1:
            crowded.append([parent, child, carriers])
    report.record('edge_exclusivity', crowded)

    graph = nx.DiGraph()
    graph.add_nodes_from(hst.nodes)
    graph.add_edges_from(
        (node, link) for node in hst.nodes for link in state.links(node) if link != node
    )
    try:
        cycle = [list(edge[:2]) for edge in nx.find_cycle(graph)]
    except nx.NetworkXNoCycle:
        cycle = []
    report.record('acyclic', cycle)

    servers = {leaf for leaf in hst.leaves if state.links(leaf) == {leaf}}
    report.record(
        'leaf_reaches_server',
        [
            leaf
            for leaf in hst.leaves
            if len(servers & (nx.descendants(graph, leaf) | {leaf})) == 0
        ],
    )

    return report


def check_trace(trace: 'Trace') -> CheckReport:
    """
    check a finished execution: every request is scheduled once, messages travel simple direct paths within their latency bound, and the schedule forest consists of one path per dummy that yields each server's serving order

    :param trace: trace of a terminated run
    :return: report; never raises for a broken trace
    """

    hst = trace.hst
    report = CheckReport()
    dummies = [request.id for request in trace.dummies]

    try:
        forest = trace.forest
    except ValueError as error:
        for name in ('all_scheduled', 'forest_paths', 'serving_order'):
            report.record(name, [str(error)])
        forest = None

    if forest is not None:
        scheduled = [edge.successor for edge in forest]
        report.record(
            'all_scheduled',
            [
                request.id
                for request in trace.requests
                if not request.is_dummy and scheduled.count(request.id) != 1
            ],
        )

    messages = trace.messages
    report.record(
        'simple_paths',
        [message.id for message in messages.values() if len(set(message.hops)) != len(message.hops)],
    )
    report.record(
        'direct_paths',
        [
            message.id
            for message in messages.values()
            if message.delivered and message.hops != hst.path(message.source, message.destination)
        ],
    )
    report.record(
        'latency_bound',
        [
            message.id
            for message in messages.values()
            if message.delivered
            and message.latency > hst_distance(hst, message.source, message.destination)
        ],
    )

    if forest is not None:
        broken = [
            request.id for request in trace.requests if forest.component_of(request.id) is None
        ]
        branching = [
            request.id for request in trace.requests if len(forest.successors_of(request.id)) > 1
        ]
        if len(set(dummies)) != len(dummies):
            broken.extend(dummies)
        report.record('forest_paths', broken + branching)

        schedules = forest.schedules()
        served = [request for schedule in schedules.values() for request in schedule]
        report.record(
            'serving_order',
            [
                request.id
                for request in trace.requests
                if served.count(request.id) != 1
            ],
        )

    return report
