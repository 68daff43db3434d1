from dataclasses import dataclass, replace
from fractions import Fraction
import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .base import Message, ProtocolViolation, Request
from .policy import LowestIdPolicy, TiePolicy
from ..network.hst import Hst

LOGGER = logging.getLogger(__name__)


class OverlayState:
    """
    directed overlay on the HST: every node's link set, the messages in transit, and the last request invoked at every leaf
    """

    def __init__(
        self,
        hst: Hst,
        links: Dict[int, Iterable[int]],
        tails: Dict[int, int],
        in_flight: Dict[Tuple[int, int], Message] = None,
    ):
        self.__hst = hst
        self.__links = {node: set(links.get(node, ())) for node in hst.nodes}
        self.__tails = dict(tails)
        self.__in_flight = dict(in_flight) if in_flight is not None else {}

    @property
    def hst(self) -> Hst:
        return self.__hst

    def links(self, node: int) -> FrozenSet[int]:
        if node not in self.__links:
            raise KeyError(f'"{node}" not in overlay nodes')
        return frozenset(self.__links[node])

    def set_links(self, node: int, links: Iterable[int]):
        """
        overwrite the link set of a node; the protocol never does this, tests use it to inject faults
        """

        if node not in self.__links:
            raise KeyError(f'"{node}" not in overlay nodes')
        self.__links[node] = set(links)

    def points_to(self, u: int, v: int) -> bool:
        return v in self.__links[u]

    @property
    def in_flight(self) -> Dict[Tuple[int, int], Message]:
        """
        messages in transit, keyed by directed ``(from, to)`` edge
        """

        return dict(self.__in_flight)

    def messages_on(self, u: int, v: int) -> List[Message]:
        return [
            message
            for edge, message in self.__in_flight.items()
            if edge == (u, v) or edge == (v, u)
        ]

    def tail(self, leaf: int) -> Optional[int]:
        """
        :return: id of the last request invoked at ``leaf``
        """

        return self.__tails.get(leaf)

    @property
    def tails(self) -> Dict[int, int]:
        return dict(self.__tails)

    def _update(self, node: int, links: Set[int]):
        self.__links[node] = links

    def _send(self, edge: Tuple[int, int], message: Message):
        if len(self.messages_on(*edge)) > 0:
            raise ProtocolViolation(f'edge {edge} already carries a message')
        message.current_edge = edge
        self.__in_flight[edge] = message

    def _take(self, edge: Tuple[int, int], message: Message):
        if self.__in_flight.get(edge) is not message:
            raise ProtocolViolation(f'message {message.id} is not in transit on edge {edge}')
        del self.__in_flight[edge]
        message.current_edge = None

    def _set_tail(self, leaf: int, request: int):
        self.__tails[leaf] = request

    def snapshot(self) -> 'OverlayState':
        """
        value copy that later protocol steps do not affect
        """

        return OverlayState(
            self.__hst,
            {node: set(links) for node, links in self.__links.items()},
            self.__tails,
            {
                edge: replace(message, hops_taken=list(message.hops_taken))
                for edge, message in self.__in_flight.items()
            },
        )

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.__hst!r}, {len(self.__in_flight)} in flight)'


@dataclass(frozen=True)
class InvokeOutcome:
    request: int
    predecessor: Optional[int] = None
    message: Optional[Message] = None

    @property
    def scheduled_locally(self) -> bool:
        return self.message is None


@dataclass(frozen=True)
class ReceiveOutcome:
    message: Message
    node: int
    sender: int
    links_before: FrozenSet[int]
    links_after: FrozenSet[int]
    next_hop: Optional[int] = None
    predecessor: Optional[int] = None

    @property
    def scheduled(self) -> bool:
        return self.next_hop is None


def init_overlay(hst: Hst, server_leaves: Sequence[int]) -> OverlayState:
    """
    orient every node toward the servers: nodes above a server point down to it, every other node points to its parent, and server leaves point to themselves

    :param hst: overlay tree
    :param server_leaves: initial server locations; dummy request ``z`` sits at ``server_leaves[z]``
    :return: initial state
    """

    server_leaves = list(server_leaves)
    if len(server_leaves) == 0:
        raise ValueError('at least one server leaf is required')
    if len(set(server_leaves)) != len(server_leaves):
        raise ValueError(f'server leaves must be distinct: {server_leaves}')
    for leaf in server_leaves:
        if leaf not in hst or not hst.is_leaf(leaf):
            raise ValueError(f'server location {leaf} is not a leaf')

    hosting = set(server_leaves)
    for leaf in server_leaves:
        hosting.update(hst.ancestors(leaf))

    links = {}
    for node in hst.nodes:
        if hst.is_leaf(node) and node in server_leaves:
            links[node] = {node}
        else:
            downward = {child for child in hst.children(node) if child in hosting}
            links[node] = downward if len(downward) > 0 else {hst.parent(node)}

    tails = {leaf: dummy for dummy, leaf in enumerate(server_leaves)}
    return OverlayState(hst, links, tails)


def on_invoke(state: OverlayState, node: int, request: Request, time: Fraction = None) -> InvokeOutcome:
    """
    a leaf invokes a request: schedule it locally behind the leaf's last request if the leaf points to itself, otherwise send a find-predecessor message to the parent

    :param state: overlay state, updated in place
    :param node: invoking leaf
    :param request: invoked request
    :param time: invocation time, defaults to the request time
    :return: local schedule or emitted message
    """

    if request.node != node:
        raise ValueError(f'request {request.id} resides at {request.node}, not {node}')
    if time is None:
        time = request.time

    links = state.links(node)
    if links == {node}:
        predecessor = state.tail(node)
        state._set_tail(node, request.id)
        return InvokeOutcome(request.id, predecessor=predecessor)

    if len(links) != 1:
        raise ProtocolViolation(f'leaf {node} has links {sorted(links)}')
    parent = next(iter(links))
    message = Message(
        id=request.id,
        origin_request=request.id,
        source=node,
        send_time=Fraction(time),
        hops_taken=[node],
    )
    state._send((node, parent), message)
    state._update(node, {node})
    state._set_tail(node, request.id)
    return InvokeOutcome(request.id, message=message)


def on_receive(
    state: OverlayState, node: int, message: Message, sender: int, policy: TiePolicy = None
) -> ReceiveOutcome:
    """
    a node receives a message: forward it along a link, preferring children, and reverse that link toward the sender; a leaf pointing to itself schedules the message's request behind its last request

    :param state: overlay state, updated in place
    :param node: receiving node
    :param message: received message
    :param sender: neighbour the message arrived from
    :param policy: chooses among several child links
    :return: forwarding or scheduling result
    """

    if policy is None:
        policy = LowestIdPolicy()

    if state.points_to(node, sender) or state.points_to(sender, node):
        raise ProtocolViolation(
            f'message {message.id} arrived at {node} over edge ({sender}, {node}) that also carries a link'
        )
    state._take((sender, node), message)
    message.hops_taken.append(node)

    links_before = state.links(node)
    children = sorted(link for link in links_before if link != node and state.hst.parent(link) == node)
    if len(children) > 1:
        next_hop = policy.select_child(node, children, message)
    elif len(children) == 1:
        next_hop = children[0]
    elif len(links_before) == 1:
        next_hop = next(iter(links_before))
    else:
        raise ProtocolViolation(f'node {node} has links {sorted(links_before)} and no child link')

    state._update(node, (set(links_before) - {next_hop}) | {sender})
    links_after = state.links(node)

    if next_hop != node:
        state._send((node, next_hop), message)
        return ReceiveOutcome(message, node, sender, links_before, links_after, next_hop=next_hop)

    predecessor = state.tail(node)
    message.destination_request = predecessor
    return ReceiveOutcome(
        message, node, sender, links_before, links_after, predecessor=predecessor
    )
