from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from ..utilities import fraction_to_json, parse_fraction


class ProtocolViolation(RuntimeError):
    """
    a protocol invariant was broken during execution
    """

    def __init__(self, message: str, event_index: int = None, report: Any = None):
        self.event_index = event_index
        self.report = report
        if event_index is not None:
            message = f'{message} (event {event_index})'
        super().__init__(message)


@dataclass(frozen=True)
class Request:
    """
    request ``(node, time)`` invoked at a leaf; dummy requests mark the initial server locations
    """

    id: int
    node: int
    time: Fraction = Fraction(0)
    is_dummy: bool = False
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'time', parse_fraction(self.time))
        if self.time < 0:
            raise ValueError(f'request {self.id} has negative time {self.time}')
        if self.is_dummy and self.time != 0:
            raise ValueError(f'dummy request {self.id} must have time 0, not {self.time}')

    @property
    def name(self) -> str:
        return self.label if self.label is not None else f'r{self.id}'

    def to_json(self) -> Dict[str, Any]:
        data = {
            'id': self.id,
            'node': self.node,
            'time': fraction_to_json(self.time),
            'dummy': self.is_dummy,
        }
        if self.label is not None:
            data['label'] = self.label
        return data

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> 'Request':
        return cls(
            id=int(data['id']),
            node=int(data['node']),
            time=parse_fraction(data.get('time', 0)),
            is_dummy=bool(data.get('dummy', False)),
            label=data.get('label'),
        )


@dataclass
class Message:
    """
    find-predecessor message; its id equals the id of the request that emitted it
    """

    id: int
    origin_request: int
    source: int
    send_time: Fraction
    current_edge: Tuple[int, int] = None
    hops_taken: List[int] = field(default_factory=list)
    latency: Fraction = Fraction(0)
    destination_request: Optional[int] = None

    @property
    def delivered(self) -> bool:
        return self.destination_request is not None

    @property
    def destination(self) -> Optional[int]:
        return self.hops_taken[-1] if self.delivered else None


@dataclass(frozen=True)
class ScheduleEdge:
    """
    ``successor`` is served directly after ``predecessor``; ``message`` is ``None`` for local scheduling
    """

    predecessor: int
    successor: int
    message: Optional[int] = None

    @property
    def pair(self) -> Tuple[int, int]:
        return self.predecessor, self.successor


class ScheduleForest:
    """
    forest of schedule edges, one directed path per dummy request
    """

    def __init__(self, heads: Sequence[int], edges: Sequence[ScheduleEdge] = None):
        self.__heads = list(heads)
        self.__edges = []
        self.__predecessors = {}
        self.__successors = {}
        for edge in edges if edges is not None else []:
            self.add(edge)

    def add(self, edge: ScheduleEdge):
        if edge.successor in self.__predecessors:
            raise ValueError(f'request {edge.successor} is already scheduled')
        if edge.successor in self.__heads:
            raise ValueError(f'dummy request {edge.successor} cannot be scheduled')
        self.__edges.append(edge)
        self.__predecessors[edge.successor] = edge.predecessor
        self.__successors.setdefault(edge.predecessor, []).append(edge.successor)

    @property
    def heads(self) -> List[int]:
        return list(self.__heads)

    @property
    def edges(self) -> List[ScheduleEdge]:
        return list(self.__edges)

    def predecessor_of(self, request: int) -> Optional[int]:
        return self.__predecessors.get(request)

    def successors_of(self, request: int) -> List[int]:
        return list(self.__successors.get(request, []))

    def edge_of(self, successor: int) -> Optional[ScheduleEdge]:
        for edge in self.__edges:
            if edge.successor == successor:
                return edge
        return None

    def component_of(self, request: int) -> Optional[int]:
        """
        :return: dummy reached by following predecessors from ``request``, or ``None`` if the chain is broken or cyclic
        """

        visited = set()
        while request not in self.__heads:
            if request in visited or request not in self.__predecessors:
                return None
            visited.add(request)
            request = self.__predecessors[request]
        return request

    def schedules(self) -> Dict[int, List[int]]:
        """
        serving order of every server, starting at its dummy request
        """

        schedules = {}
        for head in self.__heads:
            schedule = [head]
            visited = {head}
            while len(self.__successors.get(schedule[-1], [])) == 1:
                successor = self.__successors[schedule[-1]][0]
                if successor in visited:
                    break
                schedule.append(successor)
                visited.add(successor)
            schedules[head] = schedule
        return schedules

    def pairs(self) -> List[Tuple[int, int]]:
        return [edge.pair for edge in self.__edges]

    def __iter__(self) -> Iterator[ScheduleEdge]:
        yield from self.__edges

    def __len__(self) -> int:
        return len(self.__edges)

    def __contains__(self, pair: Tuple[int, int]) -> bool:
        return tuple(pair) in self.pairs()

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}(heads={self.__heads}, edges={self.pairs()})'
