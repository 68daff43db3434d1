from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import json
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from ..network.hst import Hst
from ..protocol.base import Request, ScheduleEdge, ScheduleForest
from ..utilities import fraction_to_json, parse_fraction

TRACE_FORMAT_VERSION = 1


class TraceFormatError(ValueError):
    """
    malformed trace file
    """

    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f'line {line}: {message}')


class EventType(Enum):
    INVOKE = 'invoke'
    SEND = 'send'
    RECEIVE = 'receive'
    PROCESS = 'process'
    SCHEDULE = 'schedule'


@dataclass(frozen=True)
class TraceEvent:
    index: int
    kind: EventType
    time: Fraction
    node: int
    message: Optional[int] = None
    request: Optional[int] = None
    edge: Optional[Tuple[int, int]] = None
    latency: Optional[Fraction] = None
    sender: Optional[int] = None
    next_hop: Optional[int] = None
    links_before: Optional[FrozenSet[int]] = None
    links_after: Optional[FrozenSet[int]] = None
    predecessor: Optional[int] = None
    successor: Optional[int] = None

    def to_json(self) -> Dict[str, Any]:
        data = {
            'index': self.index,
            'event': self.kind.value,
            'time': fraction_to_json(self.time),
            'node': self.node,
        }
        for name in ('message', 'request', 'sender', 'next_hop', 'predecessor', 'successor'):
            value = getattr(self, name)
            if value is not None:
                data[name] = value
        if self.edge is not None:
            data['edge'] = list(self.edge)
        if self.latency is not None:
            data['latency'] = fraction_to_json(self.latency)
        if self.links_before is not None:
            data['links_before'] = sorted(self.links_before)
        if self.links_after is not None:
            data['links_after'] = sorted(self.links_after)
        return data

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> 'TraceEvent':
        kwargs = {
            'index': int(data['index']),
            'kind': EventType(data['event']),
            'time': parse_fraction(data['time']),
            'node': int(data['node']),
        }
        for name in ('message', 'request', 'sender', 'next_hop', 'predecessor', 'successor'):
            if name in data:
                kwargs[name] = int(data[name])
        if 'edge' in data:
            u, v = data['edge']
            kwargs['edge'] = (int(u), int(v))
        if 'latency' in data:
            kwargs['latency'] = parse_fraction(data['latency'])
        for name in ('links_before', 'links_after'):
            if name in data:
                kwargs[name] = frozenset(int(link) for link in data[name])
        return cls(**kwargs)


@dataclass
class MessageRecord:
    """
    history of one message, reconstructed from send and receive events
    """

    id: int
    origin_request: int
    source: int
    send_time: Fraction
    hops: List[int] = field(default_factory=list)
    hop_latencies: List[Fraction] = field(default_factory=list)
    arrival_times: List[Fraction] = field(default_factory=list)
    destination_request: Optional[int] = None

    @property
    def latency(self) -> Fraction:
        return sum(self.hop_latencies, Fraction(0))

    @property
    def delivered(self) -> bool:
        return self.destination_request is not None

    @property
    def destination(self) -> Optional[int]:
        return self.hops[-1] if self.delivered else None

    def arrival_at(self, node: int) -> Fraction:
        """
        time the message reached ``node``; its source node is reached at the send time
        """

        if node == self.source:
            return self.send_time
        index = self.hops.index(node)
        return self.arrival_times[index - 1]


class Trace:
    """
    totally ordered event log of one execution; messages and the schedule forest are derived from the events
    """

    def __init__(
        self,
        hst: Hst,
        requests: Sequence[Request],
        events: Iterable[TraceEvent] = None,
        metadata: Dict[str, Any] = None,
    ):
        """
        :param hst: overlay tree
        :param requests: all requests, dummies included
        :param events: events in execution order
        :param metadata: scenario description carried into exported traces (latency model, tie policy, seed)
        """

        self.hst = hst
        self.__requests = {request.id: request for request in requests}
        self.__events = list(events) if events is not None else []
        self.metadata = dict(metadata) if metadata is not None else {}
        self.__forest = None
        self.__messages = None

    def append(self, event: TraceEvent):
        self.__events.append(event)
        self.__forest = None
        self.__messages = None

    @property
    def events(self) -> List[TraceEvent]:
        return list(self.__events)

    @property
    def requests(self) -> List[Request]:
        return list(self.__requests.values())

    @property
    def dummies(self) -> List[Request]:
        return [request for request in self.__requests.values() if request.is_dummy]

    def request(self, request_id: int) -> Request:
        if request_id not in self.__requests:
            raise KeyError(f'"{request_id}" not in trace requests')
        return self.__requests[request_id]

    @property
    def one_shot(self) -> bool:
        return all(request.time == 0 for request in self.__requests.values())

    @property
    def forest(self) -> ScheduleForest:
        if self.__forest is None:
            forest = ScheduleForest([dummy.id for dummy in self.dummies])
            for event in self.__events:
                if event.kind == EventType.SCHEDULE:
                    forest.add(ScheduleEdge(event.predecessor, event.successor, event.message))
            self.__forest = forest
        return self.__forest

    @property
    def messages(self) -> Dict[int, MessageRecord]:
        if self.__messages is None:
            messages = {}
            for event in self.__events:
                if event.kind == EventType.SEND:
                    if event.message not in messages:
                        messages[event.message] = MessageRecord(
                            id=event.message,
                            origin_request=event.message,
                            source=event.node,
                            send_time=event.time,
                            hops=[event.node],
                        )
                    messages[event.message].hop_latencies.append(event.latency)
                elif event.kind == EventType.RECEIVE:
                    messages[event.message].hops.append(event.node)
                    messages[event.message].arrival_times.append(event.time)
                elif event.kind == EventType.SCHEDULE and event.message is not None:
                    messages[event.message].destination_request = event.predecessor
            self.__messages = messages
        return self.__messages

    def message(self, message_id: int) -> MessageRecord:
        if message_id not in self.messages:
            raise KeyError(f'"{message_id}" not in trace messages')
        return self.messages[message_id]

    def edge_latency(self, pair: Tuple[int, int]) -> Fraction:
        """
        latency charged for the schedule edge ``(predecessor, successor)``; local scheduling costs nothing
        """

        edge = self.forest.edge_of(pair[1])
        if edge is None or edge.predecessor != pair[0]:
            raise KeyError(f'"{pair}" not in schedule forest')
        if edge.message is None:
            return Fraction(0)
        return self.message(edge.message).latency

    @property
    def complete(self) -> bool:
        scheduled = {edge.successor for edge in self.forest}
        return all(
            request.id in scheduled for request in self.__requests.values() if not request.is_dummy
        )

    def truncated(self, length: int) -> 'Trace':
        return Trace(self.hst, self.requests, self.__events[:length], self.metadata)

    def header(self) -> Dict[str, Any]:
        return {
            'event': 'header',
            'version': TRACE_FORMAT_VERSION,
            'hst': self.hst.to_json(),
            'requests': [request.to_json() for request in self.requests],
            'metadata': self.metadata,
        }

    def to_lines(self) -> List[str]:
        return [
            json.dumps(entry, sort_keys=True, separators=(',', ':'))
            for entry in [self.header(), *(event.to_json() for event in self.__events)]
        ]

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> 'Trace':
        """
        parse an exported trace

        :param lines: JSON lines, header first
        :return: trace
        """

        trace = None
        for number, line in enumerate(lines, start=1):
            if line.strip() == '':
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as error:
                raise TraceFormatError(f'invalid JSON: {error.msg}', number)
            if not isinstance(data, dict):
                raise TraceFormatError('expected a JSON object', number)
            if trace is None:
                if data.get('event') != 'header':
                    raise TraceFormatError('first line must be the trace header', number)
                try:
                    trace = cls(
                        Hst.from_json(data['hst']),
                        [Request.from_json(request) for request in data['requests']],
                        metadata=data.get('metadata', {}),
                    )
                except (KeyError, TypeError, ValueError) as error:
                    raise TraceFormatError(f'invalid header: {error}', number)
                continue
            try:
                event = TraceEvent.from_json(data)
            except (KeyError, TypeError, ValueError) as error:
                raise TraceFormatError(f'invalid event: {error!r}', number)
            if event.index != len(trace.__events):
                raise TraceFormatError(
                    f'event index {event.index} out of order, expected {len(trace.__events)}', number
                )
            if event.node not in trace.hst:
                raise TraceFormatError(f'node {event.node} not in HST', number)
            trace.__events.append(event)
        if trace is None:
            raise TraceFormatError('empty trace', 1)
        return trace

    def __iter__(self) -> Iterator[TraceEvent]:
        yield from self.__events

    def __len__(self) -> int:
        return len(self.__events)

    def __getitem__(self, index: int) -> TraceEvent:
        return self.__events[index]

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({len(self.__events)} events, {len(self.__requests)} requests)'


def total_cost(trace: Trace) -> Fraction:
    """
    total communication cost: the summed latency of every message that scheduled a request

    :param trace: complete trace
    :return: exact cost
    """

    if not trace.complete:
        raise ValueError(f'{trace!r} is incomplete; some requests are unscheduled')
    return sum((trace.edge_latency(edge.pair) for edge in trace.forest), Fraction(0))
