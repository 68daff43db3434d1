from .engine import run
from .latency import LatencyKind, LatencyModel
from .scenario import Scenario
from .trace import EventType, MessageRecord, total_cost, Trace, TraceEvent, TraceFormatError

__all__ = [
    'EventType',
    'LatencyKind',
    'LatencyModel',
    'MessageRecord',
    'run',
    'Scenario',
    'total_cost',
    'Trace',
    'TraceEvent',
    'TraceFormatError',
]
