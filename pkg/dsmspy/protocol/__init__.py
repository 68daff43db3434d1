from .base import Message, ProtocolViolation, Request, ScheduleEdge, ScheduleForest
from .overlay import (
    init_overlay,
    InvokeOutcome,
    on_invoke,
    on_receive,
    OverlayState,
    ReceiveOutcome,
)
from .policy import (
    LowestIdPolicy,
    ScriptedPolicy,
    SeededRandomPolicy,
    tie_policy,
    TiePolicy,
    TiePolicyKind,
)

__all__ = [
    'init_overlay',
    'InvokeOutcome',
    'LowestIdPolicy',
    'Message',
    'on_invoke',
    'on_receive',
    'OverlayState',
    'ProtocolViolation',
    'ReceiveOutcome',
    'Request',
    'ScheduleEdge',
    'ScheduleForest',
    'ScriptedPolicy',
    'SeededRandomPolicy',
    'tie_policy',
    'TiePolicy',
    'TiePolicyKind',
]
