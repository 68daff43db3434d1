from fractions import Fraction
import heapq
import itertools
import logging
from typing import Dict, List, Tuple

from .scenario import Scenario
from .trace import EventType, Trace, TraceEvent
from ..analysis.checks import check_state, CheckMode
from ..protocol.base import Message, ProtocolViolation, Request
from ..protocol.overlay import init_overlay, on_invoke, on_receive

LOGGER = logging.getLogger(__name__)

INVOCATION = 0
ARRIVAL = 1


def run(scenario: Scenario, check_mode: CheckMode = CheckMode.OFF, sample_every: int = 64) -> Trace:
    """
    execute a scenario to completion

    events are ordered by ``(time, node, kind, id)``; invocations at a node precede arrivals at the same time, and all messages arriving at one node at one time form a single batch ordered by the tie policy

    :param scenario: scenario to execute
    :param check_mode: check the overlay invariants after every step (inline), every ``sample_every`` steps (sampled), or never
    :param sample_every: step interval of sampled checking
    :return: complete trace
    """

    if not isinstance(check_mode, CheckMode):
        check_mode = CheckMode(check_mode)

    hst = scenario.hst
    scenario.latency.validate(hst)
    latency = scenario.latency.fresh()
    policy = scenario.tie_policy.fresh()
    state = init_overlay(hst, scenario.server_leaves)

    trace = Trace(
        hst,
        scenario.all_requests,
        metadata={
            'servers': scenario.server_leaves,
            'latency': latency.to_json(),
            'tie_policy': policy.to_json(),
            'seed': scenario.seed,
            'one_shot': scenario.one_shot,
        },
    )

    counter = itertools.count()
    queue = []
    for request in scenario.requests:
        heapq.heappush(
            queue, (request.time, request.node, INVOCATION, request.id, next(counter), request)
        )

    def record(kind: EventType, time: Fraction, node: int, **kwargs):
        trace.append(TraceEvent(len(trace), kind, time, node, **kwargs))

    def send(message: Message, u: int, v: int, now: Fraction):
        weight = hst.edge_weight(u, v)
        hop_latency = latency.latency(message.id, u, v, weight)
        if not 0 < hop_latency <= weight:
            raise ProtocolViolation(
                f'latency {hop_latency} of message {message.id} on ({u}, {v}) is outside (0, {weight}]',
                event_index=len(trace),
            )
        message.latency += hop_latency
        record(EventType.SEND, now, u, message=message.id, edge=(u, v), latency=hop_latency)
        heapq.heappush(queue, (now + hop_latency, v, ARRIVAL, message.id, next(counter), (message, u)))

    steps = 0

    def checkpoint():
        nonlocal steps
        steps += 1
        if check_mode == CheckMode.INLINE or (
            check_mode == CheckMode.SAMPLED and steps % sample_every == 0
        ):
            report = check_state(state)
            if not report.passed:
                report.first_violation = len(trace) - 1
                raise ProtocolViolation(
                    f'overlay invariants {report.failures} broken',
                    event_index=len(trace) - 1,
                    report=report,
                )

    while len(queue) > 0:
        now, node, kind, _, _, payload = heapq.heappop(queue)

        try:
            if kind == INVOCATION:
                request: Request = payload
                record(EventType.INVOKE, now, node, request=request.id)
                outcome = on_invoke(state, node, request, now)
                if outcome.scheduled_locally:
                    record(
                        EventType.SCHEDULE,
                        now,
                        node,
                        predecessor=outcome.predecessor,
                        successor=request.id,
                    )
                else:
                    send(outcome.message, node, outcome.message.current_edge[1], now)
                checkpoint()
                continue

            batch: List[Tuple[Message, int]] = [payload]
            while len(queue) > 0 and queue[0][:3] == (now, node, ARRIVAL):
                batch.append(heapq.heappop(queue)[-1])
            senders: Dict[int, int] = {message.id: sender for message, sender in batch}
            for message, sender in batch:
                record(EventType.RECEIVE, now, node, message=message.id, sender=sender)

            for message in policy.order_arrivals(node, now, [message for message, _ in batch]):
                outcome = on_receive(state, node, message, senders[message.id], policy)
                record(
                    EventType.PROCESS,
                    now,
                    node,
                    message=message.id,
                    sender=outcome.sender,
                    next_hop=outcome.next_hop,
                    links_before=outcome.links_before,
                    links_after=outcome.links_after,
                )
                if outcome.scheduled:
                    record(
                        EventType.SCHEDULE,
                        now,
                        node,
                        message=message.id,
                        predecessor=outcome.predecessor,
                        successor=message.origin_request,
                    )
                else:
                    send(message, node, outcome.next_hop, now)
                checkpoint()
        except ProtocolViolation as error:
            if error.event_index is not None:
                raise
            raise ProtocolViolation(str(error), event_index=len(trace) - 1, report=error.report)

    if not trace.complete:
        raise ProtocolViolation('execution ended with unscheduled requests', event_index=len(trace) - 1)

    LOGGER.info(
        f'executed {len(scenario.requests)} requests with {len(trace.messages)} messages in {len(trace)} events'
    )
    return trace
