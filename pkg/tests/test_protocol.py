#!/usr/bin/env python
# flake8: noqa

from fractions import Fraction

import pytest

from dsmspy.analysis import check_state
from dsmspy.network import Hst
from dsmspy.protocol import (
    init_overlay,
    LowestIdPolicy,
    Message,
    on_invoke,
    on_receive,
    ProtocolViolation,
    Request,
    ScheduleEdge,
    ScheduleForest,
    ScriptedPolicy,
    SeededRandomPolicy,
    tie_policy,
    TiePolicy,
    TiePolicyKind,
)

HST = Hst(2, [[[], []], [[], []]])


def test_request():
    request = Request(3, 5, '1/2', label='c')

    assert request.time == Fraction(1, 2)
    assert request.name == 'c'
    assert Request(4, 6).name == 'r4'
    assert Request.from_json(request.to_json()) == request
    assert request.to_json() == {'id': 3, 'node': 5, 'time': [1, 2], 'dummy': False, 'label': 'c'}

    with pytest.raises(ValueError):
        Request(1, 2, -1)
    with pytest.raises(ValueError):
        Request(0, 2, 1, is_dummy=True)


def test_schedule_forest():
    forest = ScheduleForest([0, 1], [ScheduleEdge(0, 2, 2), ScheduleEdge(2, 3, 3), ScheduleEdge(1, 4)])

    assert forest.pairs() == [(0, 2), (2, 3), (1, 4)]
    assert forest.predecessor_of(3) == 2
    assert forest.predecessor_of(0) is None
    assert forest.successors_of(2) == [3]
    assert forest.edge_of(4) == ScheduleEdge(1, 4)
    assert forest.edge_of(0) is None
    assert forest.component_of(3) == 0
    assert forest.component_of(4) == 1
    assert forest.component_of(7) is None
    assert forest.schedules() == {0: [0, 2, 3], 1: [1, 4]}
    assert (2, 3) in forest
    assert len(forest) == 3

    with pytest.raises(ValueError):
        forest.add(ScheduleEdge(1, 3))
    with pytest.raises(ValueError):
        forest.add(ScheduleEdge(2, 1))


def test_initial_orientation():
    state = init_overlay(HST, [2])

    assert state.links(0) == {1}
    assert state.links(1) == {2}
    assert state.links(2) == {2}
    assert state.links(3) == {1}
    assert state.links(4) == {0}
    assert state.links(5) == {4}
    assert state.tail(2) == 0
    assert state.tail(3) is None
    assert check_state(state).passed


def test_initial_orientation_several_servers():
    state = init_overlay(HST, [3, 6])

    assert state.links(0) == {1, 4}
    assert state.links(1) == {3}
    assert state.links(4) == {6}
    assert state.links(2) == {1}
    assert state.tails == {3: 0, 6: 1}
    assert check_state(state).passed


def test_initial_orientation_invalid():
    with pytest.raises(ValueError):
        init_overlay(HST, [])
    with pytest.raises(ValueError):
        init_overlay(HST, [2, 2])
    with pytest.raises(ValueError):
        init_overlay(HST, [1])


def test_invoke_and_receive():
    state = init_overlay(HST, [2])
    request = Request(1, 3)

    outcome = on_invoke(state, 3, request)
    assert not outcome.scheduled_locally
    message = outcome.message
    assert message.id == 1
    assert message.current_edge == (3, 1)
    assert state.links(3) == {3}
    assert state.tail(3) == 1
    assert state.messages_on(1, 3) == [message]
    assert check_state(state).passed

    forwarded = on_receive(state, 1, message, 3)
    assert not forwarded.scheduled
    assert forwarded.next_hop == 2
    assert forwarded.links_before == {2}
    assert forwarded.links_after == {3}
    assert check_state(state).passed

    delivered = on_receive(state, 2, message, 1)
    assert delivered.scheduled
    assert delivered.predecessor == 0
    assert message.destination_request == 0
    assert message.hops_taken == [3, 1, 2]
    assert state.links(2) == {1}
    assert state.in_flight == {}
    assert check_state(state).passed


def test_invoke_at_server_schedules_locally():
    state = init_overlay(HST, [2])

    outcome = on_invoke(state, 2, Request(1, 2))
    assert outcome.scheduled_locally
    assert outcome.predecessor == 0

    outcome = on_invoke(state, 2, Request(2, 2))
    assert outcome.predecessor == 1
    assert state.links(2) == {2}

    with pytest.raises(ValueError):
        on_invoke(state, 3, Request(3, 2))


def test_receive_over_linked_edge():
    state = init_overlay(HST, [2])
    message = Message(id=1, origin_request=1, source=5, send_time=Fraction(0))

    # the edge (0, 1) carries the link 0 -> 1, so no message can travel on it
    with pytest.raises(ProtocolViolation):
        on_receive(state, 1, message, 0)


def test_receive_prefers_children():
    state = init_overlay(HST, [3, 6])
    message = on_invoke(state, 5, Request(2, 5)).message
    on_receive(state, 4, message, 5)

    # node 4 forwards toward the server below it and reverses its link toward the sender
    assert state.links(4) == {5}
    assert state.messages_on(4, 6) == [message]


def test_policies():
    messages = [Message(message_id, message_id, 2, Fraction(0)) for message_id in (7, 3, 5)]

    lowest = LowestIdPolicy()
    assert lowest.select_child(0, [4, 1], messages[0]) == 1
    assert [message.id for message in lowest.order_arrivals(0, Fraction(0), messages)] == [3, 5, 7]

    random_policy = SeededRandomPolicy(4)
    choices = [random_policy.select_child(0, [1, 4, 6], messages[0]) for _ in range(8)]
    replayed = random_policy.fresh()
    assert [replayed.select_child(0, [1, 4, 6], messages[0]) for _ in range(8)] == choices
    assert set(choices) <= {1, 4, 6}

    scripted = ScriptedPolicy(child_choices={(7, 0): 4}, arrival_orders={2: [5, 7]})
    assert scripted.select_child(0, [1, 4], messages[0]) == 4
    assert scripted.select_child(0, [1, 6], messages[0]) == 1
    assert scripted.select_child(0, [1, 4], messages[1]) == 1
    assert [message.id for message in scripted.order_arrivals(2, Fraction(0), messages)] == [5, 7, 3]
    assert [message.id for message in scripted.order_arrivals(1, Fraction(0), messages)] == [3, 5, 7]


def test_policy_json():
    scripted = ScriptedPolicy(child_choices={(7, 0): 4}, arrival_orders={2: [5, 7]})
    restored = TiePolicy.from_json(scripted.to_json())

    assert isinstance(restored, ScriptedPolicy)
    assert restored.child_choices == {(7, 0): 4}
    assert restored.arrival_orders == {2: [5, 7]}

    assert isinstance(TiePolicy.from_json('lowest-id'), LowestIdPolicy)
    assert TiePolicy.from_json({'kind': 'seeded-random', 'seed': 9}).seed == 9

    assert isinstance(tie_policy('seeded-random', 3), SeededRandomPolicy)
    assert isinstance(tie_policy(TiePolicyKind.LOWEST_ID), LowestIdPolicy)

    with pytest.raises(ValueError):
        tie_policy('coin-flip')
