#!/usr/bin/env python
# flake8: noqa

from dataclasses import replace

from dsmspy.analysis import check_state, check_trace, CheckReport
from dsmspy.protocol import init_overlay
from dsmspy.simulation import EventType, run, Trace
from tests import two_cluster_scenario


def test_check_report():
    report = CheckReport()
    report.record('first', [])
    report.record('second', [3, 4])

    assert not report.passed
    assert report.failures == ['second']
    assert report.witnesses == {'second': [3, 4]}

    other = CheckReport({'third': True}, first_violation=7)
    merged = report.merge(other)
    assert merged.verdicts == {'first': True, 'second': False, 'third': True}
    assert merged.first_violation == 7

    assert merged.to_json() == {
        'passed': False,
        'verdicts': {'first': True, 'second': False, 'third': True},
        'witnesses': {'second': [3, 4]},
        'first_violation': 7,
    }


def test_empty_link_set():
    state = init_overlay(two_cluster_scenario().hst, [2])
    state.set_links(3, [])
    report = check_state(state)

    assert not report.passed
    assert report.witnesses['links_non_empty'] == [3]
    assert report.witnesses['edge_exclusivity'] == [[1, 3, 0]]
    assert report.witnesses['leaf_reaches_server'] == [3]
    assert report.verdicts['acyclic']


def test_invalid_link():
    state = init_overlay(two_cluster_scenario().hst, [2])
    state.set_links(3, [2])
    report = check_state(state)

    assert report.witnesses['links_valid'] == [3]
    assert not report.verdicts['edge_exclusivity']


def test_doubly_linked_edge():
    state = init_overlay(two_cluster_scenario().hst, [2])
    state.set_links(0, [1, 4])
    report = check_state(state)

    assert report.witnesses['edge_exclusivity'] == [[0, 4, 2]]
    assert not report.verdicts['acyclic']
    assert report.verdicts['links_non_empty']
    assert report.verdicts['links_valid']


def test_unreachable_server():
    state = init_overlay(two_cluster_scenario().hst, [2])
    state.set_links(2, [1])
    report = check_state(state)

    assert not report.verdicts['leaf_reaches_server']
    assert report.witnesses['leaf_reaches_server'] == [2, 3, 5, 6]
    assert not report.verdicts['acyclic']


def test_snapshot_is_independent():
    state = init_overlay(two_cluster_scenario().hst, [2])
    snapshot = state.snapshot()
    state.set_links(3, [])

    assert snapshot.links(3) == {1}
    assert check_state(snapshot).passed


def test_correct_trace():
    report = check_trace(run(two_cluster_scenario()))

    assert report.passed
    assert sorted(report.verdicts) == [
        'all_scheduled',
        'direct_paths',
        'forest_paths',
        'latency_bound',
        'serving_order',
        'simple_paths',
    ]


def test_unscheduled_requests():
    report = check_trace(run(two_cluster_scenario()).truncated(10))

    assert report.witnesses['all_scheduled'] == [1, 2]
    assert report.witnesses['forest_paths'] == [1, 2]
    assert report.witnesses['serving_order'] == [1, 2]
    assert report.verdicts['latency_bound']


def test_slow_message():
    trace = run(two_cluster_scenario())
    events = trace.events
    index = next(
        event.index for event in events if event.kind == EventType.SEND and event.message == 1
    )
    events[index] = replace(events[index], latency=events[index].latency + 4)
    report = check_trace(Trace(trace.hst, trace.requests, events, trace.metadata))

    assert report.witnesses['latency_bound'] == [1]
    assert report.verdicts['direct_paths']
