from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx

from .checks import CheckReport
from .forest import check_inter_component, check_intra_component, forest_weight, min_k_forest, RequestForest
from ..network.hst import Hst, hst_distance, subtree_diameter
from ..protocol.base import Request, ScheduleForest
from ..simulation.trace import EventType, total_cost, Trace
from ..utilities import fraction_to_json

LOGGER = logging.getLogger(__name__)

Pair = Tuple[int, int]


class AnalysisFault(RuntimeError):
    """
    a trace contradicts a property every correct execution has, which points at a simulator or protocol bug
    """

    def __init__(self, message: str, witness: Any = None):
        self.witness = witness
        super().__init__(message)


class GapKind(Enum):
    INTRA = 'intra'
    INTER = 'inter'


@dataclass(frozen=True)
class TimelineEntry:
    message: Optional[int]
    time: Fraction
    index: int

    @property
    def virtual(self) -> bool:
        return self.message is None

    def to_json(self) -> Dict[str, Any]:
        return {
            'message': self.message,
            'time': fraction_to_json(self.time),
        }


@dataclass
class SubtreeTimeline:
    """
    messages leaving (``up``) and entering (``down``) one subtree, in execution order

    a subtree that initially hosts a server starts with a single virtual leaving entry at time 0
    """

    subtree_root: int
    up: List[TimelineEntry] = field(default_factory=list)
    down: List[TimelineEntry] = field(default_factory=list)
    dummy_count: int = 0

    def check_alternation(self) -> Optional[str]:
        """
        :return: description of the first entry breaking the leave/enter alternation, or ``None``
        """

        entries = sorted(
            [('up', entry) for entry in self.up] + [('down', entry) for entry in self.down],
            key=lambda item: item[1].index,
        )
        previous = None
        for position, (direction, entry) in enumerate(entries):
            expected = 'up' if position % 2 == 0 else 'down'
            if direction != expected:
                return f'entry {position} of subtree {self.subtree_root} is {direction}, expected {expected}'
            if previous is not None:
                if direction == 'down' and not previous.time < entry.time:
                    return f'message {entry.message} enters subtree {self.subtree_root} no later than it was left'
                if direction == 'up' and not previous.time <= entry.time:
                    return f'message {entry.message} leaves subtree {self.subtree_root} before the previous entry'
            previous = entry
        return None

    def check_cardinality(self) -> bool:
        return len(self.down) <= len(self.up) <= len(self.down) + 1

    def to_json(self) -> Dict[str, Any]:
        return {
            'subtree': self.subtree_root,
            'up': [entry.to_json() for entry in self.up],
            'down': [entry.to_json() for entry in self.down],
            'dummy_count': self.dummy_count,
        }


@dataclass(frozen=True)
class Gap:
    """
    message ``entering`` a subtree followed by the next message ``leaving`` it
    """

    subtree_root: int
    height: int
    entering: int
    leaving: int
    size: Fraction
    kind: GapKind
    entering_destination: int
    leaving_source: int
    lowest: bool = False

    @property
    def new_edge(self) -> Pair:
        return self.entering_destination, self.leaving_source

    def to_json(self) -> Dict[str, Any]:
        return {
            'subtree': self.subtree_root,
            'height': self.height,
            'entering': self.entering,
            'leaving': self.leaving,
            'size': fraction_to_json(self.size),
            'kind': self.kind.value,
            'lowest': self.lowest,
        }


def _require_one_shot(trace: Trace):
    if not trace.complete:
        raise ValueError(f'{trace!r} is incomplete; gap analysis needs a terminated execution')
    if not trace.one_shot:
        raise ValueError('gap analysis applies only to one-shot executions')


def build_timelines(trace: Trace, hst: Hst = None) -> Dict[int, SubtreeTimeline]:
    """
    collect the leaving and entering messages of every subtree that contains a request

    :param trace: complete one-shot trace
    :param hst: overlay tree, the trace's by default
    :return: timelines keyed by subtree root
    """

    _require_one_shot(trace)
    if hst is None:
        hst = trace.hst

    timelines = {}
    for request in trace.requests:
        for node in [request.node, *hst.ancestors(request.node)]:
            if node not in timelines:
                timelines[node] = SubtreeTimeline(node)
            if request.is_dummy:
                timelines[node].dummy_count += 1

    for node, timeline in timelines.items():
        if timeline.dummy_count > 0:
            timeline.up.append(TimelineEntry(None, Fraction(0), -1))
        if timeline.dummy_count > 1:
            LOGGER.warning(
                f'subtree {node} holds {timeline.dummy_count} servers but carries a single virtual entry'
            )

    for event in trace:
        if event.kind == EventType.SEND and hst.is_leaf(event.node):
            timelines[event.node].up.append(TimelineEntry(event.message, event.time, event.index))
        elif event.kind == EventType.PROCESS:
            parent = hst.parent(event.node)
            if parent is None:
                continue
            if event.next_hop == parent:
                timelines[event.node].up.append(TimelineEntry(event.message, event.time, event.index))
            elif event.sender == parent:
                if event.node not in timelines:
                    raise AnalysisFault(
                        f'message {event.message} enters subtree {event.node}, which holds no request',
                        event.index,
                    )
                timelines[event.node].down.append(TimelineEntry(event.message, event.time, event.index))

    for node in sorted(timelines):
        problem = timelines[node].check_alternation()
        if problem is not None:
            raise AnalysisFault(problem, timelines[node].to_json())
        if not timelines[node].check_cardinality():
            raise AnalysisFault(
                f'subtree {node} has {len(timelines[node].up)} leaving and {len(timelines[node].down)} entering messages',
                timelines[node].to_json(),
            )

    LOGGER.debug(f'built {len(timelines)} subtree timelines')
    return timelines


def find_gaps(timelines: Dict[int, SubtreeTimeline], trace: Trace) -> List[Gap]:
    """
    pair every entering message with the next leaving message of the same subtree

    :param timelines: timelines from ``build_timelines``
    :param trace: trace the timelines were built from
    :return: gaps ordered by height, then subtree; the lowest gap of each leaving message is flagged
    """

    hst = trace.hst
    forest = trace.forest
    candidates = []
    for node in sorted(timelines, key=lambda node: (hst.height(node), node)):
        timeline = timelines[node]
        for position, entered in enumerate(timeline.down):
            if position + 1 >= len(timeline.up):
                continue
            left = timeline.up[position + 1]
            entering = trace.message(entered.message)
            leaving = trace.message(left.message)
            destination = entering.destination_request
            source = leaving.origin_request
            kind = (
                GapKind.INTRA
                if forest.component_of(destination) == forest.component_of(source)
                else GapKind.INTER
            )
            candidates.append(
                Gap(
                    subtree_root=node,
                    height=hst.height(node),
                    entering=entering.id,
                    leaving=leaving.id,
                    size=hst_distance(hst, trace.request(destination).node, leaving.source),
                    kind=kind,
                    entering_destination=destination,
                    leaving_source=source,
                )
            )

    gaps = []
    lowest_seen = set()
    for gap in candidates:
        if gap.leaving not in lowest_seen:
            lowest_seen.add(gap.leaving)
            gap = replace(gap, lowest=True)
        gaps.append(gap)
    return gaps


def local_predecessors(gaps: Sequence[Gap]) -> Dict[int, Tuple[int, GapKind]]:
    """
    :return: map of request to its local predecessor and the kind of gap that defines it
    """

    return {gap.leaving_source: (gap.entering_destination, gap.kind) for gap in gaps if gap.lowest}


@dataclass
class TransformationLedger:
    original: RequestForest
    gaps: List[Gap]
    closed: Dict[int, Gap]
    removed: List[Pair]
    added: List[Pair]
    potential_sources: List[Pair]
    potential_of: Dict[Pair, List[Pair]]
    removed_of: Dict[Pair, List[Pair]]
    result: RequestForest

    def pdg(self) -> nx.DiGraph:
        """
        priority graph over removed and potential edges; ``e -> e'`` when ``e`` feeds the potential that amortizes ``e'``
        """

        graph = nx.DiGraph()
        graph.add_nodes_from(self.removed)
        graph.add_nodes_from(self.potential_sources)
        for removed, sources in self.potential_of.items():
            for source in sources:
                graph.add_edge(source, removed)
        return graph

    @property
    def pdg_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.pdg())

    def replacement_steps(self) -> List[List[Pair]]:
        """
        replace removed edges in rounds; an edge waits until every removed edge it amortizes has been replaced

        :return: removed edges grouped by round
        """

        graph = self.pdg()
        pending = set(self.removed)
        steps = []
        while len(pending) > 0:
            ready = sorted(
                edge for edge in pending if not any(target in pending for target in graph.successors(edge))
            )
            if len(ready) == 0:
                raise AnalysisFault('priority graph has a cycle among removed edges', sorted(pending))
            steps.append(ready)
            pending.difference_update(ready)
        return steps

    def to_json(self) -> Dict[str, Any]:
        return {
            'gaps': [gap.to_json() for gap in self.closed.values()],
            'removed': [list(edge) for edge in self.removed],
            'added': [list(edge) for edge in self.added],
            'potential': [list(edge) for edge in self.potential_sources],
            'pdg_acyclic': self.pdg_acyclic,
        }


def transform(
    forest: ScheduleForest, gaps: Sequence[Gap], hst: Hst, requests: Sequence[Request], strict: bool = True
) -> TransformationLedger:
    """
    close every gap on the lowest subtree that carries it, from the leaves up

    closing the gap ``(mu, mu')`` drops the edge that scheduled the source of ``mu'`` and links that source to the destination of ``mu`` instead

    :param forest: schedule forest of the execution
    :param gaps: gaps from ``find_gaps``
    :param hst: overlay tree
    :param requests: every request of the execution, dummies included
    :param strict: raise ``AnalysisFault`` when the modified forest loses its structural properties
    :return: ledger of the transformation
    """

    original = RequestForest.from_schedule(forest, requests)

    closed = {}
    for gap in sorted(gaps, key=lambda gap: (gap.height, gap.subtree_root, gap.leaving)):
        if gap.lowest and gap.leaving not in closed:
            closed[gap.leaving] = gap

    removed = []
    added = []
    for gap in closed.values():
        edge = forest.edge_of(gap.leaving_source)
        if edge is None:
            raise AnalysisFault(f'request {gap.leaving_source} was never scheduled', gap.to_json())
        removed.append(edge.pair)
        added.append(gap.new_edge)

    message_edge = {edge.message: edge.pair for edge in forest if edge.message is not None}
    potential_of = {}
    removed_of = {}
    for gap in gaps:
        if gap.leaving not in closed:
            continue
        target = message_edge[gap.leaving]
        source = message_edge[gap.entering]
        potential_of.setdefault(target, [])
        if source not in potential_of[target]:
            potential_of[target].append(source)
        removed_of.setdefault(source, [])
        if target not in removed_of[source]:
            removed_of[source].append(target)
    potential_sources = sorted(removed_of)

    result = original.replaced(removed, added)
    ledger = TransformationLedger(
        original, list(gaps), closed, removed, added, potential_sources, potential_of, removed_of, result
    )

    if strict:
        problems = result.violations()
        if len(problems) == 0:
            if len(check_intra_component(result, hst)) > 0:
                problems.append('intra-component property broken')
            if len(check_inter_component(result, hst)) > 0:
                problems.append('inter-component property broken')
        if len(problems) > 0:
            raise AnalysisFault(f'modified forest is not locality-based: {"; ".join(problems)}', ledger.to_json())

    LOGGER.debug(f'closed {len(closed)} gaps, replacing {removed} with {added}')
    return ledger


def _tree_weight(edges: Sequence[Pair], trace: Trace) -> Fraction:
    return sum(
        (hst_distance(trace.hst, trace.request(a).node, trace.request(b).node) for a, b in edges),
        Fraction(0),
    )


def potential(edges: Sequence[Pair], hst: Hst, trace: Trace) -> Fraction:
    """
    tree weight of schedule edges minus the latency the execution paid for them

    :param edges: ``(predecessor, successor)`` edges of the trace's schedule forest
    :param hst: overlay tree
    :param trace: trace that produced the edges
    :return: exact potential, never negative for a correct execution
    """

    return sum(
        (
            hst_distance(hst, trace.request(a).node, trace.request(b).node) - trace.edge_latency((a, b))
            for a, b in edges
        ),
        Fraction(0),
    )


@dataclass
class AmortizationReport:
    verdicts: Dict[str, bool] = field(default_factory=dict)
    witnesses: Dict[str, Any] = field(default_factory=dict)
    values: Dict[str, Fraction] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return all(self.verdicts.values())

    def to_json(self) -> Dict[str, Any]:
        return {
            'holds': self.holds,
            'verdicts': dict(sorted(self.verdicts.items())),
            'witnesses': self.witnesses,
            'values': {name: fraction_to_json(value) for name, value in sorted(self.values.items())},
        }


def verify_amortization(ledger: TransformationLedger, hst: Hst, trace: Trace) -> AmortizationReport:
    """
    check that the removed edges are paid for by the added edges and the potential of the entering messages, that the execution cost stays below the weight of the modified forest, and that no entering message is slower than the diameter of its gap's subtree

    :param ledger: ledger from ``transform``
    :param hst: overlay tree
    :param trace: trace the ledger was built from
    :return: report with a verdict per check
    """

    report = AmortizationReport()
    removed_weight = _tree_weight(ledger.removed, trace)
    added_weight = _tree_weight(ledger.added, trace)
    stored = potential(ledger.potential_sources, hst, trace)
    report.values.update(removed=removed_weight, added=added_weight, potential=stored)
    report.verdicts['cumulative'] = removed_weight <= added_weight + stored
    if not report.verdicts['cumulative']:
        report.witnesses['cumulative'] = [gap.to_json() for gap in ledger.closed.values()]

    cost = total_cost(trace)
    modified_weight = forest_weight(ledger.result, hst)
    report.values.update(cost=cost, modified_weight=modified_weight)
    report.verdicts['cost_bound'] = cost <= modified_weight

    slow = [
        gap.to_json()
        for gap in ledger.gaps
        if trace.message(gap.entering).latency > subtree_diameter(hst, gap.subtree_root)
    ]
    report.verdicts['gap_latency'] = len(slow) == 0
    if len(slow) > 0:
        report.witnesses['gap_latency'] = slow

    if not report.holds:
        LOGGER.warning(f'amortization fails: {[name for name, verdict in report.verdicts.items() if not verdict]}')
    return report


@dataclass
class AnalysisReport:
    timelines: Dict[int, SubtreeTimeline]
    gaps: List[Gap]
    ledger: TransformationLedger
    amortization: AmortizationReport
    checks: CheckReport
    cost: Fraction
    modified_weight: Fraction
    optimum_weight: Fraction

    @property
    def passed(self) -> bool:
        return self.checks.passed and self.amortization.holds

    @property
    def flagged_subtrees(self) -> List[int]:
        """
        subtrees hosting several servers, whose timelines carry one virtual entry for all of them
        """

        return sorted(node for node, timeline in self.timelines.items() if timeline.dummy_count > 1)

    def to_json(self) -> Dict[str, Any]:
        return {
            'passed': self.passed,
            'cost': fraction_to_json(self.cost),
            'modified_weight': fraction_to_json(self.modified_weight),
            'optimum_weight': fraction_to_json(self.optimum_weight),
            'gaps': [gap.to_json() for gap in self.gaps],
            'local_predecessors': {
                str(request): {'predecessor': predecessor, 'kind': kind.value}
                for request, (predecessor, kind) in sorted(local_predecessors(self.gaps).items())
            },
            'ledger': self.ledger.to_json(),
            'amortization': self.amortization.to_json(),
            'checks': self.checks.to_json(),
            'flagged_subtrees': self.flagged_subtrees,
        }


def analyze(trace: Trace, oracle: RequestForest = None) -> AnalysisReport:
    """
    run the whole gap analysis of a one-shot execution, from timelines to the bound ``cost <= W(modified forest) = W(minimum forest)``

    :param trace: complete one-shot trace
    :param oracle: reference minimum forest; the exact minimum on the tree metric by default
    :return: analysis report
    """

    hst = trace.hst
    timelines = build_timelines(trace, hst)
    gaps = find_gaps(timelines, trace)
    ledger = transform(trace.forest, gaps, hst, trace.requests, strict=False)
    amortization = verify_amortization(ledger, hst, trace)

    if oracle is None:
        oracle = min_k_forest(trace.requests, trace.dummies, hst)
    optimum_weight = forest_weight(oracle, hst)
    modified_weight = amortization.values['modified_weight']
    cost = amortization.values['cost']

    checks = CheckReport()
    checks.record(
        'lowest_gap_size',
        [gap.to_json() for gap in gaps if gap.lowest and gap.size != subtree_diameter(hst, gap.subtree_root)],
    )
    checks.record('pdg_acyclic', [] if ledger.pdg_acyclic else sorted(ledger.removed))
    checks.record('modified_spanning', ledger.result.violations())
    checks.record('modified_intra', check_intra_component(ledger.result, hst))
    checks.record('modified_inter', check_inter_component(ledger.result, hst))
    checks.record(
        'modified_optimal',
        [] if modified_weight == optimum_weight else [fraction_to_json(modified_weight), fraction_to_json(optimum_weight)],
    )
    checks.record(
        'cost_bound',
        [] if cost <= optimum_weight else [fraction_to_json(cost), fraction_to_json(optimum_weight)],
    )

    report = AnalysisReport(timelines, gaps, ledger, amortization, checks, cost, modified_weight, optimum_weight)
    LOGGER.info(
        f'analyzed {len(gaps)} gaps: cost {cost}, modified forest {modified_weight}, optimum {optimum_weight}'
    )
    return report
