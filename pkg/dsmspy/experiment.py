from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from fractions import Fraction
from functools import partial
import logging
import os
from os import PathLike
import random
from typing import Any, Dict, List

from typepigeon import convert_value

from dsmspy.analysis import (
    build_locality_forest,
    forest_weight,
    min_k_forest,
    min_k_forest_bruteforce,
)
from dsmspy.configuration import (
    ensure_directory,
    ExperimentConfig,
    ExperimentReportFile,
    ExperimentSummaryFile,
)
from dsmspy.interface import ServingSystem
from dsmspy.network import embed_frt, Hst, metric_closure, Metric, random_graph, WeightedGraph
from dsmspy.protocol import ProtocolViolation, tie_policy
from dsmspy.simulation import LatencyModel, Scenario
from dsmspy.utilities import derive_seed, fraction_to_json

LOGGER = logging.getLogger(__name__)

WORKERS_VARIABLE = 'DSMSPY_WORKERS'


def worker_count() -> int:
    """
    :return: number of worker processes from ``DSMSPY_WORKERS``, 1 by default
    """

    value = os.environ.get(WORKERS_VARIABLE, '1')
    try:
        workers = convert_value(value, int)
    except ValueError:
        raise ValueError(f'{WORKERS_VARIABLE}="{value}" is not an integer')
    if workers < 1:
        raise ValueError(f'{WORKERS_VARIABLE} must be positive, not {workers}')
    return workers


def ratio(cost: Fraction, oracle: Fraction) -> Fraction:
    if oracle == 0:
        return Fraction(1)
    return Fraction(cost) / oracle


def mean_stretch(hst: Hst, metric: Metric) -> Fraction:
    """
    mean ratio of tree distance to graph distance over all node pairs
    """

    ratios = [
        hst.distance(hst.leaf_of(u), hst.leaf_of(v)) / metric.distance(u, v)
        for u in range(metric.size)
        for v in range(u + 1, metric.size)
    ]
    if len(ratios) == 0:
        return Fraction(1)
    return sum(ratios, Fraction(0)) / len(ratios)


def build_scenario(config: ExperimentConfig, repetition: int) -> Dict[str, Any]:
    """
    draw the network, embedding, placements and latencies of one repetition

    :return: scenario with the graph and metric it was drawn on, when the input is a graph
    """

    seed = derive_seed(config.seed, repetition)

    graph = config.graph
    if isinstance(graph, dict):
        graph = random_graph(
            graph['n'],
            graph['model'],
            derive_seed(seed, 'graph'),
            max_weight=graph['max_weight'],
            probability=graph['probability'],
        )
    if isinstance(graph, WeightedGraph):
        metric = metric_closure(graph)
        hst = embed_frt(metric, config.alpha, derive_seed(seed, 'embedding'))

        def locate(node: int) -> int:
            return hst.leaf_of(node)

    else:
        metric = None
        hst = config.hst

        def locate(node: int) -> int:
            return node

    rng = random.Random(derive_seed(seed, 'placement'))
    leaves = hst.leaves
    if isinstance(config.servers, list):
        servers = [locate(node) for node in config.servers]
    else:
        if config.servers > len(leaves):
            raise ValueError(f'{config.servers} servers do not fit on {len(leaves)} leaves')
        servers = sorted(rng.sample(leaves, config.servers))

    if isinstance(config.placement, list):
        locations = [locate(node) for node in config.placement]
    else:
        locations = [rng.choice(leaves) for _ in range(config.requests)]

    if config.one_shot:
        times = [Fraction(0)] * len(locations)
    else:
        times = [config.horizon * Fraction(rng.randint(0, 16), 16) for _ in locations]

    kind = config.latency['kind']
    if kind == 'random-fraction':
        latency = LatencyModel.random_fraction(derive_seed(seed, 'latency'), config.latency['denominator'])
    elif kind == 'adversarial':
        latency = LatencyModel.adversarial(
            hst,
            range(len(servers), len(servers) + len(locations)),
            derive_seed(seed, 'latency'),
            config.latency['denominator'],
            config.latency['bimodal'],
        )
    else:
        latency = LatencyModel.synchronous()

    scenario = Scenario(
        hst,
        servers,
        list(zip(locations, times)),
        latency=latency,
        tie_policy=tie_policy(config.tie_policy, derive_seed(seed, 'ties')),
        seed=seed,
    )
    return {'scenario': scenario, 'graph': graph if isinstance(graph, WeightedGraph) else None, 'metric': metric}


def run_repetition(config: ExperimentConfig, repetition: int) -> Dict[str, Any]:
    """
    execute, check and measure one repetition

    :param config: experiment configuration
    :param repetition: repetition index
    :return: result row
    """

    drawn = build_scenario(config, repetition)
    scenario = drawn['scenario']
    result = {
        'repetition': repetition,
        'seed': scenario.seed,
        'requests': len(scenario.requests),
        'fault': None,
    }

    system = ServingSystem(scenario, config.check_mode, config.sample_every, graph=drawn['graph'])
    try:
        trace = system.trace
    except ProtocolViolation as violation:
        LOGGER.error(f'repetition {repetition}: {violation}')
        result.update(passed=False, fault=str(violation))
        return result

    checks = system.check()
    cost = system.cost
    requests = trace.requests
    dummies = trace.dummies

    if len(scenario.requests) <= config.bruteforce_limit:
        oracle_kind = 'bruteforce'
        oracle = min_k_forest_bruteforce(requests, dummies, scenario.hst, config.bruteforce_limit)
    else:
        oracle_kind = 'locality'
        oracle = build_locality_forest(scenario.hst, requests, dummies)
    tree_oracle = forest_weight(oracle, scenario.hst)
    tree_ratio = ratio(cost, tree_oracle)

    result.update(
        cost=cost,
        tree_oracle=tree_oracle,
        tree_oracle_kind=oracle_kind,
        tree_ratio=tree_ratio,
        checks=checks.to_json(),
    )

    passed = checks.passed
    if drawn['metric'] is not None:
        hst = scenario.hst
        located = [replace(request, node=hst.graph_node_of(request.node)) for request in requests]
        graph_oracle = forest_weight(
            min_k_forest(located, [request for request in located if request.is_dummy], drawn['metric']),
            drawn['metric'],
        )
        result.update(
            graph_oracle=graph_oracle,
            graph_ratio=ratio(cost, graph_oracle),
            stretch=mean_stretch(hst, drawn['metric']),
        )

    if scenario.one_shot:
        analysis = system.analyze()
        if analysis is None:
            result['fault'] = system.fault
            passed = False
        else:
            result['analysis'] = analysis.checks.to_json()
            passed = passed and analysis.passed
        if tree_ratio > 1:
            LOGGER.error(f'repetition {repetition}: cost {cost} exceeds the tree oracle {tree_oracle}')
            passed = False

    result['passed'] = passed
    LOGGER.info(f'repetition {repetition}: cost {cost}, tree ratio {tree_ratio}, passed {passed}')
    return result


def _jsonable(result: Dict[str, Any]) -> Dict[str, Any]:
    return {
        key: fraction_to_json(value) if isinstance(value, Fraction) else value
        for key, value in result.items()
    }


def aggregate(results: List[Dict[str, Any]], key: str) -> Dict[str, Any]:
    values = [result[key] for result in results if result.get(key) is not None]
    if len(values) == 0:
        return {}
    mean = sum(values, Fraction(0)) / len(values)
    return {
        'mean': fraction_to_json(mean),
        'mean_float': float(mean),
        'max': fraction_to_json(max(values)),
        'max_float': float(max(values)),
    }


def run_experiment(
    config: ExperimentConfig, output: PathLike = None, overwrite: bool = True
) -> Dict[str, Any]:
    """
    run every repetition of an experiment, over a process pool when ``DSMSPY_WORKERS`` exceeds 1

    :param config: experiment configuration
    :param output: output directory, overriding the configured one
    :param overwrite: overwrite existing report files
    :return: experiment report
    """

    workers = worker_count()
    repetitions = range(config.repetitions)
    task = partial(run_repetition, config)
    if workers > 1:
        LOGGER.debug(f'running {config.repetitions} repetitions on {workers} workers')
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, repetitions))
    else:
        results = [task(repetition) for repetition in repetitions]

    report = {
        'config': config.to_json(),
        'passed': all(result['passed'] for result in results),
        'results': [_jsonable(result) for result in results],
        'aggregates': {
            key: aggregate(results, key) for key in ('tree_ratio', 'graph_ratio', 'stretch')
        },
    }

    if output is None:
        output = config.output
    if output is not None:
        output = ensure_directory(output)
        for output_file in (ExperimentSummaryFile(results), ExperimentReportFile(report)):
            output_file.write(output / output_file.name, overwrite)

    LOGGER.info(
        f'{config.repetitions} repetitions, {sum(not result["passed"] for result in results)} failed'
    )
    return report


def replay(trace_file: PathLike, output: PathLike = None, overwrite: bool = True) -> ServingSystem:
    """
    re-run the checks and the gap analysis on a stored trace

    :param trace_file: trace written by a previous execution
    :param output: directory to write the report, ledger and summary into
    :param overwrite: overwrite existing files
    :return: serving system wrapping the stored trace
    """

    system = ServingSystem.from_trace_file(trace_file)
    LOGGER.debug(f'replaying {system.trace!r}')
    if output is not None:
        system.write(output, overwrite)
    return system
