#!/usr/bin/env python
# flake8: noqa

from fractions import Fraction
import json

import pytest

from dsmspy.analysis import CheckMode
from dsmspy.configuration import ExperimentConfig, parse_check_mode
from dsmspy.experiment import (
    aggregate,
    build_scenario,
    mean_stretch,
    ratio,
    replay,
    run_experiment,
    run_repetition,
    worker_count,
    WORKERS_VARIABLE,
)
from dsmspy.network import embed_frt, Hst, Metric, WeightedGraph
from dsmspy.simulation import LatencyKind
from tests import INPUT_DIRECTORY, OUTPUT_DIRECTORY

# every pair of a uniform metric is split at the top level of its embedding
UNIFORM_STRETCH = 2


def test_worker_count(monkeypatch):
    monkeypatch.delenv(WORKERS_VARIABLE, raising=False)
    assert worker_count() == 1

    monkeypatch.setenv(WORKERS_VARIABLE, '3')
    assert worker_count() == 3

    monkeypatch.setenv(WORKERS_VARIABLE, 'many')
    with pytest.raises(ValueError):
        worker_count()

    monkeypatch.setenv(WORKERS_VARIABLE, '0')
    with pytest.raises(ValueError):
        worker_count()


def test_parse_check_mode():
    assert parse_check_mode('off') == (CheckMode.OFF, 64)
    assert parse_check_mode('Inline') == (CheckMode.INLINE, 64)
    assert parse_check_mode('sampled:4') == (CheckMode.SAMPLED, 4)
    assert parse_check_mode(CheckMode.SAMPLED) == (CheckMode.SAMPLED, 64)

    with pytest.raises(ValueError):
        parse_check_mode('sampled:0')
    with pytest.raises(ValueError):
        parse_check_mode('sampled:often')
    with pytest.raises(ValueError):
        parse_check_mode('always')


def test_ratio_and_aggregate():
    assert ratio(Fraction(3), Fraction(0)) == 1
    assert ratio(Fraction(3), Fraction(4)) == Fraction(3, 4)

    results = [{'value': Fraction(1, 2)}, {'value': Fraction(1)}, {'value': None}, {}]
    assert aggregate(results, 'value') == {
        'mean': [3, 4],
        'mean_float': 0.75,
        'max': [1, 1],
        'max_float': 1.0,
    }
    assert aggregate(results, 'missing') == {}


def test_experiment_config():
    config = ExperimentConfig.from_file(INPUT_DIRECTORY / 'experiment.json')

    assert config.graph == {'n': 6, 'model': 'complete-uniform', 'max_weight': 4, 'probability': None}
    assert config.hst is None
    assert config.check_mode == CheckMode.SAMPLED
    assert config.sample_every == 4
    assert config.latency == {'kind': 'random-fraction', 'denominator': 16, 'bimodal': False}
    assert config.repetitions == 3
    assert config.to_json()['check_mode'] == 'sampled:4'
    assert config.to_json()['seed'] == 7


def test_experiment_config_from_files():
    config = ExperimentConfig.from_file(INPUT_DIRECTORY / 'experiment_graph_file.json')

    assert isinstance(config.graph, WeightedGraph)
    assert config.graph.node_count == 5
    assert config.requests == 4
    assert config.placement == [1, 2, 3, 4]
    assert config.output == INPUT_DIRECTORY / '../output/experiment_graph_file'

    hst_config = ExperimentConfig.from_file(INPUT_DIRECTORY / 'experiment_hst.json')
    assert isinstance(hst_config.hst, Hst)
    assert len(hst_config.hst.leaves) == 6
    assert hst_config.servers == [2, 5]


def test_experiment_config_invalid():
    hst = {'alpha': 2, 'depth': 1, 'branching': [2]}
    graph = {'n': 3}

    with pytest.raises(ValueError):
        ExperimentConfig()
    with pytest.raises(ValueError):
        ExperimentConfig(graph=graph, hst=hst)
    with pytest.raises(ValueError):
        ExperimentConfig(hst=hst, tie_policy='scripted')
    with pytest.raises(ValueError):
        ExperimentConfig(hst=hst, latency='scripted')
    with pytest.raises(ValueError):
        ExperimentConfig(hst=hst, placement='gaussian')
    with pytest.raises(ValueError):
        ExperimentConfig(hst=hst, repetitions=0)
    with pytest.raises(ValueError):
        ExperimentConfig(graph={'n': 3, 'model': 'small-world'})
    with pytest.raises(KeyError):
        ExperimentConfig.from_json({'hst': hst, 'colour': 'blue'})
    with pytest.raises(FileNotFoundError):
        ExperimentConfig.from_json({'graph': 'missing.json'}, INPUT_DIRECTORY)


def test_build_scenario():
    config = ExperimentConfig.from_file(INPUT_DIRECTORY / 'experiment.json')
    first = build_scenario(config, 0)
    again = build_scenario(config, 0)
    second = build_scenario(config, 1)

    assert first['graph'] == again['graph']
    assert first['scenario'].to_json() == again['scenario'].to_json()
    assert first['graph'] != second['graph']
    assert first['metric'].size == 6
    assert len(first['scenario'].requests) == 4
    assert first['scenario'].latency.kind == LatencyKind.RANDOM_FRACTION
    assert mean_stretch(first['scenario'].hst, first['metric']) >= 1


def test_build_scenario_over_time():
    config = ExperimentConfig(
        hst={'alpha': 2, 'depth': 2, 'branching': [2, 2]},
        requests=3,
        one_shot=False,
        horizon=4,
    )
    scenario = build_scenario(config, 0)['scenario']

    assert all(0 <= request.time <= 4 for request in scenario.requests)
    assert build_scenario(config, 0)['graph'] is None


def test_run_repetition():
    config = ExperimentConfig.from_file(INPUT_DIRECTORY / 'experiment.json')
    result = run_repetition(config, 0)

    assert result == run_repetition(config, 0)
    assert result['passed']
    assert result['fault'] is None
    assert result['tree_oracle_kind'] == 'bruteforce'
    assert result['tree_ratio'] <= 1
    assert result['cost'] <= result['tree_oracle']
    assert result['graph_oracle'] >= 0
    assert result['stretch'] >= 1
    assert result['checks']['passed']


def test_run_experiment(tmp_path):
    config = ExperimentConfig.from_file(INPUT_DIRECTORY / 'experiment.json')
    report = run_experiment(config, output=tmp_path)

    assert report['passed']
    assert len(report['results']) == 3
    assert [result['repetition'] for result in report['results']] == [0, 1, 2]
    assert report['aggregates']['tree_ratio']['max_float'] <= 1
    assert report['aggregates']['stretch']['mean_float'] >= 1

    with open(tmp_path / 'experiment.json') as report_file:
        assert json.load(report_file)['passed']
    with open(tmp_path / 'experiment.csv') as summary_file:
        lines = summary_file.read().splitlines()
    assert lines[0] == 'repetition,seed,requests,cost,tree_oracle,tree_oracle_kind,tree_ratio,graph_oracle,graph_ratio,passed'
    assert len(lines) == 4


def test_run_experiment_on_hst():
    config = ExperimentConfig.from_file(INPUT_DIRECTORY / 'experiment_hst.json')
    report = run_experiment(config)

    assert report['passed']
    assert report['aggregates']['graph_ratio'] == {}
    assert all(result['tree_oracle_kind'] == 'bruteforce' for result in report['results'])


def test_run_experiment_configured_output():
    config = ExperimentConfig.from_file(INPUT_DIRECTORY / 'experiment_graph_file.json')
    report = run_experiment(config)

    assert report['passed']
    assert (OUTPUT_DIRECTORY / 'experiment_graph_file' / 'experiment.csv').exists()
    assert (OUTPUT_DIRECTORY / 'experiment_graph_file' / 'experiment.json').exists()


def test_locality_oracle_above_limit():
    config = ExperimentConfig(
        hst={'alpha': 2, 'depth': 2, 'branching': [2, 3]},
        requests=5,
        bruteforce_limit=3,
        seed=2,
    )
    result = run_repetition(config, 0)

    assert result['tree_oracle_kind'] == 'locality'
    assert result['passed']


def test_parallel_repetitions(monkeypatch):
    config = ExperimentConfig.from_file(INPUT_DIRECTORY / 'experiment_hst.json')
    serial = run_experiment(config)

    monkeypatch.setenv(WORKERS_VARIABLE, '2')
    parallel = run_experiment(config)

    assert parallel['results'] == serial['results']


def test_replay(tmp_path):
    from dsmspy import ServingSystem

    ServingSystem.from_file(INPUT_DIRECTORY / 'overtaking.json').write(tmp_path / 'run')
    system = replay(tmp_path / 'run' / 'trace.jsonl', tmp_path / 'replayed')

    assert system.cost == Fraction(5, 2)
    assert system.passed
    assert (tmp_path / 'replayed' / 'ledger.json').exists()


def test_stretch_on_uniform_metrics():
    sizes = [8, 16, 32]
    means = []
    for size in sizes:
        metric = Metric.uniform(size)
        stretches = []
        for seed in range(200):
            hst = embed_frt(metric, 2, seed=seed)
            for u in range(size):
                for v in range(u + 1, size):
                    assert hst.distance(hst.leaf_of(u), hst.leaf_of(v)) >= metric.distance(u, v)
            stretches.append(mean_stretch(hst, metric))
        means.append(sum(stretches, Fraction(0)) / len(stretches))

    assert means == sorted(means)
    assert means[-1] / means[0] < Fraction(sizes[-1], sizes[0])
    assert means == [UNIFORM_STRETCH] * len(sizes)


@pytest.mark.parametrize('size', [8, 16, 32])
def test_graph_ratio_on_uniform_metrics(size):
    config = ExperimentConfig(
        graph={'n': size, 'model': 'complete-uniform', 'max_weight': 1},
        servers=2,
        requests=8,
        latency={'kind': 'adversarial', 'denominator': 4, 'bimodal': True},
        seed=size,
    )
    result = run_repetition(config, 0)

    assert result['passed']
    assert result['stretch'] == UNIFORM_STRETCH
    assert result['tree_oracle'] == UNIFORM_STRETCH * result['graph_oracle']
    assert result['graph_ratio'] <= UNIFORM_STRETCH
