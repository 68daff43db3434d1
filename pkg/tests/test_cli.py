#!/usr/bin/env python
# flake8: noqa

import json

import pytest

from dsmspy.cli import EXIT_PASSED, EXIT_USAGE, EXIT_VIOLATION, main
from tests import INPUT_DIRECTORY


def test_simulate(tmp_path):
    output_directory = tmp_path / 'two_cluster'

    assert main(['simulate', '--scenario', str(INPUT_DIRECTORY / 'two_cluster.json'), '--out', str(output_directory)]) == EXIT_PASSED
    assert (output_directory / 'trace.jsonl').exists()
    with open(output_directory / 'report.json') as report_file:
        assert json.load(report_file)['passed']

    exit_code = main(
        [
            '-v',
            'simulate',
            '--scenario',
            str(INPUT_DIRECTORY / 'overtaking.json'),
            '--out',
            str(output_directory),
            '--check-mode',
            'sampled:2',
            '--overwrite',
        ]
    )
    assert exit_code == EXIT_PASSED


@pytest.mark.parametrize(
    'arguments',
    [
        ['simulate', '--scenario', 'missing.json', '--out', 'unused'],
        ['simulate', '--scenario', str(INPUT_DIRECTORY / 'two_cluster.json'), '--out', 'unused', '--check-mode', 'always'],
        ['experiment', '--config', 'missing.json'],
        ['embed', '--graph', str(INPUT_DIRECTORY / 'graph.json'), '--alpha', '1'],
    ],
)
def test_usage_errors(arguments, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(['-q', *arguments]) == EXIT_USAGE


def test_missing_command():
    with pytest.raises(SystemExit):
        main([])


def test_experiment(capsys):
    assert main(['experiment', '--config', str(INPUT_DIRECTORY / 'experiment_hst.json')]) == EXIT_PASSED

    aggregates = json.loads(capsys.readouterr().out)
    assert aggregates['graph_ratio'] == {}
    assert aggregates['tree_ratio']['max_float'] <= 1


def test_replay(tmp_path, capsys):
    main(['simulate', '--scenario', str(INPUT_DIRECTORY / 'overtaking.json'), '--out', str(tmp_path / 'run')])
    capsys.readouterr()

    assert main(['replay', '--trace', str(tmp_path / 'run' / 'trace.jsonl')]) == EXIT_PASSED
    report = json.loads(capsys.readouterr().out)
    assert report['passed']
    assert report['cost'] == [5, 2]

    assert main(['replay', '--trace', str(tmp_path / 'run' / 'trace.jsonl'), '--out', str(tmp_path / 'replayed')]) == EXIT_PASSED
    assert (tmp_path / 'replayed' / 'report.json').exists()


def test_replay_of_broken_trace(tmp_path):
    main(['simulate', '--scenario', str(INPUT_DIRECTORY / 'two_cluster.json'), '--out', str(tmp_path)])
    lines = (tmp_path / 'trace.jsonl').read_text().splitlines()
    (tmp_path / 'broken.jsonl').write_text('\n'.join([lines[0], '{"not": "an event"}']) + '\n')

    assert main(['-q', 'replay', '--trace', str(tmp_path / 'broken.jsonl')]) == EXIT_USAGE


def test_embed(tmp_path, capsys):
    assert main(['embed', '--graph', str(INPUT_DIRECTORY / 'graph.json'), '--seed', '3']) == EXIT_PASSED
    printed = json.loads(capsys.readouterr().out)
    assert sorted(printed['leaf_map'].values()) == [0, 1, 2, 3, 4]

    filename = tmp_path / 'tree.json'
    assert main(['embed', '--graph', str(INPUT_DIRECTORY / 'graph.json'), '--seed', '3', '--out', str(filename)]) == EXIT_PASSED
    with open(filename) as hst_file:
        assert json.load(hst_file) == printed
