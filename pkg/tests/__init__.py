import os
from fractions import Fraction
from os import PathLike
from pathlib import Path

from dsmspy.network import Hst
from dsmspy.simulation import LatencyModel, Scenario

DATA_DIRECTORY = Path(__file__).parent / 'data'
INPUT_DIRECTORY = DATA_DIRECTORY / 'input'
OUTPUT_DIRECTORY = DATA_DIRECTORY / 'output'
REFERENCE_DIRECTORY = DATA_DIRECTORY / 'reference'

SIXTEENTH = Fraction(1, 16)


def two_cluster_scenario() -> Scenario:
    """
    two clusters of two leaves, one server at leaf 2, requests at leaves 3 and 5
    """

    hst = Hst(2, [[[], []], [[], []]])
    return Scenario(hst, server_leaves=[2], requests=[(3, 0), (5, 0)])


def overtaking_scenario() -> Scenario:
    """
    depth-3 tree with servers at leaves 3 and 10; message 5 overtakes message 4 inside the cluster rooted at 2
    """

    hst = Hst(2, [[[[], [], []], [[]]], [[[]]], [[[]]]])
    script = {
        (2, 7, 6): SIXTEENTH,
        (2, 6, 1): SIXTEENTH,
        (2, 1, 2): SIXTEENTH,
        (2, 2, 3): SIXTEENTH,
        (3, 4, 2): 4 * SIXTEENTH,
        (3, 2, 1): SIXTEENTH,
        (3, 1, 6): SIXTEENTH,
        (3, 6, 7): SIXTEENTH,
        (4, 5, 2): Fraction(1),
        (4, 2, 1): SIXTEENTH,
        (4, 1, 0): SIXTEENTH,
        (4, 0, 8): SIXTEENTH,
        (4, 8, 9): SIXTEENTH,
        (4, 9, 10): SIXTEENTH,
        (5, 13, 12): SIXTEENTH,
        (5, 12, 11): SIXTEENTH,
        (5, 11, 0): SIXTEENTH,
        (5, 0, 1): 3 * SIXTEENTH,
        (5, 1, 2): SIXTEENTH,
        (5, 2, 4): SIXTEENTH,
    }
    return Scenario(
        hst,
        server_leaves=[3, 10],
        requests=[(7, 0, 'a'), (4, 0, 'b'), (5, 0, 'c'), (13, 0, 'd')],
        latency=LatencyModel('scripted', script=script),
    )


def two_server_scenario() -> Scenario:
    """
    three clusters under the root, servers at leaves 2 and 5, synchronous latencies
    """

    hst = Hst(2, [[[], []], [[]], [[], []]])
    return Scenario(hst, server_leaves=[2, 5], requests=[(3, 0), (5, 0), (7, 0), (8, 0)])


def check_reference_directory(
    test_directory: PathLike, reference_directory: PathLike, skip_lines: {str: [int]} = None
):
    """
    compare every file of the reference directory with its namesake in the test directory

    :param test_directory: directory of written files
    :param reference_directory: directory of expected files
    :param skip_lines: map of filename to indices of lines that may differ (such as version comments)
    """

    if not isinstance(test_directory, Path):
        test_directory = Path(test_directory)
    if not isinstance(reference_directory, Path):
        reference_directory = Path(reference_directory)
    if skip_lines is None:
        skip_lines = {}

    for reference_filename in reference_directory.iterdir():
        if reference_filename.is_dir():
            check_reference_directory(
                test_directory / reference_filename.name, reference_filename, skip_lines
            )
            continue

        test_filename = test_directory / reference_filename.name
        with open(test_filename) as test_file, open(reference_filename) as reference_file:
            test_lines = test_file.read().splitlines()
            reference_lines = reference_file.read().splitlines()

        for line_index in sorted(skip_lines.get(reference_filename.name, []), reverse=True):
            if len(test_lines) > 0:
                del test_lines[line_index % len(test_lines)]
            if len(reference_lines) > 0:
                del reference_lines[line_index % len(reference_lines)]

        cwd = Path.cwd()
        message = f'"{os.path.relpath(test_filename, cwd)}" != "{os.path.relpath(reference_filename, cwd)}"'
        assert test_lines == reference_lines, message
