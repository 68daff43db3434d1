from abc import ABC, abstractmethod
import csv
from fractions import Fraction
from importlib import metadata as importlib_metadata
import io
import json
import logging
import os
from os import PathLike
from pathlib import Path
from typing import Any, Dict, List, Sequence, TYPE_CHECKING, Union

from ..analysis.checks import CheckReport
from ..analysis.forest import RequestForest
from ..network.graph import Metric, WeightedGraph
from ..network.hst import Hst, hst_distance
from ..simulation.trace import Trace
from ..utilities import format_fraction, fraction_to_json

if TYPE_CHECKING:
    from ..analysis.gaps import AnalysisReport, TransformationLedger

LOGGER = logging.getLogger(__name__)


def ensure_directory(directory: PathLike) -> Path:
    """
    ensure that a directory exists

    :param directory: directory path to ensure
    :returns: path to ensured directory
    """

    if not isinstance(directory, Path):
        directory = Path(directory)
    directory = directory.expanduser()
    if directory.is_file():
        directory = directory.parent
    if not directory.exists():
        directory.mkdir(parents=True, exist_ok=True)
    return directory


def installed_version() -> str:
    try:
        return importlib_metadata.version('dsmspy')
    except importlib_metadata.PackageNotFoundError:
        return 'unknown'


def dump_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2)


class OutputFile(ABC):
    """
    abstraction of an output file
    """

    name: str = NotImplementedError

    # line comment marker; files without one carry the version as a field instead
    comment: str = None

    @property
    def version_header(self) -> str:
        return f'`{self.name}` generated with dsmspy {installed_version()}'

    def render(self, include_version: bool = False) -> str:
        output = f'{self}\n'
        if include_version and self.comment is not None:
            output = f'{self.comment} {self.version_header}\n{output}'
        return output

    def write(self, filename: PathLike, overwrite: bool = False, include_version: bool = False) -> Path:
        """
        write this file to disk

        :param filename: path to file, or a directory to write ``name`` into
        :param overwrite: overwrite an existing file
        :param include_version: include the dsmspy version
        :returns: path to written file
        """

        if not isinstance(filename, Path):
            filename = Path(filename)

        if filename.is_dir():
            filename = filename / self.name
        ensure_directory(filename.parent)

        if filename.exists():
            LOGGER.debug(
                f'{"overwriting" if overwrite else "skipping"} existing file "{os.path.relpath(filename.resolve(), Path.cwd())}"'
            )
        else:
            LOGGER.debug(f'creating new file "{os.path.relpath(filename.resolve(), Path.cwd())}"')
        if not filename.exists() or overwrite:
            with open(filename, 'w', newline='\n') as output_file:
                output_file.write(self.render(include_version))

        return filename

    @abstractmethod
    def __str__(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}()'


class JsonFile(OutputFile):
    @abstractmethod
    def to_json(self) -> Dict[str, Any]:
        raise NotImplementedError

    def render(self, include_version: bool = False) -> str:
        data = self.to_json()
        if include_version:
            data = {**data, 'generator': self.version_header}
        return f'{dump_json(data)}\n'

    def __str__(self) -> str:
        return dump_json(self.to_json())


class CsvFile(OutputFile):
    comment = '#'
    columns: List[str] = NotImplementedError

    @abstractmethod
    def rows(self) -> List[Dict[str, Any]]:
        raise NotImplementedError

    def __str__(self) -> str:
        output = io.StringIO()
        writer = csv.DictWriter(output, fieldnames=self.columns, lineterminator='\n')
        writer.writeheader()
        for row in self.rows():
            writer.writerow(
                {
                    column: format_fraction(value) if isinstance(value, Fraction) else value
                    for column, value in row.items()
                }
            )
        return output.getvalue().rstrip('\n')


class GraphFile(JsonFile):
    """
    ``graph.json``, weighted network graph
    """

    name = 'graph.json'

    def __init__(self, graph: WeightedGraph):
        self.graph = graph

    def to_json(self) -> Dict[str, Any]:
        return self.graph.to_json()


class HstFile(JsonFile):
    """
    ``hst.json``, overlay tree with its leaf map
    """

    name = 'hst.json'

    def __init__(self, hst: Hst):
        self.hst = hst

    def to_json(self) -> Dict[str, Any]:
        return self.hst.to_json()


class TraceFile(OutputFile):
    """
    ``trace.jsonl``, header line followed by one compact line per event
    """

    name = 'trace.jsonl'

    def __init__(self, trace: Trace):
        self.trace = trace

    def render(self, include_version: bool = False) -> str:
        lines = self.trace.to_lines()
        if include_version:
            header = json.loads(lines[0])
            header['generator'] = self.version_header
            lines[0] = json.dumps(header, sort_keys=True, separators=(',', ':'))
        return '\n'.join(lines) + '\n'

    def __str__(self) -> str:
        return '\n'.join(self.trace.to_lines())

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.trace!r})'


class SummaryFile(CsvFile):
    """
    ``summary.csv``, one row per scheduled request
    """

    name = 'summary.csv'
    columns = [
        'request',
        'leaf',
        'time',
        'predecessor',
        'message',
        'source_leaf',
        'destination_leaf',
        'hops',
        'latency',
        'tree_distance',
    ]

    def __init__(self, trace: Trace):
        self.trace = trace

    def rows(self) -> List[Dict[str, Any]]:
        rows = []
        forest = self.trace.forest
        for request in sorted(self.trace.requests, key=lambda request: request.id):
            if request.is_dummy:
                continue
            row = {'request': request.id, 'leaf': request.node, 'time': request.time}
            edge = forest.edge_of(request.id)
            if edge is not None:
                predecessor = self.trace.request(edge.predecessor)
                row.update(
                    predecessor=predecessor.id,
                    destination_leaf=predecessor.node,
                    tree_distance=hst_distance(self.trace.hst, request.node, predecessor.node),
                    latency=self.trace.edge_latency(edge.pair),
                    message=edge.message if edge.message is not None else '',
                    source_leaf=request.node,
                )
                if edge.message is not None:
                    row['hops'] = len(self.trace.message(edge.message).hops) - 1
                else:
                    row['hops'] = 0
            rows.append(row)
        return rows

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.trace!r})'


class CheckReportFile(JsonFile):
    """
    ``report.json``, checker verdicts with the gap analysis of one-shot runs
    """

    name = 'report.json'

    def __init__(
        self,
        checks: CheckReport,
        cost: Fraction = None,
        analysis: 'AnalysisReport' = None,
        fault: str = None,
    ):
        self.checks = checks
        self.cost = cost
        self.analysis = analysis
        self.fault = fault

    @property
    def passed(self) -> bool:
        return (
            self.checks.passed
            and self.fault is None
            and (self.analysis is None or self.analysis.passed)
        )

    def to_json(self) -> Dict[str, Any]:
        return {
            'passed': self.passed,
            'cost': fraction_to_json(self.cost) if self.cost is not None else None,
            'checks': self.checks.to_json(),
            'analysis': self.analysis.to_json() if self.analysis is not None else None,
            'fault': self.fault,
        }


class LedgerFile(JsonFile):
    """
    ``ledger.json``, gaps closed by the transformation with the removed, added and potential edges
    """

    name = 'ledger.json'

    def __init__(self, analysis: 'AnalysisReport'):
        self.analysis = analysis

    @property
    def ledger(self) -> 'TransformationLedger':
        return self.analysis.ledger

    def to_json(self) -> Dict[str, Any]:
        return {
            **self.ledger.to_json(),
            'replacement_steps': [
                [list(edge) for edge in step] for step in self.ledger.replacement_steps()
            ]
            if self.ledger.pdg_acyclic
            else None,
            'amortization': self.analysis.amortization.to_json(),
        }


class ForestFile(JsonFile):
    """
    ``forest.json``, request forest with its total weight
    """

    name = 'forest.json'

    def __init__(self, forest: RequestForest, metric: Union[Metric, Hst]):
        self.forest = forest
        self.metric = metric

    def to_json(self) -> Dict[str, Any]:
        return self.forest.to_json(self.metric)


class ExperimentSummaryFile(CsvFile):
    """
    ``experiment.csv``, one row per repetition
    """

    name = 'experiment.csv'
    columns = [
        'repetition',
        'seed',
        'requests',
        'cost',
        'tree_oracle',
        'tree_oracle_kind',
        'tree_ratio',
        'graph_oracle',
        'graph_ratio',
        'passed',
    ]

    def __init__(self, results: Sequence[Dict[str, Any]]):
        self.results = list(results)

    def rows(self) -> List[Dict[str, Any]]:
        return [{column: result.get(column, '') for column in self.columns} for result in self.results]


class ExperimentReportFile(JsonFile):
    """
    ``experiment.json``, configuration echo with per-repetition results and aggregates
    """

    name = 'experiment.json'

    def __init__(self, report: Dict[str, Any]):
        self.report = report

    def to_json(self) -> Dict[str, Any]:
        return self.report
