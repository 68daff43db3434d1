import json
import logging
from os import PathLike
from pathlib import Path
from typing import List, Optional

from dsmspy.analysis import (
    analyze,
    AnalysisFault,
    AnalysisReport,
    check_trace,
    CheckMode,
    CheckReport,
    min_k_forest,
    RequestForest,
)
from dsmspy.configuration import (
    CheckReportFile,
    ensure_directory,
    ForestFile,
    GraphFile,
    HstFile,
    LedgerFile,
    OutputFile,
    SummaryFile,
    TraceFile,
)
from dsmspy.network import Hst, normalize_weights, WeightedGraph
from dsmspy.simulation import run, Scenario, total_cost, Trace

LOGGER = logging.getLogger(__name__)


class ServingSystem:
    """
    main user interface class of dsmspy, bundling one execution with its checks, analysis and output files

    .. code-block:: python

        from dsmspy import ServingSystem
        from dsmspy.network import Hst
        from dsmspy.simulation import Scenario

        # two clusters of two leaves each; nodes are numbered in preorder
        hst = Hst(2, [[[], []], [[], []]])

        # one server at leaf 2, requests at leaves 3 and 5 invoked at time 0
        system = ServingSystem(Scenario(hst, server_leaves=[2], requests=[(3, 0), (5, 0)]))

        print(system.cost)
        print(system.passed)

        # write trace, summary, report, ledger and forests to the given directory
        system.write('dsms_output')
    """

    def __init__(
        self,
        scenario: Scenario = None,
        check_mode: CheckMode = CheckMode.OFF,
        sample_every: int = 64,
        graph: WeightedGraph = None,
        trace: Trace = None,
    ):
        """
        :param scenario: scenario to execute
        :param check_mode: overlay checks during execution
        :param sample_every: step interval of sampled checks
        :param graph: network the scenario's HST was embedded from, if any
        :param trace: finished trace to analyse instead of executing a scenario
        """

        if (scenario is None) == (trace is None):
            raise ValueError('exactly one of a scenario and a trace is required')
        if not isinstance(check_mode, CheckMode):
            check_mode = CheckMode(check_mode)

        self.__scenario = scenario
        self.check_mode = check_mode
        self.sample_every = sample_every
        self.graph = graph
        self.__trace = trace
        self.__checks = None
        self.__analysis = None
        self.__fault = None

    @classmethod
    def from_file(cls, filename: PathLike, **kwargs) -> 'ServingSystem':
        """
        read a scenario file, with either an embedded HST or a graph to embed
        """

        with open(filename) as input_file:
            data = json.load(input_file)
        graph = None
        if 'graph' in data:
            graph = normalize_weights(WeightedGraph.from_json(data['graph']))
        return cls(Scenario.from_json(data), graph=graph, **kwargs)

    @classmethod
    def from_trace_file(cls, filename: PathLike) -> 'ServingSystem':
        with open(filename) as input_file:
            return cls(trace=Trace.from_lines(input_file))

    @property
    def scenario(self) -> Optional[Scenario]:
        return self.__scenario

    @property
    def hst(self) -> Hst:
        if self.__scenario is not None:
            return self.__scenario.hst
        return self.__trace.hst

    @property
    def trace(self) -> Trace:
        """
        trace of the execution, running the scenario on first access
        """

        if self.__trace is None:
            self.__trace = run(self.__scenario, self.check_mode, self.sample_every)
        return self.__trace

    def check(self) -> CheckReport:
        if self.__checks is None:
            self.__checks = check_trace(self.trace)
        return self.__checks

    def analyze(self) -> Optional[AnalysisReport]:
        """
        gap analysis of a complete one-shot execution; ``None`` for executions with requests invoked over time
        """

        if self.__analysis is None and self.__fault is None:
            if self.trace.complete and self.trace.one_shot:
                try:
                    self.__analysis = analyze(self.trace)
                except AnalysisFault as fault:
                    LOGGER.error(f'analysis fault: {fault}')
                    self.__fault = str(fault)
        return self.__analysis

    @property
    def fault(self) -> Optional[str]:
        self.analyze()
        return self.__fault

    @property
    def cost(self):
        return total_cost(self.trace)

    @property
    def forest(self) -> RequestForest:
        """
        schedule forest of the execution, as a request forest
        """

        return RequestForest.from_schedule(self.trace.forest, self.trace.requests)

    @property
    def optimal_forest(self) -> RequestForest:
        return min_k_forest(self.trace.requests, self.trace.dummies, self.hst)

    @property
    def report(self) -> CheckReportFile:
        analysis = self.analyze()
        return CheckReportFile(
            self.check(),
            self.cost if self.trace.complete else None,
            analysis,
            self.fault,
        )

    @property
    def passed(self) -> bool:
        return self.report.passed

    @property
    def __output_files(self) -> List[OutputFile]:
        files = [HstFile(self.hst), TraceFile(self.trace), SummaryFile(self.trace), self.report]
        if self.graph is not None:
            files.append(GraphFile(self.graph))
        if self.trace.complete:
            files.append(ForestFile(self.forest, self.hst))
        analysis = self.analyze()
        if analysis is not None:
            files.append(LedgerFile(analysis))
        return files

    def write(self, directory: PathLike, overwrite: bool = False, include_version: bool = False) -> List[Path]:
        """
        write every output file to the given directory

        :param directory: path to output directory
        :param overwrite: overwrite existing files
        :param include_version: include the dsmspy version in every file
        :returns: list of written file paths
        """

        directory = ensure_directory(directory)
        return [
            output_file.write(directory / output_file.name, overwrite, include_version)
            for output_file in self.__output_files
        ]

    def __repr__(self) -> str:
        if self.__scenario is not None:
            return f'{self.__class__.__name__}({self.__scenario!r}, check_mode={self.check_mode})'
        return f'{self.__class__.__name__}(trace={self.__trace!r})'
