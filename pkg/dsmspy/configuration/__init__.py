from .base import (
    CheckReportFile,
    CsvFile,
    ensure_directory,
    ExperimentReportFile,
    ExperimentSummaryFile,
    ForestFile,
    GraphFile,
    HstFile,
    JsonFile,
    LedgerFile,
    OutputFile,
    SummaryFile,
    TraceFile,
)
from .experiment import ExperimentConfig, parse_check_mode

__all__ = [
    'CheckReportFile',
    'CsvFile',
    'ensure_directory',
    'ExperimentConfig',
    'ExperimentReportFile',
    'ExperimentSummaryFile',
    'ForestFile',
    'GraphFile',
    'HstFile',
    'JsonFile',
    'LedgerFile',
    'OutputFile',
    'parse_check_mode',
    'SummaryFile',
    'TraceFile',
]
