from .checks import check_state, check_trace, CheckMode, CheckReport
from .forest import (
    build_locality_forest,
    check_inter_component,
    check_intra_component,
    ExchangeVerdict,
    forest_weight,
    InstanceTooLarge,
    min_k_forest,
    min_k_forest_bruteforce,
    opt_lower_bound,
    RequestForest,
    UnionFind,
    verify_exchange_property,
)
from .gaps import (
    AmortizationReport,
    analyze,
    AnalysisFault,
    AnalysisReport,
    build_timelines,
    find_gaps,
    Gap,
    GapKind,
    local_predecessors,
    potential,
    SubtreeTimeline,
    TimelineEntry,
    transform,
    TransformationLedger,
    verify_amortization,
)

__all__ = [
    'AmortizationReport',
    'analyze',
    'AnalysisFault',
    'AnalysisReport',
    'build_locality_forest',
    'build_timelines',
    'check_inter_component',
    'check_intra_component',
    'check_state',
    'check_trace',
    'CheckMode',
    'CheckReport',
    'ExchangeVerdict',
    'find_gaps',
    'forest_weight',
    'Gap',
    'GapKind',
    'InstanceTooLarge',
    'local_predecessors',
    'min_k_forest',
    'min_k_forest_bruteforce',
    'opt_lower_bound',
    'potential',
    'RequestForest',
    'SubtreeTimeline',
    'TimelineEntry',
    'transform',
    'TransformationLedger',
    'UnionFind',
    'verify_amortization',
]
