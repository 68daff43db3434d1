from .graph import GraphModel, Metric, metric_closure, normalize_weights, random_graph, WeightedGraph
from .hst import build_explicit_hst, embed_frt, Hst, hst_distance, subtree_diameter

__all__ = [
    'build_explicit_hst',
    'embed_frt',
    'GraphModel',
    'Hst',
    'hst_distance',
    'Metric',
    'metric_closure',
    'normalize_weights',
    'random_graph',
    'subtree_diameter',
    'WeightedGraph',
]
