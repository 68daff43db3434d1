#!/usr/bin/env python
# flake8: noqa

from fractions import Fraction

import pytest

from dsmspy.network import (
    build_explicit_hst,
    embed_frt,
    Hst,
    hst_distance,
    Metric,
    metric_closure,
    random_graph,
    subtree_diameter,
    WeightedGraph,
)


def test_hst_structure():
    hst = Hst(2, [[[], []], [[], []]])

    assert hst.depth == 2
    assert len(hst) == 7
    assert hst.root == 0
    assert hst.leaves == [2, 3, 5, 6]
    assert hst.children(0) == [1, 4]
    assert hst.children(4) == [5, 6]
    assert hst.parent(0) is None
    assert hst.parent(5) == 4
    assert hst.neighbors(1) == [0, 2, 3]
    assert hst.level(5) == 2
    assert hst.height(1) == 1
    assert hst.height(0) == 2
    assert hst.edges == [(0, 1), (1, 2), (1, 3), (0, 4), (4, 5), (4, 6)]
    assert hst.ancestors(6) == [4, 0]
    assert hst.is_ancestor(0, 6)
    assert hst.is_ancestor(6, 6)
    assert not hst.is_ancestor(1, 6)
    assert hst.subtree_nodes(4) == [4, 5, 6]
    assert hst.subtree_leaves(0) == [2, 3, 5, 6]

    assert 6 in hst
    assert 7 not in hst

    with pytest.raises(KeyError):
        hst.parent(7)


def test_hst_weights():
    hst = Hst(2, [[[], []], [[], []]])

    assert hst.edge_weight(0, 1) == 2
    assert hst.edge_weight(1, 0) == 2
    assert hst.edge_weight(1, 2) == 1
    assert hst.level_weight(0) == 2

    with pytest.raises(KeyError):
        hst.edge_weight(2, 3)

    assert hst_distance(hst, 2, 2) == 0
    assert hst_distance(hst, 2, 3) == 2
    assert hst_distance(hst, 3, 5) == 6
    assert hst.distance(5, 3) == 6
    assert subtree_diameter(hst, 0) == 6
    assert subtree_diameter(hst, 1) == 2
    assert subtree_diameter(hst, 2) == 0

    with pytest.raises(ValueError):
        hst_distance(hst, 1, 2)


def test_hst_paths():
    hst = Hst(2, [[[[], [], []], [[]]], [[[]]], [[[]]]])

    assert hst.lowest_common_ancestor(4, 7) == 1
    assert hst.lowest_common_ancestor(3, 13) == 0
    assert hst.path(7, 3) == [7, 6, 1, 2, 3]
    assert hst.path(13, 4) == [13, 12, 11, 0, 1, 2, 4]
    assert hst.path(3, 3) == [3]

    # a chain of single children collapses to the lower branching node
    assert subtree_diameter(hst, 6) == 0
    assert subtree_diameter(hst, 1) == 6
    assert subtree_diameter(hst, 0) == 14


def test_hst_fractional_alpha():
    hst = Hst('3/2', [[[]], [[]]])

    assert hst.alpha == Fraction(3, 2)
    assert hst.edge_weight(0, 1) == Fraction(3, 2)
    assert hst_distance(hst, 2, 4) == 5


def test_hst_invalid():
    with pytest.raises(ValueError):
        Hst(1, [[], []])
    with pytest.raises(ValueError):
        Hst(2, [[[]], []])
    with pytest.raises(ValueError):
        Hst(2, [[], []], leaf_map={1: 0, 2: 0})
    with pytest.raises(ValueError):
        Hst(2, [[], []], leaf_map={1: 0, 3: 1})


def test_hst_json():
    hst = Hst(2, [[[], []], [[], []]], leaf_map={2: 3, 3: 2, 5: 1, 6: 0})

    assert hst.graph_node_of(2) == 3
    assert hst.leaf_of(0) == 6

    data = hst.to_json()
    assert data['alpha'] == [2, 1]
    assert data['depth'] == 2
    assert data['leaf_map'] == {'2': 3, '3': 2, '5': 1, '6': 0}
    assert Hst.from_json(data) == hst

    with pytest.raises(ValueError):
        Hst.from_json({'alpha': 2})
    with pytest.raises(ValueError):
        Hst.from_json({**data, 'depth': 3})
    with pytest.raises(KeyError):
        hst.graph_node_of(1)
    with pytest.raises(KeyError):
        hst.leaf_of(4)


def test_build_explicit_hst():
    hst = build_explicit_hst(2, 3, [2, 3, 2])

    assert hst.depth == 3
    assert len(hst.leaves) == 12
    assert len(hst) == 1 + 2 + 6 + 12
    assert hst.edge_weight(0, 1) == 4

    with pytest.raises(ValueError):
        build_explicit_hst(2, 2, [2])
    with pytest.raises(ValueError):
        build_explicit_hst(2, 1, [0])


def test_embed_single_point():
    hst = embed_frt(Metric([[0]]), 2, seed=1)

    assert hst.leaves == [0]
    assert hst.leaf_of(0) == 0


@pytest.mark.parametrize('seed', [0, 1, 2, 3])
def test_embed_dominates_metric(seed):
    metric = metric_closure(random_graph(9, 'complete-uniform', seed=seed, max_weight=6))
    hst = embed_frt(metric, 2, seed=seed)

    assert len(hst.leaves) == metric.size
    assert sorted(hst.leaf_map.values()) == list(range(metric.size))
    for u in range(metric.size):
        for v in range(metric.size):
            assert hst.distance(hst.leaf_of(u), hst.leaf_of(v)) >= metric.distance(u, v)


def test_embed_is_deterministic():
    metric = metric_closure(WeightedGraph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)]))

    assert embed_frt(metric, 2, seed=7) == embed_frt(metric, 2, seed=7)


def test_embed_invalid():
    with pytest.raises(ValueError):
        embed_frt(Metric([[0, 1], [1, 0]]), 1)
    with pytest.raises(ValueError):
        embed_frt(Metric([[0, '1/2'], ['1/2', 0]]), 2)
