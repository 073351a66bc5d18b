import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from nhplan.mst_cbpt import (build_cbpt, edge_endpoints, edge_position, edge_weights, grid_edges,
                             kruskal_merges, merge_weights)
from nhplan.region_graph import EdgeField, RegionMask

from oracles import brute_force_weights, distinct_probabilities, prim_max_spanning_tree, \
    widest_path_value, tree_path_min_edge


def ones(h, w):
    return RegionMask(np.ones((h, w), dtype=bool))


def chain():
    return EdgeField(np.array([[0.9, 0.8, 0.0]]), np.zeros((1, 3)))


def test_single_edge():
    for a in (0, 1):
        for b in (0, 1):
            cb = build_cbpt(EdgeField([[0.4, 0.0]], [[0.0, 0.0]]), RegionMask([[a, b]]))
            assert len(cb.merges) == 1
            m = cb.merges[0]
            assert (m.left_promising_count, m.right_promising_count) == (a, b)
            assert edge_weights(cb) == ({0: 1} if a and b else {})


def test_chain_trace():
    cb = build_cbpt(chain(), ones(1, 3))
    trace = [(m.edge.index, m.left_promising_count, m.right_promising_count) for m in cb.merges]
    assert trace == [(0, 1, 1), (1, 2, 1)]
    assert edge_weights(cb) == {0: 1, 1: 2}


def test_two_by_two_drops_weakest():
    # px(0,0)=0.9, px(1,0)=0.8, py(0,0)=0.7, py(0,1)=0.6
    px = np.array([[0.9, 0.0], [0.8, 0.0]])
    py = np.array([[0.7, 0.6], [0.0, 0.0]])
    cb = build_cbpt(EdgeField(px, py), ones(2, 2))
    assert len(cb.merges) == 3
    assert cb.in_mst[1, 0, 1] == False  # noqa: E712
    assert [m.edge.probability for m in cb.merges] == [0.9, 0.8, 0.7]
    assert sorted(edge_weights(cb).values()) == [1, 1, 4]


def test_ties_by_edge_index():
    px = np.array([[0.5, 0.0], [0.5, 0.0]])
    py = np.array([[0.5, 0.5], [0.0, 0.0]])
    cb = build_cbpt(EdgeField(px, py), ones(2, 2))
    assert [m.edge.index for m in cb.merges] == [0, 2, 4]


def test_edge_ids():
    assert edge_position(4 * 5 + 7, 4, 5) == (1, 1, 2)
    assert edge_endpoints(3, 4, 5) == (3, 4)
    assert edge_endpoints(20 + 3, 4, 5) == (3, 8)
    assert len(grid_edges(4, 5)) == 4 * 4 + 3 * 5


fields = st.tuples(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2**32 - 1))


@settings(max_examples=60, deadline=None)
@given(fields)
def test_weights_match_brute_force(args):
    h, w, seed = args
    if h * w < 2:
        return
    rng = np.random.default_rng(seed)
    px, py = distinct_probabilities(rng, h, w)
    prom = rng.random((h, w)) < rng.uniform(0.2, 0.9)
    field, region = EdgeField(px, py), RegionMask(prom)
    got = edge_weights(build_cbpt(field, region))
    assert got == brute_force_weights(h, w, px, py, prom)
    assert merge_weights(kruskal_merges(field, region), region) == got


@settings(max_examples=30, deadline=None)
@given(fields)
def test_tree_bottleneck_is_widest_path(args):
    h, w, seed = args
    if h * w < 2:
        return
    rng = np.random.default_rng(seed)
    px, py = distinct_probabilities(rng, h, w)
    tree = prim_max_spanning_tree(h, w, px, py)
    for _ in range(10):
        a, b = rng.choice(h * w, 2, replace=False)
        assert tree_path_min_edge(tree, a, b)[0] == widest_path_value(h, w, px, py, a, b)


@settings(max_examples=60, deadline=None)
@given(fields)
def test_spanning_forest_and_order(args):
    h, w, seed = args
    rng = np.random.default_rng(seed)
    px, py = distinct_probabilities(rng, h, w)
    # introduce ties as well
    px = np.round(px, 1)
    py = np.round(py, 1)
    cb = build_cbpt(EdgeField(px, py), RegionMask(rng.random((h, w)) < 0.5))
    assert len(cb.merges) == h * w - 1
    probs = [m.edge.probability for m in cb.merges]
    assert probs == sorted(probs, reverse=True)
    assert int(cb.in_mst.sum()) == h * w - 1
    # acyclic: union-find replay never joins a component with itself
    parent = list(range(h * w))

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for m in cb.merges:
        ra, rb = find(m.edge.endpoints[0]), find(m.edge.endpoints[1])
        assert ra != rb
        parent[ra] = rb


@settings(max_examples=40, deadline=None)
@given(fields, st.sampled_from(["sqrt", "cube", "affine"]))
def test_rank_invariance(args, kind):
    h, w, seed = args
    rng = np.random.default_rng(seed)
    px, py = distinct_probabilities(rng, h, w)
    prom = RegionMask(rng.random((h, w)) < 0.6)
    f = {"sqrt": np.sqrt, "cube": lambda a: a ** 3, "affine": lambda a: 0.5 * a + 0.25}[kind]
    qx, qy = f(px), f(py)
    qx[:, -1] = 0
    qy[-1, :] = 0
    a = build_cbpt(EdgeField(px, py), prom)
    b = build_cbpt(EdgeField(qx, qy), prom)
    assert [m.edge.index for m in a.merges] == [m.edge.index for m in b.merges]
    assert edge_weights(a) == edge_weights(b)
    assert np.array_equal(a.in_mst, b.in_mst)


@settings(max_examples=40, deadline=None)
@given(fields)
def test_weight_total_counts_promising_pairs(args):
    h, w, seed = args
    rng = np.random.default_rng(seed)
    px, py = distinct_probabilities(rng, h, w)
    prom = rng.random((h, w)) < 0.7
    total = sum(edge_weights(build_cbpt(EdgeField(px, py), RegionMask(prom))).values())
    assert total <= int(prom.sum()) * (int(prom.sum()) - 1) // 2
    if prom.all():
        assert total == h * w * (h * w - 1) // 2
