import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhplan.errors import ConfigError
from nhplan.fixtures import get_fixture, small_open_problem, walled_problem
from nhplan.grid_map import GridMap, State, dist, free_edge, path_cost
from nhplan.heuristic import build_sampler, uniform_sampler
from nhplan.planners import (PlannerConfig, Tree, audit_costs, bit_star_plan, lsc_shorten,
                             rgg_radius, rrt_plan, rrt_star_plan)

from oracles import audit_result


def cfg(**kw):
    return PlannerConfig(**kw)


def strip(result):
    return (result.success, result.iterations, result.node_count, result.cost, result.path,
            result.cost_history)


@pytest.mark.parametrize("plan", [rrt_plan, rrt_star_plan, bit_star_plan])
def test_open_map_success(plan):
    p = small_open_problem()
    r = plan(p, cfg(seed=3))
    assert r.success
    audit_result(p, r)


@pytest.mark.parametrize("plan", [rrt_plan, rrt_star_plan])
def test_walled_map_fails(plan):
    p = walled_problem()
    r = plan(p, cfg(seed=1, max_iterations=300))
    assert not r.success and r.iterations == 300
    audit_result(p, r)


def test_bit_star_walled_and_empty_budget():
    p = walled_problem()
    r = bit_star_plan(p, cfg(seed=1, sample_limit=200))
    assert not r.success
    audit_result(p, r)
    r0 = bit_star_plan(small_open_problem(), cfg(sample_limit=0))
    assert (r0.success, r0.iterations, r0.node_count) == (False, 0, 1)


@pytest.mark.parametrize("plan", [rrt_plan, rrt_star_plan, bit_star_plan])
def test_determinism(plan):
    fx = get_fixture("two-passage")
    s = build_sampler(fx.connected, 0.5)
    a = plan(fx.problem, cfg(seed=11), s)
    b = plan(fx.problem, cfg(seed=11), build_sampler(fx.connected, 0.5))
    assert strip(a) == strip(b)


@pytest.mark.parametrize("plan", [rrt_plan, rrt_star_plan, bit_star_plan])
def test_zero_bias_is_plain(plan):
    fx = get_fixture("two-passage")
    for seed in range(3):
        plain = plan(fx.problem, cfg(seed=seed))
        biased = plan(fx.problem, cfg(seed=seed), build_sampler(fx.connected, 0.0))
        assert strip(plain) == strip(biased)


def test_rrt_star_cost_vs_rrt():
    p = small_open_problem()
    wins = 0
    for seed in range(50):
        a = rrt_plan(p, cfg(seed=seed))
        b = rrt_star_plan(p, cfg(seed=seed))
        assert a.success and b.success
        wins += b.cost <= a.cost
    assert wins >= 30


def test_rrt_star_debug_audit():
    fx = get_fixture("dead-end")
    r = rrt_star_plan(fx.problem, cfg(seed=2, debug=True, max_iterations=600))
    audit_costs(r.tree)
    audit_result(fx.problem, r)


def test_refinement_monotone():
    p = small_open_problem()
    r = rrt_star_plan(p, cfg(seed=4, refine=True, max_iterations=800))
    h = r.cost_history
    assert len(h) == 800
    assert all(b <= a for a, b in zip(h, h[1:]))
    assert r.success and math.isfinite(h[-1])
    assert r.cost == pytest.approx(h[-1], abs=1e-9)
    audit_costs(r.tree)


def test_bit_star_fewer_nodes_than_rrt():
    p = small_open_problem()
    rrt_nodes = np.mean([rrt_plan(p, cfg(seed=s)).node_count for s in range(20)])
    bit = [bit_star_plan(p, cfg(seed=s)) for s in range(20)]
    assert all(r.success for r in bit)
    assert np.mean([r.node_count for r in bit]) < rrt_nodes


@pytest.mark.slow
def test_bit_star_two_passage_connected():
    fx = get_fixture("two-passage")
    for seed in range(50):
        r = bit_star_plan(fx.problem, cfg(seed=seed), build_sampler(fx.connected, 0.5))
        assert r.success
        audit_result(fx.problem, r)


def test_rgg_radius_shrinks():
    assert rgg_radius(1000.0, 10) > rgg_radius(1000.0, 100) > rgg_radius(1000.0, 1000)
    assert rgg_radius(math.pi, 2) == pytest.approx(2 * math.sqrt(1.5) * math.sqrt(math.log(2) / 2))


def test_goal_at_start():
    p = small_open_problem()
    near = type(p)(p.map, p.start, State(6.0, 6.0), 5.0)
    for plan in (rrt_plan, rrt_star_plan, bit_star_plan):
        r = plan(near, cfg())
        assert r.success and r.iterations == 0 and r.path[-1] == near.goal


def test_config_validation():
    with pytest.raises(ConfigError):
        PlannerConfig(step_size=0)
    with pytest.raises(ConfigError):
        PlannerConfig(heuristic_bias=2.0)
    with pytest.raises(ConfigError):
        rrt_plan(small_open_problem(), cfg(), uniform_sampler(10, 10))


def test_lsc_examples():
    grid = GridMap.empty(32, 32)
    assert lsc_shorten([(1, 1), (5, 5), (9, 9)], grid) == [State(1, 1), State(9, 9)]
    occ = np.zeros((32, 32), dtype=bool)
    occ[0:20, 15] = True
    walled = GridMap.from_array(occ)
    detour = [State(5.5, 5.5), State(15.5, 25.5), State(25.5, 5.5)]
    assert lsc_shorten(detour, walled) == detour


def test_lsc_on_rrt_paths():
    p = small_open_problem()
    for seed in range(20):
        r = rrt_plan(p, cfg(seed=seed))
        short = lsc_shorten(r.path, p.map)
        assert path_cost(short) <= r.cost + 1e-9
        assert path_cost(short) >= dist(short[0], short[-1]) - 1e-9
        assert short[0] == r.path[0] and short[-1] == r.path[-1]
        for a, b in zip(short, short[1:]):
            assert free_edge(p.map, a, b)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 300), st.floats(1.0, 15.0))
def test_tree_queries_match_brute_force(seed, n, bucket):
    rng = random.Random(seed)
    pts = [(rng.uniform(0, 64), rng.uniform(0, 48)) for _ in range(n)]
    tree = Tree(pts[0], bucket, 64, 48)
    for q in pts[1:]:
        tree.add(q, 0, 0.0)
    for _ in range(20):
        x, y = rng.uniform(0, 64), rng.uniform(0, 48)
        d = [math.hypot(px - x, py - y) for px, py in pts]
        best = min(range(n), key=lambda i: (d[i], i))
        assert tree.nearest(x, y) == best
        r = rng.uniform(0, 20)
        assert tree.near(x, y, r) == [i for i in range(n) if d[i] <= r]


@pytest.mark.parametrize("name", ["two-passage", "dead-end", "open"])
@pytest.mark.parametrize("plan", [rrt_plan, rrt_star_plan, bit_star_plan])
def test_soundness_on_fixtures(name, plan):
    fx = get_fixture(name)
    for seed, (region, bias) in enumerate([(None, 0.0), (fx.connected, 0.5),
                                           (fx.disconnected, 0.9)]):
        sampler = build_sampler(region, bias) if region is not None else None
        r = plan(fx.problem, cfg(seed=seed, max_iterations=2000), sampler)
        audit_result(fx.problem, r)
        if isinstance(r.tree, Tree) and plan is not bit_star_plan:
            audit_costs(r.tree)
