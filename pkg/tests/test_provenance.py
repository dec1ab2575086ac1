import numpy as np
import pytest

from wsskit import provenance
from wsskit.errors import ArgumentError, TooLarge, ValidationError
from wsskit.provenance import (DiffusionInstance, instance_from_edges, oracle_best_subset,
                               score_transmitters, top_k_transmitters)


def _path(n):
    return instance_from_edges([(f"v{i}", f"v{i+1}") for i in range(n - 1)],
                               recipients={f"v0", f"v{n-1}"},
                               candidates={f"v{i}" for i in range(n)})


def _star(leaves):
    edges = [("hub", f"leaf{i}") for i in range(leaves)]
    return instance_from_edges(edges, recipients={f"leaf{i}" for i in range(leaves)},
                               candidates={"hub"} | {f"leaf{i}" for i in range(leaves)})


def test_degenerate_single_candidate():
    inst = instance_from_edges([("v", "w")], recipients={"v"}, candidates={"v"})
    scores = score_transmitters(inst, 0.5)
    assert set(scores) == {"v"}
    assert top_k_transmitters(inst, 1) == ["v"]


def test_path_midpoint_wins():
    inst = instance_from_edges([("a", "b"), ("b", "c")], recipients={"a", "c"},
                               candidates={"a", "b", "c"})
    scores = score_transmitters(inst, 0.5)
    # by hand: max_deg=2; a: 0.5*(1/2) + 0.5*(2/(0.5+2)) = 0.65 ; b: 0.5*1 + 0.5*(2/2) = 1.0
    assert scores["a"] == pytest.approx(0.65)
    assert scores["c"] == pytest.approx(0.65)
    assert scores["b"] == pytest.approx(1.0)
    assert top_k_transmitters(inst, 1, 0.5) == ["b"]


def test_star_hub_wins_for_any_alpha():
    inst = _star(4)
    for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
        assert top_k_transmitters(inst, 1, alpha) == ["hub"]


def test_alpha_one_is_pure_degree():
    inst = instance_from_edges(
        [("a", "b"), ("b", "c"), ("b", "d"), ("d", "e"), ("c", "e"), ("e", "f")],
        recipients={"a"}, candidates={"a", "b", "c", "d", "e", "f"})
    scores = score_transmitters(inst, 1.0)
    degree = {v: len(inst.graph[v]) for v in inst.candidates}
    rank_scores = sorted(scores, key=lambda v: (-scores[v], v))
    rank_degree = sorted(degree, key=lambda v: (-degree[v], v))
    assert rank_scores == rank_degree


def test_alpha_zero_is_pure_closeness():
    inst = _path(5)
    scores = score_transmitters(inst, 0.0)
    closeness = {}
    for v in inst.candidates:
        dist = provenance._bfs_distances(inst.graph, v)
        total = sum(dist[r] if dist[r] > 0 else 0.5 for r in inst.recipients)
        closeness[v] = len(inst.recipients) / total
    assert sorted(scores, key=lambda v: (-scores[v], v)) == \
        sorted(closeness, key=lambda v: (-closeness[v], v))


def test_unreachable_recipient_scores_zero():
    inst = instance_from_edges([("a", "b")], recipients={"a", "b"},
                               candidates={"a", "b", "island"})
    assert score_transmitters(inst, 0.5)["island"] == 0.0


def test_disconnected_recipients_rejected():
    with pytest.raises(ValidationError, match="connected"):
        instance_from_edges([("a", "b"), ("c", "d")], recipients={"a", "c"},
                            candidates={"a"})


def test_recipients_must_exist():
    with pytest.raises(ValidationError):
        instance_from_edges([("a", "b")], recipients={"ghost"}, candidates={"a"})
    with pytest.raises(ValidationError):
        DiffusionInstance(graph={"a": {"b"}}, recipients={"a"}, candidates={"a"})


def test_top_k_bounds():
    inst = _path(3)
    assert top_k_transmitters(inst, 0) == []
    assert len(top_k_transmitters(inst, 3)) == 3
    with pytest.raises(ArgumentError):
        top_k_transmitters(inst, 4)
    with pytest.raises(ArgumentError):
        top_k_transmitters(inst, -1)
    with pytest.raises(ArgumentError):
        score_transmitters(inst, 1.5)


def test_oracle_path_spec_example():
    inst = instance_from_edges([("a", "b"), ("b", "c")], recipients={"a", "c"},
                               candidates={"a", "b", "c"})
    assert oracle_best_subset(inst, 1) == {"b"}


def test_oracle_full_and_self():
    inst = _path(3)
    assert oracle_best_subset(inst, 3) == set(inst.candidates)
    solo = instance_from_edges([("v", "w")], recipients={"v"}, candidates={"v", "w"})
    assert oracle_best_subset(solo, 1) == {"v"}


def test_oracle_guard():
    inst = _path(16)
    with pytest.raises(TooLarge):
        oracle_best_subset(inst, 1)


def test_scores_invariant_under_relabeling():
    edges = [("a", "b"), ("b", "c"), ("c", "d"), ("b", "d")]
    inst = instance_from_edges(edges, recipients={"a", "d"}, candidates={"a", "b", "c", "d"})
    mapping = {"a": "x9", "b": "x2", "c": "x7", "d": "x0"}
    inst2 = instance_from_edges([(mapping[u], mapping[v]) for u, v in edges],
                                recipients={"x9", "x0"},
                                candidates=set(mapping.values()))
    s1 = score_transmitters(inst, 0.3)
    s2 = score_transmitters(inst2, 0.3)
    assert {mapping[v]: s for v, s in s1.items()} == s2


def random_tree_instance(rng, n):
    """Random attachment tree; recipients are its leaves (spread reached the
    periphery, the task is to find the origin)."""
    edges = [(f"t{i}", f"t{int(rng.integers(i))}") for i in range(1, n)]
    nodes = {f"t{i}" for i in range(n)}
    deg = {v: 0 for v in nodes}
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    leaves = {v for v in nodes if deg[v] == 1}
    return instance_from_edges(edges, recipients=leaves, candidates=nodes)


def test_top1_matches_oracle_on_fixtures():
    fixtures = [_path(3), _star(5)]
    rng = np.random.default_rng(20240801)
    fixtures += [random_tree_instance(rng, int(rng.integers(5, 13))) for _ in range(10)]
    for inst in fixtures:
        assert set(top_k_transmitters(inst, 1, 0.5)) == oracle_best_subset(inst, 1)
