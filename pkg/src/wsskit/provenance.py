"""Transmitter attribution: rank likely diffusion sources on a user graph.

High-degree nodes that sit close to the observed recipients score highest; a
convex combination of normalized degree and recipient closeness
operationalizes that. A brute-force subset oracle is provided for small
instances so the heuristic can be checked against an exhaustive answer.
"""

import itertools
import math
from collections import deque
from dataclasses import dataclass

from wsskit.errors import ArgumentError, TooLarge, ValidationError
from wsskit.ioutil import read_jsonl

#: A candidate that coincides with a recipient contributes this distance
#: instead of 0, keeping closeness sums finite and overlap-sensitive.
OVERLAP_DISTANCE = 0.5

ORACLE_MAX_NODES = 15


@dataclass(frozen=True)
class DiffusionInstance:
    graph: dict  # node -> frozenset of neighbors, undirected
    recipients: frozenset
    candidates: frozenset

    def __post_init__(self):
        adj = {node: frozenset(neigh) for node, neigh in self.graph.items()}
        for node, neigh in adj.items():
            for other in neigh:
                if other not in adj or node not in adj[other]:
                    raise ValidationError(f"edge {node!r}-{other!r} is not undirected")
        object.__setattr__(self, "graph", adj)
        object.__setattr__(self, "recipients", frozenset(self.recipients))
        object.__setattr__(self, "candidates", frozenset(self.candidates))
        if not self.recipients:
            raise ValidationError("recipients must be non-empty")
        if not self.recipients <= set(adj):
            raise ValidationError("recipients must be graph nodes")
        if not self.candidates <= set(adj):
            raise ValidationError("candidates must be graph nodes")
        start = min(self.recipients)
        component = _bfs_distances(adj, start)
        missing = self.recipients - set(component)
        if missing:
            raise ValidationError(
                f"recipients are not connected: {sorted(missing)} unreachable from {start!r}")


def instance_from_edges(edges, recipients, candidates) -> DiffusionInstance:
    """Build an instance from (a, b) edge pairs.

    Candidates without edges join as isolated nodes; recipients must already
    appear in the graph (an unknown recipient is an input error, not an
    isolated bystander).
    """
    graph = {}
    for a, b in edges:
        graph.setdefault(a, set()).add(b)
        graph.setdefault(b, set()).add(a)
    for node in candidates:
        graph.setdefault(node, set())
    return DiffusionInstance(graph=graph, recipients=recipients, candidates=candidates)


def load_edges(path) -> list:
    """Read an edges.jsonl file of {a, b} rows."""
    return [(str(obj["a"]), str(obj["b"])) for _, obj in read_jsonl(path)]


def _bfs_distances(graph, source) -> dict:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        node = queue.popleft()
        for neigh in graph[node]:
            if neigh not in dist:
                dist[neigh] = dist[node] + 1
                queue.append(neigh)
    return dist


def score_transmitters(inst: DiffusionInstance, alpha: float = 0.5) -> dict:
    """Score each candidate as alpha * degree + (1 - alpha) * closeness.

    Degree is normalized by the graph's max degree. Closeness to the
    recipient set R is |R| / sum of BFS distances to R, a coincident
    recipient counting OVERLAP_DISTANCE. A candidate that cannot reach every
    recipient scores 0.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ArgumentError("alpha must be in [0, 1]")
    max_deg = max((len(neigh) for neigh in inst.graph.values()), default=0)
    scores = {}
    for cand in sorted(inst.candidates):
        dist = _bfs_distances(inst.graph, cand)
        total = 0.0
        reachable = True
        for r in inst.recipients:
            if r not in dist:
                reachable = False
                break
            total += dist[r] if dist[r] > 0 else OVERLAP_DISTANCE
        if not reachable:
            scores[cand] = 0.0
            continue
        closeness = len(inst.recipients) / total
        degree = len(inst.graph[cand]) / max_deg if max_deg else 0.0
        scores[cand] = alpha * degree + (1.0 - alpha) * closeness
    return scores


def top_k_transmitters(inst: DiffusionInstance, k: int, alpha: float = 0.5) -> list:
    """Top-k candidates by score, ties broken by node id."""
    if k < 0 or k > len(inst.candidates):
        raise ArgumentError(f"k={k} out of range for {len(inst.candidates)} candidates")
    scores = score_transmitters(inst, alpha)
    ranked = sorted(scores, key=lambda node: (-scores[node], node))
    return ranked[:k]


def oracle_best_subset(inst: DiffusionInstance, k: int) -> set:
    """Exhaustive k-subset of candidates minimizing the summed distance from
    each recipient to its nearest subset member (coincidence counts
    OVERLAP_DISTANCE). Ties go to the lexicographically first subset."""
    if len(inst.graph) > ORACLE_MAX_NODES:
        raise TooLarge(f"oracle limited to {ORACLE_MAX_NODES} nodes")
    if k < 0 or k > len(inst.candidates):
        raise ArgumentError(f"k={k} out of range for {len(inst.candidates)} candidates")
    dist_from_r = {r: _bfs_distances(inst.graph, r) for r in inst.recipients}

    def cost(subset):
        total = 0.0
        for r, dist in dist_from_r.items():
            best = math.inf
            for v in subset:
                d = dist.get(v, math.inf)
                if d == 0:
                    d = OVERLAP_DISTANCE
                best = min(best, d)
            total += best
        return total

    best_subset, best_cost = None, math.inf
    for subset in itertools.combinations(sorted(inst.candidates), k):
        c = cost(subset)
        if c < best_cost:
            best_subset, best_cost = subset, c
    return set(best_subset) if best_subset is not None else set()
