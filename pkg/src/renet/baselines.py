"""Reference networks: a demand-oblivious fabric and a clairvoyant static one.

The oblivious baseline is an undirected binary de Bruijn graph: degree at
most four, diameter exactly log2 of the (power-of-two rounded) vertex count,
and fully deterministic, so no randomness leaks into comparisons.  Nodes map
to vertices by the identity embedding, deliberately ignoring the demand.

The static baseline knows the whole trace in advance: it classifies nodes
with the same working-set threshold, wires small-small pairs directly, gives
every large node a fixed weight-bisected tree over its partners (weighted by
symmetrized pair frequencies), and relays large-large pairs through
least-loaded helpers.  Replay over it incurs zero adjustment cost.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .ego_tree import EgoTree, build_static, edge_key
from .entropy import X_GIVEN_Y, Y_GIVEN_X, conditional_entropy, normalized
from .network import NetParams
from .trace import Trace, build_demand_graph


@dataclass(frozen=True)
class ObliviousNet:
    """Undirected binary de Bruijn graph over 2^k >= n vertices."""

    n: int
    k: int
    adjacency: tuple

    @classmethod
    def build(cls, n: int) -> "ObliviousNet":
        if n < 2:
            raise ValueError("need at least two nodes")
        k = max(1, math.ceil(math.log2(n)))
        size = 1 << k
        mask = size - 1
        adj = []
        for v in range(size):
            neigh = {
                (v << 1) & mask,
                ((v << 1) & mask) | 1,
                v >> 1,
                (v >> 1) | (1 << (k - 1)),
            }
            neigh.discard(v)
            adj.append(tuple(sorted(neigh)))
        return cls(n=n, k=k, adjacency=tuple(adj))

    @property
    def size(self) -> int:
        return 1 << self.k

    def max_degree(self) -> int:
        return max(len(a) for a in self.adjacency)

    def distances_from(self, src: int) -> np.ndarray:
        """BFS hop distances from one vertex to every vertex."""
        dist = np.full(self.size, -1, dtype=np.int32)
        dist[src] = 0
        frontier = [src]
        d = 0
        adj = self.adjacency
        while frontier:
            d += 1
            nxt = []
            for v in frontier:
                for w in adj[v]:
                    if dist[w] < 0:
                        dist[w] = d
                        nxt.append(w)
            frontier = nxt
        return dist

    def diameter(self) -> int:
        return max(int(self.distances_from(v).max()) for v in range(self.size))


def oblivious_cost(net: ObliviousNet, trace: Trace) -> float:
    """Average shortest-path length of the trace under the identity embedding."""
    if len(trace) == 0:
        raise ValueError("empty trace")
    counts = trace.pair_counts()
    by_src: dict[int, list] = {}
    for (u, v), cnt in counts.items():
        by_src.setdefault(u, []).append((v, cnt))
    total = 0
    for u in sorted(by_src):
        dist = net.distances_from(u)
        for v, cnt in by_src[u]:
            total += int(dist[v]) * cnt
    return total / len(trace)


def static_lower_bound(trace: Trace, degree: float) -> float:
    """Information bound for fixed degree-bounded networks: the larger of the
    two conditional entropies of the full-trace demand, in base `degree`."""
    if degree <= 1:
        raise ValueError("degree base must be > 1")
    joint = build_demand_graph(trace).edges
    return max(
        conditional_entropy(joint, Y_GIVEN_X, base=degree),
        conditional_entropy(joint, X_GIVEN_Y, base=degree),
    )


class StaticBuildError(ValueError):
    pass


@dataclass
class StaticDan:
    """Fixed demand-aware network built with full knowledge of the trace."""

    params: NetParams
    large: set
    direct: dict          # node -> set of directly linked partners
    trees: dict           # large node -> fixed EgoTree
    depths: dict          # large node -> {key: depth}
    helpers: dict         # (a, b) with a < b -> helper node
    degree: dict = field(default_factory=dict)

    def snapshot(self) -> dict:
        return {
            "params": {"n": self.params.n, "c": self.params.c, "delta_cap": self.params.delta_cap},
            "size_classes": {"large": sorted(self.large)},
            "edges": sorted([a, b, cnt] for (a, b), cnt in self._edges().items()),
            "trees": {str(w): {"inorder": t.debug_string()} for w, t in self.trees.items()},
        }

    def _edges(self) -> Counter:
        edges: Counter = Counter()
        for u in sorted(self.direct):
            for v in self.direct[u]:
                if u < v:
                    edges[edge_key(u, v)] += 1
        for w in sorted(self.trees):
            edges.update(self.trees[w].edges())
        return edges


def build_static_dan(trace: Trace, params: NetParams) -> StaticDan:
    """Assemble the clairvoyant baseline; fails if the demand is too dense."""
    if len(trace) == 0:
        raise ValueError("empty trace")
    counts = trace.pair_counts()
    if len(counts) > params.c * params.n:
        raise StaticBuildError(
            f"{len(counts)} unique pairs exceed c*n = {params.c * params.n}; "
            "the full trace is not sparse enough for a degree-bounded build"
        )
    partners: dict[int, set] = {i: set() for i in range(params.n)}
    sym: dict[tuple[int, int], float] = {}
    m = len(trace)
    for (u, v), cnt in counts.items():
        partners[u].add(v)
        partners[v].add(u)
        k = edge_key(u, v)
        sym[k] = sym.get(k, 0.0) + cnt / m
    large = {u for u in range(params.n) if len(partners[u]) > params.theta}

    direct: dict[int, set] = {i: set() for i in range(params.n)}
    for (u, v) in sorted(sym):
        if u not in large and v not in large:
            direct[u].add(v)
            direct[v].add(u)

    # helper assignment for large-large pairs, least-loaded then smallest id
    load: dict[int, int] = {i: 0 for i in range(params.n)}
    tree_seats: dict[int, int] = {i: 0 for i in range(params.n)}
    for u in range(params.n):
        if u not in large:
            tree_seats[u] = sum(1 for w in partners[u] if w in large)
    helpers: dict[tuple[int, int], int] = {}
    ll_pairs = sorted(k for k in sym if k[0] in large and k[1] in large)
    for (a, b) in ll_pairs:
        best = -1
        best_load = None
        for x in range(params.n):
            if x == a or x == b or x in large:
                continue
            if load[x] + 1 > 2 * params.c:
                continue
            ports = len(direct[x]) + 3 * tree_seats[x] + 6 * (load[x] + 1)
            if ports > params.delta_cap:
                continue
            if best_load is None or load[x] < best_load:
                best, best_load = x, load[x]
                if best_load == 0:
                    break
        if best < 0:
            raise StaticBuildError(f"no helper available for static pair ({a}, {b})")
        helpers[(a, b)] = best
        load[best] += 1

    trees: dict[int, EgoTree] = {}
    depths: dict[int, dict] = {}
    for w in sorted(large):
        weights = {}
        occupants = {}
        for v in sorted(partners[w]):
            weights[v] = sym[edge_key(w, v)]
            if v in large:
                occupants[v] = helpers[edge_key(w, v)]
        dist = normalized(weights)
        tree = build_static(w, dist, occupants)
        tree.take_edge_changes()
        trees[w] = tree
        depths[w] = {k: tree.depth(k) for k in tree.keys_inorder()}

    dan = StaticDan(params=params, large=large, direct=direct, trees=trees, depths=depths, helpers=helpers)
    degree: Counter = Counter()
    for (a, b), cnt in dan._edges().items():
        if a == b:
            degree[a] += 2 * cnt
        else:
            degree[a] += cnt
            degree[b] += cnt
    over = {x: d for x, d in degree.items() if d > params.delta_cap}
    if over:
        raise StaticBuildError(f"static build violates the degree cap at {sorted(over)[:8]}")
    dan.degree = dict(degree)
    return dan


def stat_cost(dan: StaticDan, trace: Trace) -> float:
    """Average route length replaying the trace over the fixed network."""
    if len(trace) == 0:
        raise ValueError("empty trace")
    total = 0
    for (u, v), cnt in trace.pair_counts().items():
        if v in dan.direct[u]:
            hops = 1
        elif u in dan.large and v in dan.depths[u]:
            hops = dan.depths[u][v] + 1
            if v in dan.large:  # relayed through the helper seat in both trees
                hops += dan.depths[v][u] + 1
        elif v in dan.large and u in dan.depths[v]:
            hops = dan.depths[v][u] + 1
        else:
            raise ValueError(f"pair ({u}, {v}) is not routable in the static network")
        total += hops * cnt
    return total / len(trace)
