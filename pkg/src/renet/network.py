"""The self-adjusting demand-aware network and its coordinator.

State per node: a size class (small/large), the working set of partners seen
since the last reset, and a forwarding table.  Small nodes hold direct links
to small partners (S), memberships in large partners' trees (three ports
each), and helper duties for large-large pairs (six ports each).  A large
node holds one tree over its working set plus links to the tree root and a
bounded set of virtual roots.

Requests are served by four roles: the source picks the first edge from its
own table, forwarders walk tree links, the destination splays the tree that
delivered the packet, and a central coordinator handles route additions,
small-to-large conversions, helper assignment, and full resets once the
working sets fill up.  Every forwarding decision reads only the deciding
node's own state; each hop is validated against the live physical edge set
at the moment it is taken.

Cost accounting, fixed here and reported as-is: a route addition costs 2D of
control traffic (notify + instruct) plus D per helper engaged; a conversion
to large costs D per partner moved plus D per helper engaged; a reset costs
n flat.  Link changes follow the tree accounting mode (unit or raw).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

from .ego_tree import UNIT, EgoTree, _Entry, edge_key
from .metrics import CostLedger
from .trace import Trace


class InvariantError(RuntimeError):
    pass


class HelperExhaustion(InvariantError):
    pass


@dataclass(frozen=True)
class NetParams:
    """Network constants; use `make` to derive the dependent fields."""

    n: int
    c: float
    theta: int
    delta_cap: int
    D: int
    reset_threshold: int
    rotation_accounting: str = UNIT
    virtual_root_capacity: int = 0
    vr_policy: str = "lru"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two nodes")
        if self.c <= 0:
            raise ValueError("sparsity constant c must be positive")
        if self.theta != max(2, math.ceil(4 * self.c)):
            raise ValueError(f"theta must be ceil(4c) >= 2, got {self.theta}")
        if self.delta_cap != 6 * self.theta:
            raise ValueError("degree cap must equal 6 * theta")
        if self.reset_threshold != (self.n * self.theta) // 2:
            raise ValueError("reset threshold must be floor(n * theta / 2)")
        if not (0 <= self.virtual_root_capacity <= self.delta_cap - 1):
            raise ValueError("virtual root capacity must lie in [0, degree cap - 1]")
        if self.D < 1:
            raise ValueError("oblivious message cost D must be >= 1")

    @classmethod
    def make(
        cls,
        n: int,
        c: float,
        D: Optional[int] = None,
        rotation_accounting: str = UNIT,
        virtual_root_capacity: Optional[int] = None,
        vr_policy: str = "lru",
    ) -> "NetParams":
        if c <= 0:
            raise ValueError("sparsity constant c must be positive")
        theta = max(2, math.ceil(4 * c))
        delta_cap = 6 * theta
        return cls(
            n=n,
            c=c,
            theta=theta,
            delta_cap=delta_cap,
            D=max(1, math.ceil(math.log2(n))) if D is None else D,
            reset_threshold=(n * theta) // 2,
            rotation_accounting=rotation_accounting,
            virtual_root_capacity=delta_cap - 1 if virtual_root_capacity is None else virtual_root_capacity,
            vr_policy=vr_policy,
        )


class NodeState:
    __slots__ = ("id", "large", "working", "S", "trees_in", "helping", "tree")

    def __init__(self, node_id: int):
        self.id = node_id
        self.large = False
        self.working: set[int] = set()
        self.S: set[int] = set()          # direct small neighbors
        self.trees_in: set[int] = set()   # owners of trees this node is a partner in
        self.helping: set[tuple[int, int]] = set()  # large-large pairs relayed
        self.tree: Optional[EgoTree] = None

    def table_ports(self, vr_capacity: int) -> int:
        if self.large:
            return 1 + vr_capacity
        return len(self.S) + 3 * len(self.trees_in) + 6 * len(self.helping)


@dataclass
class RequestOutcome:
    hops: int
    adjust_cost: int
    coord_cost: int
    reset_fired: bool
    reset_cost: int
    path: list
    path_ok: bool


class _Ctx:
    __slots__ = ("hops", "adjust", "coord", "reset_cost", "reset_fired", "path",
                 "path_ok", "touched_nodes", "touched_trees")

    def __init__(self, src: int):
        self.hops = 0
        self.adjust = 0
        self.coord = 0
        self.reset_cost = 0
        self.reset_fired = False
        self.path = [src]
        self.path_ok = True
        self.touched_nodes: set[int] = set()
        self.touched_trees: set[int] = set()


class Network:
    """Mutable network state; single writer, deterministic given the inputs."""

    def __init__(self, params: NetParams):
        self.params = params
        self.nodes = [NodeState(i) for i in range(params.n)]
        self.edges: dict[tuple[int, int], int] = {}
        self.degree = [0] * params.n
        self.total_ws = 0
        self.reset_count = 0
        self.path_failures = 0
        self.debug_checks = False

    # -- edge multiset ------------------------------------------------------

    def _add_edge(self, ctx: _Ctx, a: int, b: int) -> None:
        k = edge_key(a, b)
        self.edges[k] = self.edges.get(k, 0) + 1
        if a == b:
            self.degree[a] += 2
        else:
            self.degree[a] += 1
            self.degree[b] += 1
        ctx.touched_nodes.add(a)
        ctx.touched_nodes.add(b)
        cap = self.params.delta_cap
        if self.degree[a] > cap:
            self._shed_virtual_roots(ctx, a)
        if b != a and self.degree[b] > cap:
            self._shed_virtual_roots(ctx, b)

    def _remove_edge(self, ctx: _Ctx, a: int, b: int) -> None:
        k = edge_key(a, b)
        left = self.edges.get(k, 0) - 1
        if left < 0:
            raise InvariantError(f"removing untracked edge {k}")
        if left == 0:
            del self.edges[k]
        else:
            self.edges[k] = left
        if a == b:
            self.degree[a] -= 2
        else:
            self.degree[a] -= 1
            self.degree[b] -= 1
        ctx.touched_nodes.add(a)
        ctx.touched_nodes.add(b)

    def _apply_tree(self, ctx: _Ctx, tree: EgoTree) -> None:
        for sign, (a, b) in tree.take_edge_changes():
            if sign > 0:
                self._add_edge(ctx, a, b)
            else:
                self._remove_edge(ctx, a, b)

    def _shed_virtual_roots(self, ctx: _Ctx, node: int) -> None:
        # Virtual-root links are the only unbudgeted ports; drop this node's
        # memberships until its degree fits the cap again.
        while self.degree[node] > self.params.delta_cap:
            victim = None
            for owner in range(self.params.n):
                s = self.nodes[owner]
                if not s.large or s.tree is None:
                    continue
                for key in s.tree.vr:
                    if s.tree.occupant_of(key) == node:
                        victim = (owner, key)
                        break
                if victim:
                    break
            if victim is None:
                raise InvariantError(f"degree overflow at node {node} with no virtual root to shed")
            owner, key = victim
            tree = self.nodes[owner].tree
            ctx.adjust += tree.evict_virtual_root(key)
            for sign, (a, b) in tree.take_edge_changes():
                if sign < 0:
                    self._remove_edge(ctx, a, b)
                else:  # pragma: no cover - eviction only removes
                    self._add_edge(ctx, a, b)

    def _new_tree(self, owner: int) -> EgoTree:
        p = self.params
        return EgoTree(
            owner,
            vr_capacity=p.virtual_root_capacity,
            rotation_accounting=p.rotation_accounting,
            vr_policy=p.vr_policy,
            vr_admit=lambda occ: self.degree[occ] < p.delta_cap,
        )

    # -- request service ----------------------------------------------------

    def _check_ids(self, u: int, v: int) -> None:
        n = self.params.n
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"unknown node in request ({u}, {v})")
        if u == v:
            raise ValueError("self-requests are not part of the model")

    def serve_request(self, u: int, v: int) -> RequestOutcome:
        """Route one request, self-adjust, and account all costs."""
        self._check_ids(u, v)
        ctx = _Ctx(u)
        self._route(ctx, u, v, 0)
        if self.debug_checks:
            self._debug_sweep(ctx)
        return RequestOutcome(
            hops=ctx.hops,
            adjust_cost=ctx.adjust,
            coord_cost=ctx.coord,
            reset_fired=ctx.reset_fired,
            reset_cost=ctx.reset_cost,
            path=ctx.path,
            path_ok=ctx.path_ok,
        )

    def _step(self, ctx: _Ctx, a: int, b: int) -> None:
        if self.edges.get(edge_key(a, b), 0) <= 0:
            ctx.path_ok = False
            self.path_failures += 1
            if self.debug_checks:
                raise InvariantError(f"hop {a}-{b} crosses no physical edge")
        ctx.hops += 1
        ctx.path.append(b)

    def _route(self, ctx: _Ctx, u: int, v: int, attempt: int) -> None:
        if attempt > 3:
            raise InvariantError(f"routing ({u}, {v}) did not converge")
        su = self.nodes[u]
        if not su.large:
            if v in su.S:
                self._step(ctx, u, v)
                return
            if v in su.trees_in:
                self._walk_up(ctx, u, u, v)
                self._adjust_tree(ctx, v, u)
                return
            self._add_route(ctx, u, v)
            self._route(ctx, u, v, attempt + 1)
            return
        tree = su.tree
        ctx.touched_trees.add(u)
        res = tree.route_down(v)
        prev = u
        for occ in res.path:
            self._step(ctx, prev, occ)
            prev = occ
        if not res.hit:
            resets_before = self.reset_count
            self._add_route(ctx, u, v, no_splay_tree=u)
            if self.reset_count != resets_before or tree.occupant_of(res.anchor_key) != prev:
                # the flush tore the tree down mid-walk, or a conversion
                # handed the anchor seat to a fresh helper under the paused
                # packet; retransmit from the source, keeping the hops spent
                ctx.path = [u]
                self._route(ctx, u, v, attempt + 1)
                return
            occ = tree.occupant_of(v)
            self._step(ctx, prev, occ)
        else:
            occ = tree.occupant_of(v)
        if occ == v:
            self._adjust_tree(ctx, u, v)
            return
        # helper relay: occ sits in the destination tree as key u
        self._walk_up(ctx, occ, u, v)
        self._adjust_tree(ctx, v, u)  # destination splays the delivering tree
        self._adjust_tree(ctx, u, v)  # helper splays the source tree it serves
        return

    def _walk_up(self, ctx: _Ctx, start: int, from_key: int, tree_owner: int) -> None:
        tree = self.nodes[tree_owner].tree
        ctx.touched_trees.add(tree_owner)
        res = tree.route_up(from_key)
        prev = start
        for node in res.path:
            self._step(ctx, prev, node)
            prev = node

    def _adjust_tree(self, ctx: _Ctx, owner: int, key: int) -> None:
        tree = self.nodes[owner].tree
        cost = tree.adjust(key)
        ctx.adjust += cost.link_changes
        ctx.touched_trees.add(owner)
        self._apply_tree(ctx, tree)

    # -- coordinator --------------------------------------------------------

    def add_route(self, u: int, v: int) -> RequestOutcome:
        """Coordinator entry point for connecting a new pair (no packet)."""
        self._check_ids(u, v)
        ctx = _Ctx(u)
        self._add_route(ctx, u, v)
        if self.debug_checks:
            self._debug_sweep(ctx)
        return RequestOutcome(0, ctx.adjust, ctx.coord, ctx.reset_fired, ctx.reset_cost, ctx.path, ctx.path_ok)

    def _add_route(self, ctx: _Ctx, u: int, v: int, no_splay_tree: Optional[int] = None) -> None:
        p = self.params
        ctx.coord += 2 * p.D
        su, sv = self.nodes[u], self.nodes[v]
        if v in su.working:
            return
        # flush-when-full: this route would grow the working sets past the cap
        if self.total_ws + 2 > p.reset_threshold:
            self._do_reset(ctx)
            su, sv = self.nodes[u], self.nodes[v]
        su.working.add(v)
        sv.working.add(u)
        self.total_ws += 2
        ctx.touched_nodes.add(u)
        ctx.touched_nodes.add(v)
        if not su.large and len(su.working) == p.theta + 1:
            self._make_large(ctx, u, no_splay_tree)
        if not sv.large and len(sv.working) == p.theta + 1:
            self._make_large(ctx, v, no_splay_tree)
        if self._pair_linked(u, v):
            return
        if not su.large and not sv.large:
            su.S.add(v)
            sv.S.add(u)
            self._add_edge(ctx, u, v)
            ctx.adjust += 1
        elif su.large and not sv.large:
            self._tree_insert(ctx, u, v, v, no_splay_tree)
            sv.trees_in.add(u)
        elif not su.large and sv.large:
            self._tree_insert(ctx, v, u, u, no_splay_tree)
            su.trees_in.add(v)
        else:
            x = self.find_helper(u, v)
            ctx.coord += p.D
            self._tree_insert(ctx, u, v, x, no_splay_tree)
            self._tree_insert(ctx, v, u, x, no_splay_tree)
            self.nodes[x].helping.add(edge_key(u, v))
            ctx.touched_nodes.add(x)

    def _pair_linked(self, u: int, v: int) -> bool:
        su, sv = self.nodes[u], self.nodes[v]
        if v in su.S:
            return True
        if su.large and su.tree is not None and v in su.tree:
            return True
        if sv.large and sv.tree is not None and u in sv.tree:
            return True
        return False

    def _tree_insert(self, ctx: _Ctx, owner: int, key: int, occupant: int, no_splay_tree: Optional[int]) -> None:
        tree = self.nodes[owner].tree
        cost = tree.insert(key, occupant, splay=(owner != no_splay_tree))
        ctx.adjust += cost.link_changes
        ctx.touched_trees.add(owner)
        self._apply_tree(ctx, tree)

    def make_large(self, u: int) -> RequestOutcome:
        """Convert a small node whose working set just crossed the threshold."""
        s = self.nodes[u]
        if s.large:
            raise ValueError(f"node {u} is already large")
        if len(s.working) != self.params.theta + 1:
            raise ValueError("make_large applies exactly at |W| = theta + 1")
        ctx = _Ctx(u)
        self._make_large(ctx, u, None)
        return RequestOutcome(0, ctx.adjust, ctx.coord, ctx.reset_fired, ctx.reset_cost, ctx.path, ctx.path_ok)

    def _make_large(self, ctx: _Ctx, u: int, no_splay_tree: Optional[int]) -> None:
        p = self.params
        su = self.nodes[u]
        # shed helper duties first; only small nodes may relay
        for pair in sorted(su.helping):
            a, b = pair
            x2 = self.find_helper(a, b, exclude=(u,))
            ctx.coord += p.D
            for owner, key in ((a, b), (b, a)):
                t = self.nodes[owner].tree
                cost = t.replace_occupant(key, x2)
                ctx.adjust += cost.link_changes
                ctx.touched_trees.add(owner)
                self._apply_tree(ctx, t)
            self.nodes[x2].helping.add(pair)
            ctx.touched_nodes.add(x2)
        su.helping.clear()
        su.large = True
        su.tree = self._new_tree(u)
        ctx.touched_trees.add(u)
        for v in sorted(su.working):
            sv = self.nodes[v]
            ctx.coord += p.D
            if not sv.large:
                if v in su.S:
                    su.S.discard(v)
                    sv.S.discard(u)
                    self._remove_edge(ctx, u, v)
                    ctx.adjust += 1
                self._tree_insert(ctx, u, v, v, no_splay_tree)
                sv.trees_in.add(u)
            else:
                x = self.find_helper(u, v)
                ctx.coord += p.D
                self._tree_insert(ctx, u, v, x, no_splay_tree)
                tv = sv.tree
                if u in tv:
                    cost = tv.replace_occupant(u, x)
                    ctx.adjust += cost.link_changes
                    ctx.touched_trees.add(v)
                    self._apply_tree(ctx, tv)
                    su.trees_in.discard(v)
                else:
                    self._tree_insert(ctx, v, u, x, no_splay_tree)
                self.nodes[x].helping.add(edge_key(u, v))
                ctx.touched_nodes.add(x)
        if su.S or su.trees_in:
            raise InvariantError(f"make_large({u}) left stale table entries")

    def find_helper(self, u: int, v: int, exclude: Iterable[int] = ()) -> int:
        """Least-loaded small node with port room, ties to the smallest id."""
        p = self.params
        if not (self.nodes[u].large and self.nodes[v].large):
            raise ValueError("helpers relay only large-large pairs")
        banned = set(exclude)
        banned.add(u)
        banned.add(v)
        best = -1
        best_load = None
        for x in range(p.n):
            if x in banned:
                continue
            s = self.nodes[x]
            if s.large:
                continue
            load = len(s.helping)
            if load + 1 > 2 * p.c:
                continue
            if len(s.S) + 3 * len(s.trees_in) + 6 * (load + 1) > p.delta_cap:
                continue
            if best_load is None or load < best_load:
                best, best_load = x, load
                if load == 0:
                    break
        if best < 0:
            raise HelperExhaustion(
                f"no helper available for ({u}, {v}); total_ws={self.total_ws}, "
                f"threshold={p.reset_threshold}"
            )
        return best

    def reset(self) -> int:
        """Clear all working sets and tables; every node returns to small."""
        ctx = _Ctx(0)
        self._do_reset(ctx)
        return self.params.n

    def _do_reset(self, ctx: _Ctx) -> None:
        for s in self.nodes:
            s.large = False
            s.working.clear()
            s.S.clear()
            s.trees_in.clear()
            s.helping.clear()
            s.tree = None
        self.edges.clear()
        self.degree = [0] * self.params.n
        self.total_ws = 0
        self.reset_count += 1
        ctx.reset_fired = True
        ctx.reset_cost += self.params.n

    # -- invariants ---------------------------------------------------------

    def _debug_sweep(self, ctx: _Ctx) -> None:
        p = self.params
        bad: list[str] = []
        for x in sorted(ctx.touched_nodes):
            s = self.nodes[x]
            if self.degree[x] > p.delta_cap:
                bad.append(f"degree({x}) = {self.degree[x]} > {p.delta_cap}")
            if s.large:
                if len(s.working) <= p.theta:
                    bad.append(f"node {x} large with |W| = {len(s.working)}")
            else:
                if len(s.working) > p.theta:
                    bad.append(f"node {x} small with |W| = {len(s.working)}")
                if s.table_ports(p.virtual_root_capacity) > p.delta_cap:
                    bad.append(f"table({x}) overflows")
                if len(s.helping) > 2 * p.c:
                    bad.append(f"helper load({x}) = {len(s.helping)} > 2c")
        for w in sorted(ctx.touched_trees):
            s = self.nodes[w]
            if s.large and s.tree is not None:
                bad.extend(s.tree.check_structure())
        if self.total_ws > p.reset_threshold:
            bad.append(f"total working-set size {self.total_ws} > {p.reset_threshold}")
        if not ctx.path_ok:
            bad.append("path failed live-edge validation")
        if bad:
            raise InvariantError("; ".join(bad))

    def validate_invariants(self) -> list[str]:
        """Full sweep of every structural invariant; empty list means healthy."""
        p = self.params
        bad: list[str] = []
        expected: Counter = Counter()
        total_ws = 0
        for x in range(p.n):
            s = self.nodes[x]
            total_ws += len(s.working)
            for v in s.working:
                if v == x:
                    bad.append(f"node {x} has itself in its working set")
                elif x not in self.nodes[v].working:
                    bad.append(f"working-set asymmetry {x} -> {v}")
            if s.large:
                if len(s.working) <= p.theta:
                    bad.append(f"node {x} large with |W| = {len(s.working)}")
                if s.S or s.trees_in or s.helping:
                    bad.append(f"node {x} large with small-table leftovers")
                if s.tree is None:
                    bad.append(f"node {x} large without a tree")
                    continue
                bad.extend(s.tree.check_structure())
                if set(s.tree.keys_inorder()) != s.working:
                    bad.append(f"tree({x}) keys differ from the working set")
                expected.update(s.tree.edges())
                if 1 + p.virtual_root_capacity > p.delta_cap:
                    bad.append(f"table({x}) capacity exceeds the degree cap")
            else:
                if len(s.working) > p.theta:
                    bad.append(f"node {x} small with |W| = {len(s.working)}")
                if s.tree is not None:
                    bad.append(f"node {x} small but owns a tree")
                if s.table_ports(p.virtual_root_capacity) > p.delta_cap:
                    bad.append(f"table({x}) = {s.table_ports(p.virtual_root_capacity)} ports > {p.delta_cap}")
                if len(s.helping) > 2 * p.c:
                    bad.append(f"helper load({x}) = {len(s.helping)} > 2c = {2 * p.c}")
                for v in s.S:
                    if self.nodes[v].large or x not in self.nodes[v].S:
                        bad.append(f"direct link {x}-{v} is one-sided or to a large node")
                    if x < v:
                        expected[edge_key(x, v)] += 1
                for w in s.trees_in:
                    t = self.nodes[w].tree
                    if not self.nodes[w].large or t is None or x not in t or t.occupant_of(x) != x:
                        bad.append(f"membership of {x} in tree({w}) is broken")
                for (a, b) in s.helping:
                    ok = (
                        a < b
                        and self.nodes[a].large
                        and self.nodes[b].large
                        and self.nodes[a].tree is not None
                        and self.nodes[b].tree is not None
                        and b in self.nodes[a].tree
                        and a in self.nodes[b].tree
                        and self.nodes[a].tree.occupant_of(b) == x
                        and self.nodes[b].tree.occupant_of(a) == x
                    )
                    if not ok:
                        bad.append(f"helper duty ({a}, {b}) of node {x} is inconsistent")
        live = Counter(self.edges)
        if live != expected:
            diff = (live - expected) + (expected - live)
            bad.append(f"edge multiset mismatch on {sorted(diff)[:8]}")
        degree = [0] * p.n
        for (a, b), cnt in self.edges.items():
            if a == b:
                degree[a] += 2 * cnt
            else:
                degree[a] += cnt
                degree[b] += cnt
        for x in range(p.n):
            if degree[x] != self.degree[x]:
                bad.append(f"degree cache of node {x}: {self.degree[x]} != {degree[x]}")
            if degree[x] > p.delta_cap:
                bad.append(f"degree({x}) = {degree[x]} > {p.delta_cap}")
        if total_ws != self.total_ws:
            bad.append(f"total_ws cache {self.total_ws} != {total_ws}")
        if total_ws > p.reset_threshold:
            bad.append(f"total working-set size {total_ws} > {p.reset_threshold}")
        return bad

    # -- snapshots -----------------------------------------------------------

    def snapshot(self) -> dict:
        """JSON-serializable dump of the full network state."""
        trees = {}
        for s in self.nodes:
            if s.large and s.tree is not None:
                entries = []
                stack = [s.tree.root] if s.tree.root is not None else []
                while stack:
                    e = stack.pop()
                    entries.append(
                        {
                            "key": e.key,
                            "occupant": e.occupant,
                            "parent": e.parent.key if e.parent is not None else None,
                            "side": None if e.parent is None else ("r" if e.parent.right is e else "l"),
                        }
                    )
                    if e.right is not None:
                        stack.append(e.right)
                    if e.left is not None:
                        stack.append(e.left)
                trees[str(s.id)] = {
                    "entries": entries,
                    "vr": list(s.tree.vr),
                    "inorder": s.tree.debug_string(),
                }
        return {
            "params": {
                "n": self.params.n,
                "c": self.params.c,
                "theta": self.params.theta,
                "delta_cap": self.params.delta_cap,
                "D": self.params.D,
                "reset_threshold": self.params.reset_threshold,
                "rotation_accounting": self.params.rotation_accounting,
                "virtual_root_capacity": self.params.virtual_root_capacity,
                "vr_policy": self.params.vr_policy,
            },
            "size_classes": {"large": sorted(s.id for s in self.nodes if s.large)},
            "nodes": [
                {
                    "id": s.id,
                    "working": sorted(s.working),
                    "S": sorted(s.S),
                    "trees_in": sorted(s.trees_in),
                    "helping": sorted(list(pair) for pair in s.helping),
                }
                for s in self.nodes
            ],
            "trees": trees,
            "edges": sorted([a, b, cnt] for (a, b), cnt in self.edges.items()),
            "coordinator": {"total_ws": self.total_ws, "reset_count": self.reset_count},
        }

    @classmethod
    def from_snapshot(cls, snap: dict) -> "Network":
        params = NetParams(**snap["params"])
        net = cls(params)
        large_ids = set(snap["size_classes"]["large"])
        for rec in snap["nodes"]:
            s = net.nodes[rec["id"]]
            s.working = set(rec["working"])
            s.S = set(rec["S"])
            s.trees_in = set(rec["trees_in"])
            s.helping = {tuple(p) for p in rec["helping"]}
            s.large = rec["id"] in large_ids
        for owner_str, tdata in snap["trees"].items():
            owner = int(owner_str)
            tree = net._new_tree(owner)
            for rec in tdata["entries"]:  # parents precede children (preorder)
                e = _Entry(rec["key"], rec["occupant"])
                tree._by_key[rec["key"]] = e
                if rec["parent"] is None:
                    tree.root = e
                else:
                    parent = tree._by_key[rec["parent"]]
                    e.parent = parent
                    if rec["side"] == "r":
                        parent.right = e
                    else:
                        parent.left = e
            for key in tdata["vr"]:
                tree.vr[key] = None
            tree.take_edge_changes()
            net.nodes[owner].tree = tree
        for a, b, cnt in snap["edges"]:
            k = edge_key(a, b)
            net.edges[k] = net.edges.get(k, 0) + cnt
            if a == b:
                net.degree[a] += 2 * cnt
            else:
                net.degree[a] += cnt
                net.degree[b] += cnt
        net.total_ws = snap["coordinator"]["total_ws"]
        net.reset_count = snap["coordinator"]["reset_count"]
        return net


def new_network(params: NetParams) -> Network:
    """Fresh network: every node small, all tables and edge sets empty."""
    return Network(params)


def replay_trace(net: Network, trace: Trace) -> CostLedger:
    """Serve a whole trace in order, collecting the per-request cost ledger."""
    ledger = CostLedger()
    serve = net.serve_request
    append = ledger.append
    for u, v in zip(trace.src.tolist(), trace.dst.tolist()):
        out = serve(u, v)
        append(out.hops, out.adjust_cost, out.coord_cost, out.reset_cost)
    return ledger
