"""Self-adjusting binary search tree网 carried by one node.

Each large node owns one of these trees over its working set.  Entries are
keyed by partner id; the occupant is the physical node sitting at that
position (the partner itself, or a helper relaying for a large partner).
The owner is linked to the current root and to a bounded LRU set of
"virtual roots" that stay at distance one even after later splays.

Every mutation reports a TreeCost and appends the exact physical edge set
changes (in occupant space) to an internal log that callers drain with
`take_edge_changes`, so a network can maintain its global edge multiset and
tests can reconcile accounting against live structure.
"""

from __future__ import annotations

from collections import Counter, OrderedDict
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

UNIT = "unit"
RAW = "raw"

# Raw mode charges the classic three pointer removals plus three additions
# per rotation; unit mode charges one link change per rotation so headline
# numbers stay comparable to hop counts.
_ROTATION_LINK_COST = {UNIT: 1, RAW: 6}


def edge_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a <= b else (b, a)


@dataclass
class TreeCost:
    hops: int = 0
    link_changes: int = 0
    rotations: int = 0


@dataclass(frozen=True)
class DownRoute:
    """Result of a root-to-key search walk."""

    hit: bool
    path: list  # occupants visited, root (or virtual root) first
    hops: int
    anchor_key: Optional[int]  # on a miss, the key where the search fell off


@dataclass(frozen=True)
class UpRoute:
    """Result of a key-to-owner parent walk."""

    hops: int
    path: list  # occupants of the parent chain, ending with the owner


class _Entry:
    __slots__ = ("key", "occupant", "left", "right", "parent")

    def __init__(self, key: int, occupant: int):
        self.key = key
        self.occupant = occupant
        self.left = None
        self.right = None
        self.parent = None


class EgoTree:
    """Splay-tree network for one owner; see module docstring."""

    def __init__(
        self,
        owner: int,
        vr_capacity: int = 0,
        rotation_accounting: str = UNIT,
        vr_policy: str = "lru",
        vr_admit: Optional[Callable[[int], bool]] = None,
        static: bool = False,
        log_edges: bool = True,
    ):
        if rotation_accounting not in _ROTATION_LINK_COST:
            raise ValueError(f"rotation_accounting must be one of {sorted(_ROTATION_LINK_COST)}")
        if vr_policy not in ("lru", "fifo"):
            raise ValueError("vr_policy must be 'lru' or 'fifo'")
        if vr_capacity < 0:
            raise ValueError("vr_capacity must be >= 0")
        self.owner = owner
        self.root: Optional[_Entry] = None
        self.vr_capacity = vr_capacity
        self.vr_policy = vr_policy
        self.vr_admit = vr_admit
        self.static = static
        self.vr: "OrderedDict[int, None]" = OrderedDict()  # oldest first
        self._by_key: dict[int, _Entry] = {}
        self._rot_lc = _ROTATION_LINK_COST[rotation_accounting]
        self._log_edges = log_edges
        self._edge_log: list[tuple[int, tuple[int, int]]] = []

    # -- bookkeeping -------------------------------------------------------

    def _ad(self, a: int, b: int) -> None:
        if self._log_edges:
            self._edge_log.append((1, edge_key(a, b)))

    def _rm(self, a: int, b: int) -> None:
        if self._log_edges:
            self._edge_log.append((-1, edge_key(a, b)))

    def take_edge_changes(self) -> list[tuple[int, tuple[int, int]]]:
        """Drain the chronological (+1/-1, edge) log since the last call.

        Consecutive rotations may remove an edge added moments earlier, so
        order matters when replaying into an edge multiset.
        """
        log = self._edge_log
        self._edge_log = []
        return log

    # -- introspection ------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self._by_key)

    def __contains__(self, key: int) -> bool:
        return key in self._by_key

    def occupant_of(self, key: int) -> int:
        return self._by_key[key].occupant

    def parent_key_of(self, key: int) -> Optional[int]:
        p = self._by_key[key].parent
        return None if p is None else p.key

    def depth(self, key: int) -> int:
        e = self._by_key[key]
        d = 0
        while e.parent is not None:
            e = e.parent
            d += 1
        return d

    def keys_inorder(self) -> list[int]:
        out: list[int] = []
        stack: list[_Entry] = []
        e = self.root
        while stack or e is not None:
            while e is not None:
                stack.append(e)
                e = e.left
            e = stack.pop()
            out.append(e.key)
            e = e.right
        return out

    def virtual_roots(self) -> tuple[int, ...]:
        return tuple(self.vr)

    def edges(self) -> Counter:
        """Physical edge multiset induced by this tree, in occupant space."""
        c: Counter = Counter()
        if self.root is not None:
            c[edge_key(self.owner, self.root.occupant)] += 1
            stack = [self.root]
            while stack:
                e = stack.pop()
                for ch in (e.left, e.right):
                    if ch is not None:
                        c[edge_key(e.occupant, ch.occupant)] += 1
                        stack.append(ch)
        for k in self.vr:
            c[edge_key(self.owner, self._by_key[k].occupant)] += 1
        return c

    def check_structure(self) -> list[str]:
        """Structural invariant sweep; empty list means healthy."""
        bad: list[str] = []
        seen = 0
        prev = None
        stack: list[_Entry] = []
        e = self.root
        if self.root is not None and self.root.parent is not None:
            bad.append(f"tree({self.owner}): root has a parent")
        while stack or e is not None:
            while e is not None:
                stack.append(e)
                e = e.left
            e = stack.pop()
            seen += 1
            if prev is not None and not (prev < e.key):
                bad.append(f"tree({self.owner}): keys out of order at {e.key}")
            prev = e.key
            if e.occupant == self.owner:
                bad.append(f"tree({self.owner}): entry {e.key} occupied by owner")
            for ch in (e.left, e.right):
                if ch is not None and ch.parent is not e:
                    bad.append(f"tree({self.owner}): broken parent link at {ch.key}")
            if self._by_key.get(e.key) is not e:
                bad.append(f"tree({self.owner}): key index mismatch at {e.key}")
            e = e.right
        if seen != len(self._by_key):
            bad.append(f"tree({self.owner}): index size {len(self._by_key)} != walk {seen}")
        if len(self.vr) > self.vr_capacity:
            bad.append(f"tree({self.owner}): {len(self.vr)} virtual roots > cap {self.vr_capacity}")
        for k in self.vr:
            if k not in self._by_key:
                bad.append(f"tree({self.owner}): dangling virtual root {k}")
        return bad

    def debug_string(self) -> str:
        """Parenthesized in-order dump `(left key:occupant right)`."""
        if self.root is None:
            return ""
        done: dict[int, str] = {}
        stack: list[tuple[_Entry, bool]] = [(self.root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                parts = []
                if node.left is not None:
                    parts.append(done[id(node.left)])
                parts.append(f"{node.key}:{node.occupant}")
                if node.right is not None:
                    parts.append(done[id(node.right)])
                done[id(node)] = "(" + " ".join(parts) + ")"
            else:
                stack.append((node, True))
                if node.right is not None:
                    stack.append((node.right, False))
                if node.left is not None:
                    stack.append((node.left, False))
        return done[id(self.root)]

    # -- splay machinery ----------------------------------------------------

    def _rotate_up(self, x: _Entry) -> None:
        p = x.parent
        g = p.parent
        above = g.occupant if g is not None else self.owner
        # the p-x edge flips orientation but persists; only the links to the
        # node above and to x's inner child actually change
        self._rm(above, p.occupant)
        self._ad(above, x.occupant)
        if x is p.left:
            b = x.right
            p.left = b
            x.right = p
        else:
            b = x.left
            p.right = b
            x.left = p
        if b is not None:
            b.parent = p
            self._rm(x.occupant, b.occupant)
            self._ad(p.occupant, b.occupant)
        x.parent = g
        p.parent = x
        if g is None:
            self.root = x
        elif g.left is p:
            g.left = x
        else:
            g.right = x

    def _splay(self, x: _Entry) -> int:
        rotations = 0
        while x.parent is not None:
            p = x.parent
            g = p.parent
            if g is None:
                self._rotate_up(x)
                rotations += 1
            elif (g.left is p) == (p.left is x):
                self._rotate_up(p)
                self._rotate_up(x)
                rotations += 2
            else:
                self._rotate_up(x)
                self._rotate_up(x)
                rotations += 2
        return rotations

    def _attach_leaf(self, key: int, occupant: int) -> _Entry:
        if key in self._by_key:
            raise ValueError(f"duplicate key {key} in tree({self.owner})")
        if occupant == self.owner:
            raise ValueError("entry occupant cannot be the tree owner")
        e = _Entry(key, occupant)
        if self.root is None:
            self.root = e
            self._ad(self.owner, occupant)
        else:
            cur = self.root
            while True:
                nxt = cur.left if key < cur.key else cur.right
                if nxt is None:
                    break
                cur = nxt
            if key < cur.key:
                cur.left = e
            else:
                cur.right = e
            e.parent = cur
            self._ad(cur.occupant, occupant)
        self._by_key[key] = e
        return e

    # -- operations ---------------------------------------------------------

    def insert(self, key: int, occupant: Optional[int] = None, splay: bool = True) -> TreeCost:
        """Attach (key, occupant) as a leaf, then splay it to the root.

        `splay=False` leaves the fresh leaf in place; the routing layer uses
        this when a packet is mid-walk and the delivery adjustment will do
        the splaying.
        """
        if self.static:
            raise RuntimeError("static tree: insert disabled")
        e = self._attach_leaf(key, key if occupant is None else occupant)
        lc = 1
        rotations = 0
        if splay:
            rotations = self._splay(e)
            lc += rotations * self._rot_lc
        return TreeCost(0, lc, rotations)

    def route_down(self, key: int) -> DownRoute:
        """Comparison walk from the root; one hop owner->root, one per level.

        A virtual-root hit short-circuits to one hop.  On a miss the walk
        stops at the entry whose missing child the key would occupy.
        """
        if self.root is None:
            return DownRoute(False, [], 0, None)
        if key in self.vr:
            if self.vr_policy == "lru":
                self.vr.move_to_end(key)
            return DownRoute(True, [self._by_key[key].occupant], 1, key)
        path: list[int] = []
        e = self.root
        while True:
            path.append(e.occupant)
            if key == e.key:
                return DownRoute(True, path, len(path), key)
            nxt = e.left if key < e.key else e.right
            if nxt is None:
                return DownRoute(False, path, len(path), e.key)
            e = nxt

    def route_up(self, from_key: int) -> UpRoute:
        """Parent walk to the root plus the root-to-owner hop."""
        e = self._by_key[from_key]
        if from_key in self.vr:
            if self.vr_policy == "lru":
                self.vr.move_to_end(from_key)
            return UpRoute(1, [self.owner])
        path: list[int] = []
        while e.parent is not None:
            e = e.parent
            path.append(e.occupant)
        path.append(self.owner)
        return UpRoute(len(path), path)

    def adjust(self, key: int) -> TreeCost:
        """Splay `key` to the root and refresh the virtual-root set."""
        if self.static:
            raise RuntimeError("static tree: adjust disabled")
        e = self._by_key[key]
        rotations = self._splay(e)
        lc = rotations * self._rot_lc
        if self.vr_capacity > 0:
            if key in self.vr:
                if self.vr_policy == "lru":
                    self.vr.move_to_end(key)
            elif self.vr_admit is None or self.vr_admit(e.occupant):
                if len(self.vr) >= self.vr_capacity:
                    lc += self._drop_virtual_root(next(iter(self.vr)))
                self.vr[key] = None
                self._ad(self.owner, e.occupant)
                lc += 1
        return TreeCost(0, lc, rotations)

    def _drop_virtual_root(self, key: int) -> int:
        del self.vr[key]
        self._rm(self.owner, self._by_key[key].occupant)
        return 1

    def evict_virtual_root(self, key: int) -> int:
        """Forcibly drop one virtual-root link; returns the link-change count."""
        if key not in self.vr:
            raise KeyError(f"{key} is not a virtual root of tree({self.owner})")
        return self._drop_virtual_root(key)

    def remove(self, key: int) -> TreeCost:
        """Splay-delete: splay the key to the root, then join the subtrees."""
        if self.static:
            raise RuntimeError("static tree: remove disabled")
        e = self._by_key[key]
        rotations = self._splay(e)
        lc = rotations * self._rot_lc
        if key in self.vr:
            lc += self._drop_virtual_root(key)
        left, right = e.left, e.right
        self._rm(self.owner, e.occupant)
        lc += 1
        if left is not None:
            self._rm(e.occupant, left.occupant)
            left.parent = None
            lc += 1
        if right is not None:
            self._rm(e.occupant, right.occupant)
            right.parent = None
            lc += 1
        del self._by_key[key]
        if left is None and right is None:
            self.root = None
        elif left is None:
            self.root = right
            self._ad(self.owner, right.occupant)
            lc += 1
        elif right is None:
            self.root = left
            self._ad(self.owner, left.occupant)
            lc += 1
        else:
            self.root = left
            self._ad(self.owner, left.occupant)
            lc += 1
            mx = left
            while mx.right is not None:
                mx = mx.right
            extra = self._splay(mx)
            rotations += extra
            lc += extra * self._rot_lc
            mx.right = right
            right.parent = mx
            self._ad(mx.occupant, right.occupant)
            lc += 1
        return TreeCost(0, lc, rotations)

    def replace_occupant(self, key: int, new_occupant: int) -> TreeCost:
        """Swap the physical node at `key` in place, rewiring adjacent links."""
        e = self._by_key[key]
        if new_occupant == self.owner:
            raise ValueError("entry occupant cannot be the tree owner")
        old = e.occupant
        if new_occupant == old:
            return TreeCost(0, 0, 0)
        lc = 0
        if e.parent is None:
            self._rm(self.owner, old)
            self._ad(self.owner, new_occupant)
        else:
            self._rm(e.parent.occupant, old)
            self._ad(e.parent.occupant, new_occupant)
        lc += 1
        for ch in (e.left, e.right):
            if ch is not None:
                self._rm(old, ch.occupant)
                self._ad(new_occupant, ch.occupant)
                lc += 1
        if key in self.vr:
            self._rm(self.owner, old)
            self._ad(self.owner, new_occupant)
            lc += 1
        e.occupant = new_occupant
        return TreeCost(0, lc, 0)


def build_static(owner: int, dist: Mapping[int, float], occupants: Optional[Mapping[int, int]] = None) -> EgoTree:
    """Fixed weight-bisected tree: each subtree roots at the key whose split
    minimizes |weight(left) - weight(right)|, ties to the smaller key.

    The result is read-only for adjustments; expected depth under `dist`
    tracks the entropy of the weights.
    """
    items = sorted((k, dist[k]) for k in dist)
    if not items:
        raise ValueError("cannot build a static tree from an empty distribution")
    if any(w < 0 for _, w in items):
        raise ValueError("weights must be non-negative")
    keys = [k for k, _ in items]
    prefix = [0.0]
    for _, w in items:
        prefix.append(prefix[-1] + w)
    tree = EgoTree(owner, vr_capacity=0, static=True)
    occupants = occupants or {}
    stack: list[tuple[int, int, Optional[_Entry], bool]] = [(0, len(keys), None, False)]
    while stack:
        lo, hi, parent, is_right = stack.pop()
        if lo >= hi:
            continue
        best_i = lo
        best = None
        for i in range(lo, hi):
            split = abs((prefix[i] - prefix[lo]) - (prefix[hi] - prefix[i + 1]))
            if best is None or split < best:
                best = split
                best_i = i
        key = keys[best_i]
        occ = occupants.get(key, key)
        if occ == owner:
            raise ValueError("entry occupant cannot be the tree owner")
        e = _Entry(key, occ)
        tree._by_key[key] = e
        if parent is None:
            tree.root = e
            tree._ad(owner, occ)
        else:
            e.parent = parent
            if is_right:
                parent.right = e
            else:
                parent.left = e
            tree._ad(parent.occupant, occ)
        stack.append((lo, best_i, e, False))
        stack.append((best_i + 1, hi, e, True))
    return tree


def expected_depth(tree: EgoTree, dist: Mapping[int, float]) -> float:
    """Average entry depth weighted by `dist` (root depth is zero)."""
    total = sum(dist.values())
    if total <= 0:
        raise ValueError("weights must not be all zero")
    return sum(w * tree.depth(k) for k, w in dist.items() if w > 0) / total
