"""Communication traces, synthetic workloads, demand graphs, sparsity checks.

Node addresses are plain ints 0..n-1 used only as opaque, totally ordered
keys; nothing structural is ever derived from their values.  Requests are
ordered (src, dst) pairs with src != dst.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Sequence, Union

import numpy as np

NodeId = int
Request = tuple[int, int]


@dataclass(frozen=True)
class Trace:
    """An ordered request sequence over a universe of n nodes."""

    n: int
    src: np.ndarray
    dst: np.ndarray

    def __post_init__(self):
        src = np.asarray(self.src, dtype=np.int64)
        dst = np.asarray(self.dst, dtype=np.int64)
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        if self.n < 1:
            raise ValueError("node universe must be non-empty")
        if src.shape != dst.shape or src.ndim != 1:
            raise ValueError("src/dst must be 1-d arrays of equal length")
        if len(src) and (src.min() < 0 or src.max() >= self.n or dst.min() < 0 or dst.max() >= self.n):
            raise ValueError("request endpoint outside the declared universe")
        if len(src) and bool((src == dst).any()):
            raise ValueError("self-requests (src == dst) are not allowed")

    def __len__(self) -> int:
        return len(self.src)

    @classmethod
    def from_pairs(cls, n: int, pairs: Sequence[Request]) -> "Trace":
        if len(pairs):
            arr = np.asarray(pairs, dtype=np.int64)
            return cls(n, arr[:, 0], arr[:, 1])
        return cls(n, np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))

    def pairs(self) -> list[Request]:
        """Materialize requests as a list of (src, dst) int tuples."""
        return list(zip(self.src.tolist(), self.dst.tolist()))

    def subrange(self, start: int, stop: int) -> "Trace":
        return Trace(self.n, self.src[start:stop], self.dst[start:stop])

    def pair_counts(self, start: int = 0, stop: int | None = None) -> dict[Request, int]:
        """Occurrence counts of each distinct (src, dst) pair in [start, stop)."""
        stop = len(self) if stop is None else stop
        if not (0 <= start <= stop <= len(self)):
            raise ValueError(f"bad index range [{start}, {stop})")
        codes = self.src[start:stop] * np.int64(self.n) + self.dst[start:stop]
        uniq, counts = np.unique(codes, return_counts=True)
        return {
            (int(c) // self.n, int(c) % self.n): int(k)
            for c, k in zip(uniq.tolist(), counts.tolist())
        }


@dataclass(frozen=True)
class DemandGraph:
    """Directed weighted demand graph of a (sub)trace; weights sum to one."""

    nodes: frozenset
    edges: dict

    def __post_init__(self):
        total = sum(self.edges.values())
        if self.edges and abs(total - 1.0) > 1e-9:
            raise ValueError(f"demand weights sum to {total}, expected 1")
        for (u, v) in self.edges:
            if u == v:
                raise ValueError("demand edge endpoints must be distinct")


def build_demand_graph(trace: Trace, start: int = 0, stop: int | None = None) -> DemandGraph:
    """Demand graph of trace[start:stop]; weight = pair count / range length."""
    stop = len(trace) if stop is None else stop
    if stop <= start:
        raise ValueError("empty request range")
    counts = trace.pair_counts(start, stop)
    length = stop - start
    edges = {pair: counts[pair] / length for pair in sorted(counts)}
    nodes = frozenset(u for e in edges for u in e)
    return DemandGraph(nodes=nodes, edges=edges)


@dataclass(frozen=True)
class SparsityParams:
    c: float
    delta: int

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.delta < 1:
            raise ValueError("delta must be >= 1")


@dataclass(frozen=True)
class SparsityReport:
    ok: bool
    worst_window_start: int
    worst_unique_pairs: int


def sparsity_check(trace: Trace, params: SparsityParams) -> SparsityReport:
    """Check that every window of length <= delta has <= c*n unique pairs.

    Single sliding-window pass with a pair multiset; every shorter window is
    contained in some full-length window, so scanning those suffices.
    An empty trace passes vacuously.
    """
    pairs = trace.pairs()
    cap = params.c * trace.n
    if not pairs:
        return SparsityReport(ok=True, worst_window_start=0, worst_unique_pairs=0)
    counts: dict[Request, int] = {}
    distinct = 0
    worst = 0
    worst_start = 0
    delta = params.delta
    for i, pair in enumerate(pairs):
        prev = counts.get(pair, 0)
        counts[pair] = prev + 1
        if prev == 0:
            distinct += 1
        if i >= delta:
            old = pairs[i - delta]
            left = counts[old] - 1
            if left == 0:
                del counts[old]
                distinct -= 1
            else:
                counts[old] = left
        if distinct > worst:
            worst = distinct
            worst_start = max(0, i - delta + 1)
    return SparsityReport(ok=worst <= cap, worst_window_start=worst_start, worst_unique_pairs=worst)


# ---------------------------------------------------------------------------
# Synthetic workloads.  All generation flows from one seeded PCG64 stream so
# identical (spec, seed) always produce identical traces.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Torus:
    """Uniform requests along the edges of a wraparound sqrt(n) x sqrt(n) grid.

    Each request picks a uniform node, then a uniform one of its four torus
    neighbors, so the conditional entropy of destinations given sources tends
    to exactly 2 bits.
    """

    n: int
    m: int


@dataclass(frozen=True)
class StarZipf:
    """Hub-and-spokes demand: node 0 exchanges with leaf i at rate ~ i^-alpha."""

    n: int
    m: int
    alpha: float


@dataclass(frozen=True)
class RoundRobinGrids:
    """k torus phases, each on a fresh pseudorandom relabeling of the nodes."""

    n: int
    k: int
    m_each: int


@dataclass(frozen=True)
class ProductDist:
    """src ~ px and dst ~ py independently, resampling src == dst collisions."""

    n: int
    m: int
    px: tuple[float, ...]
    py: tuple[float, ...]


@dataclass(frozen=True)
class UniformPairs:
    """Uniform over all ordered pairs of distinct nodes."""

    n: int
    m: int


WorkloadSpec = Union[Torus, StarZipf, RoundRobinGrids, ProductDist, UniformPairs]


def zipf_weights(support: int, alpha: float) -> np.ndarray:
    """Normalized Zipf weights over ranks 1..support (alpha = 0 is uniform)."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    w = np.arange(1, support + 1, dtype=np.float64) ** (-alpha)
    return w / w.sum()


def _torus_side(n: int) -> int:
    s = math.isqrt(n)
    if s * s != n or s < 2:
        raise ValueError(f"torus workloads need n a perfect square >= 4, got {n}")
    return s


def _torus_arrays(n: int, m: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    s = _torus_side(n)
    src = rng.integers(0, n, size=m)
    direction = rng.integers(0, 4, size=m)
    x = src % s
    y = src // s
    dx = np.array([1, s - 1, 0, 0], dtype=np.int64)[direction]
    dy = np.array([0, 0, 1, s - 1], dtype=np.int64)[direction]
    dst = (x + dx) % s + s * ((y + dy) % s)
    return src.astype(np.int64), dst.astype(np.int64)


def generate(spec: WorkloadSpec, seed: int) -> Trace:
    """Deterministically generate the trace described by `spec`."""
    rng = np.random.Generator(np.random.PCG64(seed))
    if isinstance(spec, Torus):
        src, dst = _torus_arrays(spec.n, spec.m, rng)
        return Trace(spec.n, src, dst)

    if isinstance(spec, StarZipf):
        if spec.n < 2:
            raise ValueError("star workloads need n >= 2")
        w = zipf_weights(spec.n - 1, spec.alpha)
        partners = rng.choice(np.arange(1, spec.n, dtype=np.int64), size=spec.m, p=w)
        to_hub = rng.integers(0, 2, size=spec.m).astype(bool)
        src = np.where(to_hub, partners, 0)
        dst = np.where(to_hub, 0, partners)
        return Trace(spec.n, src, dst)

    if isinstance(spec, RoundRobinGrids):
        if spec.k < 1:
            raise ValueError("need at least one phase")
        _torus_side(spec.n)
        srcs, dsts = [], []
        for _ in range(spec.k):
            relabel = rng.permutation(spec.n).astype(np.int64)
            s, d = _torus_arrays(spec.n, spec.m_each, rng)
            srcs.append(relabel[s])
            dsts.append(relabel[d])
        return Trace(spec.n, np.concatenate(srcs), np.concatenate(dsts))

    if isinstance(spec, ProductDist):
        px = np.asarray(spec.px, dtype=np.float64)
        py = np.asarray(spec.py, dtype=np.float64)
        if len(px) != spec.n or len(py) != spec.n:
            raise ValueError("px and py must have one weight per node")
        if (px < 0).any() or (py < 0).any():
            raise ValueError("marginal weights must be non-negative")
        px = px / px.sum()
        py = py / py.sum()
        src = rng.choice(spec.n, size=spec.m, p=px)
        dst = rng.choice(spec.n, size=spec.m, p=py)
        for _ in range(1000):
            clash = src == dst
            if not clash.any():
                break
            k = int(clash.sum())
            src[clash] = rng.choice(spec.n, size=k, p=px)
            dst[clash] = rng.choice(spec.n, size=k, p=py)
        else:
            raise ValueError("cannot draw distinct pairs from these marginals")
        return Trace(spec.n, src.astype(np.int64), dst.astype(np.int64))

    if isinstance(spec, UniformPairs):
        if spec.n < 2:
            raise ValueError("need n >= 2 for distinct pairs")
        src = rng.integers(0, spec.n, size=spec.m)
        offset = rng.integers(1, spec.n, size=spec.m)
        dst = (src + offset) % spec.n
        return Trace(spec.n, src.astype(np.int64), dst.astype(np.int64))

    raise TypeError(f"unknown workload spec {spec!r}")


# ---------------------------------------------------------------------------
# Trace CSV format: a `#n=<count>` header line, then one `src,dst` line per
# request, in order.
# ---------------------------------------------------------------------------


def write_trace_csv(trace: Trace, fh: IO[str]) -> None:
    fh.write(f"#n={trace.n}\n")
    for u, v in zip(trace.src.tolist(), trace.dst.tolist()):
        fh.write(f"{u},{v}\n")


def read_trace_csv(fh: IO[str]) -> Trace:
    header = fh.readline().strip()
    if not header.startswith("#n="):
        raise ValueError("trace file must start with a '#n=<count>' header line")
    n = int(header[3:])
    src, dst = [], []
    for line in fh:
        line = line.strip()
        if not line:
            continue
        a, b = line.split(",")
        src.append(int(a))
        dst.append(int(b))
    return Trace(n, np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64))
