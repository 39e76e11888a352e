import math

import pytest

from renet.baselines import (
    ObliviousNet,
    StaticBuildError,
    build_static_dan,
    oblivious_cost,
    stat_cost,
    static_lower_bound,
)
from renet.ego_tree import expected_depth
from renet.entropy import entropy, normalized
from renet.network import NetParams
from renet.trace import StarZipf, Torus, Trace, UniformPairs, generate


def torus_edge_trace(side):
    """Each directed torus edge exactly once: the exactly uniform edge demand."""
    n = side * side
    pairs = []
    for x in range(side):
        for y in range(side):
            u = x + side * y
            for (dx, dy) in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                pairs.append((u, (x + dx) % side + side * ((y + dy) % side)))
    return Trace.from_pairs(n, pairs)


# -- oblivious fabric -----------------------------------------------------------


def test_de_bruijn_degree_and_diameter():
    for n in (8, 16, 64):
        net = ObliviousNet.build(n)
        assert net.max_degree() <= 4
        assert net.diameter() == net.k == math.ceil(math.log2(n))


def test_de_bruijn_rounds_up_to_power_of_two():
    net = ObliviousNet.build(10)
    assert net.size == 16 and net.k == 4


def test_oblivious_distances_within_diameter():
    net = ObliviousNet.build(8)
    for src in range(8):
        assert int(net.distances_from(src).max()) <= 3


def test_oblivious_cost_bounded_by_diameter():
    tr = generate(UniformPairs(8, 2000), seed=1)
    avg = oblivious_cost(ObliviousNet.build(8), tr)
    assert 1.0 <= avg <= 3.0


def test_oblivious_cost_torus_demand_grows_past_four():
    tr = generate(Torus(256, 20000), seed=6)
    assert oblivious_cost(ObliviousNet.build(256), tr) >= 4.0


# -- information lower bound --------------------------------------------------------


def test_lower_bound_exact_torus():
    tr = torus_edge_trace(4)
    lb = static_lower_bound(tr, degree=24)
    assert lb == pytest.approx(2.0 / math.log2(24), abs=1e-9)


def test_lower_bound_single_pair():
    tr = Trace.from_pairs(4, [(1, 2)] * 10)
    assert static_lower_bound(tr, degree=24) == 0.0


def test_lower_bound_uniform_pairs():
    n = 16
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    lb = static_lower_bound(Trace.from_pairs(n, pairs), degree=24)
    # each source row is uniform over the 15 other nodes, base-changed
    assert lb == pytest.approx(math.log2(15) / math.log2(24), abs=1e-9)


def test_lower_bound_rejects_degree_one():
    with pytest.raises(ValueError):
        static_lower_bound(Trace.from_pairs(4, [(1, 2)]), degree=1)


# -- static demand-aware baseline ------------------------------------------------------


def test_static_dan_torus_all_direct():
    params = NetParams.make(64, 4)  # theta 16 > grid degree: everyone stays small
    tr = generate(Torus(64, 4000), seed=3)
    dan = build_static_dan(tr, params)
    assert not dan.large
    assert stat_cost(dan, tr) == pytest.approx(1.0)
    assert max(dan.degree.values()) <= 4


def test_static_dan_star_hub_tree_entropy_depth():
    params = NetParams.make(256, 4)
    tr = generate(StarZipf(256, 30000, 1.0), seed=4)
    dan = build_static_dan(tr, params)
    assert dan.large == {0}
    tree = dan.trees[0]
    weights = normalized(
        {v: c for (a, b), c in tr.pair_counts().items() for v in (a, b) if v != 0}
    )
    assert expected_depth(tree, weights) <= entropy(weights) + 2.0
    assert max(dan.degree.values()) <= params.delta_cap
    # replay cost sits in [1, H(sym partners) + 3]: tree depth bound plus the
    # owner hop; all traffic here crosses the single hub tree
    avg = stat_cost(dan, tr)
    assert 1.0 <= avg <= entropy(weights) + 3.0


def test_static_dan_degree_cap_verified():
    params = NetParams.make(64, 2)
    tr = generate(StarZipf(64, 5000, 0.5), seed=9)
    dan = build_static_dan(tr, params)
    assert max(dan.degree.values()) <= params.delta_cap


def test_static_dan_rejects_dense_demand():
    params = NetParams.make(16, 0.5)  # cap: 8 unique pairs
    pairs = [(u, v) for u in range(4) for v in range(4, 8)]
    with pytest.raises(StaticBuildError):
        build_static_dan(Trace.from_pairs(16, pairs), params)


# -- static replay ------------------------------------------------------------------


def test_stat_cost_all_direct_is_one():
    params = NetParams.make(8, 1)
    tr = Trace.from_pairs(8, [(0, 1), (1, 0), (2, 3)] * 5)
    dan = build_static_dan(tr, params)
    assert stat_cost(dan, tr) == pytest.approx(1.0)


def test_stat_cost_hub_is_expected_depth_plus_one():
    params = NetParams.make(32, 0.5)  # theta 2: the hub of 7 partners is large
    pairs = []
    for leaf in range(1, 8):
        pairs.append((0, leaf))
        pairs.append((leaf, 0))
    tr = Trace.from_pairs(32, pairs)
    dan = build_static_dan(tr, params)
    assert dan.large == {0}
    tree = dan.trees[0]
    uniform = {leaf: 1 / 7 for leaf in range(1, 8)}
    assert stat_cost(dan, tr) == pytest.approx(expected_depth(tree, uniform) + 1.0)


def test_stat_cost_relayed_pair_sums_leg_depths():
    params = NetParams.make(16, 0.5)  # theta 2
    pairs = [(0, v) for v in (3, 4, 5)] + [(1, v) for v in (6, 7, 8)] + [(0, 1)]
    tr = Trace.from_pairs(16, pairs)
    dan = build_static_dan(tr, params)
    assert dan.large == {0, 1}
    helper = dan.helpers[(0, 1)]
    assert helper not in (0, 1) and helper not in dan.large
    assert dan.trees[0].occupant_of(1) == helper
    assert dan.trees[1].occupant_of(0) == helper
    expected = dan.depths[0][1] + dan.depths[1][0] + 2
    only_pair = Trace.from_pairs(16, [(0, 1)])
    assert stat_cost(dan, only_pair) == pytest.approx(expected)


def test_stat_cost_missing_pair_rejected():
    params = NetParams.make(8, 1)
    tr = Trace.from_pairs(8, [(0, 1)])
    dan = build_static_dan(tr, params)
    with pytest.raises(ValueError):
        stat_cost(dan, Trace.from_pairs(8, [(2, 3)]))
