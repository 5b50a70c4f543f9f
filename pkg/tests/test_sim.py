import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from pathoblivious.config import ScenarioConfig
from pathoblivious.errors import ConfigError
from pathoblivious.inventory import OperationLog, replay
from pathoblivious.sim import SimState, build_request_sequence, draw_consumers, run
from pathoblivious.topology import PairKey


def scenario(**kw):
    base = {"topology": {"kind": "cycle", "nodes": 8}, "consumer_count": 6, "request_count": 30}
    base.update(kw)
    return ScenarioConfig.model_validate(base)


def test_draw_all_pairs_when_k_is_total():
    assert set(draw_consumers(random.Random(1), 3, 3)) == {(0, 1), (0, 2), (1, 2)}


def test_draw_deterministic_and_distinct():
    a = draw_consumers(random.Random("consumers:9"), 25, 35)
    b = draw_consumers(random.Random("consumers:9"), 25, 35)
    assert a == b and len(set(a)) == 35


def test_draw_too_many():
    with pytest.raises(ConfigError):
        draw_consumers(random.Random(0), 25, 301)
    assert len(draw_consumers(random.Random(0), 25, 300)) == 300


def test_requests_single_consumer():
    q = build_request_sequence(random.Random(0), [PairKey(0, 3)], 5)
    assert q.requests == [PairKey(0, 3)] * 5


def test_requests_deterministic():
    cons = draw_consumers(random.Random(4), 10, 7)
    a = build_request_sequence(random.Random(2), cons, 100).requests
    b = build_request_sequence(random.Random(2), cons, 100).requests
    assert a == b


def test_request_frequencies_uniform():
    cons = draw_consumers(random.Random(5), 25, 35)
    draws = 10_000
    freq = Counter(build_request_sequence(random.Random(6), cons, draws).requests)
    p = 1 / len(cons)
    sigma = math.sqrt(draws * p * (1 - p))
    assert set(freq) == set(cons)
    assert all(abs(freq[c] - draws * p) <= 5 * sigma for c in cons)


def test_two_node_adjacent_request():
    cfg = ScenarioConfig.model_validate({"topology": {"kind": "line", "nodes": 2}, "consumer_count": 1,
                                         "request_count": 1})
    m = run(cfg)
    assert m.complete and m.ticks_elapsed == 1 and m.swaps_performed == 0
    assert m.baseline_denominator == 0 and m.swap_overhead is None


def test_three_node_line_needs_a_swap():
    cfg = ScenarioConfig.model_validate({"topology": {"kind": "line", "nodes": 3}, "consumers": [[0, 2]],
                                         "request_count": 1})
    m = run(cfg)
    assert m.complete and m.swaps_performed >= 1 and m.consumptions_satisfied == 1


def test_max_ticks_zero():
    m = run(scenario(max_ticks=0))
    assert m.consumptions_satisfied == 0 and m.ticks_elapsed == 0 and not m.complete


def test_adjacent_only_requests_have_undefined_overhead():
    m = run(scenario(consumers=[[0, 1], [3, 4]], consumer_count=2))
    assert m.baseline_denominator == 0 and m.swap_overhead is None


def test_replay_identical():
    cfg = scenario(costs={"distill": 2}, seed=12)
    assert run(cfg) == run(cfg)


def test_seed_changes_run():
    assert run(scenario(seed=1)) != run(scenario(seed=2))


def test_incomplete_run():
    m = run(scenario(max_ticks=3, request_count=500))
    assert not m.complete and m.ticks_elapsed == 3


def test_deposit_probability_thinning():
    cfg = scenario(costs={"survival": 0.5, "qec_overhead": 2.0}, max_ticks=2000, request_count=10**6)
    m = run(cfg)
    # 8 edges, deposit probability 0.25 each, over 2000 ticks
    expect = 8 * 2000 * 0.25
    assert abs(m.generated - expect) < 5 * math.sqrt(8 * 2000 * 0.25 * 0.75)


def test_latencies_count_satisfactions():
    m = run(scenario(seed=3))
    assert len(m.latencies) == m.consumptions_satisfied
    assert sum(m.latencies) <= m.ticks_elapsed


def test_hybrid_mode_completes_and_counts_swaps():
    cfg = scenario(mode="hybrid", seed=5, costs={"distill": 1})
    m = run(cfg)
    assert m.complete and m.conserved
    assert m.hybrid_swaps <= m.swaps_performed


def test_log_replay_reproduces_ledger():
    cfg = scenario(seed=8, costs={"distill": 2}, mode="hybrid")
    log = OperationLog()
    state = SimState(cfg, log=log)
    while not state.finished:
        state.step()
    rebuilt = replay(state.graph.node_count, log, state.costs)
    assert rebuilt.as_dict() == state.inventory.as_dict()


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["cycle", "line", "grid"]), st.integers(1, 3), st.integers(0, 2**32),
       st.sampled_from(["oblivious", "hybrid"]))
def test_conservation_every_run(kind, d, seed, mode):
    topo = {"kind": kind, "side": 3} if kind == "grid" else {"kind": kind, "nodes": 7}
    cfg = ScenarioConfig.model_validate({"topology": topo, "consumer_count": 5, "request_count": 15,
                                         "costs": {"distill": d}, "seed": seed, "mode": mode,
                                         "max_ticks": 400})
    m = run(cfg)
    assert m.conserved
    assert m.generated + m.swap_produced == m.consumed_units + m.swap_drained + m.residual_total_pairs
    assert m.consumed_units == d * m.consumptions_satisfied
