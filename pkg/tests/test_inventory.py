import pytest
from hypothesis import given, settings, strategies as st

from pathoblivious.errors import InsufficientPairsError, InvalidPairError, InvalidSwapError
from pathoblivious.inventory import CostTable, OperationLog, PairInventory, replay


def test_empty_count():
    assert PairInventory(3).count(0, 1) == 0


def test_symmetric_after_add():
    inv = PairInventory(3).add_pairs(0, 1, 3)
    assert inv.count(0, 1) == inv.count(1, 0) == 3


def test_coincident_pair_rejected():
    inv = PairInventory(3)
    with pytest.raises(InvalidPairError):
        inv.count(2, 2)
    with pytest.raises(InvalidPairError):
        inv.add_pairs(1, 1, 1)


def test_add_accumulates():
    inv = PairInventory(3).add_pairs(0, 1, 2).add_pairs(1, 0, 3)
    assert inv.count(0, 1) == 5
    assert inv.total == 5


def test_add_rejects_nonpositive_and_out_of_range():
    inv = PairInventory(3)
    with pytest.raises(ValueError):
        inv.add_pairs(0, 1, 0)
    with pytest.raises(InvalidPairError):
        inv.add_pairs(0, 3, 1)


def test_swap_unit_drain():
    inv = PairInventory.from_counts(3, {(0, 1): 2, (1, 2): 1})
    inv.apply_swap(1, 0, 2, CostTable.uniform())
    assert inv.as_dict() == {(0, 1): 1, (0, 2): 1}


def test_swap_distill_two():
    inv = PairInventory.from_counts(3, {(0, 1): 2, (1, 2): 2})
    inv.apply_swap(1, 0, 2, CostTable.uniform(distill=2))
    assert inv.as_dict() == {(0, 2): 1}
    assert inv.stats.drained == 4 and inv.stats.produced == 1


def test_swap_insufficient_leaves_state():
    inv = PairInventory.from_counts(3, {(0, 1): 1, (1, 2): 2})
    with pytest.raises(InsufficientPairsError):
        inv.apply_swap(1, 0, 2, CostTable.uniform(distill=2))
    assert inv.as_dict() == {(0, 1): 1, (1, 2): 2}


def test_swap_needs_distinct_nodes():
    inv = PairInventory.from_counts(3, {(0, 1): 2})
    with pytest.raises(InvalidSwapError):
        inv.apply_swap(1, 1, 0, CostTable.uniform())


@pytest.mark.parametrize("d,before,after", [(1, 1, 0), (3, 5, 2)])
def test_consume(d, before, after):
    inv = PairInventory.from_counts(2, {(0, 1): before})
    inv.consume(0, 1, CostTable.uniform(distill=d))
    assert inv.count(0, 1) == after


def test_consume_insufficient():
    inv = PairInventory.from_counts(2, {(0, 1): 2})
    with pytest.raises(InsufficientPairsError):
        inv.consume(0, 1, CostTable.uniform(distill=3))


def test_per_pair_overrides():
    costs = CostTable(distill={(1, 0): 3}, survival={(0, 2): 0.5}, default_distill=2)
    assert costs.distill_of(0, 1) == 3
    assert costs.distill_of(1, 2) == 2
    assert costs.survival_of(2, 0) == 0.5
    m = costs.distill_matrix(3)
    assert m[0, 1] == m[1, 0] == 3 and m[0, 2] == 2
    with pytest.raises(ValueError):
        m[0, 1] = 5


@pytest.mark.parametrize("kwargs", [
    {"default_distill": 0},
    {"default_survival": 0.0},
    {"default_survival": 1.5},
    {"qec_overhead": 0.5},
])
def test_cost_table_validation(kwargs):
    with pytest.raises(ValueError):
        CostTable(**kwargs)


def test_matrix_is_read_only():
    inv = PairInventory.from_counts(3, {(0, 1): 1})
    with pytest.raises(ValueError):
        inv.matrix[0, 1] = 7


def test_copy_is_independent():
    inv = PairInventory.from_counts(3, {(0, 1): 2})
    other = inv.copy()
    other.add_pairs(0, 1, 1)
    assert inv.count(0, 1) == 2 and other.count(0, 1) == 3
    assert inv.stats.generated == 2


ops = st.lists(st.tuples(st.sampled_from(["gen", "swap", "consume"]),
                         st.integers(0, 4), st.integers(0, 4), st.integers(0, 4),
                         st.integers(1, 3)), max_size=80)


@settings(max_examples=150, deadline=None)
@given(ops, st.integers(1, 3))
def test_ledger_invariants_under_random_ops(seq, d):
    costs = CostTable.uniform(distill=d)
    log = OperationLog()
    inv = PairInventory(5, log=log)
    for kind, a, b, c, k in seq:
        try:
            if kind == "gen":
                inv.add_pairs(a, b, k)
            elif kind == "swap":
                inv.apply_swap(c, a, b, costs)
            else:
                inv.consume(a, b, costs)
        except (InvalidPairError, InvalidSwapError, InsufficientPairsError):
            pass
        m = inv.matrix
        assert (m == m.T).all()
        assert (m >= 0).all()
        assert (m.diagonal() == 0).all()
        st_ = inv.stats
        assert st_.generated + st_.produced == st_.consumed_units + st_.drained + inv.total
        assert inv.total == int(m.sum()) // 2
    rebuilt = replay(5, log, costs)
    assert rebuilt.as_dict() == inv.as_dict()


def test_log_csv_header():
    log = OperationLog()
    inv = PairInventory(3, log=log)
    inv.add_pairs(0, 1, 2)
    inv.add_pairs(1, 2, 1)
    inv.apply_swap(1, 0, 2, CostTable.uniform())
    lines = log.to_csv().splitlines()
    assert len(lines) == 4
    assert lines[0].startswith("tick")
