import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpusforge.sampler import (
    UNCAPPED,
    pair_allocate,
    proportional_allocate,
    unimax_allocate,
)
from oracles import oracle_capped_allocation

# availability fixture used across the published tables
XLR_AVAILABLE = {"liv": 2_600_000, "vro": 14_000_000, "kpv": 578_900_000}
BUDGET = 1_500_000_000


def test_capped_allocation_reference_numbers():
    alloc = unimax_allocate(XLR_AVAILABLE, BUDGET, 4)
    assert alloc.entries["liv"].allocated == Fraction(10_400_000)
    assert alloc.entries["vro"].allocated == Fraction(56_000_000)
    assert alloc.entries["kpv"].allocated == Fraction(1_433_600_000)
    assert alloc.entries["liv"].epochs == 4
    assert alloc.entries["vro"].epochs == 4
    assert abs(float(alloc.entries["kpv"].epochs) - 2.48) < 0.02
    props = {k: float(v) for k, v in alloc.proportions().items()}
    assert props["liv"] == pytest.approx(0.00693, abs=1e-4)
    assert props["vro"] == pytest.approx(0.03733, abs=1e-4)
    assert props["kpv"] == pytest.approx(0.95573, abs=1e-4)


def test_one_epoch_cap_fully_caps_every_key():
    alloc = unimax_allocate(XLR_AVAILABLE, BUDGET, 1)
    for key, avail in XLR_AVAILABLE.items():
        assert alloc.entries[key].allocated == avail
        assert alloc.entries[key].epochs == 1
    props = {k: 100 * float(v) for k, v in alloc.proportions().items()}
    assert props["vro"] == pytest.approx(2.4, abs=0.1)
    assert props["liv"] == pytest.approx(0.4, abs=0.1)
    assert props["kpv"] == pytest.approx(97.2, abs=0.1)
    # budget is not exhausted once every key is capped
    assert alloc.total_allocated == sum(XLR_AVAILABLE.values()) < BUDGET


def test_single_key_min_of_budget_and_cap():
    alloc = unimax_allocate({"only": 100}, 1000, 4)
    assert alloc.entries["only"].allocated == 400
    assert alloc.entries["only"].epochs == 4


def test_equal_keys_split_uniformly():
    alloc = unimax_allocate({"a": 100, "b": 100, "c": 100}, 150, 4)
    assert all(alloc.entries[k].allocated == 50 for k in "abc")


def test_proportional_reference_numbers():
    alloc = proportional_allocate(XLR_AVAILABLE, BUDGET)
    epochs = {k: float(e.epochs) for k, e in alloc.entries.items()}
    assert len(set(epochs.values())) == 1
    assert epochs["kpv"] == pytest.approx(2.5, abs=0.05)
    props = {k: 100 * float(v) for k, v in alloc.proportions().items()}
    assert props["vro"] == pytest.approx(2.4, abs=0.1)
    assert props["liv"] == pytest.approx(0.4, abs=0.1)
    assert props["kpv"] == pytest.approx(97.2, abs=0.1)


def test_proportional_exact_shapes():
    alloc = proportional_allocate({"a": 10, "b": 20}, 30)
    assert alloc.entries["a"].epochs == 1
    assert alloc.entries["b"].epochs == 1
    alloc = proportional_allocate({"a": 1, "b": 3}, 100)
    assert alloc.entries["b"].allocated == 3 * alloc.entries["a"].allocated


def test_unimax_matches_proportional_at_the_proportional_epoch_count():
    n = Fraction(BUDGET, sum(XLR_AVAILABLE.values()))
    capped = unimax_allocate(XLR_AVAILABLE, BUDGET, n)
    prop = proportional_allocate(XLR_AVAILABLE, BUDGET)
    for key in XLR_AVAILABLE:
        assert abs(capped.entries[key].allocated - prop.entries[key].allocated) <= 1


def test_empty_keys_fail():
    with pytest.raises(ValueError):
        unimax_allocate({}, 100, 4)


def test_tie_break_is_lexicographic():
    alloc = unimax_allocate({"b": 10, "a": 10}, 15, 1)
    # "a" is processed first: quota 7.5 -> capped at 10? no, min(7.5, 10) = 7.5;
    # then "b" takes min(7.5, 10) = 7.5. Equal here, so probe with n that caps:
    alloc = unimax_allocate({"b": 10, "a": 10}, 30, 1)
    assert alloc.entries["a"].allocated == 10
    assert alloc.entries["b"].allocated == 10
    assert alloc.total_allocated == 20


# -- pair budgeting -----------------------------------------------------------

STAGE2_PARALLEL_AVAILABLE = {
    "vro-et": 28_504,
    "liv-et": 14_212,
    "liv-lv": 11_606,
    "liv-en": 492,
    "kpv-et": 3_835,
    "kpv-fi": 7_272,
    "kpv-en": 7_286,
    "kpv-lv": 5_018,
    "kpv-ru": UNCAPPED,
}


def test_pair_budget_reference_numbers():
    pa = pair_allocate(STAGE2_PARALLEL_AVAILABLE, 159_712, 1)
    assert pa.allocation.entries["kpv-ru"].allocated == 81_487
    for key, avail in STAGE2_PARALLEL_AVAILABLE.items():
        if avail is not UNCAPPED:
            assert pa.allocation.entries[key].allocated == avail
    assert pa.allocation.total_allocated == 159_712
    # directions split 50/50, listed direction takes the odd sentence
    assert pa.directions[("vro", "et")] == 14_252
    assert pa.directions[("et", "vro")] == 14_252
    assert pa.directions[("kpv", "ru")] + pa.directions[("ru", "kpv")] == 81_487
    assert pa.directions[("kpv", "ru")] - pa.directions[("ru", "kpv")] in (0, 1)


def test_pair_budget_all_capped_leaves_budget_unused():
    available = {"a-b": 10, "c-d": 20}
    pa = pair_allocate(available, 1000, 1)
    assert pa.allocation.entries["a-b"].allocated == 10
    assert pa.allocation.entries["c-d"].allocated == 20
    assert pa.allocation.total_allocated == 30 < 1000


def test_pair_budget_single_pair():
    pa = pair_allocate({"a-b": 50}, 30, 1)
    assert pa.allocation.entries["a-b"].allocated == 30
    pa = pair_allocate({"a-b": 50}, 80, 1)
    assert pa.allocation.entries["a-b"].allocated == 50


# -- properties ---------------------------------------------------------------


@st.composite
def allocation_instances(draw):
    n_keys = draw(st.integers(min_value=1, max_value=10))
    available = {
        f"k{i}": draw(st.integers(min_value=1, max_value=10**9)) for i in range(n_keys)
    }
    budget = draw(st.integers(min_value=1, max_value=5 * 10**9))
    n = draw(st.sampled_from([1, 2, 3, 4, 8, Fraction(5, 2)]))
    return available, budget, n


@settings(max_examples=200, deadline=None)
@given(allocation_instances())
def test_epoch_cap_and_budget_invariants(instance):
    available, budget, n = instance
    alloc = unimax_allocate(available, budget, n)
    for key, entry in alloc.entries.items():
        assert entry.epochs <= Fraction(n)
    assert alloc.total_allocated <= budget
    capacity = sum(Fraction(n) * a for a in available.values())
    if capacity >= budget:
        assert alloc.total_allocated == budget
    if alloc.total_allocated > 0:
        assert sum(alloc.proportions().values()) == 1


@settings(max_examples=100, deadline=None)
@given(allocation_instances())
def test_total_allocation_monotone_in_epoch_cap(instance):
    available, budget, n = instance
    lower = unimax_allocate(available, budget, n)
    higher = unimax_allocate(available, budget, Fraction(n) + 1)
    assert higher.total_allocated >= lower.total_allocated


def test_per_key_monotonicity_holds_only_for_capped_keys():
    # Per-key monotonicity in the cap is NOT a theorem: with {1, 1, 2} and
    # budget 4, raising n from 1 to 2 shrinks the largest key from 2 to 4/3,
    # because larger caps let small keys absorb quota that used to roll
    # forward. The reference fixture shows the same once the budget
    # saturates: the tail key drops from 2.48 to 2.36 epochs between n=4
    # and n=8 while the capped keys keep growing.
    allocs = {n: unimax_allocate(XLR_AVAILABLE, BUDGET, n) for n in (1, 2, 4, 8)}
    for lo, hi in [(1, 2), (2, 4), (4, 8)]:
        for key in ("liv", "vro"):  # capped at every n here
            assert allocs[hi].entries[key].allocated >= allocs[lo].entries[key].allocated
        assert allocs[hi].total_allocated >= allocs[lo].total_allocated
    assert allocs[8].entries["kpv"].allocated < allocs[4].entries["kpv"].allocated


def test_equivalence_with_reference_allocator():
    rng = random.Random(20240817)
    for _ in range(1000):
        n_keys = rng.randint(1, 10)
        available = {f"k{i}": rng.randint(1, 10**7) for i in range(n_keys)}
        if n_keys > 1 and rng.random() < 0.2:
            available[f"k{rng.randrange(n_keys)}"] = UNCAPPED
        budget = rng.randint(1, 10**8)
        n = rng.choice([1, 2, 4, Fraction(3, 2)])
        alloc = unimax_allocate(available, budget, n)
        reference = oracle_capped_allocation(available, budget, n)
        assert {k: e.allocated for k, e in alloc.entries.items()} == reference
