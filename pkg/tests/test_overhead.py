import itertools

import pytest

from icn_cache_lab.overhead import (
    POLICIES,
    canonical_policy,
    min_pointer_bits,
    overhead_rows,
    space_overhead,
    time_class,
)


def test_headline_sizes():
    assert space_overhead("compact-car", 20_000_000, 25) == 20_000_225
    assert space_overhead("car", 20_000_000, 25) == 2_020_000_225
    assert space_overhead("clock", 1024, 10) == 1034


@pytest.mark.parametrize(
    "policy,expected",
    [
        ("fifo", 10),
        ("lru_dll", 2 * 1024 * 10 + 20),
        ("lru_s", 0),
        ("lru_c", 1024 * 8 + 8),
        ("lfu_h", 1024 * 8),
        ("arc", 4 * 1024 * 10 + 70),
        ("lirs", 4 * 1024 * 10 + 2 * 1024 + 2 * 100 * 10 + 40),
        ("clock", 1034),
        ("car", 4 * 1024 * 10 + 1024 + 90),
        ("compact-car", 1024 + 90),
    ],
)
def test_formulas(policy, expected):
    assert space_overhead(policy, 1024, 10, C=8, m=100) == expected


def test_pointer_bits_floor():
    assert min_pointer_bits(1024) == 10
    assert min_pointer_bits(1025) == 11
    assert min_pointer_bits(20_000_000) == 25
    assert space_overhead("fifo", 1024) == 10
    with pytest.raises(ValueError):
        space_overhead("fifo", 1024, 9)


def test_missing_and_unknown_parameters():
    with pytest.raises(ValueError):
        space_overhead("lirs", 16, 4)
    with pytest.raises(ValueError):
        space_overhead("lfu_h", 16, 4)
    with pytest.raises(ValueError):
        space_overhead("mru", 16)
    assert canonical_policy("LRU") == "lru_dll"


@pytest.mark.parametrize("policy", POLICIES)
def test_monotone_in_every_parameter(policy):
    base = dict(n=64, P=6, C=4, m=32)
    for key in base:
        for a, b in itertools.pairwise([0, 1, 5]):
            lo, hi = dict(base), dict(base)
            lo[key] += a
            hi[key] += b
            if key == "n":
                lo["P"] = hi["P"] = 7
            assert space_overhead(policy, **lo) <= space_overhead(policy, **hi)


def test_time_classes():
    assert str(time_class("compact-car", "hit", "worst")) == "t_w + δ"
    assert str(time_class("clock", "miss", "average")) == "O(1/(1-β))"
    assert str(time_class("lirs", "miss", "average")) == "O(1/β)"
    assert str(time_class("lfu", "hit", "worst")) == "O(log n)"
    assert str(time_class("lirs", "hit", "worst")) == "O(m)"
    assert str(time_class("lru_c", "hit", "average")) == "O(1)"
    assert str(time_class("lru_c", "miss", "worst")) == "O(n)"
    with pytest.raises(ValueError):
        time_class("fifo", "hit", "best")


def test_rows_cover_every_policy():
    rows = overhead_rows(1024, 10)
    assert [r["policy"] for r in rows] == list(POLICIES)
    by = {r["policy"]: r for r in rows}
    assert by["compact-car"]["bits"] == 1114
    assert by["lirs"]["bits"] is None
