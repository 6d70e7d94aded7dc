from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from plugkit import symbolic as sym
from plugkit.symbolic import SymbolicPair as P

GOLDEN = Path(__file__).resolve().parent.parent / "golden" / "symbolic_24.txt"

PRINTED_PREFIX = [
    (1, 2), (1, 1), (1, 1), (2, 1), (2, 1), (1, 4), (1, 2), (1, 1), (1, 1), (2, 1), (2, 1), (1, 3),
    (1, 2), (1, 1), (1, 1), (2, 1), (2, 1), (1, 2), (1, 1), (1, 1), (2, 1), (2, 1), (1, 1),
]


def test_followdisks_small_cases():
    assert sym.followdisks(1, 1) == [P(1, 1)]
    assert sym.followdisks(1, 2) == [P(1, 2), P(1, 1), P(1, 1), P(2, 1), P(2, 1)]
    assert sym.followdisks(2, 0) == []


def test_infinite_call_prefix():
    got = [(p.j, p.n) for p in sym.followdisks(1, sym.INFINITY, pair_budget=24)]
    assert got[:23] == PRINTED_PREFIX
    assert got[23] == (2, 2)


def test_golden_file():
    pairs = sym.parse_pairs(GOLDEN.read_text())
    assert pairs == sym.followdisks(1, sym.INFINITY, pair_budget=24)


def test_sequence_agrees_with_double_cover_geometry():
    assert sym.double_cover_entries(40) == sym.followdisks(1, sym.INFINITY, pair_budget=40)


def test_bad_arguments():
    with pytest.raises(sym.DomainError):
        sym.followdisks(3, 2)
    with pytest.raises(sym.DomainError):
        sym.followdisks(1, sym.INFINITY)
    with pytest.raises(ValueError):
        P(1, 0)


@given(st.integers(1, 2), st.integers(1, 7))
def test_finite_call_length(j, n):
    # each call emits one pair plus the pairs of its recursive calls
    def count(n):
        if n == 0:
            return 0
        return 1 + 2 * (sum(count(k) for k in range(1, n - 1)) + 2 * count(n - 1))

    out = sym.followdisks(j, n)
    assert len(out) == count(n)
    assert out[0] == P(j, n)
    assert all(1 <= p.n <= n for p in out)


def test_format_roundtrip():
    pairs = sym.followdisks(2, 3)
    assert sym.parse_pairs(sym.format_pairs(pairs)) == pairs


def test_disks():
    assert (sym.disk_E(1).r_lo, sym.disk_E(1).r_hi) == (F(3, 2), F(5, 2))
    assert (sym.disk_E(2).r_lo, sym.disk_E(2).r_hi) == (F(7, 8), F(9, 8))
    assert sym.disk_index(F(1)) == 2 and sym.disk_index(F(5, 4)) is None
    with pytest.raises(sym.DomainError):
        sym.disk_E(0)


def test_disks_are_disjoint_and_shrinking():
    for n in range(1, 12):
        a, b = sym.disk_E(n), sym.disk_E(n + 1)
        assert b.r_hi < a.r_lo
        assert (b.r_hi - b.r_lo) < (a.r_hi - a.r_lo)


def test_tube_of_E1_stays_in_the_domain():
    secs = sym.tube_sections(sym.disk_E(1).polygon())
    assert secs and all(s.bounds()[3] <= F(3, 2) for s in secs)


def test_small_hierarchy_certificate():
    h = sym.build_hierarchy(k_max=2, n_max=4)
    rep = sym.cantor_cross_section_stats(h)
    assert rep.passed, [c.as_dict() for c in rep.checks if not c.passed]
    assert len(h.levels) == 3 and len(h.levels[0]) == 4


def test_one_level_is_not_a_certificate():
    rep = sym.cantor_cross_section_stats(sym.build_hierarchy(k_max=1, n_max=3))
    assert not rep.passed
