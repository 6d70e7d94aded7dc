import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plugkit import insertion as ins
from plugkit import plflow as pl
from plugkit.insertion import Classification, EventKind


def test_sigma_w3_examples():
    assert ins.sigma_w3((0, 2), "D_s") == (0, 6, 0, "lower")
    assert ins.sigma_w3((0, 8), "Dbar_s") == (0, 4, 0, "upper")
    assert ins.sigma_w3((1, 2), "D_s") == (0.75, 6, 0, "lower")
    with pytest.raises(ins.DomainError):
        ins.sigma_w3((0, 5), 0)


def test_sigma_wn_examples():
    assert ins.sigma_wn((0, 2, 2), 0, 4) == (0, 6, 6, 0)
    assert ins.sigma_wn((0, 8, 8), 1, 4) == (0, 4, 4, 0)
    assert ins.sigma_wn((1, 2, 2), 0, 4)[0] == 0.75


def test_radius_defect_examples():
    assert ins.radius_defect((0, 2), 0) == 0
    assert ins.radius_defect((1, 2), 0) == 0.25
    assert ins.radius_defect((0, 3), 0) == 2


@given(st.floats(-1, 1), st.floats(1, 3))
def test_sigma_inverse_roundtrip(r, th):
    if not ins.in_sigma_domain((r, th), 0):
        return
    rr, _, z, _ = ins.sigma_w3((r, th), 0)
    back = ins.sigma_w3_inverse(rr, z, 0)
    assert back is not None
    assert back[0] == pytest.approx(r, abs=1e-9) and back[1] == pytest.approx(th, abs=1e-12)


@pytest.mark.parametrize(
    "kinds, pairs",
    [
        (["Ent", "ent", "ent", "ex", "ex", "Ex"], [(3, 4), (2, 5), (1, 6)]),
        (["Ent", "ent", "ent", "ent"], []),
        ([], []),
    ],
)
def test_matching_examples(kinds, pairs):
    h = ins.history_from_kinds(kinds)
    assert sorted((a + 1, b + 1) for a, b in h.matching) == sorted(pairs)


@given(st.lists(st.booleans(), max_size=30))
def test_matching_is_non_crossing(kinds):
    pairs = ins.match_by_rule(kinds)
    assert ins.is_non_crossing(pairs)
    for a, b in pairs:
        assert kinds[a] and not kinds[b] and a < b


def test_history_from_kinds_rejects_garbage():
    with pytest.raises(ins.StructuralError):
        ins.history_from_kinds(["Ent", "what"])


def test_leaf_missing_both_domains():
    # theta = 5 at r = 0.9: the leaf crosses the sections far from sigma's images
    h = ins.follow_leaf(ins.WilsonPlug(True), (0.9, 5.0))
    assert h.classification is Classification.FINITE
    assert [e.kind for e in h.events] == [EventKind.EXTERNAL_ENTRY, EventKind.EXTERNAL_EXIT]


def test_stopped_point_exhausts_budget():
    h = ins.follow_leaf(ins.WilsonPlug(True), (0.0, 2.0), max_transitions=200)
    assert h.classification is not Classification.FINITE
    assert h.transitions >= 199


@settings(max_examples=25, deadline=None)
@given(st.floats(-1, 1), st.floats(0, 10))
def test_finite_histories_obey_the_laws(r, th):
    plug = ins.WilsonPlug(True)
    h = ins.follow_leaf(plug, (r, th), max_transitions=5000)
    if h.classification is not Classification.FINITE:
        return
    assert ins.verify_history_laws(h) == []
    assert (0, len(h.events) - 1) in h.matching
    assert ins.verify_matching_lemma(h, plug, 1e-6).passed


def test_exact_pl_history_law():
    plug = pl.v_plug(True)
    h = ins.follow_leaf(plug, (F(1, 2), F(2, 5)))
    assert h.classification is Classification.FINITE
    assert ins.verify_matching_lemma(h, plug, 0.0).passed


def test_perturbed_history_is_caught():
    plug = ins.WilsonPlug(True)
    rng = random.Random(3)
    hist = ins.random_finite_histories(plug, 30, rng, lambda g: (g.uniform(-1, 1), g.uniform(0, 10)))
    q, h = next((q, h) for q, h in hist if any(e.kind is EventKind.INTERNAL_EXIT for e in h.events))
    i = next(i for i, e in enumerate(h.events) if e.kind is EventKind.INTERNAL_EXIT)
    e = h.events[i]
    h.events[i] = ins.TransitionEvent(e.kind, (e.base_point[0] + 0.01, e.base_point[1]), e.time,
                                      e.stack_depth_after, e.frame, e.point, e.component)
    assert not ins.verify_matching_lemma(h, plug, 1e-6).passed


def test_radius_inequality_small_grid():
    assert ins.verify_radius_inequality(40).passed
    assert ins.verify_radius_inequality_n(4, steps=5).passed


def test_uninserted_plug_shows_circle():
    rep = ins.verify_aperiodicity(ins.WilsonPlug(False), [(0.0, 2.0), (0.5, 1.0)])
    assert not rep.passed
    assert rep.data["candidates"][0]["start"] == (0.0, 2.0)


def test_defect_floor_matches_grid():
    assert ins.defect_floor(0.1) == pytest.approx(0.0025)
    assert ins.defect_floor_grid(0.1, 200) >= ins.defect_floor(0.1) - 1e-12


def test_stack_bound_far_from_core():
    grid = [(r, th) for r in (-1.0, -0.75, -0.5, 0.5, 0.75) for th in (0.0, 2.0, 7.9)]
    C, bound, seen, rep = ins.stack_height_bound(0.5, grid)
    assert rep.passed and seen <= 3 and bound == math.ceil(2 / C)


def test_slope_bound_example():
    assert ins.slope_bound_holds(-0.03, 0.1)


def test_positive_radius_is_finite():
    h = ins.follow_leaf(ins.WilsonPlug(True), (0.5, 2.0))
    assert h.classification is Classification.FINITE


def test_content_band_is_checked():
    with pytest.raises(ins.DomainError):
        ins.verify_content_stopping([0.5])
    assert ins.verify_content_stopping([-1 / 40], n_theta=5).passed
