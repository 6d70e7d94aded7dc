from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plugkit import plflow as pl


@pytest.fixture(scope="module")
def sym_map():
    return pl.build_symbolic_map()


@pytest.fixture(scope="module")
def collar():
    return pl.build_collar_map()


# -- the symbolic map -------------------------------------------------------


def test_symbolic_map_examples(sym_map):
    assert sym_map((0, 0)) == (0, F(-3, 2))
    right = next(p for p in sym_map.pieces if p.name == "right")
    left = next(p for p in sym_map.pieces if p.name == "left")
    # f(r, z) = (r, r/2 + z - 3/2) and (r, -r + z - 3/2)
    assert right.matrix == ((1, 0), (F(1, 2), 1)) and right.offset == (0, F(-3, 2))
    assert left.matrix == ((1, 0), (-1, 1)) and left.offset == (0, F(-3, 2))


def test_symbolic_map_is_a_pl_homeomorphism(sym_map):
    assert sym_map.continuity_violations() == []
    assert sym_map.tiles_domain()
    assert sym_map.is_bijective()


def test_symbolic_min_displacement(sym_map):
    assert pl.min_z_displacement(sym_map) == (F(-3, 2), [(0, 0)])


r_sym = st.fractions(min_value=-1, max_value=F(5, 2), max_denominator=24)
z_sym = st.fractions(min_value=-3, max_value=F(3, 2), max_denominator=24)


@given(r_sym, z_sym)
def test_symbolic_inverse_roundtrip(sym_map, r, z):
    out = sym_map((r, z))
    assert sym_map.inverse(out) == (r, z)
    assert out[0] == r


def test_outside_domain(sym_map):
    with pytest.raises(pl.DomainError):
        sym_map((3, 0))


# -- the collar map ---------------------------------------------------------


def test_collar_examples(collar):
    assert collar((0, 0)) == (0, -1)
    assert collar((0, 1)) == (0, 0)
    assert collar((0, F(1, 2))) == (0, F(-1, 2))
    assert collar.is_bijective() and not collar.continuity_violations()


def test_collar_min_displacement(collar):
    assert pl.min_z_displacement(collar) == (-1, [(0, 0), (0, 1)])


@given(st.fractions(min_value=-2, max_value=2, max_denominator=16))
def test_collar_fixes_the_boundary(collar, t):
    for p in ((-1, t), (1, t), (t / 2, -2), (t / 2, 2)):
        assert collar(p) == (F(p[0]), F(p[1]))


def test_identity_displacement():
    f = pl.identity_map(0, 1, 0, 1)
    value, where = pl.min_z_displacement(f)
    assert value == 0 and len(where) == 4


# -- suspensions and exact traces -------------------------------------------


def test_suspend_supports():
    s = pl.suspend(pl.build_collar_map(), 1, 20)
    assert s.support() == {"r": (-1, 1), "theta": (0, 20), "z": (-2, 2), "theta_periodic": True}
    v = pl.symbolic_suspension(1)
    assert v.slant == F(3, 2) and v.length == 1
    with pytest.raises(ValueError):
        pl.suspend(pl.build_collar_map(), 0, 1)


def test_identity_suspension_exits():
    s = pl.suspend(pl.identity_map(0, 1, 0, 1), F(1, 3), 1)
    tr = pl.trace_pl_leaf(s, (F(1, 2), 0, 0))
    assert tr.termination == "exited_boundary" and tr.exit_point == (F(1, 2), 0, 1)


def test_circle_T_of_V():
    tr = pl.trace_pl_leaf(pl.symbolic_suspension(1), (0, 0, F(-3, 2)))
    assert tr.termination == "closed_up" and tr.theta_length == 1
    assert ("section", (0, 0, 0)) in tr.events  # (0, 1, 0) pre-map


@pytest.mark.parametrize("k", range(11))
def test_annulus_circles(k):
    s = pl.pl_wilson_plug(False).susp
    tr = pl.trace_pl_leaf(s, (0, 0, F(-1) + F(k, 10)))
    assert tr.termination == "closed_up" and tr.theta_length == 20


def test_off_core_leaf_exits():
    s = pl.pl_wilson_plug(False).susp
    tr = pl.trace_pl_leaf(s, (F(1, 2), 0, 0))
    assert tr.termination == "exited_boundary" and tr.exit_point[2] == 2


@settings(max_examples=40, deadline=None)
@given(
    st.fractions(min_value=-1, max_value=F(5, 2), max_denominator=20),
    st.fractions(min_value=0, max_value=F(19, 20), max_denominator=20),
    st.fractions(min_value=-3, max_value=F(3, 2), max_denominator=20),
)
def test_retrace_is_exact(r, th, z):
    s = pl.symbolic_suspension(1)
    tr = pl.trace_pl_leaf(s, (r, th, z), budget=30)
    assert pl.retrace_backwards(s, tr) == tr.start


def test_start_outside_support():
    with pytest.raises(pl.DomainError):
        pl.trace_pl_leaf(pl.symbolic_suspension(1), (0, 0, 2))


# -- insertion maps ---------------------------------------------------------


@pytest.mark.parametrize(
    "p, image",
    [((0, F(1, 3)), (0, 1, 0)), ((1, F(5, 12)), (0, 1, F(-1, 2))), ((1, F(1, 2)), (F(1, 2), 1, F(-1, 4)))],
)
def test_sigma_v_examples(p, image):
    assert pl.sigma_v(p) == image


def test_sigma_v_domain():
    with pytest.raises(pl.DomainError):
        pl.sigma_v((1, 0))


@given(st.fractions(min_value=0, max_value=F(5, 2), max_denominator=30), st.fractions(0, 1, max_denominator=30))
def test_sigma_v_radius_and_inverse(r, s):
    th = F(1, 3) + r / 12 + (r / 6) * s
    R, _, Z = pl.sigma_v((r, th))
    assert R <= r / 2 and (R < r or r == 0)
    assert pl.sigma_v_inverse((R, Z)) == (r, th)


def test_sigma_v_inverse_affine_tables():
    for name, poly in pl.IMAGE_PIECES.items():
        (a, b), (c, d) = pl.SIGMA_V_INVERSE_AFFINE[name][0]
        e, f = pl.SIGMA_V_INVERSE_AFFINE[name][1]
        for R, Z in poly.vertices:
            assert pl.sigma_v_inverse((R, Z)) == (a * R + b * Z + e, c * R + d * Z + f)


def test_double_cover_components():
    plug = pl.build_double_cover()
    assert plug.sigma1((0, F(1, 3))) == (0, 1, 0, "lower")
    # beta image of a D1 point goes to the lifted mirror circle
    assert plug.sigma2((0, F(4, 3))) == (0, 0, 0, "upper")
    assert plug.sigma(0, (1, F(1, 2)))[3] != plug.sigma(1, (1, F(3, 2)))[3]
    with pytest.raises(pl.DomainError):
        pl.lift_sigma1((0, F(4, 3)))


def test_pl_wilson_sigma_examples():
    plug = pl.pl_wilson_plug(True)
    f = plug.susp.f
    lower = plug.components[0]
    assert lower.section == 20 and plug.components[1].section == 5
    assert f(lower.forward((0, F(19, 2)))) == (0, F(-1, 2))
    assert f(lower.forward((0, 9))) == (0, -1)
    assert f(lower.forward((0, 10))) == (0, 0)
    assert pl.verify_pl_wilson_sigma(plug) == []


@given(st.fractions(min_value=F(-1, 2), max_value=F(1, 2), max_denominator=40),
       st.fractions(min_value=F(71, 8), max_value=F(81, 8), max_denominator=40))
def test_pl_wilson_radius_drops_off_core(r, th):
    c = pl.build_pl_wilson_sigma()[0]
    R, _ = c.forward((r, th))
    if r != 0:
        assert R < r
    assert c.inverse((R, th - 9)) == (r, th)


def test_v_plug_has_one_component():
    assert len(pl.v_plug(True).components) == 1
    assert pl.v_plug(False).components == ()
