from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import pl
from kstab.errors import (CeilingTooLow, NestingViolation, NonIntegralSlopes, TrivialFlag)
from kstab.testconfig import (MonomialFlagIdeal, bridge, central_components, config_to_flag,
                              cosupport_cones, flag_blowup, required_r, support_dimension,
                              toric_config)
from kstab.toric import (PolarizedToric, discrepancy, is_nef, product_fan,
                         projective_space_fan)

F = Fraction


def test_trivial_and_flagship_configs(p1):
    assert toric_config(p1, pl(p1, ((0,), 0)), 1).trivial
    cfg = toric_config(p1, pl(p1, ((0,), 0), ((2,), -1)), 1)
    assert not cfg.trivial and len(cfg.f.cells()) == 2


def test_affine_on_simplex(p2):
    cfg = toric_config(p2, pl(p2, ((1, 0), 0)), 1)
    assert cfg.f.is_affine() and not cfg.trivial


def test_ceiling_too_low(p1):
    with pytest.raises(CeilingTooLow):
        toric_config(p1, pl(p1, ((1,), 0)), F(1, 2))


def test_normalization(p1):
    cfg = toric_config(p1, pl(p1, ((1,), 3)), 5)
    assert cfg.f.minimum() == 0


def test_central_components(p1):
    assert central_components(toric_config(p1, pl(p1, ((0,), 0)), 1)) == [(1, 0, 0)]
    flagship = toric_config(p1, pl(p1, ((0,), 0), ((2,), -1)), 1)
    assert central_components(flagship) == [(F(1, 2), 0, 0), (F(1, 2), F(-1, 4), -1)]
    assert central_components(toric_config(p1, pl(p1, ((1,), 0)), 1)) == [(1, F(-1, 2), -1)]


def test_deformation_to_normal_cone_p1(p1):
    # x is the coordinate vanishing on the divisor of the ray (-1)
    B = flag_blowup(p1, MonomialFlagIdeal(1, [[(1, 0)]]))
    assert len(B.exceptional) == 1
    e = B.exceptional[0]
    assert (e["a"], e["b"], e["c"]) == (1, 1, 1)
    assert e["ray"] == (-1, 1)
    assert B.semi_ample


def test_blowup_point_p2():
    X = PolarizedToric(projective_space_fan(2), [0, 0, 1])
    B = flag_blowup(X, MonomialFlagIdeal(1, [[(1, 0, 0), (0, 1, 0)]]))
    assert [(e["ray"], e["a"], e["b"], e["c"]) for e in B.exceptional] == [((1, 1, 1), 2, 1, 1)]


def test_trivial_flag_rejected(p1):
    with pytest.raises(TrivialFlag):
        flag_blowup(p1, MonomialFlagIdeal(2, []))


def test_nesting_violation(p1):
    with pytest.raises(NestingViolation):
        flag_blowup(p1, MonomialFlagIdeal(2, [[(1, 0)], [(0, 1)]]))


def test_not_semi_ample_is_flagged(p1):
    B = flag_blowup(p1, MonomialFlagIdeal(1, [[(3, 0)]]))
    assert not B.semi_ample


def test_bridge_flagship(p1):
    cfg = toric_config(p1, pl(p1, ((0,), 0), ((2,), -1)), 1)
    with pytest.raises(NonIntegralSlopes) as err:
        config_to_flag(cfg)
    assert err.value.required_r == 2
    cfg2, I, B = bridge(cfg)
    assert cfg2.r == 2 and I.N == 2
    assert I.levels[0] == [(1, 1), (2, 0)]
    g = B.degeneration_function()
    assert [g((y,)) for y in (0, 1, F(3, 2), 2)] == [0, 0, 1, 2]
    back = B.to_config()
    assert back.f.pieces == cfg.f.pieces and back.r == 2


def test_trivial_config_flag(p1):
    cfg = toric_config(p1, pl(p1, ((0,), 0)), 2)
    I = config_to_flag(cfg)
    assert I.N == 2 and I.is_trivial_syntax()


def test_cosupport(p1):
    X = PolarizedToric(projective_space_fan(2), [0, 0, 1])
    I = MonomialFlagIdeal(1, [[(1, 0, 0), (0, 1, 0)]])
    assert cosupport_cones(X, I) == [(0, 1)]
    assert support_dimension(X, I) == 0
    assert support_dimension(X, MonomialFlagIdeal(1, [[(1, 0, 0)]])) == 1
    assert support_dimension(X, MonomialFlagIdeal(2, [[], [(1, 0, 0)]])) == 2


# -- properties ---------------------------------------------------------------------

exps = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))


@given(st.lists(exps, min_size=1, max_size=3), st.integers(1, 2))
@settings(max_examples=25, deadline=None)
def test_exceptional_data_signs(gens, N):
    X = PolarizedToric(projective_space_fan(2), [0, 0, 1])
    levels = [gens] + [gens] * (N - 1)
    try:
        B = flag_blowup(X, MonomialFlagIdeal(N, levels))
    except TrivialFlag:
        return
    ambient = product_fan(X.fan, projective_space_fan(1))
    for i, kind in enumerate(B.kinds):
        if kind != "exceptional":
            continue
        lam, w = B.ray_data[i]
        assert B.E.coeffs[i] > 0
        assert w >= 0
        a = B._discrepancy(i)
        assert a >= 0
        assert a == discrepancy(B.fan.rays[i], ambient)
    for e in B.exceptional:
        assert e["c"] > 0 and e["b"] >= 0 and e["a"] >= 0
    # E is Q-Cartier on the refined fan
    B.E.cartier_data()
    if B.semi_ample:
        assert is_nef(B.L * 1 - B.E + B.F * N)


def test_required_r(p1):
    assert required_r(toric_config(p1, pl(p1, ((0,), 0), ((2,), -1)), 1)) == 2
    assert required_r(toric_config(p1, pl(p1, ((1,), 0)), 1)) == 1
    assert required_r(toric_config(p1, pl(p1, ((0,), 0), ((3,), -1)), 2, 2)) == 6
