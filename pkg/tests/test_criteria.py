from fractions import Fraction
from types import SimpleNamespace

import pytest
from hypothesis import given, settings, strategies as st

from kstab.criteria import (CERTIFIED, INCONCLUSIVE, VIOLATED, alpha_upper_bound, aubin_threshold,
                            aubin_twist, check_alpha, check_aubin, check_calabi_yau,
                            check_general_type, check_inequalities)
from kstab.errors import NoExceptionalRays
from kstab.testconfig import MonomialFlagIdeal, flag_blowup
from kstab.toric import PolarizedToric, canonical_divisor, projective_space_fan

F = Fraction


@pytest.fixture
def line():
    return PolarizedToric(projective_space_fan(1), [0, 1])


@pytest.fixture
def plane():
    return PolarizedToric(projective_space_fan(2), [0, 0, 1])


def test_general_type_needs_negative_slope(line):
    fan = line.fan
    res = check_general_type(line, line.L, fan.zero())
    assert res.verdict == VIOLATED and res.witness["mu"] == 2
    # O(1) with T = 0 has a product configuration of DF 0, so it must not certify
    assert check_general_type(line, line.L, fan.divisor([1, 0])).verdict == VIOLATED


def test_general_type_certifies(line):
    res = check_general_type(line, line.L, line.fan.divisor([2, 0]))
    assert res.verdict == CERTIFIED
    assert res.witness["mu"] == -2 and res.witness["nef_slack"] == 0


def test_calabi_yau(line):
    K = canonical_divisor(line.fan)
    res = check_calabi_yau(line, -K, K * F(-1, 2))
    assert res.verdict == CERTIFIED and res.witness["strength"] == "uniform"
    assert check_calabi_yau(line, -K, line.fan.zero()).verdict == INCONCLUSIVE


def test_alpha_requires_nef_twist(line):
    assert check_alpha(line, line.L, line.fan.divisor([-1, 0]), F(1, 2)).verdict == VIOLATED


def test_aubin_examples(plane):
    assert aubin_threshold(2, F(1, 3)) == F(1, 2)
    verdicts = {b: check_aubin(plane, b, F(1, 3)).verdict for b in (F(1, 4), F(1, 2), F(3, 4), 1)}
    assert verdicts == {F(1, 4): CERTIFIED, F(1, 2): CERTIFIED, F(3, 4): INCONCLUSIVE, 1: INCONCLUSIVE}


def test_aubin_twist_endpoints(plane):
    L, T = aubin_twist(plane, 1)
    assert T == plane.fan.zero() and L == -canonical_divisor(plane.fan)
    _, T0 = aubin_twist(plane, 0)
    assert T0 == L * F(1, 2)


@given(st.fractions(min_value=0, max_value=1, max_denominator=12),
       st.fractions(min_value=F(1, 12), max_value=1, max_denominator=12))
@settings(max_examples=40, deadline=None)
def test_aubin_region_matches_threshold(beta, alpha):
    X = PolarizedToric(projective_space_fan(2), [0, 0, 1])
    res = check_aubin(X, beta, alpha)
    assert res.certified == (beta <= aubin_threshold(2, alpha))


def test_upper_bound_never_certifies(line):
    B = flag_blowup(line, MonomialFlagIdeal(1, [[(1, 0)]]))
    ub = alpha_upper_bound(B)
    assert ub == 1
    K = canonical_divisor(line.fan)
    assert check_alpha(line, -K, line.fan.zero(), ub).certified
    assert check_alpha(line, -K, line.fan.zero(), ub, "upper_bound").verdict == INCONCLUSIVE


def test_no_exceptional_rays():
    with pytest.raises(NoExceptionalRays):
        alpha_upper_bound(SimpleNamespace(exceptional=[]))


def test_inequalities_dnc(line):
    B = flag_blowup(line, MonomialFlagIdeal(1, [[(1, 0)]]))
    res = check_inequalities(B)
    assert res.certified
    assert res.witness == {"i[L]": 0, "i[0]": 0, "ii": 1, "iii": 1}


flags2 = st.sampled_from([
    (1, [[(1, 0, 0)]]),
    (1, [[(1, 0, 0), (0, 1, 0)]]),
    (2, [[(2, 0, 0)], [(1, 0, 0)]]),
    (2, [[(1, 1, 0)], [(1, 0, 0), (0, 1, 0)]]),
])


@given(flags2)
@settings(max_examples=8, deadline=None)
def test_inequalities_plane(flag):
    X = PolarizedToric(projective_space_fan(2), [0, 0, 2])
    N, levels = flag
    B = flag_blowup(X, MonomialFlagIdeal(N, levels))
    assert check_inequalities(B, [X.fan.prime(0)]).certified
