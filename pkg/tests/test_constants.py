import math

import mpmath as mp
import pytest
from hypothesis import assume, given, settings, strategies as st

from repi import constants as C


def mp_alpha(r):
    """Independent oracle: F/(F - L) at c = (1 - r)/(2r) in 40-digit arithmetic."""
    mp.mp.dps = 40
    r = mp.mpf(r)
    s = (1 - r) / r
    c = s / 2
    F = s * mp.log(s) - 2 * c * mp.log(c)
    L = (1 + s) * mp.log(1 + s) - 2 * (1 + c) * mp.log(1 + c)
    return float(F / (F - L)), float(F / (F + L))


@pytest.mark.parametrize("r", [0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.999])
def test_alpha_beta_against_high_precision_oracle(r):
    a, b = mp_alpha(r)
    assert C.alpha(r) == pytest.approx(a, rel=1e-13)
    assert C.beta(r) == pytest.approx(b, rel=1e-13)
    assert C.gamma(r, 2) == pytest.approx(b, rel=1e-13)


def test_alpha_frozen_values():
    # frozen from mp_alpha
    frozen = {0.3: (1.6942802540805502, 0.7093311005903463), 0.5: (1.3247006966389716, 0.803140279884403),
              0.7: (1.1467438846987494, 0.8865517802560267)}
    for r, (a, b) in frozen.items():
        assert C.alpha(r) == pytest.approx(a, rel=1e-13)
        assert C.beta(r) == pytest.approx(b, rel=1e-13)


def test_alpha_above_one_and_limits():
    for r in (1e-4, 0.1, 0.5, 0.9):
        assert C.alpha(r) > 1
    assert C.alpha(1 - 1e-6) == pytest.approx(1.0, abs=1e-4)
    assert C.beta(1 - 1e-6) == pytest.approx(1.0, abs=1e-4)
    assert C.beta(1e-6) == pytest.approx(0.5, abs=1e-4)
    with pytest.raises(ValueError):
        C.alpha(1.0)
    with pytest.raises(ValueError):
        C.beta(0.0)


def test_bound_ratio_limits():
    assert C.bound_ratio(1e-4) == pytest.approx(0.5, abs=0.02)
    assert C.bound_ratio(1 - 1e-6) == pytest.approx(math.log(2) / (2 * 0.5772156649015329), abs=1e-4)
    lo, hi = C.alpha_opt_bounds(0.5)
    assert C.bound_ratio(0.5) == pytest.approx(C.critical_exponent(0.5) / C.alpha(0.5), rel=1e-14)
    assert lo <= hi


def test_critical_exponent_value():
    r = 0.5
    expect = (1 - r) * math.log(2) / (2 * math.lgamma(1.5) + 2 * r * math.log(2))
    assert C.critical_exponent(r) == pytest.approx(expect, rel=1e-15)
    assert C.critical_exponent(r) < C.alpha(r)


def test_young_constant():
    # c_m = m^{1/m} / |m'|^{1/m'}
    m = 0.5
    assert C.young_c(m) == pytest.approx(0.25 / 1.0, rel=1e-14)
    assert C.young_c(2.0) == pytest.approx(1.0, rel=1e-14)
    assert C.young_c(3.0) == pytest.approx(3 ** (1 / 3) / 1.5 ** (2 / 3), rel=1e-14)
    with pytest.raises(ValueError):
        C.young_c(1.0)


def test_triples():
    t = C.xy_to_triple(1.0, 2.0)
    assert (t.p, t.q, t.r) == pytest.approx((0.5, 1 / 3, 0.25))
    assert t.admissible and t.x == pytest.approx(1.0) and t.y == pytest.approx(2.0)
    assert C.triple_from_pq(0.5, 0.5).r == pytest.approx(1 / 3)
    with pytest.raises(C.InadmissibleTriple):
        C.ExponentTriple(0.5, 0.5, 0.5).validate()
    with pytest.raises(C.InadmissibleTriple):
        C.triple_from_pq(0.5, 1.0)
    with pytest.raises(ValueError):
        C.xy_to_triple(0.0, 1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_A_const_two_forms_agree(x, y):
    t = C.xy_to_triple(x, y)
    assume(t.admissible)
    assert C.log_A_const(t) == pytest.approx(C.log_A_xy(x, y), rel=1e-9, abs=1e-12)
    assert C.log_A_xy(x, y) > 0


def test_c_opt_bounds_and_crk():
    r = 0.5
    lo, hi = C.c_opt_bounds(r)
    assert (lo, hi) == pytest.approx((math.e / 4, math.pi / 4))
    vals = [C.c_rk_lower(r, k) for k in (1, 2, 3, 10, 100, 10**4)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert all(v > lo for v in vals)
    # gap to the limit is about e r^{1/(1-r)} / (2 k |r'|)
    k = 10**4
    gap = C.c_rk_lower(r, k) - lo
    assert gap == pytest.approx(lo / (2 * k), rel=1e-3)


def test_bundle():
    b = C.constant_bundle(0.5, k=3)
    d = b.to_dict()
    assert d["alpha"] == C.alpha(0.5)
    assert d["c_rk_lower"] == C.c_rk_lower(0.5, 3)
    assert b.gamma(1) == pytest.approx(2 * C.beta(0.5))
    assert C.constant_bundle(0.3).c_rk_lower is None
