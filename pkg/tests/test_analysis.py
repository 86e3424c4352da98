from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import masks, ones, with_sum_rules
from subdivkit import catalog as C
from subdivkit.analysis import (
    linear_phase_check,
    moments,
    shift_parameter,
    sm2,
    sminf_lower_bound,
    smoothness_report,
    spatial_sum_rule_check,
    sum_rule_factorization,
    sum_rule_order,
)
from subdivkit.errors import ResourceLimitError
from subdivkit.seqalg import FiniteSequence, Mask, backward_difference, convolve, iterated_mask


def test_hat_factorization():
    f = sum_rule_factorization(C.hat())
    assert f.J == 2
    assert f.b == FiniteSequence([F(1, 4)], -1)


def test_sum_rule_orders_of_fixtures():
    want = {"hat": 2, "ex4M2sr2d7": 2, "ex5_J2": 2, "ex5_J3_t7/256": 3, "ex5_J5": 5,
            "ex6_J2": 2, "ex6_J3": 3, "ex6_J5": 5}
    for name, J in want.items():
        assert sum_rule_order(C.get(name)) == J, name


def test_moments_and_shift():
    a = C.ex4M2sr2d7()
    assert moments(a, 1) == [1, F(1, 7)]
    assert shift_parameter(a) == F(1, 7)
    assert shift_parameter(C.ex5_J2()) == F(1, 4)


def test_symmetric_shift_from_center():
    for name in ("hat", "ex5_J2", "ex5_J3_t7/256", "ex6_J2", "ex6_J3"):
        a = C.get(name)
        l, h = a.support
        assert shift_parameter(a) == F(l + h, 2 * (a.dilation - 1))


def test_linear_phase_for_symmetric_masks():
    r = linear_phase_check(C.ex5_J3(F(7, 256)))
    assert r.ok


def test_sm2_hat_is_three_halves():
    s, lam = sm2(C.hat())
    assert s == pytest.approx(1.5, abs=1e-12)
    assert abs(lam) == pytest.approx(1 / 16, abs=1e-12)


def test_sm2_quadratic_bspline():
    s, _ = sm2(C.quadratic_bspline())
    assert s == pytest.approx(2.5, abs=1e-9)


def test_hat_coset_bound_by_hand():
    assert sminf_lower_bound(C.hat(), 1) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    "name,value",
    [
        ("ex4M2sr2d7", 1.296171),
        ("ex4M2C1_t0", 1.041231),
        ("ex4M2C1_t-3/16", 1.743484),
        ("ex5_J2", 1.393267),
        ("ex5_J3_t5/144", 2.173176),
        ("ex5_J3_t7/256", 2.469368),
        ("ex6_J2", 1.419518),
        ("ex6_J3", 2.264759),
        ("ex6_J5", 3.102952),
    ],
)
def test_sm2_reference_values(name, value):
    assert sm2(C.get(name))[0] == pytest.approx(value, abs=1e-4)


def test_report_certified_bound():
    rep = smoothness_report(C.ex5_J3(F(7, 256)), n_max=3)
    assert rep.sr == 3
    assert rep.sminf_lower[3] == pytest.approx(2.119867, abs=1e-4)
    assert rep.certified_sminf >= rep.sm2 - 0.5


def test_resource_cap(monkeypatch):
    monkeypatch.setenv("SUBDIVKIT_MAX_COEFFS", "100")
    with pytest.raises(ResourceLimitError):
        sminf_lower_bound(C.ex5_J5(), 6)


def test_float_mask_factorization():
    a = C.ex2_masks(2)[0]
    assert sum_rule_order(a) == 4


@given(masks())
def test_sum_rule_roundtrip(data):
    a, J, _ = data
    f = sum_rule_factorization(a)
    assert f.J >= J
    assert f.reconstruct() == a.seq
    # the quotient carries no further factor
    assert sum_rule_order(Mask(f.b, a.dilation)) == 0


@given(masks(normalized=False))
def test_spatial_vs_symbol_sum_rules(data):
    a, _, _ = data
    J = sum_rule_order(a)
    assert spatial_sum_rule_check(a, J)
    if a.total() != 0:
        assert not spatial_sum_rule_check(a, J + 1)


def _linf(seq):
    return max((abs(c) for c in seq.coeffs), default=F(0))


@given(masks(max_J=3, max_b=3), st.integers(1, 5))
def test_norm_equivalence_inf(data, n):
    a, J, b = data
    M = a.dilation
    fact = sum_rule_factorization(a)
    J = fact.J
    b = fact.b
    A = iterated_mask(a, n)
    B = iterated_mask(Mask(b, M), n) if not b.is_zero else b
    lhs = _linf(backward_difference(A, J))
    nB = _linf(B)
    N = 1 + max(abs(k) for seq in (a.seq, b, FiniteSequence([1], 0)) for k in seq.support)
    assert F(1, 2**J * N**J) * nB <= lhs <= 2**J * nB


@given(masks(max_J=3, max_b=3))
def test_sr_bounds_sm2(data):
    a, _, _ = data
    if sum_rule_order(a) == 0:
        return
    s, _ = sm2(a)
    if math.isfinite(s):
        assert sum_rule_order(a) >= s - 1e-9
