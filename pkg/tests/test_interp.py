from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import masks, sequences
from subdivkit import catalog as C
from subdivkit.analysis import linear_phase_check, shift_parameter, sum_rule_order
from subdivkit.errors import InadmissibleError
from subdivkit.interp import (
    admissible_params,
    drift_check,
    drift_formula,
    interpolation_residuals,
    ns_step_check,
    polynomial_reproduction_check,
    phi_identity_check,
    verify_interpolatory,
)
from subdivkit.seqalg import FiniteSequence, Mask, subdivide


@pytest.mark.parametrize(
    "s,M,want",
    [
        (F(1, 2), 2, (1, 1, 1)),
        (F(1, 3), 2, (0, 2, 1)),
        (F(1, 7), 2, (0, 3, 1)),
        (F(1, 4), 3, (0, 2, 2)),
        (F(0), 2, (0, 1, 0)),
    ],
)
def test_admissible_params(s, M, want):
    adm = admissible_params(s, M)
    assert (adm.m_s, adm.n_s, adm.gamma) == want


def test_admissible_ex6():
    a = C.ex6_J2()
    adm = admissible_params(shift_parameter(a), 4)
    assert (adm.m_s, adm.n_s, adm.gamma) == (1, 1, 2)


@pytest.mark.parametrize(
    "name,n_s,gamma",
    [("hat", 1, 0), ("ex4M2C1_t0", 2, 1), ("ex4M2sr2d7", 3, 1), ("ex5_J2", 2, 2),
     ("ex5_J3_t7/256", 2, 2), ("ex5_J5", 2, 2)],
)
def test_coset_identity_exact(name, n_s, gamma):
    a = C.get(name)
    adm = admissible_params(shift_parameter(a), a.dilation)
    assert (adm.m_s, adm.n_s, adm.gamma) == (0, n_s, gamma)
    _, _, _, _, r14 = interpolation_residuals(a, adm)
    assert r14 == 0 and isinstance(r14, F)


def test_ex6_first_mask_identities():
    a = C.ex6_J2()
    adm = admissible_params(shift_parameter(a), 4)
    w, window, r12, r13, _ = interpolation_residuals(a, adm)
    assert r12 == 0 and r13 == 0
    assert w == FiniteSequence([F(1, 2), F(1, 2)], -1)
    assert window[0] <= -1 and window[1] >= 0


@pytest.mark.parametrize("name", list(C.STATIONARY))
def test_fixtures_verified_m0(name):
    cert = verify_interpolatory(C.get(name), m=0)
    assert cert.verdict.kind == "verified", str(cert.verdict)


def test_ex5_J2_verified_c1():
    cert = verify_interpolatory(C.ex5_J2(), m=1, n_max=4)
    assert cert.verdict.kind == "verified"
    assert cert.admissibility.s_a == F(1, 4)


def test_unconfirmed_when_bound_too_small():
    cert = verify_interpolatory(C.hat(), m=1)
    assert cert.verdict.kind == "unconfirmed"
    assert "unconfirmed" in str(cert.verdict)


def test_non_interpolatory_fails():
    cub = Mask(FiniteSequence([F(1, 16), F(1, 4), F(3, 8), F(1, 4), F(1, 16)], -2), 2)
    cert = verify_interpolatory(cub, m=0)
    assert cert.verdict.kind == "failed"


def test_unnormalized_fails():
    a = Mask(FiniteSequence([F(1, 2), F(1, 2)], 0), 2)
    assert verify_interpolatory(a).verdict.kind == "failed"


def test_ns_step_check():
    v = FiniteSequence([F(3), F(-1), F(7, 2), F(0), F(5)], -2)
    assert ns_step_check(C.hat(), 0, v, q=3)
    a = C.ex4M2C1(F(0))
    for q in (1, 2):
        assert ns_step_check(a, F(1, 3), v, q=q)
    cub = Mask(FiniteSequence([F(1, 16), F(1, 4), F(3, 8), F(1, 4), F(1, 16)], -2), 2)
    assert not ns_step_check(cub, 0, v)
    with pytest.raises(InadmissibleError):
        ns_step_check(C.hat(), F(1, 2), v)


def test_polynomial_reproduction_examples():
    hat = C.hat()
    out = subdivide(hat, FiniteSequence([F(k) for k in range(-5, 6)], -5), 1)
    for j in range(-8, 9):
        assert out[j] == F(j, 2)
    a = C.ex4M2sr2d7()
    out = subdivide(a, FiniteSequence([F(k) for k in range(-6, 7)], -6), 1)
    for j in range(-8, 9):
        assert out[j] == F(j, 2) - F(1, 14)


@pytest.mark.parametrize("name", ["hat", "ex4M2sr2d7", "ex5_J3_t7/256", "ex5_J5", "ex6_J3"])
def test_polynomial_reproduction_fixtures(name):
    a = C.get(name)
    assert linear_phase_check(a).ok
    assert polynomial_reproduction_check(a, sum_rule_order(a) - 1, n=2)


def test_degree_must_be_below_sr():
    with pytest.raises(ValueError):
        polynomial_reproduction_check(C.hat(), 2)


def test_phi_identity_by_hand():
    assert phi_identity_check(C.hat(), n=1)
    assert phi_identity_check(C.ex5_J2(), n=2)


def test_certificates_monotone_in_m():
    a = C.ex5_J3(F(7, 256))
    kinds = [verify_interpolatory(a, m=m, n_max=3).verdict.kind for m in range(4)]
    first_bad = next((i for i, k in enumerate(kinds) if k != "verified"), len(kinds))
    assert all(k == "verified" for k in kinds[:first_bad])
    assert all(k != "verified" for k in kinds[first_bad:])


@pytest.mark.parametrize("name", ["ex5_J2", "ex5_J3_t7/256", "ex6_J2", "ex6_J3", "hat"])
def test_symmetric_shift_parameter(name):
    a = C.get(name)
    l, h = a.support
    assert shift_parameter(a) == F(l + h, 2 * (a.dilation - 1))


# -- properties ---------------------------------------------------------------


@given(sequences(1, 8))
def test_half_shift_never_verified(seq):
    """No compactly supported continuous 1/2-interpolating function exists for dilation 2."""
    tot = seq.total()
    if tot == 0:
        seq = seq + FiniteSequence([F(1)], seq.start)
        tot = seq.total()
    a = Mask(seq.scale(1 / tot), 2)
    cert = verify_interpolatory(a, F(1, 2), m=0, n_max=2)
    assert cert.verdict.kind != "verified"


@given(masks(max_J=4, max_b=3), st.integers(1, 2), st.data())
def test_sum_rule_polynomial_identity(data, n, draw):
    """``S p = sum_k p(M^{-1}(. - k)) a(k)`` for ``deg p < sr``, checked level by level."""
    a, _, _ = data
    J = sum_rule_order(a)
    if J == 0:
        return
    d = draw.draw(st.integers(0, J - 1))
    M = a.dilation
    l, h = a.support
    W = 3 * (h - l + 1) + 2
    v = FiniteSequence([F(k) ** d for k in range(-W, W + 1)], -W)
    out = subdivide(a, v, 1)
    for x in range(M * (-W + 1) + h, M * (W - 1) + l + 1):
        want = sum((((F(x) - k) / M) ** d * c for k, c in a.seq.items()), F(0))
        assert out[x] == want


@given(masks(max_J=3, max_b=3), st.integers(1, 3))
def test_drift_formula_random(data, n):
    a, _, _ = data
    if sum_rule_order(a) < 2:
        return
    M = a.dilation
    m_a = a.seq.moment(1)
    l, h = a.support
    W = 3 * (h - l + 1) + 2
    v0 = FiniteSequence([F(k) for k in range(-W, W + 1)], -W)
    out = subdivide(a, v0, n)
    Mn = M**n
    span_lo = (h * (Mn - 1)) // (M - 1)
    span_hi = -((-l * (Mn - 1)) // (M - 1))
    for k in range(Mn * (-W + 1) + span_lo, Mn * (W - 1) + span_hi):
        assert out[k] == F(k, Mn) - (1 - F(1, Mn)) * m_a / (M - 1)
        assert out[k] == drift_formula(a, n, k)
    assert drift_check(a, n)


@given(masks(max_J=3, max_b=3), st.integers(1, 2))
def test_linear_reproduction_random(data, n):
    a, _, _ = data
    if sum_rule_order(a) < 2:
        return
    assert polynomial_reproduction_check(a, 1, n=n)
