import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from simulqkd.phase_space import ParameterError, SystemParams
from simulqkd.security import (
    NumericalDomainError,
    SecurityInputs,
    chi_terms,
    g_entropy,
    holevo_bound,
    key_rate,
    link_key_rate,
    mutual_information,
    rate_curve,
    symplectic_terms,
    zero_crossing,
)

FIG5 = SystemParams(V_A=4.0, gamma=0.2, eta=0.5, nu_el=0.1, eps0=0.01, f=0.95)
# 50-digit evaluation of tests/oracles.key_rate(5, 0.5, 0.01, 0.5, 0.1, 0.95)
GOLDEN_CHI_BE = 0.30516679964394347
GOLDEN_I_AB = 0.46566357234881183
GOLDEN_R = 0.13721359408742774


def test_chi_terms_examples():
    assert chi_terms(SecurityInputs(5, 1.0, 0.0, 1.0, 0.0)) == pytest.approx((0, 0, 0), abs=1e-15)
    assert chi_terms(SecurityInputs(5, 0.5, 0.01, 0.5, 0.1)) == pytest.approx((1.01, 1.2, 3.41))
    assert chi_terms(SecurityInputs(5, 0.1, 0.0, 1.0, 0.0)) == pytest.approx((9, 0, 9))


def test_inputs_validation():
    with pytest.raises(ParameterError):
        SecurityInputs(5, 0.0, 0.0, 1.0, 0.0)
    with pytest.raises(ParameterError):
        SecurityInputs(5, 0.5, 0.0, 0.0, 0.0)
    with pytest.raises(ParameterError):
        SecurityInputs(0.5, 0.5, 0.0, 1.0, 0.0)


def test_mutual_information_examples():
    assert mutual_information(SecurityInputs(5, 1.0, 0.0, 1.0, 0.0)) == pytest.approx(0.5 * math.log2(5), abs=1e-12)
    assert mutual_information(SecurityInputs(1, 0.3, 0.2, 0.5, 0.1)) == 0.0
    assert mutual_information(SecurityInputs(5, 0.5, 0.01, 0.5, 0.1)) == pytest.approx(0.4656, abs=1e-4)


def test_g_entropy():
    assert g_entropy(0.0) == 0.0
    assert g_entropy(1.0) == pytest.approx(2.0)
    with pytest.raises(NumericalDomainError):
        g_entropy(-0.1)


@given(x=st.floats(0, 1e4), dx=st.floats(1e-3, 10))
def test_g_nonnegative_increasing(x, dx):
    assert g_entropy(x) >= 0
    assert g_entropy(x + dx) > g_entropy(x)


def test_identity_channel_leaks_nothing():
    chi, lams = holevo_bound(SecurityInputs(5, 1.0, 0.0, 1.0, 0.0))
    assert abs(chi) < 1e-9
    assert lams[4] == 1.0


def test_holevo_golden_value():
    inputs = SecurityInputs(5, 0.5, 0.01, 0.5, 0.1, 0.95)
    report = key_rate(inputs)
    assert report.chi_BE == pytest.approx(GOLDEN_CHI_BE, abs=1e-6)
    assert report.I_AB == pytest.approx(GOLDEN_I_AB, abs=1e-6)
    assert report.R == pytest.approx(GOLDEN_R, abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(
    V_A=st.floats(0.5, 40),
    T=st.floats(1e-4, 1.0),
    eps=st.floats(0, 0.5),
    eta=st.floats(0.2, 1.0),
    nu=st.floats(0, 0.5),
)
def test_matches_arbitrary_precision_oracle(V_A, T, eps, eta, nu):
    inputs = SecurityInputs(V_A + 1, T, eps, eta, nu, 0.95)
    R, chi, I, _ = oracles.key_rate(V_A + 1, T, eps, eta, nu, 0.95)
    report = key_rate(inputs)
    assert report.chi_BE == pytest.approx(float(chi), abs=1e-7)
    assert report.I_AB == pytest.approx(float(I), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(
    V_A=st.floats(0.1, 50),
    T=st.floats(1e-4, 1.0),
    eps=st.floats(0, 1.0),
    eta=st.floats(0.1, 1.0),
    nu=st.floats(0, 1.0),
)
def test_symplectic_identities(V_A, T, eps, eta, nu):
    A, B, C, D, lams = symplectic_terms(SecurityInputs(V_A + 1, T, eps, eta, nu))
    l1, l2, l3, l4, l5 = lams
    assert l1**2 + l2**2 == pytest.approx(A, rel=1e-9)
    assert l1**2 * l2**2 == pytest.approx(B, rel=1e-9)
    assert l3**2 + l4**2 == pytest.approx(C, rel=1e-9)
    assert l3**2 * l4**2 == pytest.approx(D, rel=1e-9)
    assert min(l1, l2, l3, l4) >= 1 - 1e-9
    assert l5 == 1.0
    chi, _ = holevo_bound(SecurityInputs(V_A + 1, T, eps, eta, nu))
    assert chi >= -1e-9


def test_report_consistency():
    r = key_rate(SecurityInputs(5, 0.3, 0.05, 0.6, 0.05, 0.9))
    assert r.R == 0.9 * r.I_AB - r.chi_BE


def test_unphysical_inputs_raise():
    inputs = SecurityInputs(5, 0.5, 0.0, 1.0, 0.0)
    object.__setattr__(inputs, "eps", -3.0)  # bypass validation
    with pytest.raises(NumericalDomainError):
        symplectic_terms(inputs)


def test_near_identity_channel_is_well_conditioned():
    for T in (1.0, 1 - 1e-16, 1 - 1e-12, 1 - 1e-8):
        lams = symplectic_terms(SecurityInputs(2.0, T, 0.0, 1.0, 0.0))[4]
        assert min(lams) >= 1.0
        assert holevo_bound(SecurityInputs(2.0, T, 0.0, 1.0, 0.0))[0] >= -1e-12


def test_positive_rate_at_25_km():
    assert link_key_rate(FIG5.replace(L=25.0, sigma_phi=1e-5)).R > 0


def test_overwhelming_noise_kills_key():
    assert key_rate(SecurityInputs(5, 10 ** (-0.5), 10.0, 0.5, 0.1, 0.95)).R < 0


def test_rate_ordered_by_phase_noise():
    lengths = np.arange(0, 61, 2.0)
    worst = rate_curve(FIG5.replace(sigma_phi=1e-3), lengths)
    best = rate_curve(FIG5.replace(sigma_phi=1e-6), lengths)
    assert np.all(best >= worst)


@settings(max_examples=40, deadline=None)
@given(L=st.floats(0, 80), eps=st.floats(0, 0.2), d=st.floats(0.001, 0.1), nu=st.floats(0, 0.3))
def test_rate_monotone_in_excess_noise(L, eps, d, nu):
    T = 10 ** (-0.02 * L)
    r = key_rate(SecurityInputs(5, T, eps, 0.5, nu, 0.95)).R
    assert key_rate(SecurityInputs(5, T, eps + d, 0.5, nu, 0.95)).R <= r + 1e-12


def test_trusted_noise_can_raise_marginal_rate():
    # near the zero-rate boundary extra trusted detector noise helps slightly
    T = 10 ** (-0.66)
    r0 = key_rate(SecurityInputs(5, T, 0.125, 0.5, 0.0, 0.95)).R
    r1 = key_rate(SecurityInputs(5, T, 0.125, 0.5, 0.1, 0.95)).R
    assert 0 < r0 < r1 < 0.002


@pytest.mark.parametrize("sigma_phi", [1e-3, 1e-4, 1e-5, 1e-6])
def test_rate_monotone_in_detector_noise_where_positive(sigma_phi):
    for L in range(0, 101, 5):
        rates = [link_key_rate(FIG5.replace(L=float(L), sigma_phi=sigma_phi, nu_el=nu)).R for nu in (0.0, 0.05, 0.1, 0.2, 0.3)]
        for a, b in zip(rates, rates[1:]):
            if a > 0:
                assert b <= a + 1e-12


def test_rate_monotone_in_length_at_fixed_excess():
    rates = [key_rate(SecurityInputs(5, 10 ** (-0.02 * L), 0.02, 0.5, 0.1, 0.95)).R for L in range(0, 121)]
    assert all(b <= a + 1e-12 for a, b in zip(rates, rates[1:]))


def test_zero_crossing_none_when_always_positive():
    assert zero_crossing(FIG5.replace(sigma_phi=0.0, eps0=0.0), L_max=20.0) is None


def test_zero_crossing_zero_when_never_positive():
    assert zero_crossing(FIG5.replace(eps0=5.0)) == 0.0
