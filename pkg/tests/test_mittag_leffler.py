"""Identity, asymptotic, and consistency checks for the Mittag-Leffler evaluator."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import erfcx, rgamma

from fracdiff import mlf, mlf_decay_bound_holds, mlf_neg_batch
from fracdiff.errors import DomainError


def test_reduces_to_exp_on_negative_axis():
    z = np.linspace(-50.0, 0.0, 501)
    err = max(abs(mlf(zi, 1.0) - math.exp(zi)) for zi in z)
    assert err <= 1e-10


def test_half_order_matches_scaled_erfc():
    # E_{1/2}(z) = exp(z^2) erfc(-z) on the negative axis
    z = np.linspace(-5.0, 0.0, 201)
    err = max(abs(mlf(zi, 0.5) - erfcx(-zi)) for zi in z)
    assert err <= 1e-10


def test_second_parameter_exp_identity():
    # E_{1,2}(z) = (e^z - 1)/z
    for zi in np.linspace(-30.0, -1e-3, 97):
        exact = math.expm1(zi) / zi
        assert abs(mlf(zi, 1.0, 2.0) - exact) <= 1e-12 * abs(exact)


def test_leading_asymptotic_ratio():
    for beta in (0.3, 0.5, 0.7, 0.9):
        r = 1e6 * mlf(-1e6, beta) * math.gamma(1.0 - beta)
        assert 0.999 <= r <= 1.001


def _mp_reference(z, beta, a=1.0):
    # Arbitrary-precision defining series.  The alternating terms peak near
    # exp(|z|^(1/beta)), so the working precision must absorb that growth.
    import mpmath

    peak = abs(z) ** (1.0 / beta)
    dps = 40 + int(1.5 * peak / math.log(10.0))
    with mpmath.workdps(dps):
        total = mpmath.mpf(0)
        zz = mpmath.mpf(z)
        term = mpmath.mpf(1)
        # form the gamma argument in mpmath arithmetic: double-precision
        # rounding of beta*k would poison the cancellation at O(exp(peak))
        b = mpmath.mpf(beta)
        aa = mpmath.mpf(a)
        k = 0
        while True:
            c = term / mpmath.gamma(b * k + aa)
            total += c
            k += 1
            term *= zz
            if k > peak / beta + 20 and abs(c) < mpmath.mpf(10) ** (-35):
                break
        return float(total)


@pytest.mark.parametrize("beta,z_far", [(0.35, -6.0), (0.6, -30.0), (0.85, -50.0)])
@pytest.mark.parametrize("a", [1.0, 1.7])
def test_against_high_precision_series(beta, z_far, a):
    for z in np.linspace(z_far, -1.5, 7):
        ref = _mp_reference(z, beta, a)
        assert abs(mlf(z, beta, a) - ref) <= 1e-10 * abs(ref) + 1e-13


def test_series_kernel_seam_continuity():
    # a branch jump would show up in the three-point second difference,
    # which cancels the genuine first-order variation across the seam
    for beta in (0.3, 0.55, 0.8):
        h = 1e-6
        jump = mlf(-1.0 - h, beta) - 2.0 * mlf(-1.0, beta) + mlf(-1.0 + h, beta)
        assert abs(jump) <= 1e-10
        mid = mlf(-1e5, beta)
        jump = mlf(-1e5 - 1.0, beta) - 2.0 * mid + mlf(-1e5 + 1.0, beta)
        assert abs(jump) <= 5e-9 * abs(mid)


def test_value_at_zero_is_one():
    for beta in (0.1, 0.5, 0.99, 1.0):
        assert mlf(0.0, beta) == pytest.approx(1.0, abs=1e-15)


def test_recurrence_in_second_parameter():
    # E_{beta,a+beta}(z) = (E_{beta,a}(z) - 1/Gamma(a)) / z
    for beta, a, z in [(0.6, 1.1, -3.0), (0.45, 0.8, -40.0), (0.8, 1.0, -7.5)]:
        lhs = mlf(z, beta, a + beta)
        rhs = (mlf(z, beta, a) - rgamma(a)) / z
        assert abs(lhs - rhs) <= 1e-10 * max(abs(rhs), 1e-30)


@given(
    beta=st.floats(min_value=0.05, max_value=0.99),
    x=st.floats(min_value=0.0, max_value=1e5),
    factor=st.floats(min_value=1.01, max_value=3.0),
)
def test_positive_and_decreasing_on_negative_axis(beta, x, factor):
    lo = mlf(-(x * factor + 0.01), beta)
    hi = mlf(-x, beta)
    assert 0.0 < lo < hi <= 1.0


def test_batch_matches_scalar_everywhere():
    rng = np.random.default_rng(7)
    w = np.concatenate(
        [
            rng.uniform(0.0, 1.0, 40),
            np.exp(rng.uniform(0.0, np.log(1e5), 120)),
            np.exp(rng.uniform(np.log(1e5), np.log(1e9), 40)),
            [0.0, 1.0, 1e5],
        ]
    )
    for beta in (0.3, 0.7, 0.95, 1.0):
        batch = mlf_neg_batch(w, beta)
        scalar = np.array([mlf(-wi, beta) for wi in w])
        # the tabulated mid range carries a small uniform absolute error
        assert np.max(np.abs(batch - scalar)) <= 5e-12


def test_batch_is_split_invariant():
    w = np.linspace(0.0, 2e5, 257)
    full = mlf_neg_batch(w, 0.7)
    parts = np.concatenate([mlf_neg_batch(w[:100], 0.7), mlf_neg_batch(w[100:], 0.7)])
    assert np.array_equal(full, parts)


def test_decay_bound_helper():
    assert mlf_decay_bound_holds(-10.0, 0.7, 2.0)
    assert mlf_decay_bound_holds(-1e6, 0.7, 2.0)
    assert not mlf_decay_bound_holds(0.0, 0.7, 0.1)
    with pytest.raises(DomainError):
        mlf_decay_bound_holds(1.0, 0.7, 2.0)
    with pytest.raises(DomainError):
        mlf_decay_bound_holds(-1.0, 0.7, 0.0)


def test_domain_validation():
    with pytest.raises(DomainError):
        mlf(-1.0, 0.0)
    with pytest.raises(DomainError):
        mlf(-1.0, 1.2)
    with pytest.raises(DomainError):
        mlf(math.inf, 0.7)
    with pytest.raises(DomainError):
        mlf(-1.0, 0.7, 0.0)
    with pytest.raises(DomainError):
        mlf_neg_batch(np.array([-1.0]), 0.7)
