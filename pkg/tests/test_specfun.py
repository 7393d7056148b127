import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from spinphase import DomainError
from spinphase.specfun import (
    MLevel,
    SignedLogValue,
    SpinJ,
    beta_fn,
    ln_binomial,
    ln_factorial,
    ln_gamma,
    signed_log_sum,
    wigner_d_m0_pi2,
    wigner_d_pi2,
    wigner_d_pi2_matrix,
    wigner_d_pi2_sum,
)

from oracles import exact_wigner_d_pi2, rotation_pi2_expm


class TestSpinJ:
    @pytest.mark.parametrize("value, twice", [(0, 0), (10, 20), (0.5, 1), ("21/2", 21), ("3", 6)])
    def test_coercion(self, value, twice):
        assert SpinJ.of(value).twice_j == twice

    @pytest.mark.parametrize("value", [-1, 0.3, "1/3"])
    def test_rejects(self, value):
        with pytest.raises(DomainError):
            SpinJ.of(value)

    def test_dimension_and_levels(self):
        j = SpinJ.of("3/2")
        assert j.dim == 4
        np.testing.assert_array_equal(j.m_values, [-1.5, -0.5, 0.5, 1.5])
        assert j.index(0.5) == 2

    def test_invalid_m(self):
        with pytest.raises(DomainError):
            SpinJ.of(1).index(0.5)
        with pytest.raises(DomainError):
            SpinJ.of(1).index(2)


@given(st.floats(min_value=-1e300, max_value=1e300, allow_nan=False))
def test_signed_log_round_trip(x):
    v = SignedLogValue.from_float(x)
    assert v.value == pytest.approx(x, rel=1e-14, abs=0)


def test_signed_log_sum_matches_fsum():
    # the two huge terms cancel exactly; only the compensation keeps the rest
    vals = [1e20, -1e20, 3.0, -2.5, 1e-5]
    assert signed_log_sum(SignedLogValue.from_float(v) for v in vals) == pytest.approx(math.fsum(vals), rel=1e-12)
    assert signed_log_sum([]) == 0.0


class TestLnGamma:
    @pytest.mark.parametrize("x, expected", [(1.0, 0.0), (2.0, 0.0), (6.0, 4.787491742782046)])
    def test_examples(self, x, expected):
        assert ln_gamma(x) == pytest.approx(expected, abs=1e-15)

    def test_against_mpmath(self):
        # 1e-13 absolute.  Past x ~ 210 the result exceeds 1024 and half an ulp
        # is already 1.1e-13, so there the bar is correct rounding instead.
        xs = np.concatenate([np.linspace(0.01, 500, 4001), np.arange(0.5, 500, 0.5)])
        with mpmath.workdps(40):
            for x in xs:
                ref = mpmath.loggamma(mpmath.mpf(float(x)))
                err = abs(float(mpmath.mpf(ln_gamma(float(x))) - ref))
                tol = max(1e-13, 0.501 * float(np.spacing(abs(float(ref)))))
                assert err <= tol, x

    def test_strict_bound_up_to_200(self):
        with mpmath.workdps(40):
            for x in np.linspace(0.01, 200, 2001):
                ref = mpmath.loggamma(mpmath.mpf(float(x)))
                assert abs(float(mpmath.mpf(ln_gamma(float(x))) - ref)) <= 1e-13, x

    @pytest.mark.parametrize("x", [0.0, -1.0, -0.5, math.inf, math.nan])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            ln_gamma(x)


@pytest.mark.parametrize("n, expected", [(0, 0.0), (1, 0.0), (10, 15.104412573075516)])
def test_ln_factorial(n, expected):
    assert ln_factorial(n) == pytest.approx(expected, rel=1e-15, abs=1e-15)


class TestLnBinomial:
    def test_examples(self):
        assert ln_binomial(4, 2) == pytest.approx(math.log(6), rel=1e-15)
        assert ln_binomial(17, 0) == 0.0
        assert ln_binomial(40, 20) == pytest.approx(math.log(137846528820), rel=1e-15)

    def test_exact_integer_oracle(self):
        for n in (1, 7, 100, 999, 1000):
            for k in range(0, n + 1, max(1, n // 37)):
                ref = float(mpmath.log(mpmath.binomial(n, k)))
                assert ln_binomial(n, k) == pytest.approx(ref, rel=1e-12, abs=1e-15)

    @pytest.mark.parametrize("n, k", [(4, 5), (4, -1), (-1, 0)])
    def test_domain(self, n, k):
        with pytest.raises(DomainError):
            ln_binomial(n, k)


class TestBeta:
    def test_examples(self):
        assert beta_fn(1, 1) == pytest.approx(1.0, rel=1e-15)
        assert beta_fn(2, 2) == pytest.approx(1 / 6, rel=1e-15)

    def test_half_integer_against_quadrature(self):
        # algebraic-weight quadrature integrates t^1.5 (1-t)^0.5 without endpoint trouble
        ref, err = quad(lambda t: 1.0, 0, 1, weight="alg", wvar=(1.5, 0.5), epsabs=1e-16, epsrel=1e-14)
        assert beta_fn(2.5, 1.5) == pytest.approx(ref, rel=1e-12)

    @given(st.floats(0.01, 300), st.floats(0.01, 300))
    def test_symmetric_bitwise(self, x, y):
        assert beta_fn(x, y) == beta_fn(y, x)

    @given(st.integers(0, 60), st.integers(0, 60))
    def test_factorial_identity(self, a, b):
        lhs = beta_fn(a + 1, b + 1) * math.factorial(a + b + 1)
        assert lhs == pytest.approx(math.factorial(a) * math.factorial(b), rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            beta_fn(0, 1)


class TestWignerD:
    def test_examples(self):
        assert wigner_d_pi2(0.5, 0.5, 0.5) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        assert wigner_d_pi2(1, 0, 0) == pytest.approx(0.0, abs=1e-15)
        assert wigner_d_pi2(2, 1, 0) == pytest.approx(exact_wigner_d_pi2(4, 2, 0), abs=1e-15)

    @pytest.mark.parametrize("twice_j", range(0, 61, 3))
    def test_exact_rational_agreement(self, twice_j):
        d = wigner_d_pi2_matrix(twice_j / 2)
        for a in range(twice_j + 1):
            for b in range(twice_j + 1):
                ref = exact_wigner_d_pi2(twice_j, 2 * a - twice_j, 2 * b - twice_j)
                assert abs(d[a, b] - ref) <= 1e-12

    @pytest.mark.parametrize("twice_j", [1, 2, 5, 8, 13])
    def test_matches_matrix_exponential(self, twice_j):
        np.testing.assert_allclose(wigner_d_pi2_matrix(twice_j / 2), rotation_pi2_expm(twice_j), atol=1e-12)

    @pytest.mark.parametrize("twice_j", range(0, 101))
    def test_unitarity(self, twice_j):
        d = wigner_d_pi2_matrix(twice_j / 2)
        assert np.max(np.abs(np.sum(d * d, axis=0) - 1)) <= 1e-10

    @pytest.mark.parametrize("twice_j", [3, 10, 31, 64])
    def test_transpose_symmetry(self, twice_j):
        d = wigner_d_pi2_matrix(twice_j / 2)
        tm = np.arange(-twice_j, twice_j + 1, 2)
        sign = (-1.0) ** ((tm[:, None] - tm[None, :]) // 2)
        np.testing.assert_allclose(d, sign * d.T, atol=1e-12, rtol=0)

    def test_direct_sum_agrees_at_small_j(self):
        for twice_j in range(0, 21):
            for tm in range(-twice_j, twice_j + 1, 2):
                for tmp in range(-twice_j, twice_j + 1, 2):
                    direct = wigner_d_pi2_sum(twice_j / 2, tm / 2, tmp / 2)
                    assert direct == pytest.approx(wigner_d_pi2(twice_j / 2, tm / 2, tmp / 2), abs=1e-12)

    def test_invalid_levels(self):
        with pytest.raises(DomainError):
            wigner_d_pi2(1, 0.5, 0)
        with pytest.raises(DomainError):
            wigner_d_pi2(1, 2, 0)


class TestWignerDm0:
    def test_examples(self):
        assert wigner_d_m0_pi2(2, 1) == 0.0
        assert wigner_d_m0_pi2(1, 1) == pytest.approx(exact_wigner_d_pi2(2, 2, 0), abs=1e-15)
        assert wigner_d_m0_pi2(1, 1) ** 2 == pytest.approx(0.5, abs=1e-15)
        assert wigner_d_m0_pi2(0, 0) == 1.0

    @pytest.mark.parametrize("j", [1, 2, 7, 20, 50])
    def test_parity_zero_exact(self, j):
        for m in range(-j, j + 1):
            val = wigner_d_m0_pi2(j, m)
            if (j + m) % 2:
                assert val == 0.0
            else:
                assert val == wigner_d_pi2(j, m, 0)

    def test_requires_integer_j(self):
        with pytest.raises(DomainError):
            wigner_d_m0_pi2(0.5, 0.5)


def test_mlevel():
    assert MLevel.of(-1.5).twice_m == -3
    assert float(MLevel(5)) == 2.5
