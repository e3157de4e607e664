"""Airy evaluation, zeros, and the continuous phase.

The zero tests are anchored to an oracle implemented right here from the
Maclaurin series of Ai plus plain bisection, so they do not depend on any
code path in the package itself.
"""

import cmath
import math

import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from qlev.airy import (
    AiryZeroTable,
    airy_pair,
    airy_phase,
    airy_phase_complex,
    airy_phase_derivative,
    airy_zero,
    airy_zero_table,
    ci_pair,
)
from qlev.errors import DomainTooLarge, Overflow

# ---------------------------------------------------------------------------
# oracle: Maclaurin series of Ai and bisection for its zeros
# ---------------------------------------------------------------------------

_C1 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
_C2 = 3.0 ** (-1.0 / 3.0) / math.gamma(1.0 / 3.0)


def _ai_series(x: float) -> float:
    """Ai(x) by its Maclaurin series; plenty of terms for |x| <= 9."""
    f_term, g_term = 1.0, x
    f_sum, g_sum = f_term, g_term
    x3 = x * x * x
    for k in range(1, 60):
        f_term *= x3 / ((3 * k) * (3 * k - 1))
        g_term *= x3 / ((3 * k + 1) * (3 * k))
        f_sum += f_term
        g_sum += g_term
    return _C1 * f_sum - _C2 * g_sum


def _zero_by_bisection(lo: float, hi: float) -> float:
    flo = _ai_series(-lo)
    assert flo * _ai_series(-hi) < 0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = _ai_series(-mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


ORACLE_ZEROS = {
    1: _zero_by_bisection(2.0, 3.0),
    2: _zero_by_bisection(4.0, 4.5),
    3: _zero_by_bisection(5.0, 6.0),
}


# ---------------------------------------------------------------------------
# zeros
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_first_zeros_match_series_oracle(n):
    assert airy_zero(n) == pytest.approx(ORACLE_ZEROS[n], abs=1e-8)


def test_zeros_match_scipy():
    # scipy's ai_zeros carries ~1e-11 error of its own (truncated asymptotics)
    want = -scipy.special.ai_zeros(30)[0]
    for n in range(1, 31):
        assert airy_zero(n) == pytest.approx(want[n - 1], rel=1e-10)


def test_zeros_match_mpmath_when_available():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 30
    for n in (1, 2, 5, 12, 25):
        want = float(-mpmath.airyaizero(n))
        assert airy_zero(n) == pytest.approx(want, rel=5e-15)


def test_zero_definition_and_ordering():
    table = airy_zero_table(12)
    assert len(table) == 12
    prev = 0.0
    for n in range(1, 13):
        lam = table[n]
        assert lam > prev
        prev = lam
        assert abs(airy_pair(-lam).ai) < 1e-13


def test_zero_table_validation():
    with pytest.raises(ValueError):
        AiryZeroTable(zeros=(2.3, 2.2))
    with pytest.raises(IndexError):
        airy_zero_table(3)[4]
    with pytest.raises(ValueError):
        airy_zero(0)


# ---------------------------------------------------------------------------
# function values
# ---------------------------------------------------------------------------


def test_values_match_scipy_on_real_axis():
    for x in [-8.5, -5.0, -1.0, 0.0, 0.5, 2.0, 7.0, 30.0]:
        got = airy_pair(complex(x, 0.0))
        ai, aip, bi, bip = scipy.special.airy(x)
        assert got.ai.real == pytest.approx(ai, rel=1e-12, abs=1e-300)
        assert got.bi.real == pytest.approx(bi, rel=1e-12)
        assert got.ai_prime.real == pytest.approx(aip, rel=1e-12, abs=1e-300)
        assert got.bi_prime.real == pytest.approx(bip, rel=1e-12)


def test_values_match_scipy_complex():
    for z in [1.0 + 1.0j, -3.0 + 0.7j, 4.0 - 2.0j, -7.5 - 0.2j]:
        got = airy_pair(z)
        ai, aip, bi, bip = scipy.special.airy(z)
        assert got.ai == pytest.approx(ai, rel=1e-11)
        assert got.bi == pytest.approx(bi, rel=1e-11)
        assert got.ai_prime == pytest.approx(aip, rel=1e-11)
        assert got.bi_prime == pytest.approx(bip, rel=1e-11)


@settings(max_examples=120, deadline=None)
@given(
    st.floats(-30.0, 20.0),
    st.floats(-8.0, 8.0),
)
def test_wronskian_identity(re, im):
    v = airy_pair(complex(re, im))
    # cancellation floor: the Wronskian is an O(1) difference of products
    # that grow exponentially in |z|^{3/2}, so tolerance scales with them
    scale = max(1.0, abs(v.ai * v.bi_prime) + abs(v.ai_prime * v.bi))
    assert abs(v.wronskian() - 1.0 / math.pi) < 1e-12 * scale


def test_wronskian_absolute_where_functions_are_tame():
    for z in [-8.0 + 0.0j, -3.0 + 1.0j, 0.0j, 2.0 - 1.5j, 6.0 + 0.0j]:
        v = airy_pair(z)
        assert abs(v.wronskian() - 1.0 / math.pi) < 1e-12


def test_ci_pair_consistent_with_airy_pair():
    for z in [0.3 + 0.01j, -4.0 + 0.05j, -9.0 - 0.03j, 2.0 + 3.0j]:
        v = airy_pair(z)
        c = ci_pair(z)
        assert c.ci_plus == pytest.approx(v.ai + 1j * v.bi, rel=1e-11)
        assert c.ci_minus == pytest.approx(v.ai - 1j * v.bi, rel=1e-11)
        assert c.ci_plus_prime == pytest.approx(v.ai_prime + 1j * v.bi_prime, rel=1e-11)
        assert c.ci_minus_prime == pytest.approx(v.ai_prime - 1j * v.bi_prime, rel=1e-11)


def test_domain_guards():
    with pytest.raises(DomainTooLarge):
        airy_pair(2e4)
    with pytest.raises(Overflow):
        airy_pair(150.0)  # Bi(150) is far beyond double range
    with pytest.raises(DomainTooLarge):
        airy_phase(-2e4)


# ---------------------------------------------------------------------------
# continuous phase
# ---------------------------------------------------------------------------


def test_phase_anchor_values():
    assert airy_phase(0.0) == pytest.approx(math.pi / 6.0, abs=1e-13)
    for n in range(1, 11):
        assert airy_phase(-airy_zero(n)) == pytest.approx(n * math.pi, abs=1e-10)


def test_phase_decays_for_positive_argument():
    # theta ~ exp(-4/3 x^{3/2})/2 side: tiny but positive
    assert 0.0 < airy_phase(3.0) < 1e-3
    assert airy_phase(8.0) < 1e-12


def test_phase_continuous_at_switchover():
    # the unwinding strategy changes at x = -2
    lo = airy_phase(-2.0 - 1e-9)
    hi = airy_phase(-2.0 + 1e-9)
    assert abs(lo - hi) < 1e-7


def test_phase_monotone_decreasing():
    xs = [(-25.0 + 0.37 * i) for i in range(80)]
    vals = [airy_phase(x) for x in xs]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_phase_derivative_matches_finite_difference():
    for x in [-9.3, -3.0, -0.5, 1.2]:
        h = 1e-6
        fd = (airy_phase(x + h) - airy_phase(x - h)) / (2.0 * h)
        assert airy_phase_derivative(x) == pytest.approx(fd, rel=1e-7)
        assert airy_phase_derivative(x) < 0.0


def test_phase_derivative_at_zero():
    # (Ai^2 + Bi^2)(0) = Ai(0)^2 + Bi(0)^2 with Bi(0) = sqrt(3) Ai(0)
    ai0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
    want = -1.0 / (math.pi * 4.0 * ai0 * ai0)
    assert airy_phase_derivative(0.0) == pytest.approx(want, rel=1e-12)


def test_complex_phase_reduces_to_real_phase():
    for x in [-7.7, -2.5, 0.0, 1.5]:
        got = airy_phase_complex(complex(x, 0.0))
        assert got.imag == 0.0
        assert got.real == pytest.approx(airy_phase(x), abs=1e-12)


def test_complex_phase_conjugate_symmetry():
    for z in [-5.0 + 0.004j, -12.0 + 0.002j, 1.0 + 0.1j]:
        up = airy_phase_complex(z)
        dn = airy_phase_complex(z.conjugate())
        assert dn == pytest.approx(up.conjugate(), rel=1e-10)


def test_complex_phase_matches_cauchy_riemann():
    # theta is analytic: vertical and horizontal derivatives must agree
    z = -6.0 + 0.01j
    h = 1e-5
    horiz = (airy_phase_complex(z + h) - airy_phase_complex(z - h)) / (2 * h)
    vert = (airy_phase_complex(z + 1j * h) - airy_phase_complex(z - 1j * h)) / (2j * h)
    assert horiz == pytest.approx(vert, rel=1e-6)


def test_complex_phase_domain_guard():
    with pytest.raises(DomainTooLarge):
        airy_phase_complex(complex(0.0, 11.0))


def test_phase_winding_against_independent_count():
    # at x = -9 the winding must equal the number of zeros above x
    x = -9.0
    n_above = sum(1 for n in range(1, 20) if airy_zero(n) < -x)
    theta = airy_phase(x)
    v = airy_pair(complex(x, 0.0))
    reduced = math.atan2(v.ai.real, v.bi.real) % math.pi
    assert theta == pytest.approx(n_above * math.pi + reduced, abs=1e-10)


def test_phase_exponential_identity():
    # e^{2 i theta} = -Ci-/Ci+ pointwise, independent of winding
    for x in [-11.0, -4.0, -1.0, 0.7]:
        v = airy_pair(complex(x, 0.0))
        lhs = cmath.exp(2j * airy_phase(x))
        rhs = -(v.ai - 1j * v.bi) / (v.ai + 1j * v.bi)
        assert lhs == pytest.approx(rhs, rel=1e-10)
