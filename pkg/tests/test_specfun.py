"""Special-function layer: frozen values, identities, and a
high-precision cross-check of the parabolic cylinder evaluator."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdotspec import specfun
from qdotspec.errors import DomainError, PoleError

# frozen with a 30-digit gamma/Kummer oracle (mpmath) before the main build
LOGGAMMA_QUARTER = 1.28802252469807745737061044022
DIGAMMA_ONE = -0.577215664901532860606512090082
DIGAMMA_HALF = -1.963510026021423479440976333
U_AT_A2_Z0 = 0.810853476171680188736807537087


def test_ln_gamma_basic_values():
    assert specfun.ln_gamma(1.0)[0] == pytest.approx(0.0, abs=1e-14)
    assert specfun.ln_gamma(0.5)[0] == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)
    val, sign = specfun.ln_gamma(0.25)
    assert sign == 1.0
    assert val == pytest.approx(LOGGAMMA_QUARTER, rel=1e-13)


def test_ln_gamma_negative_argument_sign():
    val, sign = specfun.ln_gamma(-0.5)
    # Gamma(-1/2) = -2 sqrt(pi)
    assert sign == -1.0
    assert val == pytest.approx(math.log(2.0 * math.sqrt(math.pi)), rel=1e-13)


def test_ln_gamma_pole():
    for x in (0.0, -1.0, -7.0):
        with pytest.raises(PoleError):
            specfun.ln_gamma(x)


def test_digamma_values_and_recurrence():
    assert specfun.digamma(1.0) == pytest.approx(DIGAMMA_ONE, rel=1e-13)
    assert specfun.digamma(0.5) == pytest.approx(DIGAMMA_HALF, rel=1e-13)
    x = 3.7
    assert specfun.digamma(x + 1.0) - specfun.digamma(x) == pytest.approx(1.0 / x, rel=1e-12)
    with pytest.raises(PoleError):
        specfun.digamma(-3.0)


def test_g_combination_closed_values():
    assert specfun.g_combination(1.0) == pytest.approx(2.0 * math.log(2.0), rel=1e-13)
    assert specfun.g_combination(2.0) == pytest.approx(2.0 - 2.0 * math.log(2.0), rel=1e-13)


def test_g_combination_positive_on_positive_axis():
    for z in np.linspace(0.05, 20.0, 80):
        assert specfun.g_combination(float(z)) > 0.0


def test_hermite_small_values():
    assert specfun.hermite(0, 12.3) == 1.0
    assert specfun.hermite(3, 1.0) == pytest.approx(-4.0, abs=1e-12)
    assert specfun.hermite(2, 0.0) == pytest.approx(-2.0, abs=1e-13)


def test_hermite_derivative_identity_exact():
    # H'_{n+1} = 2(n+1) H_n, checked exactly in rational arithmetic
    def coeffs(n):
        polys = [[Fraction(1)], [Fraction(0), Fraction(2)]]
        for k in range(1, n):
            prev, cur = polys[k - 1], polys[k]
            nxt = [Fraction(0)] * (len(cur) + 1)
            for i, c in enumerate(cur):
                nxt[i + 1] += 2 * c
            for i, c in enumerate(prev):
                nxt[i] -= 2 * k * c
            polys.append(nxt)
        return polys

    polys = coeffs(31)
    for n in range(31):
        deriv = [i * c for i, c in enumerate(polys[n + 1])][1:]
        want = [2 * (n + 1) * c for c in polys[n]]
        deriv += [Fraction(0)] * (len(want) - len(deriv))
        assert deriv == want


def test_hermite_zeros_never_shared_with_successor():
    for n in range(1, 21):
        roots = np.polynomial.hermite.hermroots([0.0] * n + [1.0])
        vals = np.array([specfun.hermite(n + 1, float(r)) for r in roots])
        assert np.all(np.abs(vals) > 1e-10 * np.max(np.abs(vals)))


def test_hermite_overflow_flagged_as_inf():
    assert math.isinf(specfun.hermite(200, 30.0))


def test_oscillator_phi_parity_and_value():
    assert specfun.oscillator_phi(1, 1.0, 0.0) == 0.0
    assert specfun.oscillator_phi(0, 1.0, 0.0) == pytest.approx(
        (1.0 / (2.0 * math.pi)) ** 0.25, rel=1e-14)


def _gl(n, a, b):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def test_oscillator_phi_normalized():
    x, w = _gl(400, -20.0, 20.0)
    phi = specfun.oscillator_phi(0, 1.0, x)
    assert float(np.sum(w * phi * phi)) == pytest.approx(1.0, abs=1e-10)


def test_oscillator_phi_orthonormal_upto_10():
    x, w = _gl(400, -20.0, 20.0)
    table = [specfun.oscillator_phi(n, 1.0, x) for n in range(11)]
    for m in range(11):
        for n in range(m, 11):
            overlap = float(np.sum(w * table[m] * table[n]))
            assert abs(overlap - (1.0 if m == n else 0.0)) <= 1e-8


def test_oscillator_phi_other_frequency_normalized():
    x, w = _gl(400, -15.0, 15.0)
    phi = specfun.oscillator_phi(3, 2.0, x)
    assert float(np.sum(w * phi * phi)) == pytest.approx(1.0, abs=1e-9)


# ----------------------------------------------------------------------
# parabolic cylinder function
# ----------------------------------------------------------------------

def test_pcf_gaussian_case():
    z = 1.3
    v = specfun.pcf_u(-0.5, z)
    assert v.u == pytest.approx(math.exp(-z * z / 4.0), rel=1e-12)
    assert v.u_prime == pytest.approx(-(z / 2.0) * math.exp(-z * z / 4.0), rel=1e-12)


def test_pcf_value_at_zero():
    v = specfun.pcf_u(2.0, 0.0)
    assert v.u == pytest.approx(U_AT_A2_Z0, rel=1e-12)
    # closed form -sqrt(pi) 2^(-a/2+1/4) / Gamma(1/4 + a/2) at a = 2
    from scipy.special import gamma
    want = -math.sqrt(math.pi) * 2.0 ** -0.75 / gamma(1.25)
    assert v.u_prime == pytest.approx(want, rel=1e-12)


def test_pcf_domain_errors():
    with pytest.raises(DomainError):
        specfun.pcf_u(-61.0, 1.0)
    with pytest.raises(DomainError):
        specfun.pcf_u(0.0, 41.0)


def test_pcf_weber_equation_residual():
    # the bound carries the second-difference truncation floor
    # (h^2/12) U'''' ~ (h^2/12)(z^2/4+a)^2 U, which alone exceeds a flat
    # 1e-4*(1+|U|) in the corner of the grid
    h = 1e-3
    for a in (-10.0, -6.5, -3.0, -0.5, 0.0, 2.5, 10.0):
        for z in np.linspace(-10.0, 10.0, 9):
            z = float(z)
            um = specfun.pcf_u(a, z - h).u
            u0 = specfun.pcf_u(a, z).u
            up = specfun.pcf_u(a, z + h).u
            resid = (up - 2.0 * u0 + um) / h ** 2 - (z * z / 4.0 + a) * u0
            tol = (1e-4 + (h * (z * z / 4.0 + a)) ** 2 / 6.0) * (1.0 + abs(u0))
            assert abs(resid) <= tol


def test_pcf_derivative_consistency_richardson():
    for a, z in [(-7.3, 2.1), (-0.9, -3.3), (4.2, 0.7), (-25.0, 4.4)]:
        v = specfun.pcf_u(a, z)
        d_h = (specfun.pcf_u(a, z + 1e-3).u - specfun.pcf_u(a, z - 1e-3).u) / 2e-3
        d_h2 = (specfun.pcf_u(a, z + 5e-4).u - specfun.pcf_u(a, z - 5e-4).u) / 1e-3
        rich = (4.0 * d_h2 - d_h) / 3.0
        assert rich == pytest.approx(v.u_prime, rel=1e-7, abs=1e-12)


def _u_reference_log(a, z):
    """Independent high-precision value via the even/odd Kummer split."""
    mp = pytest.importorskip("mpmath")
    dps = 120 + int(0.25 * z * z + 0.9 * abs(z) * math.sqrt(max(a, 0.0)))
    with mp.workdps(dps):
        am, zm = mp.mpf(a), mp.mpf(z)
        x = zm * zm / 2
        u1 = mp.e ** (-x / 2) * mp.hyp1f1(am / 2 + mp.mpf(1) / 4, mp.mpf(1) / 2, x)
        u2 = zm * mp.e ** (-x / 2) * mp.hyp1f1(am / 2 + mp.mpf(3) / 4, mp.mpf(3) / 2, x)
        u_0 = mp.sqrt(mp.pi) * mp.mpf(2) ** (-am / 2 - mp.mpf(1) / 4) * mp.rgamma(mp.mpf(3) / 4 + am / 2)
        du_0 = -mp.sqrt(mp.pi) * mp.mpf(2) ** (-am / 2 + mp.mpf(1) / 4) * mp.rgamma(mp.mpf(1) / 4 + am / 2)
        v = u_0 * u1 + du_0 * u2
        if v == 0:
            return 0.0, -math.inf
        return float(mp.sign(v)), float(mp.log(abs(v)))


@pytest.mark.parametrize("a", [-60.0, -41.5, -13.0, -2.2, -0.49, 0.61, 7.0, 60.0, 631.0])
def test_pcf_against_high_precision_reference(a):
    zs = np.array([-40.0, -17.0, -5.0, -1.1, 0.0, 0.9, 6.0, 23.0, 40.0])
    if a > 100:
        zs = np.array([0.0, 0.4, 1.7, 5.0])
    su, lu, _, _ = specfun.pcf_u_log(a, zs)
    for i, z in enumerate(zs):
        sref, lref = _u_reference_log(a, float(z))
        assert float(su[i]) == sref
        if sref == 0.0:
            continue       # exact zero (odd-order value at z = 0)
        assert abs(math.expm1(float(lu[i]) - lref)) < 1e-10


def test_pcf_product_gaussian_case():
    y = 0.7
    p = specfun.pcf_product(-0.5, y)
    assert p.value == pytest.approx(math.exp(-y * y / 2.0), rel=1e-12)


def test_pcf_product_even_in_y():
    a = specfun.pcf_product(0.3, 1.1)
    b = specfun.pcf_product(0.3, -1.1)
    assert a.value == pytest.approx(b.value, rel=1e-12)
    assert a.d1 == pytest.approx(-b.d1, rel=1e-12)
    assert a.d2 == pytest.approx(b.d2, rel=1e-12)


def test_pcf_product_far_field():
    # curlyU(zeta;q) ~ sqrt(2 pi)/Gamma(1/2+zeta) / X, X = sqrt(q^2 + 4 zeta),
    # with an O(X^-4) relative remainder
    zeta = 0.3
    from scipy.special import gamma
    lead = math.sqrt(2.0 * math.pi) / gamma(0.5 + zeta)
    rels = []
    for q in (2.0, 6.0, 12.0):
        x_var = math.sqrt(q * q + 4.0 * zeta)
        val = specfun.pcf_product(zeta, q).value
        rels.append(abs(val * x_var / lead - 1.0))
    assert rels[0] < 0.1
    # remainder falls off rapidly with X
    assert rels[1] < rels[0] / 5.0
    assert rels[2] < 1e-4


def test_pcf_product_second_derivative_weber_based():
    # d2/dy2 via the Weber substitution must match central differences
    zeta, y, h = -1.7, 1.2, 1e-3
    p = specfun.pcf_product(zeta, y)
    fd2 = (specfun.pcf_product(zeta, y + h).value - 2.0 * p.value
           + specfun.pcf_product(zeta, y - h).value) / h ** 2
    assert p.d2 == pytest.approx(fd2, rel=1e-6)


@settings(max_examples=60, deadline=None)
@given(st.floats(-30.0, 30.0), st.floats(-20.0, 20.0))
def test_pcf_weber_property(a, z):
    h = 1e-3
    u0 = specfun.pcf_u(a, z).u
    if abs(u0) < 1e-250:
        return
    um = specfun.pcf_u(a, z - h).u
    up = specfun.pcf_u(a, z + h).u
    resid = (up - 2.0 * u0 + um) / h ** 2 - (z * z / 4.0 + a) * u0
    tol = (1e-4 + (h * (z * z / 4.0 + a)) ** 2 / 6.0) * (1.0 + abs(u0))
    assert abs(resid) <= tol
