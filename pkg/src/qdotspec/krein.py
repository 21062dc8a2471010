"""Krein Q-function of the point-perturbed isotropic/anisotropic oscillator.

Dimensionless units throughout (energy in units of the oscillator
quantum, lengths in the oscillator length).  The unperturbed levels sit
at lam_n = n + 3/2; for an off-center impurity every level is a pole of
Q, at the center only the even-index ones are.

Evaluation routes (the `method` field of QEvaluation):

* closed_form   -- product-of-parabolic-cylinder closed form,
* center_limit  -- q -> 0 quadratic crossover (the closed form has a
                   removable 1/q grouping there),
* laplace       -- regularized Laplace transform of the heat kernel;
                   also the fallback for very deep zeta, where the
                   closed form loses relative accuracy to the huge
                   gamma prefactor, and for the removable point
                   zeta = 1/2,
* asymptotic_low / asymptotic_far -- printed expansions, exposed for
                   remainder scans, never used silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from . import specfun
from .errors import DomainError, PoleError, QuadratureError

TWO_PI = 2.0 * math.pi
# -1 / (4 (2 pi)^(3/2))
_Q2_PREF_LOG = -math.log(4.0) - 1.5 * math.log(TWO_PI)

Q_SWITCH = 1e-3          # below this |q| the center crossover is used
ZETA_DEEP = -60.0        # below this the Laplace route takes over
_POLE_GUARD = 1e-11
_HALF_GUARD = 1e-5       # removable gamma pole at zeta = 1/2 (q > 0)


@dataclass(frozen=True)
class QEvaluation:
    zeta: float
    q: float
    value: float
    method: str
    dvalue_dzeta: Optional[float] = None


@dataclass(frozen=True)
class ResidueRecord:
    n: int
    lambda_n: float
    residue: float


def level(n):
    """Unperturbed eigenvalue lam_n = n + 3/2."""
    return n + 1.5


def _nearest_pole_distance(zeta, q):
    """Distance from zeta to the nearest pole of Q(.; q)."""
    if q == 0.0:
        # poles at 2m + 3/2, m >= 0
        m = round((zeta - 1.5) / 2.0)
        cands = [2.0 * mm + 1.5 for mm in (m - 1, m, m + 1) if mm >= 0]
    else:
        m = round(zeta - 1.5)
        cands = [mm + 1.5 for mm in (m - 1, m, m + 1) if mm >= 0]
    if not cands:
        return math.inf
    return min(abs(zeta - c) for c in cands)


def q_center(zeta):
    """Q(zeta; 0) = -(1/(sqrt(8) pi)) Gamma(3/4 - zeta/2)/Gamma(1/4 - zeta/2).

    Poles exactly at the even levels 2m + 3/2; exact zeros at
    zeta in {1/2} union {odd levels}, where the denominator gamma blows up.
    """
    zeta = float(zeta)
    x_num = 0.75 - 0.5 * zeta
    x_den = 0.25 - 0.5 * zeta
    if x_num <= 0.0 and abs(x_num - round(x_num)) < _POLE_GUARD:
        raise PoleError(f"Q(.;0) pole at zeta = {zeta}")
    if x_den <= 0.0 and abs(x_den - round(x_den)) < 1e-300:
        return QEvaluation(zeta, 0.0, 0.0, "closed_form")
    lg_num, sg_num = specfun.ln_gamma(x_num)
    lg_den, sg_den = specfun.ln_gamma(x_den)
    val = -(1.0 / (math.sqrt(8.0) * math.pi)) * sg_num * sg_den * math.exp(lg_num - lg_den)
    return QEvaluation(zeta, 0.0, val, "closed_form")


def _q_closed(zeta, q):
    """Closed form for Q(zeta; q), q > 0, assembled in signed-log space."""
    a = -zeta
    (sv, lv), (s1, l1), (s2, l2) = specfun.pcf_product_log(a, q)
    c1 = q * q - 4.0 * zeta
    terms = []
    if c1 != 0.0 and sv != 0.0:
        terms.append((math.copysign(1.0, c1) * sv, math.log(abs(c1)) + lv))
    if s1 != 0.0:
        terms.append((-s1, l1 - math.log(q)))
    if s2 != 0.0:
        terms.append((-s2, l2))
    s_br, l_br = specfun._signed_log_sum(terms)
    if s_br == 0.0:
        return 0.0
    lg, sg = specfun.ln_gamma(0.5 - zeta)
    sign = -sg * s_br
    return sign * math.exp(_Q2_PREF_LOG + lg + l_br)


def q_iso(zeta, q):
    """Q(zeta; q) for the isotropic oscillator, q > 0."""
    zeta = float(zeta)
    q = float(q)
    if q <= 0.0:
        raise DomainError("q_iso needs q > 0; use q_center for the center case")
    if q > 40.0:
        raise DomainError("q_iso supports q <= 40")
    if _nearest_pole_distance(zeta, q) < _POLE_GUARD * max(1.0, abs(zeta)):
        raise PoleError(f"Q(.;q) pole at zeta = {zeta}")
    if q < Q_SWITCH:
        base = q_center(zeta).value
        val = base + 0.5 * q * q * q_dq2_center(zeta)
        return QEvaluation(zeta, q, val, "center_limit")
    if zeta < ZETA_DEEP or abs(zeta - 0.5) < _HALF_GUARD:
        val = _laplace_value(zeta, (q, 0.0, 0.0), (1.0, 1.0, 1.0))
        return QEvaluation(zeta, q, val, "laplace")
    if zeta > 60.0:
        raise DomainError("q_iso supports zeta <= 60")
    return QEvaluation(zeta, q, _q_closed(zeta, q), "closed_form")


def q_value(zeta, q):
    """Q(zeta; q) dispatching on the semantic center flag q == 0."""
    if q == 0.0:
        return q_center(zeta).value
    return q_iso(zeta, q).value


# ----------------------------------------------------------------------
# Laplace-transform representation (anisotropic and fallback route)
# ----------------------------------------------------------------------

def _log_sinh_ratio(x):
    """log(x / sinh x) for x > 0, stable at both ends."""
    x = np.asarray(x, dtype=float)
    small = x < 0.05
    xs = np.where(small, x, 1.0)
    series = -xs * xs / 6.0 + xs ** 4 / 180.0
    xl = np.where(small, 1.0, x)
    direct = np.log(2.0 * xl) - xl - np.log1p(-np.exp(-2.0 * xl))
    return np.where(small, series, direct)


def _laplace_integrand_exponent(t, q_vec, omega_vec, zeta):
    """L(t) + zeta t with  P(t) = t^(-3/2) exp(L(t))."""
    acc = zeta * t
    for qj, wj in zip(q_vec, omega_vec):
        x = wj * t
        acc = acc + 0.5 * _log_sinh_ratio(x) - 0.5 * qj * qj * wj * np.tanh(0.5 * x)
    return acc


def _laplace_value(zeta, q_vec, omega_vec):
    """(4 pi)^(-3/2) int_0^inf t^(-3/2) expm1(L(t) + zeta t) dt.

    Equals the printed -sqrt(-zeta)/(4 pi) + regularized integral for
    zeta < 0 and continues it analytically on [0, lam_0).
    """
    lam0 = 0.5 * sum(omega_vec)

    def f_small(s):
        # t = s^2 substitution kills the t^(-1/2) singularity
        t = s * s
        return 2.0 * np.expm1(_laplace_integrand_exponent(t, q_vec, omega_vec, zeta)) / (s * s + (s == 0.0))

    def f_large(t):
        # the -t^(-3/2) regularizer is integrated analytically on the
        # tail (QUADPACK dislikes algebraic decay to infinity)
        return np.exp(_laplace_integrand_exponent(t, q_vec, omega_vec, zeta)) * t ** -1.5

    # effective support shrinks like 1/|zeta| for deep zeta
    t_cut = min(1.0, 60.0 / max(1.0, abs(zeta - lam0)))
    s_cut = math.sqrt(t_cut)
    i1, e1 = integrate.quad(f_small, 0.0, s_cut, epsabs=1e-13, epsrel=1e-12, limit=200)
    i2, e2 = integrate.quad(f_large, t_cut, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
    i2 -= 2.0 / math.sqrt(t_cut)
    if e1 + e2 > 1e-9:
        raise QuadratureError(f"laplace quadrature error estimate {e1 + e2:.2e} above 1e-9")
    return (i1 + i2) / (4.0 * math.pi) ** 1.5


def q_aniso(zeta, q_vec, omega_vec):
    """Q(zeta; q) for oscillator frequencies (w1, w2, w3), product 1.

    Valid for zeta < lam_0 = (w1+w2+w3)/2; the representation is not
    continued past the first level.
    """
    zeta = float(zeta)
    q_vec = tuple(float(v) for v in np.atleast_1d(q_vec)) if np.ndim(q_vec) else (float(q_vec), 0.0, 0.0)
    if len(q_vec) != 3:
        raise DomainError("q_vec must be a 3-vector")
    omega_vec = tuple(float(w) for w in omega_vec)
    if len(omega_vec) != 3 or any(w <= 0 for w in omega_vec):
        raise DomainError("omega_vec must be three positive frequencies")
    prod = omega_vec[0] * omega_vec[1] * omega_vec[2]
    if abs(prod - 1.0) > 1e-9:
        raise DomainError(f"omega product must be 1, got {prod}")
    lam0 = 0.5 * sum(omega_vec)
    if zeta >= lam0 - 1e-12:
        raise DomainError(f"Laplace representation needs zeta < {lam0}")
    val = _laplace_value(zeta, q_vec, omega_vec)
    return QEvaluation(zeta, float(np.linalg.norm(q_vec)), val, "laplace")


# ----------------------------------------------------------------------
# derivatives
# ----------------------------------------------------------------------

def q_dzeta(zeta, q):
    """dQ/dzeta.  Closed form at q = 0, Richardson differences for q > 0.

    Strictly positive at every regular real zeta.
    """
    zeta = float(zeta)
    if q == 0.0:
        return _q_dzeta_center(zeta)
    dist = _nearest_pole_distance(zeta, q)
    if dist < _POLE_GUARD * max(1.0, abs(zeta)):
        raise PoleError(f"dQ/dzeta pole at zeta = {zeta}")
    h = 1e-5 * max(1.0, abs(zeta))
    h = min(h, 0.25 * dist)
    f = lambda z: q_iso(z, q).value
    d_h = (f(zeta + h) - f(zeta - h)) / (2.0 * h)
    d_h2 = (f(zeta + 0.5 * h) - f(zeta - 0.5 * h)) / h
    return (4.0 * d_h2 - d_h) / 3.0


def _q_dzeta_center(zeta):
    """dQ/dzeta(zeta; 0) closed form, with the removable-limit fix at the
    zeros of Q(.;0) where Gamma(1/4 - zeta/2) blows up."""
    x_num = 0.75 - 0.5 * zeta
    x_den = 0.25 - 0.5 * zeta
    if x_num <= 0.0 and abs(x_num - round(x_num)) < _POLE_GUARD:
        raise PoleError(f"dQ/dzeta(.;0) pole at zeta = {zeta}")
    pref = 1.0 / (4.0 * math.sqrt(2.0) * math.pi)
    if x_den <= 0.25 and abs(x_den - round(x_den)) < 1e-7:
        # ratio * G -> Gamma(3/4 - zeta/2) * (-1)^m * m! at x_den -> -m
        m = int(round(-x_den))
        lgn, sgn = specfun.ln_gamma(x_num)
        return pref * sgn * (-1.0) ** m * math.exp(lgn + specfun.ln_gamma(m + 1.0)[0])
    lgn, sgn = specfun.ln_gamma(x_num)
    lgd, sgd = specfun.ln_gamma(x_den)
    ratio = sgn * sgd * math.exp(lgn - lgd)
    return pref * ratio * specfun.g_combination(0.5 - zeta)


def q_dq2_center(zeta):
    """d^2 Q/dq^2 (zeta; 0), closed form.

    Derived from the q-expansion of the product representation:

        d2Q/dq2(zeta;0) = (1/(24 sqrt(2) pi)) [ (4 zeta^2 - 1)/R + 8 zeta R ],
        R = Gamma(3/4 - zeta/2) / Gamma(1/4 - zeta/2).

    The coefficient set differs from the one in circulation (which fails
    a finite-difference check); this form is pinned against Richardson
    differences of the full Q and against solver-based branch curvature.
    """
    zeta = float(zeta)
    x_num = 0.75 - 0.5 * zeta
    x_den = 0.25 - 0.5 * zeta
    if (x_num <= 0.0 and abs(x_num - round(x_num)) < _POLE_GUARD) or \
       (x_den <= 0.0 and abs(x_den - round(x_den)) < _POLE_GUARD):
        raise PoleError(f"d2Q/dq2(.;0) pole at zeta = {zeta}")
    lgn, sgn = specfun.ln_gamma(x_num)
    lgd, sgd = specfun.ln_gamma(x_den)
    r = sgn * sgd * math.exp(lgn - lgd)          # Gamma(3/4-z/2)/Gamma(1/4-z/2)
    return (1.0 / (24.0 * math.sqrt(2.0) * math.pi)) * ((4.0 * zeta * zeta - 1.0) / r
                                                        + 8.0 * zeta * r)


# ----------------------------------------------------------------------
# residues and asymptotics
# ----------------------------------------------------------------------

def _double_factorial_ratio_log(n):
    """log((2n+1)!!/(2n)!!)."""
    # (2n+1)!! = (2n+1)!/(2^n n!), (2n)!! = 2^n n!
    lg = specfun.ln_gamma
    return lg(2.0 * n + 2.0)[0] - 2.0 * n * math.log(2.0) - 2.0 * lg(n + 1.0)[0]


def residue_at(n, q):
    """Residue of Q(.; q) at lam_n; zero when lam_n is not a pole.

    For q > 0 the leading-coefficient closed form is used, rewritten in
    terms of normalized oscillator functions so no double factorial or
    e^(-q^2/2) overflows appear:

        Res_n(q) = -(1/(4 pi)) [ (n+1)(A_n^2 + A_{n+1}^2)
                                 + sqrt(n+1) (1/q - q) A_n A_{n+1} ],
        A_k = phi_k(omega=1, q).

    It agrees with the spectral identity Res_n = -sum_k |F_{n,k}(q)|^2.
    """
    if n < 0 or n != int(n):
        raise DomainError("level index must be a nonnegative integer")
    n = int(n)
    lam = level(n)
    q = float(q)
    if q == 0.0:
        if n % 2 == 1:
            return ResidueRecord(n, lam, 0.0)
        m = n // 2
        res = -math.exp(_double_factorial_ratio_log(m) - 1.5 * math.log(TWO_PI))
        return ResidueRecord(n, lam, res)
    a_n = specfun.oscillator_phi(n, 1.0, q)
    a_n1 = specfun.oscillator_phi(n + 1, 1.0, q)
    bracket = ((n + 1.0) * (a_n * a_n + a_n1 * a_n1)
               + math.sqrt(n + 1.0) * (1.0 / q - q) * a_n * a_n1)
    return ResidueRecord(n, lam, -bracket / (4.0 * math.pi))


def q_asymptotic_low(zeta, q):
    """Deep-zeta expansion -(sqrt(-zeta)/4pi)(1 - q^2/(8 zeta) + (8-q^4)/(128 zeta^2))."""
    zeta = float(zeta)
    if zeta > -10.0:
        raise DomainError("low-zeta expansion needs zeta <= -10")
    s = math.sqrt(-zeta)
    return -(s / (4.0 * math.pi)) * (1.0 - q * q / (8.0 * zeta)
                                     + (8.0 - q ** 4) / (128.0 * zeta * zeta))


def q_asymptotic_far(zeta, q):
    """Far-impurity expansion -(1/8pi)(q - 2 zeta/q - (1 + 2 zeta^2)/q^3)."""
    q = float(q)
    if q < 10.0:
        raise DomainError("far-q expansion needs q >= 10")
    return -(1.0 / (8.0 * math.pi)) * (q - 2.0 * zeta / q - (1.0 + 2.0 * zeta * zeta) / q ** 3)
