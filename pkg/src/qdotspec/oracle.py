"""Slow, independent reference implementations.

These validate the closed forms at build/test time and never sit on the
fast path.  q_laplace re-derives the Q-function from the heat-kernel
transform with its own double-exponential integrator (distinct from the
adaptive-quadrature route inside the main package); q_dzeta_spectral
sums the eigenfunction series; bisection_reference re-solves branch
equations with nothing but plain bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import krein, specfun
from .errors import ConvergenceError, DomainError, QuadratureError


@dataclass(frozen=True)
class OracleReport:
    quantity: str
    fast_value: float
    oracle_value: float
    abs_diff: float
    tolerance: float

    @property
    def passed(self):
        return self.abs_diff <= self.tolerance

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return (f"oracle {flag} {self.quantity}: fast={self.fast_value:.12e} "
                f"oracle={self.oracle_value:.12e} |diff|={self.abs_diff:.3e} "
                f"tol={self.tolerance:.1e}")


def check(quantity, fast_value, oracle_value, tolerance):
    return OracleReport(quantity, float(fast_value), float(oracle_value),
                        abs(float(fast_value) - float(oracle_value)), float(tolerance))


def q_laplace(zeta, q):
    """Q(zeta; q) from the regularized heat-kernel transform, isotropic
    frequencies, by a fixed exp-sinh double-exponential rule.

    Valid for zeta < 3/2.  The rule is compared against its own
    half-step refinement; disagreement raises QuadratureError.
    """
    zeta = float(zeta)
    q = float(q)
    if zeta >= 1.5:
        raise DomainError("heat-kernel representation needs zeta < 3/2")

    def integrand(t):
        # t^(-3/2) expm1( (3/2) log(t/sinh t) - (q^2/2) tanh(t/2) + zeta t )
        small = t < 0.05
        ts = np.where(small, t, 1.0)
        series = -ts * ts / 6.0 + ts ** 4 / 180.0
        tl = np.where(small, 1.0, t)
        direct = np.log(2.0 * tl) - tl - np.log1p(-np.exp(-2.0 * tl))
        log_ratio = np.where(small, series, direct)
        expo = 1.5 * log_ratio - 0.5 * q * q * np.tanh(0.5 * t) + zeta * t
        return t ** -1.5 * np.expm1(expo)

    def rule(h):
        u = np.arange(-int(4.0 / h), int(4.0 / h) + 1) * h
        t = np.exp(0.5 * math.pi * np.sinh(u))
        w = t * 0.5 * math.pi * np.cosh(u) * h
        keep = (t > 1e-280) & (t < 1e280)
        return float(np.sum(integrand(t[keep]) * w[keep]))

    fine = rule(0.04)
    coarse = rule(0.08)
    # geometric convergence: err(fine) ~ err(coarse)^2, so 1e-5 relative
    # agreement at the coarse step certifies ~1e-10 for the fine rule
    if abs(fine - coarse) > 1e-5 * (1.0 + abs(fine)):
        raise QuadratureError(f"exp-sinh rule not converged: |diff|={abs(fine - coarse):.2e}")
    return fine / (4.0 * math.pi) ** 1.5


def _phi_table(n_top, coord):
    """phi_k(omega=1, coord) for k = 0..n_top in one recurrence pass."""
    u = math.sqrt(0.5) * coord
    out = np.empty(n_top + 1)
    psi_prev = math.pi ** -0.25 * math.exp(-0.5 * u * u)
    out[0] = psi_prev
    if n_top >= 1:
        psi = math.sqrt(2.0) * u * psi_prev
        out[1] = psi
        for k in range(1, n_top):
            psi_prev, psi = psi, (math.sqrt(2.0 / (k + 1.0)) * u * psi
                                  - math.sqrt(k / (k + 1.0)) * psi_prev)
            out[k + 1] = psi
    return out * 0.5 ** 0.25


def level_weight(n, q_vec):
    """sum_k |F_{n,k}(q)|^2 over the degenerate level-n eigenspace."""
    q_vec = np.asarray(q_vec, dtype=float)
    tabs = [_phi_table(n, q_vec[j]) ** 2 for j in range(3)]
    total = 0.0
    for n1 in range(n + 1):
        for n2 in range(n - n1 + 1):
            total += tabs[0][n1] * tabs[1][n2] * tabs[2][n - n1 - n2]
    return total


def q_dzeta_spectral(zeta, q_vec, n_cut):
    """Partial eigenfunction series for dQ/dzeta plus a tail bound.

    Returns (partial_sum, tail_bound); the true derivative lies within
    tail_bound above the partial sum (all terms are positive).
    """
    if n_cut > 60:
        raise DomainError("spectral series capped at n_cut = 60")
    q_vec = np.asarray(q_vec, dtype=float)
    total = 0.0
    weights = []
    for n in range(n_cut + 1):
        lam = krein.level(n)
        if abs(lam - zeta) < 1e-9:
            raise DomainError(f"zeta = {zeta} sits on a level")
        w = level_weight(n, q_vec)
        weights.append(w)
        total += w / (lam - zeta) ** 2
    # level weights grow like sqrt(n); bound the tail with a fitted
    # envelope c*sqrt(n+1) summed explicitly plus an integral remainder
    c_fit = 1.5 * max(w / math.sqrt(n + 1.0)
                      for n, w in enumerate(weights[-5:], start=n_cut - 4))
    tail = 0.0
    for n in range(n_cut + 1, n_cut + 2001):
        tail += c_fit * math.sqrt(n + 1.0) / (krein.level(n) - zeta) ** 2
    edge = krein.level(n_cut + 2001) - zeta
    tail += 2.0 * c_fit * math.sqrt(n_cut + 2002.0) / edge
    return total, tail


def bisection_reference(n, q, alpha, iterations=200):
    """Plain bisection for the branch equation, 200 halvings.

    Independent of the production solver: its own bracket construction,
    no Brent acceleration, no warm starts.
    """
    lam_hi = krein.level(n)
    if n == 0:
        lo = -8.0 - 16.0 * math.pi ** 2 * alpha * alpha - q * q
        while krein.q_value(lo, q) - alpha >= 0.0:
            lo = 2.0 * lo - 1.0
    else:
        lam_lo = krein.level(n - 1)
        delta = 0.25
        while True:
            lo = lam_lo + delta
            try:
                if krein.q_value(lo, q) - alpha < 0.0:
                    break
            except Exception:
                pass
            delta *= 0.25
            if delta < 1e-14:
                raise ConvergenceError("bisection oracle found no left bracket")
    delta = 0.25
    while True:
        hi = lam_hi - delta
        if hi <= lo:
            delta *= 0.25
            continue
        val = None
        try:
            val = krein.q_value(hi, q) - alpha
        except Exception:
            pass
        if val is not None and val > 0.0:
            break
        delta *= 0.25
        if delta < 1e-14:
            # center case: the level itself may be the branch value
            return lam_hi if krein.q_value(lam_hi, q) - alpha <= 0.0 else lo
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if krein.q_value(mid, q) - alpha < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13 * max(1.0, abs(lo)):
            break
    return 0.5 * (lo + hi)
