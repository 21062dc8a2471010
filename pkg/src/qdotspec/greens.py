"""Heat kernel, Green functions and eigenfunctions of the perturbed dot.

The unperturbed resolvent kernel of the isotropic oscillator is a
closed-form combination of parabolic cylinder functions of the two
radial-type variables

    xi  = (|x+y| + |x-y|)/2,      eta = (|x+y| - |x-y|)/2,

assembled here in signed-log space so the gamma prefactor can be huge.
The perturbed kernel follows from the resolvent formula with a rank-one
correction; point eigenfunctions are normalized resolvent columns.
"""

from __future__ import annotations

import math

import numpy as np

from . import krein, specfun, spectrum
from .errors import (CaseError, CoincidenceError, DomainError,
                     PerturbedPoleError, PoleError)

_TWO_PI = 2.0 * math.pi


def _log_sinh(u):
    u = np.asarray(u, dtype=float)
    big = u > 20.0
    safe = np.where(big, 1.0, u)
    return np.where(big, u - math.log(2.0) + np.log1p(-np.exp(-2.0 * np.minimum(u, 700.0))),
                    np.log(np.sinh(safe)))


def heat_kernel(x, y, t, omega=(1.0, 1.0, 1.0)):
    """K0(x, y; t): product of the three 1D oscillator kernels."""
    if t <= 0.0:
        raise DomainError("heat kernel needs t > 0")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    log_k = 0.0
    for j in range(3):
        w = omega[j]
        u = w * t
        coth = 1.0 / math.tanh(u)
        inv_sinh = 2.0 * math.exp(-u) / -math.expm1(-2.0 * u)
        log_k += (-0.5 * (math.log(4.0 * math.pi) + float(_log_sinh(u)))
                  - 0.25 * w * ((x[j] ** 2 + y[j] ** 2) * coth - 2.0 * x[j] * y[j] * inv_sinh))
    return math.exp(log_k)


def _check_zeta_regular(zeta):
    m = round(zeta - 1.5)
    if m >= 0 and abs(zeta - (m + 1.5)) < 1e-11 * max(1.0, abs(zeta)):
        raise PoleError(f"resolvent pole at zeta = {zeta}")


def g0_iso(x, y, zeta):
    """Unperturbed Green function G0(x, y; zeta), isotropic oscillator.

    `x` may be a single 3-vector or an (N, 3) batch; `y` is a 3-vector.
    """
    _check_zeta_regular(zeta)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    single = x.ndim == 1
    xb = x[None, :] if single else x
    d_minus = np.linalg.norm(xb - y, axis=1)
    d_plus = np.linalg.norm(xb + y, axis=1)
    if np.any(d_minus < 1e-12):
        raise CoincidenceError("Green function diverges at x = y")
    xi = 0.5 * (d_plus + d_minus)
    eta = 0.5 * (d_plus - d_minus)
    a = -zeta
    n = len(xi)
    su, lu, sdu, ldu = specfun.pcf_u_log(a, np.concatenate([xi, -eta]))
    s_uxi, l_uxi = su[:n], lu[:n]
    s_duxi, l_duxi = sdu[:n], ldu[:n]
    s_ueta, l_ueta = su[n:], lu[n:]
    s_dueta, l_dueta = sdu[n:], ldu[n:]
    # A = U(xi) U'(-eta), B = U'(xi) U(-eta); kernel = -C Gamma [ (A+B)/d- + (A-B)/d+ ]
    s_a, l_a = s_uxi * s_dueta, l_uxi + l_dueta
    s_b, l_b = s_duxi * s_ueta, l_duxi + l_ueta
    lg, sg = specfun.ln_gamma(0.5 - zeta)
    pref_log = lg - math.log(2.0) - 1.5 * math.log(_TWO_PI)
    out = np.empty(n)
    for i in range(n):
        terms = [(s_a[i], l_a[i] - math.log(d_minus[i])),
                 (s_b[i], l_b[i] - math.log(d_minus[i]))]
        if d_plus[i] > 1e-12:
            terms.append((s_a[i], l_a[i] - math.log(d_plus[i])))
            terms.append((-s_b[i], l_b[i] - math.log(d_plus[i])))
        s_sum, l_sum = specfun._signed_log_sum(terms)
        out[i] = 0.0 if s_sum == 0.0 else -sg * s_sum * math.exp(pref_log + l_sum)
    return float(out[0]) if single else out


def g0_reg_diag(q_vec, zeta):
    """Regularized diagonal G0_reg(q, q; zeta): the Green function minus
    its universal 1/(4 pi |x-q|) singularity, extracted by Richardson
    extrapolation along a fixed approach direction.

    Equals the Krein Q-function at (zeta, |q|).
    """
    _check_zeta_regular(zeta)
    q_vec = np.asarray(q_vec, dtype=float)
    e = np.array([1.0, 0.0, 0.0])
    hs = np.array([1e-2, 5e-3, 2.5e-3])
    vals = []
    for h in hs:
        g = g0_iso(q_vec + h * e, q_vec, zeta)
        vals.append(g - 1.0 / (4.0 * math.pi * h))
    # Lagrange extrapolation of the three (h, value) pairs to h = 0
    p = np.polyfit(hs, vals, 2)
    return float(np.polyval(p, 0.0))


def perturbed_green(x, y, zeta, q_vec, alpha):
    """Resolvent kernel of the perturbed operator:
    G0(x,y) - G0(x,q) G0(q,y) / (Q(zeta;q) - alpha)."""
    q_vec = np.asarray(q_vec, dtype=float)
    qq = krein.q_value(zeta, float(np.linalg.norm(q_vec)))
    denom = qq - alpha
    if denom == 0.0:
        raise PerturbedPoleError(f"zeta = {zeta} is an eigenvalue (Q = alpha)")
    g_xy = g0_iso(x, y, zeta)
    g_xq = g0_iso(x, q_vec, zeta)
    g_qy = g0_iso(y, q_vec, zeta)   # kernel symmetric
    return g_xy - g_xq * g_qy / denom


def eigenfunction_point(n, q_vec, alpha, x):
    """Value of the normalized point-level eigenfunction Phi_n at x.

    Only levels that are interior branch solutions (part sigma1) have
    this resolvent-column form; clamped endpoint levels keep their
    unperturbed eigenspaces and raise CaseError here.  Ground state is
    positive; higher branches are fixed positive at a probe displaced
    from the impurity along +x.
    """
    q_vec = np.asarray(q_vec, dtype=float)
    q = float(np.linalg.norm(q_vec))
    bp = spectrum.solve_branch(n, q, alpha)
    lam_lo = -math.inf if n == 0 else krein.level(n - 1)
    if not (lam_lo + 1e-12 < bp.energy < krein.level(n) - 1e-12):
        raise CaseError(f"branch {n} is clamped to an unperturbed level; "
                        "use unperturbed_eigenfunction for its eigenspace")
    norm = krein.q_dzeta(bp.energy, q) ** -0.5
    sign = 1.0
    if n > 0:
        probe = q_vec + np.array([0.35 + 0.1 * q, 0.0, 0.0])
        sign = math.copysign(1.0, g0_iso(probe, q_vec, bp.energy))
    return sign * norm * g0_iso(x, q_vec, bp.energy)


def unperturbed_eigenfunction(n1, n2, n3, x, omega=(1.0, 1.0, 1.0)):
    """Product eigenfunction phi_{n1}(x1) phi_{n2}(x2) phi_{n3}(x3)."""
    x = np.asarray(x, dtype=float)
    xs = (x[..., 0], x[..., 1], x[..., 2])
    out = 1.0
    for nj, wj, xj in zip((n1, n2, n3), omega, xs):
        out = out * specfun.oscillator_phi(nj, wj, xj)
    return out


def _level_triples(n):
    return [(n1, n2, n - n1 - n2) for n1 in range(n + 1) for n2 in range(n - n1 + 1)]


def psi_n(n, q_vec, x):
    """Psi_n(x) = sum_k F_{n,k}(q) F_{n,k}(x) over the level-n basis."""
    q_vec = np.asarray(q_vec, dtype=float)
    x = np.asarray(x, dtype=float)
    acc = 0.0
    for (n1, n2, n3) in _level_triples(n):
        acc = acc + (unperturbed_eigenfunction(n1, n2, n3, q_vec)
                     * unperturbed_eigenfunction(n1, n2, n3, x))
    return acc


# ----------------------------------------------------------------------
# quadratures
# ----------------------------------------------------------------------

def _radial_panels(kappa, r_out, n_nodes=80):
    """Gauss-Legendre nodes/weights on [0, r_c] + [r_c, r_out], with the
    split scaled to the decay rate so deep bound states stay resolved."""
    r_c = min(1.0, 8.0 / max(1.0, kappa))
    xs, ws = np.polynomial.legendre.leggauss(n_nodes)
    nodes, weights = [], []
    for (a, b) in [(0.0, r_c), (r_c, r_out)]:
        nodes.append(0.5 * (b - a) * xs + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * ws)
    return np.concatenate(nodes), np.concatenate(weights)


def gq_norm_squared(zeta, q_vec):
    """||g_q(zeta)||^2 = int |G0(x, q; zeta)|^2 dx, by a spherical-grid
    quadrature centered at the impurity.  Equals dQ/dzeta."""
    q_vec = np.asarray(q_vec, dtype=float)
    q = float(np.linalg.norm(q_vec))
    kappa = math.sqrt(max(1.0, -zeta))
    r, wr = _radial_panels(kappa, 12.0 + q)
    if q == 0.0:
        # radially symmetric: 1D quadrature suffices
        pts = np.zeros((len(r), 3))
        pts[:, 0] = r
        g = g0_iso(pts, q_vec, zeta)
        return float(np.sum(wr * (g * g) * 4.0 * math.pi * r * r))
    nth, nph = 24, 48
    ct, wt = np.polynomial.legendre.leggauss(nth)
    ph = np.arange(nph) * (2.0 * math.pi / nph)
    st = np.sqrt(1.0 - ct * ct)
    dirs = np.stack([np.outer(st, np.cos(ph)).ravel(),
                     np.outer(st, np.sin(ph)).ravel(),
                     np.repeat(ct, nph)], axis=1)
    wdir = np.repeat(wt, nph) * (2.0 * math.pi / nph)
    total = 0.0
    for i, ri in enumerate(r):
        pts = q_vec + ri * dirs
        g = g0_iso(pts, q_vec, zeta)
        total += wr[i] * ri * ri * float(np.sum(wdir * g * g))
    return total


def eigenfunction_norm_squared(n, q_vec, alpha):
    """Quadrature of |Phi_n|^2; equals 1 by the normalization identity."""
    q_vec = np.asarray(q_vec, dtype=float)
    q = float(np.linalg.norm(q_vec))
    bp = spectrum.solve_branch(n, q, alpha)
    return gq_norm_squared(bp.energy, q_vec) / krein.q_dzeta(bp.energy, q)


def ground_mass_within(alpha, radius):
    """Fraction of the center ground-state density inside |x| <= radius."""
    bp = spectrum.solve_branch(0, 0.0, alpha)
    zeta = bp.energy
    kappa = math.sqrt(max(1.0, -zeta))
    xs, ws = np.polynomial.legendre.leggauss(80)

    def shell(a, b):
        rr = 0.5 * (b - a) * xs + 0.5 * (a + b)
        wr = 0.5 * (b - a) * ws
        pts = np.zeros((len(rr), 3))
        pts[:, 0] = rr
        g = g0_iso(pts, np.zeros(3), zeta)
        return float(np.sum(wr * (g * g) * rr * rr))

    r_c = min(radius, 5.0 / kappa)
    inside = shell(0.0, r_c) + shell(r_c, radius)
    outside = shell(radius, radius + 4.0 / kappa) + shell(radius + 4.0 / kappa, 12.0)
    return inside / (inside + outside)
