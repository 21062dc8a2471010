"""Eigenvalue branches, spectrum classification, and unit conversions.

The perturbed eigenvalues solve Q(zeta; q) = alpha.  Branch n lives on
[lam_{n-1}, lam_n] (lam_{-1} = -inf) and is pinned down by strict
monotonicity of Q between its poles.  Whether an endpoint is attained
follows the sign rules at non-pole levels; for an off-center impurity
every level is a pole and every branch value is interior.

The center (q = 0) is a semantic flag, never a floating-point
tolerance: the pole set changes discontinuously there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from scipy import optimize

from . import krein
from .errors import CaseError, ConfigError, ConvergenceError, DomainError

PI = math.pi
N_BRANCH_CAP = 40        # parabolic-cylinder domain keeps branches n <= 40
_ENDPOINT_TOL = 1e-12


def unperturbed_levels(n_max):
    """[(lam_n, k_n)] with lam_n = n + 3/2 and k_n = (n+1)(n+2)/2."""
    if n_max < 0 or n_max > 1000:
        raise DomainError("n_max must be in [0, 1000]")
    return [(n + 1.5, (n + 1) * (n + 2) // 2) for n in range(n_max + 1)]


def multiplicity(n):
    """Degeneracy k_n = (n+1)(n+2)/2 of the unperturbed level lam_n."""
    return (n + 1) * (n + 2) // 2


def sigma_set(q, n_max):
    """Indices n <= n_max whose level is a pole of Q(.; q).

    Even indices for the center case, every index otherwise.
    """
    if q < 0:
        raise DomainError("q must be nonnegative")
    if q == 0.0:
        return {n for n in range(n_max + 1) if n % 2 == 0}
    return set(range(n_max + 1))


@dataclass(frozen=True)
class BranchPoint:
    n: int
    q: float
    alpha: float
    energy: float
    bracket: tuple
    residual: float
    iterations: int


@dataclass(frozen=True)
class LevelDescriptor:
    value: float
    part: str                # sigma1 | sigma2 | sigma3 | sigma4
    multiplicity: int
    branch_index: Optional[int] = None


def _q_at(zeta, q):
    return krein.q_value(zeta, q)


def _bracket_left_of_ground(q, alpha):
    """Expand left until Q < alpha on (-inf, lam_0)."""
    if alpha < -5.0:
        lo = e0_asymptotic(q, alpha) - 1.0
    else:
        lo = -2.0 - q * q / 4.0
    for _ in range(200):
        if _q_at(lo, q) < alpha:
            return lo
        lo = 2.0 * lo - 1.0
    raise ConvergenceError("could not bracket the ground branch from below",
                           bracket=(lo, krein.level(0)))


def _shrink_to_sign(zeta_pole, toward, q, alpha, want_negative):
    """Move from a pole of Q(.;q) toward `toward` until Q - alpha has the
    requested sign; Q diverges at the pole so a small enough step works.

    Returns None when the sign flip happens closer to the pole than the
    evaluation guard (residues die off like exp(-q^2/2), so far-impurity
    roots hug the poles); the caller then linearizes on the residue.
    """
    gap = abs(toward - zeta_pole)
    delta = 0.25 * gap
    guard = 5e-11 * max(1.0, abs(zeta_pole))   # stay above the PoleError guard
    for _ in range(60):
        if delta < guard:
            return None
        z = zeta_pole + math.copysign(delta, toward - zeta_pole)
        val = _q_at(z, q) - alpha
        if (val < 0.0) == want_negative:
            return z
        delta *= 0.25
    return None


def _pole_linearized_root(n_pole, q, alpha):
    """Root of Q = alpha inside the boundary layer of the pole at lam_n,
    from Q(zeta) ~ Q_reg + Res/(zeta - lam): the direct evaluation guard
    is wider than the layer, so bisection cannot see the sign change."""
    lam = krein.level(n_pole)
    res = krein.residue_at(n_pole, q).residue
    delta0 = 0.05
    q_reg = _q_at(lam - delta0, q) + res / delta0
    eps = res / (alpha - q_reg)
    return lam + eps


def solve_branch(n, q, alpha, guess=None):
    """Branch value E_n(q; alpha) with solver diagnostics.

    Interior roots are bisected (Brent) inside pole-guarded brackets;
    at the center, non-pole endpoints follow the sign rules (the branch
    is clamped to the level when the equation has no interior root).
    """
    if n < 0 or n != int(n):
        raise DomainError("branch index must be a nonnegative integer")
    n = int(n)
    if n > N_BRANCH_CAP:
        raise DomainError(f"branch index capped at {N_BRANCH_CAP} by the "
                          "special-function domain")
    if q < 0:
        raise DomainError("q must be nonnegative")
    q = float(q)
    alpha = float(alpha)
    lam_lo = -math.inf if n == 0 else krein.level(n - 1)
    lam_hi = krein.level(n)
    poles = sigma_set(q, n + 1)

    # center case: handle clamped endpoints first
    if q == 0.0:
        lo_is_pole = (n == 0) or ((n - 1) in poles)
        hi_is_pole = n in poles
        if not hi_is_pole:
            fhi = _q_at(lam_hi, 0.0) - alpha
            if fhi <= 0.0:
                # no interior root before lam_n: branch sits at lam_n
                return BranchPoint(n, q, alpha, lam_hi, (lam_hi, lam_hi), abs(fhi), 0)
        if not lo_is_pole:
            flo = _q_at(lam_lo, 0.0) - alpha
            if flo >= 0.0:
                return BranchPoint(n, q, alpha, lam_lo, (lam_lo, lam_lo), abs(flo), 0)

    # interior root: build a sign-changing bracket
    if n == 0:
        lo = _bracket_left_of_ground(q, alpha)
    elif (n - 1) in poles:
        lo = _shrink_to_sign(lam_lo, lam_hi, q, alpha, want_negative=True)
        if lo is None:
            energy = _pole_linearized_root(n - 1, q, alpha)
            return BranchPoint(n, q, alpha, energy, (lam_lo, lam_hi), 0.0, 0)
    else:
        lo = lam_lo
    if n in poles:
        hi = _shrink_to_sign(lam_hi, lam_lo if n > 0 else lam_hi - 1.0, q, alpha,
                             want_negative=False)
        if hi is None:
            energy = _pole_linearized_root(n, q, alpha)
            return BranchPoint(n, q, alpha, energy, (lam_lo, lam_hi), 0.0, 0)
    else:
        hi = lam_hi

    if guess is not None and lo < guess < hi:
        # warm start: try a tight local bracket first (sweep drivers)
        h = 1e-3 * max(1.0, abs(guess))
        glo, ghi = max(lo, guess - h), min(hi, guess + h)
        try:
            if (_q_at(glo, q) - alpha) < 0.0 < (_q_at(ghi, q) - alpha):
                lo, hi = glo, ghi
        except Exception:
            pass

    f = lambda z: _q_at(z, q) - alpha
    try:
        root, info = optimize.brentq(f, lo, hi, xtol=1e-13, rtol=8.9e-16,
                                     maxiter=200, full_output=True)
    except ValueError as exc:
        raise ConvergenceError(f"bracket [{lo}, {hi}] lost its sign change: {exc}",
                               bracket=(lo, hi)) from None
    if not info.converged:
        raise ConvergenceError("brentq did not converge",
                               bracket=(lo, hi), iterations=info.iterations)
    residual = abs(f(root))
    return BranchPoint(n, q, alpha, float(root), (lo, hi), residual,
                       info.iterations)


def classify_spectrum(q, alpha, n_max):
    """Levels of the perturbed operator up to lam_{n_max}, split into the
    four parts with their multiplicities, sorted by energy."""
    if n_max > N_BRANCH_CAP:
        raise DomainError(f"n_max capped at {N_BRANCH_CAP}")
    poles = sigma_set(q, n_max)
    out = []
    for n in range(n_max + 1):
        bp = solve_branch(n, q, alpha)
        lam_lo = -math.inf if n == 0 else krein.level(n - 1)
        lam_hi = krein.level(n)
        interior = (bp.energy < lam_hi - _ENDPOINT_TOL
                    and bp.energy > lam_lo + _ENDPOINT_TOL)
        if interior:
            out.append(LevelDescriptor(bp.energy, "sigma1", 1, n))
    for n in range(n_max + 1):
        lam = krein.level(n)
        k = multiplicity(n)
        if n in poles:
            if k > 1:
                out.append(LevelDescriptor(lam, "sigma2", k - 1, None))
        else:
            q_at_level = _q_at(lam, q)
            if q_at_level == alpha:
                out.append(LevelDescriptor(lam, "sigma4", k + 1, None))
            else:
                out.append(LevelDescriptor(lam, "sigma3", k, None))
    out.sort(key=lambda d: (d.value, d.part))
    return out


@dataclass(frozen=True)
class CenterDerivatives:
    dE_dq: float
    d2E_dq2: Optional[float]


def branch_derivatives_at_center(n, alpha):
    """(dE_n/dq, d2E_n/dq2) at q = 0 in the analytic cases.

    For alpha != 0 (and for the ground branch at any alpha) the first
    derivative vanishes and the curvature is -Q_qq/Q_zeta at E_n(0).
    The curvature is reported only for the parity covered by the
    implicit-function argument (even n for alpha > 0, odd for
    alpha < 0, n = 0 always).  For alpha = 0, n >= 1 the branch pair
    meets at the level with equal and opposite slopes, extracted
    numerically; the signed slope of the requested branch is returned
    with no curvature.
    """
    if n < 0 or n > N_BRANCH_CAP:
        raise DomainError("branch index out of range")
    n = int(n)
    if alpha == 0.0 and n >= 1:
        s = _center_slope_magnitude(n)
        return CenterDerivatives(-s if n % 2 == 1 else +s, None)
    if alpha == 0.0 and n == 0:
        e0 = solve_branch(0, 0.0, 0.0).energy
        return CenterDerivatives(0.0, -krein.q_dq2_center(e0) / krein.q_dzeta(e0, 0.0))
    # every branch is analytic at q = 0 for alpha != 0: the first
    # derivative always vanishes; the curvature formula covers even n
    # for alpha > 0, odd n for alpha < 0, and n = 0 throughout
    second_ok = (n == 0) or (alpha > 0 and n % 2 == 0) or (alpha < 0 and n % 2 == 1)
    if not second_ok:
        return CenterDerivatives(0.0, None)
    e_n = solve_branch(n, 0.0, alpha).energy
    lam_lo = -math.inf if n == 0 else krein.level(n - 1)
    if not (lam_lo < e_n < krein.level(n)):
        raise CaseError(f"branch {n} at alpha={alpha} is clamped to a level; "
                        "the curvature formula needs an interior branch value")
    curv = -krein.q_dq2_center(e_n) / krein.q_dzeta(e_n, 0.0)
    return CenterDerivatives(0.0, curv)


def _center_slope_magnitude(n):
    """|dE_n/dq(0)| for the alpha = 0 branch pair, by one-sided differences.

    The pair (E_{2m+1}, E_{2m+2}) meets at the odd level lam_{2m+1}."""
    meet = krein.level(n) if n % 2 == 1 else krein.level(n - 1)
    h1, h2 = 2e-3, 1e-3
    e1 = solve_branch(n, h1, 0.0).energy
    e2 = solve_branch(n, h2, 0.0).energy
    s1 = (e1 - meet) / h1
    s2 = (e2 - meet) / h2
    return abs(2.0 * s2 - s1)       # first-order Richardson on the one-sided slope


def e0_asymptotic(q, alpha):
    """Deep-well ground energy -16 pi^2 a^2 + q^2/4 + 1/(128 pi^2 a^2).

    An asymptotic law for alpha -> -inf; evaluable for any alpha < 0
    (remainder is O(alpha^-4) and already tiny by alpha = -5).
    """
    if alpha >= 0.0:
        raise DomainError("deep-well expansion describes alpha < 0")
    return -16.0 * PI * PI * alpha * alpha + 0.25 * q * q \
        + 1.0 / (128.0 * PI * PI * alpha * alpha)


def _lambda_correction(m, alpha):
    """Lambda_m(alpha): strong-coupling shift of the center branches."""
    lr = krein._double_factorial_ratio_log(m)
    c1 = math.exp(lr - 1.5 * math.log(2.0 * PI))
    c2 = math.exp(lr - 0.75 * math.log(2.0 * PI))
    harm = 0.5 * sum(1.0 / (k * (1.0 + 2.0 * k)) for k in range(1, m + 1))
    return c1 / alpha - c2 * c2 * (math.log(2.0) - 1.0 + harm) / (alpha * alpha)


def branch_asymptotic_alpha(n, q, alpha, direction):
    """Strong-coupling prediction for E_n(q; alpha) as alpha -> +-inf.

    `direction` is +inf or -inf.  Exact-constant cases (clamped center
    branches) are returned exactly; the rest require |alpha| >= 5.
    """
    if not math.isinf(direction):
        raise DomainError("direction must be +inf or -inf")
    up = direction > 0
    n = int(n)
    if q < 0:
        raise DomainError("q must be nonnegative")
    if q == 0.0:
        if n % 2 == 1 and up:
            return krein.level(n)                    # exact for alpha >= 0
        if n % 2 == 0 and n >= 2 and not up:
            return krein.level(n - 1)                # exact for alpha <= 0
        if n == 0 and not up:
            return e0_asymptotic(q, alpha)
        if abs(alpha) < 5.0:
            raise DomainError("strong-coupling expansion needs |alpha| >= 5")
        m = n // 2 if n % 2 == 0 else (n - 1) // 2
        base = krein.level(n) if up else krein.level(n - 1)
        return base - _lambda_correction(m, alpha)
    if abs(alpha) < 5.0:
        raise DomainError("strong-coupling expansion needs |alpha| >= 5")
    if not up and n == 0:
        return e0_asymptotic(q, alpha)
    m = n if up else n - 1
    res = krein.residue_at(m, q).residue
    return krein.level(m) + res / alpha


@dataclass(frozen=True)
class ExcitationEnergies:
    e1_minus_e0: float
    rows: list          # (n, lam_n - E_n, E_{n+1} - lam_n) for 1 <= n <= n_max


def excitation_energies(q, alpha, n_max):
    """Gap structure: the unbounded E_1 - E_0 plus the sub-level gaps
    lam_n - E_n and E_{n+1} - lam_n (each within (0,1) off center)."""
    energies = [solve_branch(n, q, alpha).energy for n in range(n_max + 2)]
    rows = []
    for n in range(1, n_max + 1):
        lam = krein.level(n)
        rows.append((n, lam - energies[n], energies[n + 1] - lam))
    return ExcitationEnergies(energies[1] - energies[0], rows)


# ----------------------------------------------------------------------
# units
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PhysicalScales:
    mu: float
    hbar: float
    Omega: float
    alpha: Optional[float] = None      # physical point-potential strength


@dataclass(frozen=True)
class OscillatorConfig:
    omega: tuple = (1.0, 1.0, 1.0)
    physical: Optional[PhysicalScales] = None

    def __post_init__(self):
        if len(self.omega) != 3 or any(w <= 0 for w in self.omega):
            raise ConfigError("omega must be three positive frequencies")
        prod = self.omega[0] * self.omega[1] * self.omega[2]
        if abs(prod - 1.0) > 1e-9:
            raise ConfigError(f"omega1*omega2*omega3 must equal 1, got {prod}")

    @property
    def isotropic(self):
        return self.omega[0] == self.omega[1] == self.omega[2]

    @property
    def length_unit(self):
        """L = sqrt(hbar / (2 mu Omega))."""
        p = self._need_physical()
        return math.sqrt(p.hbar / (2.0 * p.mu * p.Omega))

    @property
    def alpha_unit(self):
        """alpha0 = mu / (2 pi hbar^2 L): strength whose scattering length is L."""
        p = self._need_physical()
        return p.mu / (2.0 * PI * p.hbar ** 2 * self.length_unit)

    @property
    def scattering_length(self):
        """ell_s = mu / (2 pi hbar^2 alpha) for the configured strength."""
        p = self._need_physical()
        if p.alpha is None or p.alpha == 0.0:
            raise ConfigError("scattering length needs a nonzero physical alpha")
        return p.mu / (2.0 * PI * p.hbar ** 2 * p.alpha)

    def _need_physical(self):
        if self.physical is None:
            raise ConfigError("physical scales (mu, hbar, Omega) not configured")
        return self.physical


def to_physical(e_dimless, cfg):
    """Energy in physical units: E = hbar Omega * E_dimless."""
    p = cfg._need_physical()
    return p.hbar * p.Omega * e_dimless


def from_physical(e_phys, cfg):
    p = cfg._need_physical()
    return e_phys / (p.hbar * p.Omega)


def alpha_scaling(alpha_physical, cfg):
    """Dimensionless strength alpha/alpha0."""
    return alpha_physical / cfg.alpha_unit


def alpha_ratio_to_q_level(alpha_over_alpha0):
    """Level of Q that the eigenvalue equation pins for a strength given
    in units of alpha0:  4 pi Q = alpha/alpha0."""
    return alpha_over_alpha0 / (4.0 * PI)


def scattering_length_reduced(alpha):
    """ell_s = 1/(4 pi alpha) in reduced units."""
    if alpha == 0.0:
        raise ConfigError("scattering length undefined at alpha = 0")
    return 1.0 / (4.0 * PI * alpha)
