"""Constitutive model for transversely isotropic linear elasticity.

The material is described either by engineering constants (Young's moduli,
Poisson ratios, shear moduli via the ratios p = E_l/E_t and q = mu_l/mu_t)
or by the five tensor coefficients (lambda, mu_t, mu_l, alpha, beta) plus
the derived gamma = 2(mu_l - mu_t).  All operations here are pure functions;
the value types are frozen dataclasses and safe to share across threads.
"""

from dataclasses import dataclass
import math

import numpy as np


class DegenerateDenominator(ValueError):
    """Parameter conversion hit a (near-)zero denominator."""


class SingularStiffness(ValueError):
    """Plane-strain stiffness is numerically singular."""


@dataclass(frozen=True)
class EngineeringConstants:
    """Physical parametrization: (E_t, p, q, nu_t, nu_l).

    E_t is the transverse Young's modulus, p = E_l/E_t the moduli ratio,
    q = mu_l/mu_t the shear ratio, nu_t and nu_l the transverse and
    longitudinal Poisson ratios.
    """

    E_t: float
    p: float
    q: float
    nu_t: float
    nu_l: float

    @property
    def E_l(self):
        return self.p * self.E_t

    @property
    def mu_t(self):
        return self.E_t / (2.0 * (1.0 + self.nu_t))

    @property
    def mu_l(self):
        return self.q * self.mu_t


@dataclass(frozen=True)
class MaterialParameters:
    """Coefficients of the elasticity tensor (all stress units)."""

    lam: float
    mu_t: float
    mu_l: float
    alpha: float
    beta: float

    @property
    def gamma(self):
        # Shear-difference modulus, tied exactly to the two shear moduli.
        return 2.0 * (self.mu_l - self.mu_t)


@dataclass(frozen=True)
class FibreFrame:
    """Unit fibre direction; 2 components in plane strain, 3 in 3D."""

    a: tuple

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        n = np.linalg.norm(a)
        if abs(n - 1.0) > 1e-14:
            raise ValueError(f"fibre direction must be a unit vector, |a| = {n}")
        object.__setattr__(self, "a", tuple(a))

    @classmethod
    def from_angle(cls, angle):
        """In-plane frame a = (cos angle, sin angle)."""
        return cls((math.cos(angle), math.sin(angle)))

    @property
    def vec(self):
        return np.asarray(self.a, dtype=float)


# Identifiers for the five pointwise-stability conditions.
COND_P_POSITIVE = "p_positive"
COND_SHEAR_ORDERING = "shear_ordering"
COND_NU_T_BOUND = "nu_t_bound"
COND_DISCRIMINANT = "discriminant"
COND_DENOMINATOR = "denominator"

ALL_CONDITIONS = (
    COND_P_POSITIVE,
    COND_SHEAR_ORDERING,
    COND_NU_T_BOUND,
    COND_DISCRIMINANT,
    COND_DENOMINATOR,
)


@dataclass(frozen=True)
class StabilityVerdict:
    admissible: bool
    violated: tuple = ()
    discriminant: float | None = None

    def __post_init__(self):
        assert self.admissible == (len(self.violated) == 0)


def derive_parameters(ec):
    """Convert engineering constants to elasticity-tensor coefficients.

    Raises DegenerateDenominator when the shared denominator
    (1 + nu_t)((1 - nu_t) p - 2 nu_l^2) is numerically zero, which happens
    on the stability boundary.
    """
    p, q, nu_t, nu_l, E_t = ec.p, ec.q, ec.nu_t, ec.nu_l, ec.E_t
    mu_t = E_t / (2.0 * (1.0 + nu_t))
    mu_l = q * mu_t
    d = (1.0 + nu_t) * ((1.0 - nu_t) * p - 2.0 * nu_l**2)
    if abs(d) < 1e-14 * max(1.0, abs(p)):
        raise DegenerateDenominator(
            f"parameter denominator {d} vanishes for p={p}, nu_t={nu_t}, nu_l={nu_l}"
        )
    lam = (nu_t * p + nu_l**2) / d * E_t
    alpha = ((nu_l - nu_t + nu_t * nu_l) * p - nu_l**2) / d * E_t
    beta = (
        (1.0 - nu_t**2) * p**2
        + (-2.0 * nu_t * nu_l + 2.0 * q * nu_t - 2.0 * nu_l + 1.0 - 2.0 * q) * p
        - (1.0 - 4.0 * q) * nu_l**2
    ) / d * E_t
    return MaterialParameters(lam=lam, mu_t=mu_t, mu_l=mu_l, alpha=alpha, beta=beta)


def check_stability(ec):
    """Certify the sufficient pointwise-stability conditions.

    The five conditions: p > 0; mu_l >= mu_t > 0; nu_t > -1;
    (2 nu_t + 1) p - (2 nu_l + 1) > 0; (1 - nu_t) p - 2 nu_l^2 > 0.
    NaN inputs produce a verdict with every condition violated.
    """
    vals = (ec.E_t, ec.p, ec.q, ec.nu_t, ec.nu_l)
    if any(math.isnan(v) for v in vals):
        return StabilityVerdict(False, ALL_CONDITIONS, None)

    violated = []
    if not ec.p > 0.0:
        violated.append(COND_P_POSITIVE)
    mu_t = ec.E_t / (2.0 * (1.0 + ec.nu_t)) if ec.nu_t != -1.0 else math.inf
    if not (ec.q * mu_t >= mu_t > 0.0):
        violated.append(COND_SHEAR_ORDERING)
    if not ec.nu_t > -1.0:
        violated.append(COND_NU_T_BOUND)
    if not (2.0 * ec.nu_t + 1.0) * ec.p - (2.0 * ec.nu_l + 1.0) > 0.0:
        violated.append(COND_DISCRIMINANT)
    if not (1.0 - ec.nu_t) * ec.p - 2.0 * ec.nu_l**2 > 0.0:
        violated.append(COND_DENOMINATOR)

    disc = None
    try:
        mp = derive_parameters(ec)
        disc = 4.0 * (
            mp.alpha**2 - (mp.lam + 2.0 * mp.mu_t / 3.0) * (mp.beta + 2.0 * mp.gamma)
        )
    except DegenerateDenominator:
        pass
    return StabilityVerdict(not violated, tuple(violated), disc)


def stiffness_apply(mp, frame, eps):
    """Apply the elasticity tensor to a symmetric strain, any dimension.

    sigma = lam tr(eps) I + 2 mu_t eps + beta (M:eps) M
          + alpha ((M:eps) I + tr(eps) M) + gamma (eps M + M eps),
    with M = a (x) a.
    """
    eps = np.asarray(eps, dtype=float)
    a = frame.vec
    if a.shape[0] != eps.shape[0]:
        raise ValueError("fibre direction and strain dimension mismatch")
    M = np.outer(a, a)
    tr = np.trace(eps)
    Me = float(np.tensordot(M, eps))
    I = np.eye(eps.shape[0])
    return (
        mp.lam * tr * I
        + 2.0 * mp.mu_t * eps
        + mp.beta * Me * M
        + mp.alpha * (Me * I + tr * M)
        + mp.gamma * (eps @ M + M @ eps)
    )


def stiffness_matrix_e3(mp):
    """6x6 Voigt stiffness for fibre e3, ordering (11, 22, 33, 23, 13, 12).

    Engineering shear strains (factor 2) on the strain side.
    """
    lam, mu_t, mu_l = mp.lam, mp.mu_t, mp.mu_l
    alpha, beta, gamma = mp.alpha, mp.beta, mp.gamma
    C = np.zeros((6, 6))
    C[0, 0] = C[1, 1] = lam + 2.0 * mu_t
    C[0, 1] = C[1, 0] = lam
    C[0, 2] = C[2, 0] = C[1, 2] = C[2, 1] = lam + alpha
    C[2, 2] = lam + 2.0 * mu_t + beta + 2.0 * alpha + 2.0 * gamma
    C[3, 3] = C[4, 4] = mu_l
    C[5, 5] = mu_t
    return C


def compliance_matrix_e3(ec):
    """6x6 Voigt compliance for fibre e3 from the engineering constants."""
    E_t, E_l = ec.E_t, ec.E_l
    mu_t, mu_l = ec.mu_t, ec.mu_l
    S = np.zeros((6, 6))
    S[0, 0] = S[1, 1] = 1.0 / E_t
    S[0, 1] = S[1, 0] = -ec.nu_t / E_t
    S[0, 2] = S[2, 0] = S[1, 2] = S[2, 1] = -ec.nu_l / E_l
    S[2, 2] = 1.0 / E_l
    S[3, 3] = S[4, 4] = 1.0 / mu_l
    S[5, 5] = 1.0 / mu_t
    return S


def plane_strain_stiffness(mp, frame):
    """3x3 Voigt stiffness (11, 22, 12; engineering shear) for in-plane fibre.

    Direct restriction of the stress-strain law to in-plane tensors with
    in-plane fibre direction; this is what the element integrands use.
    """
    a1, a2 = frame.vec[:2]
    lam, mu_t = mp.lam, mp.mu_t
    alpha, beta, gamma = mp.alpha, mp.beta, mp.gamma
    C = np.empty((3, 3))
    C[0, 0] = lam + 2.0 * mu_t + beta * a1**4 + 2.0 * (alpha + gamma) * a1**2
    C[1, 1] = lam + 2.0 * mu_t + beta * a2**4 + 2.0 * (alpha + gamma) * a2**2
    C[0, 1] = C[1, 0] = lam + alpha + beta * a1**2 * a2**2
    C[0, 2] = C[2, 0] = (alpha + gamma) * a1 * a2 + beta * a1**3 * a2
    C[1, 2] = C[2, 1] = (alpha + gamma) * a1 * a2 + beta * a1 * a2**3
    C[2, 2] = mu_t + 0.5 * gamma + beta * a1**2 * a2**2
    return C


def plane_strain_compliance(mp, frame):
    """3x3 plane-strain compliance from the closed-form inverse.

    Entries are the analytic cofactor expressions; used by the beam's
    analytical solution and as an independent check on the stiffness.
    """
    a = frame.vec
    if abs(np.linalg.norm(a[:2]) - 1.0) > 1e-14:
        raise ValueError("plane-strain compliance needs an in-plane unit fibre")
    a1, a2 = a[:2]
    lam, mu_t = mp.lam, mp.mu_t
    alpha, beta, gamma = mp.alpha, mp.beta, mp.gamma

    c11 = lam + 2.0 * mu_t + 2.0 * (gamma + alpha) * a1**2 + beta * a1**4
    c22 = lam + 2.0 * mu_t + 2.0 * (gamma + alpha) * a2**2 + beta * a2**4
    c12 = lam + alpha + beta * a1**2 * a2**2
    c13 = (alpha + gamma) * a1 * a2 + beta * a1**3 * a2
    c23 = (alpha + gamma) * a1 * a2 + beta * a1 * a2**3
    c33 = mu_t + 0.5 * gamma + beta * a1**2 * a2**2

    det = (
        c11 * (c22 * c33 - c23**2)
        - c12 * (c12 * c33 - c13 * c23)
        + c13 * (c12 * c23 - c13 * c22)
    )
    scale = (abs(lam) + 2.0 * mu_t + abs(alpha) + abs(beta) + abs(gamma)) ** 3
    if abs(det) <= 1e-14 * scale:
        raise SingularStiffness(f"plane-strain stiffness determinant {det} ~ 0")

    S = np.empty((3, 3))
    S[0, 0] = c22 * c33 - c23**2
    S[0, 1] = S[1, 0] = c13 * c23 - c12 * c33
    S[0, 2] = S[2, 0] = c12 * c23 - c13 * c22
    S[1, 1] = c11 * c33 - c13**2
    S[1, 2] = S[2, 1] = c12 * c13 - c11 * c23
    S[2, 2] = c11 * c22 - c12**2
    return S / det


def error_bound_constant(mp):
    """Scaled a-priori error constant (max(lam, 2 mu_t) + alpha + beta + gamma)/mu_t.

    The generic multiplicative constant is normalized to 1; only the
    dependence on the material parameters is meaningful.
    """
    if not mp.mu_t > 0.0:
        raise ValueError("mu_t must be positive")
    return (max(mp.lam, 2.0 * mp.mu_t) + mp.alpha + mp.beta + mp.gamma) / mp.mu_t
