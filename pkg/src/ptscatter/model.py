"""Potential definitions, channel momenta and regime classification.

All quantities are dimensionless: lengths in units of the width d and
energies in units of hbar^2 / (2 m d^2), so ``v`` is the scaled depth and
``eps`` the scaled energy.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np


class DomainError(ValueError):
    pass


class RegimeError(ValueError):
    pass


class CaseKind(str, Enum):
    REAL = "real"
    MU_IMAGINARY = "mu-imag"
    D_IMAGINARY = "d-imag"


class Regime(str, Enum):
    BOUND = "bound"
    REFLECTING = "reflecting"
    FREE = "free"
    SCATTERING = "scattering"
    PENETRATING = "penetrating"


@dataclass(frozen=True)
class PotentialParams:
    v: float
    mu: float
    case: CaseKind = CaseKind.MU_IMAGINARY

    def __post_init__(self):
        object.__setattr__(self, "case", CaseKind(self.case))
        if not np.isfinite(self.v) or not np.isfinite(self.mu):
            raise ValueError("v and mu must be finite")

    @property
    def is_free_particle(self):
        return self.v == 0

    @property
    def degenerate_angle(self):
        """True when mu is a multiple of pi/2 in the mu-imaginary case.

        There the potential is either real (even multiples) or the
        complexification is indefinite (odd multiples).
        """
        if self.case is not CaseKind.MU_IMAGINARY:
            return False
        q = self.mu / (np.pi / 2)
        return abs(q - round(q)) < 1e-12

    def to_dict(self):
        return {"case": self.case.value, "v": self.v, "mu": self.mu}


@dataclass(frozen=True)
class ChannelMomenta:
    k_plus: object
    k_minus: object
    gamma: object


def branch_sqrt(w):
    """Square root with Re >= 0; on the imaginary axis Im >= 0."""
    s = np.sqrt(np.asarray(w, dtype=complex))
    flip = (s.real < 0) | ((s.real == 0) & (s.imag < 0))
    s = np.where(flip, -s, s)
    # drop signed zeros so conj-symmetry checks compare equal
    s = s + 0.0
    return s if s.ndim else complex(s)


def asymptotes(params):
    """Potential values (V(+inf), V(-inf))."""
    v, mu = params.v, params.mu
    if params.case is CaseKind.MU_IMAGINARY:
        return v * np.exp(2j * mu), v * np.exp(-2j * mu)
    return v * np.exp(2 * mu), v * np.exp(-2 * mu)


def momenta(params, eps):
    v, mu = params.v, params.mu
    eps = np.asarray(eps, dtype=float)
    if params.case is CaseKind.MU_IMAGINARY:
        kp = branch_sqrt(eps - v * np.exp(2j * mu))
        km = branch_sqrt(eps - v * np.exp(-2j * mu))
        gamma = branch_sqrt(v * np.cos(mu) ** 2 + 0.25)
    elif params.case is CaseKind.REAL:
        kp = branch_sqrt(eps - v * np.exp(2 * mu))
        km = branch_sqrt(eps - v * np.exp(-2 * mu))
        gamma = branch_sqrt(v * np.cosh(mu) ** 2 + 0.25)
    else:
        # negative energies: inverted potential, penetrating channel
        sign = np.where(eps < 0, 1.0, -1.0)
        kp = branch_sqrt(eps + sign * v * np.exp(2 * mu))
        km = branch_sqrt(eps + sign * v * np.exp(-2 * mu))
        gamma = branch_sqrt(0.25 - v * np.cosh(mu) ** 2)
    return ChannelMomenta(kp, km, gamma)


def potential_value(params, x, zeta=0.0, d=1.0):
    """Sample the potential.

    Real case: ``v cosh^2(mu) (tanh((x - mu d)/d) + tanh mu)^2`` along real x.

    mu-imaginary case: evaluated along the real line of
    ``z = x/d - i mu`` shifted by ``i mu``, i.e. with the origin at the
    centre of PT symmetry, ``v cos^2(mu) (tanh z + i tan mu)^2``.

    d-imaginary case: ``z = -i (x + i zeta)/d - mu``, complex in general.
    """
    v, mu = params.v, params.mu
    x = np.asarray(x, dtype=float)
    if params.case is CaseKind.REAL:
        z = x / d - mu
        out = v * np.cosh(mu) ** 2 * (np.tanh(z) + np.tanh(mu)) ** 2 + 0j
    elif params.case is CaseKind.MU_IMAGINARY:
        z = x / d
        # same as cos^2(mu) (tanh z + i tan mu)^2 without the tan pole
        out = v * (np.cos(mu) * np.tanh(z) + 1j * np.sin(mu)) ** 2
    else:
        z = -1j * (x + 1j * zeta) / d - mu
        if np.any(np.abs(np.cosh(z)) < 1e-6):
            raise DomainError(f"tanh pole on the sampling line (zeta={zeta}, mu={mu}, d={d})")
        out = v * np.cosh(mu) ** 2 * (np.tanh(z) + np.tanh(mu)) ** 2
    return out if out.ndim else complex(out)


def inverted_potential(params, z):
    """Effective real-line potential of the d-imaginary penetrating problem."""
    z = np.asarray(z, dtype=float)
    return -params.v * np.cosh(params.mu) ** 2 * (np.tanh(z) + np.tanh(params.mu)) ** 2


def thresholds(params):
    """Regime boundaries on the energy axis, ascending."""
    v, mu = params.v, params.mu
    if params.case is CaseKind.REAL:
        lo, hi = sorted((v * np.exp(-2 * mu), v * np.exp(2 * mu)))
        return (0.0, lo, hi)
    if params.case is CaseKind.D_IMAGINARY:
        return (-v * min(np.exp(-2 * mu), np.exp(2 * mu)), 0.0)
    return (v * np.cos(2 * mu),)


def _bound_energies(v, mu):
    gamma = np.sqrt(v * np.cos(mu) ** 2 + 0.25)
    out = []
    n = 0
    while gamma - (n + 0.5) > 0:
        b = gamma - (n + 0.5)
        out.append(v * np.cos(2 * mu) + (v * np.sin(2 * mu)) ** 2 / (4 * b * b) - b * b)
        n += 1
    return out


def regime_of(params, eps, tol=1e-9):
    """Classify an energy.  Boundary values go to the higher regime."""
    eps = float(eps)
    if params.case is CaseKind.REAL:
        _, lo, hi = thresholds(params)
        if 0 < eps < lo:
            return Regime.BOUND
        if lo <= eps < hi:
            return Regime.REFLECTING
        if eps >= hi:
            return Regime.FREE
        raise RegimeError(f"eps={eps} lies below the potential minimum 0")
    if params.case is CaseKind.D_IMAGINARY:
        lo, _ = thresholds(params)
        if eps >= 0:
            return Regime.FREE
        if eps > lo:
            return Regime.PENETRATING
        raise RegimeError(f"eps={eps} below the penetrating window ({lo}, 0)")
    if params.v > 0 and np.cos(params.mu) != 0:
        for e in _bound_energies(params.v, params.mu):
            if abs(eps - e) <= tol * max(1.0, abs(e)):
                return Regime.BOUND
    return Regime.SCATTERING
