"""Bound states of the mu-imaginary potential.

The quantisation comes from requiring the z -> -inf growing term of the
transmitted hypergeometric solution to vanish, which forces one of its
denominator Gamma arguments onto a pole:

    b_n = sqrt(v cos^2 mu + 1/4) - (n + 1/2) > 0
    a_n = i v sin(2 mu) / (2 b_n)
    eps_n = v cos(2 mu) - a_n^2 - b_n^2

and the eigenfunctions are terminating hypergeometric polynomials.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .specfun import GammaRatioSpec, Tag, gamma_ratio, gauss_2f1_terminating


@dataclass(frozen=True)
class BoundState:
    n: int
    b_n: float
    a_n: complex
    epsilon_n: float
    A_n: complex = 1.0 + 0.0j


def _gamma(v, mu):
    return np.sqrt(v * np.cos(mu) ** 2 + 0.25)


def state_count(v, mu):
    """Number of n with n < sqrt(v cos^2 mu + 1/4) - 1/2 (strict)."""
    top = _gamma(v, mu) - 0.5
    if top <= 0:
        return 0
    n = int(np.floor(top))
    return n if n == top else n + 1


def bound_spectrum(v, mu):
    if v <= 0:
        raise ValueError("bound states need v > 0")
    if abs(np.cos(mu)) < 1e-12:
        raise ValueError("mu is an odd multiple of pi/2; the potential is degenerate")
    g = _gamma(v, mu)
    states = []
    for n in range(state_count(v, mu)):
        b = g - (n + 0.5)
        a = 1j * v * np.sin(2 * mu) / (2 * b)
        # real arithmetic throughout, so Im eps_n == 0 exactly
        eps = v * np.cos(2 * mu) + (v * np.sin(2 * mu)) ** 2 / (4 * b * b) - b * b
        state = BoundState(n, float(b), complex(0.0, a.imag), float(eps))
        states.append(BoundState(n, state.b_n, state.a_n, state.epsilon_n, pt_eigenvalue(state, v, mu)))
    return states


def bound_wavefunction(state, v, mu, z):
    """Unnormalised psi_n(z) = e^{-a z} (e^z + e^-z)^{-b} F(-n, 2g - n; 1 + a + b; u)."""
    z = np.asarray(z, dtype=float)
    a, b, n = state.a_n, state.b_n, state.n
    g = _gamma(v, mu)
    u = expit(-2.0 * z)  # e^-z / (e^z + e^-z)
    log_cosh2 = np.abs(z) + np.log1p(np.exp(-2.0 * np.abs(z)))  # log(e^z + e^-z)
    prefactor = np.exp(-a * z - b * log_cosh2)
    out = prefactor * gauss_2f1_terminating(n, 2 * g - n, 1 + a + b, u)
    return out if np.ndim(out) else complex(out)


def pt_eigenvalue(state, v, mu):
    """A_n in PT psi_n = A_n psi_n, where (PT psi)(z) = conj(psi(-z)).

    Obtained from the argument reversal of the terminating series:
    A_n = (a + b + 1)_n / (a - b - n)_n.
    """
    a, b, n = state.a_n, state.b_n, state.n
    spec = GammaRatioSpec((a + b + n + 1, a - b - n), (a + b + 1, a - b))
    res = gamma_ratio(spec)
    if res.kind is Tag.FINITE:
        return res.value
    if res.kind is not Tag.INDETERMINATE:
        raise ArithmeticError(f"PT eigenvalue is {res.kind.name} for n={n}")
    # Hermitian limit with integer b: poles cancel pairwise, the
    # Pochhammer quotient stays finite
    out = 1.0 + 0.0j
    for j in range(n):
        out *= (a + b + 1 + j) / (a - b - n + j)
    return out
