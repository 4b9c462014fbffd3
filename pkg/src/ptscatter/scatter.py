"""Closed-form reflection and transmission amplitudes.

Three Gamma-ratio families share one layout.  With the transmitted wave
normalised to ``exp(i k_+ z)`` on the right, the left asymptote of each
solution pair is written as

    psi_1 -> X2 e^{i k_- z} + X1 e^{-i k_- z}
    psi_2 -> X4 e^{i k_- z} + X3 e^{-i k_- z}

giving t_l = 1/X2, r_l = X1/X2, r_r = -X4/X2, t_r = (X2 X3 - X1 X4)/X2.

* G-family: mu-imaginary scattering (and the real potential).
* P-family: d-imaginary penetrating states.  P1..P4 carry the opposite
  sign of ``k_-`` in the prefactor, so P1/P2 and P3/P4 trade places
  relative to the G layout: X1 = P2, X2 = P1, X3 = P4, X4 = P3.
* H-family: d-imaginary free states, real-form Gamma arguments laid out
  like the G-family.

All values are :class:`~ptscatter.specfun.Tagged`; divergences travel as
tags, never as bare infinities.
"""

from dataclasses import dataclass

import numpy as np

from .model import CaseKind, PotentialParams, RegimeError, branch_sqrt, momenta
from .specfun import Tag, Tagged, gamma_ratio_array

_SINGULAR = (Tag.POLE, Tag.INDETERMINATE)


@dataclass(frozen=True)
class ScatteringAmplitudes:
    family: str
    t_l: Tagged
    r_l: Tagged
    t_r: Tagged
    r_r: Tagged
    coeffs: tuple
    k_plus: object
    k_minus: object

    @property
    def singular(self):
        out = np.zeros(np.shape(self.t_l.kind), dtype=bool)
        for amp in (self.t_l, self.r_l, self.t_r, self.r_r):
            out |= np.isin(amp.kind, _SINGULAR)
        return out if out.ndim else bool(out)


@dataclass(frozen=True)
class ScatteringCoefficients:
    R_left: object
    R_right: object
    T_left: object
    T_right: object
    unitarity_defect: object
    singular: object

    @property
    def T(self):
        return self.T_left


def _g_family(kp, km, g):
    i = 1j
    G1 = gamma_ratio_array(
        [1 - i * kp, i * km],
        [-0.5 * i * kp + 0.5 * i * km + 0.5 + g, -0.5 * i * kp + 0.5 * i * km + 0.5 - g],
    )
    G2 = gamma_ratio_array(
        [1 - i * kp, -i * km],
        [-0.5 * i * kp - 0.5 * i * km + 0.5 - g, -0.5 * i * kp - 0.5 * i * km + 0.5 + g],
    )
    G3 = gamma_ratio_array(
        [1 + i * kp, i * km],
        [0.5 * i * kp + 0.5 * i * km + 0.5 + g, 0.5 * i * kp + 0.5 * i * km + 0.5 - g],
    )
    G4 = gamma_ratio_array(
        [1 + i * kp, -i * km],
        [0.5 * i * kp - 0.5 * i * km + 0.5 - g, 0.5 * i * kp - 0.5 * i * km + 0.5 + g],
    )
    return G1, G2, G3, G4


def _p_family(kp, km, g):
    i = 1j
    P1 = gamma_ratio_array(
        [1 - i * kp, -i * km],
        [-0.5 * i * kp - 0.5 * i * km + 0.5 + g, -0.5 * i * kp - 0.5 * i * km + 0.5 - g],
    )
    P2 = gamma_ratio_array(
        [1 - i * kp, i * km],
        [-0.5 * i * kp + 0.5 * i * km + 0.5 - g, -0.5 * i * kp + 0.5 * i * km + 0.5 + g],
    )
    P3 = gamma_ratio_array(
        [1 + i * kp, -i * km],
        [0.5 * i * kp - 0.5 * i * km + 0.5 + g, 0.5 * i * kp - 0.5 * i * km + 0.5 - g],
    )
    P4 = gamma_ratio_array(
        [1 + i * kp, i * km],
        [0.5 * i * kp + 0.5 * i * km + 0.5 - g, 0.5 * i * kp + 0.5 * i * km + 0.5 + g],
    )
    return P1, P2, P3, P4


def _h_family(kp, km, g):
    H1 = gamma_ratio_array(
        [1 + kp, -km],
        [0.5 * kp - 0.5 * km + 0.5 + g, 0.5 * kp - 0.5 * km + 0.5 - g],
    )
    H2 = gamma_ratio_array(
        [1 + kp, km],
        [0.5 * kp + 0.5 * km + 0.5 - g, 0.5 * kp + 0.5 * km + 0.5 + g],
    )
    H3 = gamma_ratio_array(
        [1 - kp, -km],
        [-0.5 * kp - 0.5 * km + 0.5 + g, -0.5 * kp - 0.5 * km + 0.5 - g],
    )
    H4 = gamma_ratio_array(
        [1 - kp, km],
        [-0.5 * kp + 0.5 * km + 0.5 - g, -0.5 * kp + 0.5 * km + 0.5 + g],
    )
    return H1, H2, H3, H4


def _assemble(family, x1, x2, x3, x4, coeffs, kp, km):
    return ScatteringAmplitudes(
        family=family,
        t_l=1.0 / x2,
        r_l=x1 / x2,
        t_r=(x2 * x3 - x1 * x4) / x2,
        r_r=-(x4 / x2),
        coeffs=coeffs,
        k_plus=kp,
        k_minus=km,
    )


def amplitudes_case1(v, mu, eps):
    """mu-imaginary scattering amplitudes (G-family)."""
    m = momenta(PotentialParams(v, mu, CaseKind.MU_IMAGINARY), eps)
    G = _g_family(m.k_plus, m.k_minus, m.gamma)
    return _assemble("G", *G, G, m.k_plus, m.k_minus)


def amplitudes_real(v, mu, eps):
    """Hermitian potential, G-family with real mu (reflecting and free regimes)."""
    params = PotentialParams(v, mu, CaseKind.REAL)
    if v != 0:
        lo = min(v * np.exp(-2 * mu), v * np.exp(2 * mu))
        if np.any(np.asarray(eps) < lo):
            raise RegimeError(f"real-potential scattering needs eps >= {lo:.6g}")
    m = momenta(params, eps)
    G = _g_family(m.k_plus, m.k_minus, m.gamma)
    return _assemble("G", *G, G, m.k_plus, m.k_minus)


def penetrating_window(v, mu):
    return (-v * np.exp(-2 * mu), 0.0)


def amplitudes_case2_penetrating(v, mu, eps):
    """d-imaginary penetrating amplitudes (P-family), -v e^{-2 mu} < eps < 0."""
    eps = np.asarray(eps, dtype=float)
    lo, hi = penetrating_window(v, mu)
    if v != 0 and np.any((eps <= lo) | (eps >= hi)):
        raise RegimeError(f"penetrating states need {lo:.6g} < eps < 0")
    kp = branch_sqrt(eps + v * np.exp(2 * mu))
    km = branch_sqrt(eps + v * np.exp(-2 * mu))
    g = branch_sqrt(0.25 - v * np.cosh(mu) ** 2)
    P = _p_family(kp, km, g)
    P1, P2, P3, P4 = P
    return _assemble("P", P2, P1, P4, P3, P, kp, km)


def amplitudes_case2_free(v, mu, eps):
    """d-imaginary free-state amplitudes (H-family), eps > 0."""
    eps = np.asarray(eps, dtype=float)
    if np.any(eps <= 0):
        raise RegimeError("free states need eps > 0")
    m = momenta(PotentialParams(v, mu, CaseKind.D_IMAGINARY), eps)
    H = _h_family(m.k_plus, m.k_minus, m.gamma)
    return _assemble("H", *H, H, m.k_plus, m.k_minus)


def amplitudes(params, eps):
    """Dispatch on case and, for d-imaginary, on the sign of eps."""
    if params.case is CaseKind.MU_IMAGINARY:
        return amplitudes_case1(params.v, params.mu, eps)
    if params.case is CaseKind.REAL:
        return amplitudes_real(params.v, params.mu, eps)
    eps_arr = np.asarray(eps, dtype=float)
    if np.all(eps_arr < 0):
        return amplitudes_case2_penetrating(params.v, params.mu, eps)
    if np.all(eps_arr > 0):
        return amplitudes_case2_free(params.v, params.mu, eps)
    lo, _ = penetrating_window(params.v, params.mu)
    raise RegimeError(
        f"energies straddle regimes; valid windows are ({lo:.6g}, 0) penetrating and (0, inf) free"
    )


def coefficients(amps, flux=False):
    """R = |r|^2 and T = |t|^2; with ``flux`` T carries Re(k_out)/Re(k_in)."""
    with np.errstate(invalid="ignore", over="ignore"):
        R_l = np.abs(amps.r_l.value) ** 2
        R_r = np.abs(amps.r_r.value) ** 2
        T_l = np.abs(amps.t_l.value) ** 2
        T_r = np.abs(amps.t_r.value) ** 2
        if flux:
            ratio = np.real(amps.k_plus) / np.real(amps.k_minus)
            T_l = T_l * ratio
            T_r = T_r / ratio
        defect = R_l + T_l - 1.0
    out = [np.asarray(x, dtype=float) for x in (R_l, R_r, T_l, T_r, defect)]
    if out[0].ndim == 0:
        out = [float(x) for x in out]
    return ScatteringCoefficients(*out, singular=amps.singular)
