"""Direct-integration scattering and finite-difference bound states.

Nothing here touches the Gamma-function machinery; these routines exist
to check the closed forms independently.
"""

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import solve_ivp
from scipy.sparse import diags
from scipy.sparse.linalg import eigs

from .model import CaseKind, DomainError, RegimeError, momenta
from .scatter import ScatteringAmplitudes, penetrating_window
from .specfun import Tagged


class AccuracyError(RuntimeError):
    pass


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class IntegrationConfig:
    L: float = 2.0
    rel_tol: float = 1e-10
    max_step: float = np.inf
    side: Side = Side.LEFT

    def __post_init__(self):
        object.__setattr__(self, "side", Side(self.side))
        if self.L < 1:
            raise ValueError("half-domain L must be >= 1")


MAX_CONDITION = 1e12
JOST_TERMS = 60


def _square_form(params):
    """(w, c, beta) with U(z) = w (c tanh z + beta)^2 along real z."""
    v, mu = params.v, params.mu
    if params.case is CaseKind.MU_IMAGINARY:
        return v, np.cos(mu), 1j * np.sin(mu)
    if params.case is CaseKind.REAL:
        return v, np.cosh(mu), np.sinh(mu)
    # d-imaginary penetrating: Schrodinger problem in the inverted potential
    return -v, np.cosh(mu), np.sinh(mu)


def _potential_on_real_line(params):
    w, c, beta = _square_form(params)
    return lambda z: w * (c * np.tanh(z) + beta) ** 2


def _tail_coefficients(params, side, terms=JOST_TERMS):
    """C_m with U(z) = U(side*inf) + sum_m C_m exp(-2 m |z|) far out on ``side``."""
    w, c, beta = _square_form(params)
    s = 1.0 if side > 0 else -1.0
    # tanh z = s (1 + tau),  tau = 2 sum_{m>=1} (-1)^m q^m
    tau = np.zeros(terms + 1)
    tau[1:] = 2.0 * (-1.0) ** np.arange(1, terms + 1)
    tau2 = np.convolve(tau, tau)[: terms + 1]
    base = s * c + beta
    return w * (2 * s * c * base * tau + c * c * tau2)


def _jost(k, coeffs, z, side):
    """Exact solution ~ exp(i k z) as z -> side*inf, with its derivative.

    The tail of the potential is a power series in exp(-2|z|), so the
    solution is exp(i k z) times a convergent series in the same variable.
    """
    k = np.asarray(k, dtype=complex)
    s = 1.0 if side > 0 else -1.0
    terms = len(coeffs) - 1
    a = [np.ones_like(k)]
    for j in range(1, terms + 1):
        den = 4.0 * j * (j - 1j * s * k)
        if np.any(np.abs(den) < 1e-12):
            raise DomainError("Jost series denominator vanishes")
        a.append(sum(coeffs[m] * a[j - m] for m in range(1, j + 1)) / den)
    psi = np.zeros_like(k)
    dpsi = np.zeros_like(k)
    for j, aj in enumerate(a):
        lam = 1j * k - 2.0 * s * j
        e = aj * np.exp(lam * z)
        psi = psi + e
        dpsi = dpsi + lam * e
    return psi, dpsi


def _check_regime(params, eps):
    eps = np.asarray(eps, dtype=float)
    if params.case is CaseKind.D_IMAGINARY:
        lo, hi = penetrating_window(params.v, params.mu)
        if params.v != 0 and np.any((eps <= lo) | (eps >= hi)):
            raise RegimeError(
                f"oracle covers d-imaginary penetrating states only: {lo:.6g} < eps < 0"
            )


def channel_momenta(params, eps):
    if params.case is CaseKind.D_IMAGINARY:
        from .model import branch_sqrt

        v, mu = params.v, params.mu
        eps = np.asarray(eps, dtype=float)
        return branch_sqrt(eps + v * np.exp(2 * mu)), branch_sqrt(eps + v * np.exp(-2 * mu))
    m = momenta(params, eps)
    return m.k_plus, m.k_minus


def _decompose(psi, dpsi, f_in, f_out):
    """Coefficients of psi on the basis (f_in, f_out) via Wronskians."""
    (u, du), (w, dw) = f_in, f_out
    wr = u * dw - du * w
    A = (psi * dw - dpsi * w) / wr
    B = (u * dpsi - du * psi) / wr
    cond = (np.abs(u) + np.abs(du)) * (np.abs(w) + np.abs(dw)) / np.abs(wr)
    return A, B, cond


def integrate_scattering_batch(params, eps, config=IntegrationConfig()):
    """Integrate one incidence side for many energies in a single ODE solve.

    The energies are stacked into one system, so the adaptive step is set
    by the most demanding energy while every component keeps its own
    relative error control.  Returns ``(r, t)`` arrays.
    """
    _check_regime(params, eps)
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    kp, km = channel_momenta(params, eps)
    kp, km = np.atleast_1d(kp), np.atleast_1d(km)
    if np.any(kp == 0) or np.any(km == 0):
        raise DomainError("channel threshold: k = 0")
    L = config.L
    imk = np.maximum(np.abs(kp.imag), np.abs(km.imag)) * L
    if np.any(imk > 30):
        warnings.warn("|Im k| L > 30: asymptotic matching is ill-conditioned", RuntimeWarning)
    U = _potential_on_real_line(params)
    n = eps.size

    if config.side is Side.LEFT:
        # transmitted exp(i k+ z) on the right, integrate leftward
        start, end = L, -L
        seed = _jost(kp, _tail_coefficients(params, +1), start, +1)
        c_end = _tail_coefficients(params, -1)
        f_in, f_out = _jost(km, c_end, end, -1), _jost(-km, c_end, end, -1)
    else:
        start, end = -L, L
        seed = _jost(-km, _tail_coefficients(params, -1), start, -1)
        c_end = _tail_coefficients(params, +1)
        f_in, f_out = _jost(-kp, c_end, end, +1), _jost(kp, c_end, end, +1)
    # normalise the seed so the integration starts at unit size
    norm = seed[0]
    y0 = np.concatenate([seed[0] / norm, seed[1] / norm]).astype(complex)

    def rhs(z, y):
        psi = y[:n]
        return np.concatenate([y[n:], (U(z) - eps) * psi])

    sol = solve_ivp(
        rhs,
        (start, end),
        y0,
        method="DOP853",
        rtol=config.rel_tol,
        atol=1e-14 * config.rel_tol,
        max_step=config.max_step,
    )
    if not sol.success:
        raise DomainError(f"integration failed: {sol.message}")
    psi, dpsi = sol.y[:n, -1], sol.y[n:, -1]
    if not (np.all(np.isfinite(psi)) and np.all(np.isfinite(dpsi))):
        raise DomainError("solution overflowed during integration")

    # the integrated solution is (transmitted Jost solution) / norm
    A, B, cond = _decompose(psi, dpsi, f_in, f_out)
    t = 1.0 / (A * norm)
    r = B / A
    # closed channels mix growing and decaying waves across the domain
    cond = np.atleast_1d(cond) * np.exp(2.0 * imk)
    if np.any(cond > MAX_CONDITION):
        raise AccuracyError(f"matching condition number {cond.max():.3g} exceeds {MAX_CONDITION:g}")
    return r, t


def integrate_scattering(params, eps, config=IntegrationConfig()):
    """(r, t) for one energy and the configured incidence side."""
    r, t = integrate_scattering_batch(params, [eps], config)
    return complex(r[0]), complex(t[0])


def integrate_amplitudes(params, eps, config=IntegrationConfig()):
    """Both incidence sides packed as :class:`ScatteringAmplitudes`."""
    left = IntegrationConfig(config.L, config.rel_tol, config.max_step, Side.LEFT)
    right = IntegrationConfig(config.L, config.rel_tol, config.max_step, Side.RIGHT)
    r_l, t_l = integrate_scattering_batch(params, eps, left)
    r_r, t_r = integrate_scattering_batch(params, eps, right)
    kp, km = channel_momenta(params, eps)
    scalar = np.ndim(eps) == 0

    def pack(x):
        return Tagged.finite(x[0] if scalar else x)

    return ScatteringAmplitudes(
        "oracle", pack(t_l), pack(r_l), pack(t_r), pack(r_r), (), kp, km
    )


def _hamiltonian(params, grid_n, box):
    if params.case is not CaseKind.MU_IMAGINARY:
        raise ValueError("bound_oracle handles the mu-imaginary case")
    z = np.linspace(-box, box, grid_n + 2)[1:-1]
    h = z[1] - z[0]
    U = _potential_on_real_line(params)(z)
    off = -np.ones(grid_n - 1) / h**2
    return diags([2.0 / h**2 + U, off, off], [0, 1, -1], format="csc")


def bound_oracle(params, grid_n=2000, box=12.0, targets=None):
    """Eigenvalues of the 3-point discretised complex Hamiltonian on [-box, box].

    Without ``targets`` the eigenvalues with Re below the continuum
    threshold ``v cos(2 mu)`` are returned, sorted by real part.  With
    ``targets`` the eigenvalue nearest each target is returned instead,
    which is how states embedded above the threshold are reached.
    """
    if grid_n > 4000:
        raise ValueError("grid_n must be <= 4000")
    H = _hamiltonian(params, grid_n, box)
    if targets is not None:
        out = []
        for t in np.atleast_1d(targets):
            w = eigs(H, k=1, sigma=complex(t), which="LM", return_eigenvectors=False)
            out.append(complex(w[0]))
        return out
    v, mu = params.v, params.mu
    threshold = v * np.cos(2 * mu)
    sigma = -abs(v) - 1.0
    k = 6
    while True:
        k = min(k, grid_n - 2)
        w = eigs(H, k=k, sigma=sigma, which="LM", return_eigenvectors=False)
        below = np.sort_complex(w[w.real < threshold])
        if below.size < k or k >= grid_n - 2:
            return [complex(x) for x in sorted(below, key=lambda x: x.real)]
        k *= 2
