"""Energy scans and detection of scattering features.

Features located here:

* reciprocity points, where R_left = R_right;
* spectral singularities, where the reflection diverges;
* invisibility points, where R on one side vanishes with T = 1;
* unitarity points, where R_left + T = 1.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from .model import CaseKind, PotentialParams, thresholds
from .scatter import amplitudes, coefficients

POINTS_PER_DECADE = 2000
ROOT_XTOL = 1e-12
RECIPROCITY_TOL = 1e-10
UNITARITY_TOL = 1e-10
PEAK_THRESHOLD = 1e3
POLE_MATCH_TOL = 1e-6
INVISIBLE_R_TOL = 1e-8
INVISIBLE_T_TOL = 1e-3
PAIR_TOL = 1e-6
ASYMPTOTIC_DEFECT = 1e-3
_MIN_CHUNK = 256


class FeatureKind(str, Enum):
    RECIPROCITY = "reciprocity"
    SPECTRAL_SINGULARITY = "spectral-singularity"
    INVISIBLE_LEFT = "invisible-left"
    INVISIBLE_RIGHT = "invisible-right"
    INVISIBLE_BOTH = "invisible-both"
    UNITARITY = "unitarity"


@dataclass(frozen=True)
class FeaturePoint:
    kind: FeatureKind
    epsilon: float
    residual: float
    refined: bool
    boundary: bool = False

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "epsilon": self.epsilon,
            "residual": self.residual,
            "refined": self.refined,
        }


@dataclass
class FeatureResult:
    """Points found in a window plus whole-window diagnostics.

    ``degenerate`` marks a window where the defining function vanishes
    identically (Hermitian limit), so no isolated points exist.
    ``asymptotic`` marks unitarity restored at the top of the window.
    ``pole_roots`` holds the complex energies solving the analytic pole
    condition, for spectral-singularity searches.
    """

    points: list = field(default_factory=list)
    degenerate: bool = False
    asymptotic: bool = False
    pole_roots: list = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    @property
    def energies(self):
        return [p.epsilon for p in self.points]


@dataclass(frozen=True)
class ScanTable:
    params: PotentialParams
    epsilon: np.ndarray
    R_left: np.ndarray
    R_right: np.ndarray
    T: np.ndarray
    defect: np.ndarray
    singular: np.ndarray

    def __len__(self):
        return self.epsilon.size

    def rows(self):
        for i in range(len(self)):
            yield (
                float(self.epsilon[i]),
                float(self.R_left[i]),
                float(self.R_right[i]),
                float(self.T[i]),
                float(self.defect[i]),
                bool(self.singular[i]),
            )


def default_steps(eps_min, eps_max):
    """Grid size at POINTS_PER_DECADE, counting at least one decade."""
    lo = max(eps_min, 1e-2 * eps_max) if eps_max > 0 else eps_min
    decades = math.log10(eps_max / lo) if lo > 0 and eps_max > lo else 1.0
    return int(math.ceil(POINTS_PER_DECADE * max(1.0, decades)))


def _thread_cap():
    env = os.environ.get("PTSCATTER_THREADS")
    n = os.cpu_count() or 1
    if env:
        try:
            n = min(n, max(1, int(env)))
        except ValueError:
            pass
    return n


def _evaluate(params, eps):
    c = coefficients(amplitudes(params, eps))
    sing = np.asarray(c.singular, dtype=bool)
    R_l, R_r, T, d = (np.where(sing, np.inf, np.asarray(x, dtype=float)) for x in (c.R_left, c.R_right, c.T_left, c.unitarity_defect))
    return R_l, R_r, T, d, sing


def scan(params, eps_min, eps_max, steps=None, workers=None):
    """Evaluate R_left, R_right, T and R_left + T - 1 on a uniform grid.

    The grid has ``steps + 1`` points including both ends.  Chunks run on
    a thread pool capped by PTSCATTER_THREADS; results are concatenated in
    grid order, so the table does not depend on the worker count.
    """
    if not eps_min < eps_max:
        raise ValueError("eps_min must be below eps_max")
    if steps is None:
        steps = default_steps(eps_min, eps_max)
    if steps < 2:
        raise ValueError("steps must be >= 2")
    eps = np.linspace(eps_min, eps_max, steps + 1)
    # regime check up front so the error names the valid window
    amplitudes(params, eps[[0, -1]])
    workers = workers or _thread_cap()
    n_chunks = max(1, min(workers, eps.size // _MIN_CHUNK))
    chunks = np.array_split(eps, n_chunks)
    if n_chunks == 1:
        parts = [_evaluate(params, eps)]
    else:
        with ThreadPoolExecutor(max_workers=n_chunks) as pool:
            parts = list(pool.map(lambda c: _evaluate(params, c), chunks))
    cols = [np.concatenate([p[i] for p in parts]) for i in range(5)]
    return ScanTable(params, eps, *cols)


def _resolve_grid(params, window, grid):
    if isinstance(grid, ScanTable):
        return grid
    lo, hi = window
    return scan(params, lo, hi, grid)


def _boundary(params, eps, step):
    return any(abs(eps - t) <= step for t in thresholds(params))


def _sign_change_roots(table, values, func, kind, tol, window_hi):
    """Bracket sign changes of ``values`` on the grid and bisect ``func``."""
    eps = table.epsilon
    step = eps[1] - eps[0]
    ok = np.isfinite(values)
    out = []
    for i in range(eps.size - 1):
        a, b = values[i], values[i + 1]
        if not (ok[i] and ok[i + 1]):
            continue
        if a == 0.0:
            root = eps[i]
        elif a * b < 0:
            root = bisect(func, eps[i], eps[i + 1], xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
        else:
            continue
        if root >= window_hi:
            continue
        res = abs(func(root))
        out.append(FeaturePoint(kind, float(root), float(res), bool(res < tol), _boundary(table.params, root, step)))
    return out


def _scalar(params, eps):
    c = coefficients(amplitudes(params, float(eps)))
    return c


def find_reciprocity_points(params, window=(0.0, 5.0), grid=None):
    """Energies where R_left = R_right, bisected to 1e-10 in energy."""
    table = _resolve_grid(params, window, grid)
    f = table.R_left - table.R_right
    finite = np.isfinite(f)
    scale = np.max(np.abs(table.R_left[finite]), initial=0.0)
    if params.mu == 0 or np.all(np.abs(f[finite]) <= 1e-12 * max(scale, 1e-300)):
        return FeatureResult(degenerate=True)

    def func(e):
        c = _scalar(params, e)
        return c.R_left - c.R_right

    pts = _sign_change_roots(table, f, func, FeatureKind.RECIPROCITY, RECIPROCITY_TOL, window[1])
    return FeatureResult(points=pts)


def pole_roots(params, window):
    """Complex energies where a numerator Gamma of r_left hits a pole."""
    v, mu = params.v, params.mu
    lo, hi = window
    roots = []
    if v == 0:
        return roots
    if params.case is CaseKind.MU_IMAGINARY:
        # Gamma(i k_-) with k_- = i m
        base = v * np.exp(-2j * mu)
        m = 1
        while base.real - m * m >= lo:
            if base.real - m * m < hi:
                roots.append(complex(base - m * m))
            m += 1
    elif params.case is CaseKind.D_IMAGINARY:
        # Gamma(-k_-) with k_- = m on the free-state branch
        base = v * np.exp(-2 * mu)
        m = 1
        while base + m * m < hi:
            if base + m * m >= lo and base + m * m > 0:
                roots.append(complex(base + m * m))
            m += 1
    return sorted(roots, key=lambda z: z.real)


def find_spectral_singularities(params, window, grid=None, peak_threshold=PEAK_THRESHOLD, use_roots=True):
    """Peaks of R_left above ``peak_threshold``, refined by golden section.

    The residual of a refined point is 1/R_left there.  Analytic pole
    roots are returned alongside in ``pole_roots``.  With ``use_roots`` a
    refined peak within 1e-6 of a real root is moved onto it, and a real
    root the peak search missed is added as a point of its own.
    """
    table = _resolve_grid(params, window, grid)
    eps, R = table.epsilon, table.R_left
    step = eps[1] - eps[0]
    roots = pole_roots(params, window)
    pts = []
    if params.v == 0:
        return FeatureResult(pole_roots=roots)

    def neg_log_r(e):
        with np.errstate(divide="ignore"):
            return -np.log(_scalar(params, e).R_left)

    for i in range(eps.size):
        if not R[i] > peak_threshold:
            continue
        left = R[i - 1] if i > 0 else -np.inf
        right = R[i + 1] if i + 1 < eps.size else -np.inf
        if not (R[i] >= left and R[i] > right):
            continue
        if np.isinf(R[i]):
            e_star = float(eps[i])
        elif 0 < i < eps.size - 1:
            e_star = _refine_minimum(neg_log_r, eps[i - 1], eps[i], eps[i + 1])
        else:
            e_star = float(eps[i])
        # snap onto an analytic real root when the peak sits on it
        for z in roots if use_roots else ():
            if abs(z.imag) < 1e-12 and abs(e_star - z.real) <= POLE_MATCH_TOL:
                e_star = z.real
        R_star = _scalar(params, e_star).R_left
        res = 0.0 if np.isinf(R_star) else 1.0 / R_star
        if e_star >= window[1]:
            continue
        pts.append(
            FeaturePoint(
                FeatureKind.SPECTRAL_SINGULARITY,
                e_star,
                float(res),
                bool(res < 1.0 / peak_threshold),
                _boundary(params, e_star, step),
            )
        )
    for z in roots if use_roots else ():
        if abs(z.imag) >= 1e-12:
            continue
        if any(abs(p.epsilon - z.real) <= POLE_MATCH_TOL for p in pts):
            continue
        R_star = _scalar(params, z.real).R_left
        res = 0.0 if np.isinf(R_star) else 1.0 / R_star
        pts.append(FeaturePoint(FeatureKind.SPECTRAL_SINGULARITY, z.real, float(res), bool(res < 1.0 / peak_threshold), _boundary(params, z.real, step)))
    pts.sort(key=lambda p: p.epsilon)
    return FeatureResult(points=pts, pole_roots=roots)


def reconcile_poles(result, tol=POLE_MATCH_TOL):
    """Pair peak-detected points with pole roots by real part.

    Returns a list of (point, root or None).
    """
    out = []
    for p in result.points:
        match = None
        for z in result.pole_roots:
            if abs(p.epsilon - z.real) <= tol:
                match = z
                break
        out.append((p, match))
    return out


def _refine_minimum(func, a, b, c):
    try:
        res = minimize_scalar(func, bracket=(a, b, c), method="golden", tol=1e-12)
    except ValueError:
        # flat bracket (equal neighbours); fall back to a bounded search
        res = minimize_scalar(func, bounds=(a, c), method="bounded", options={"xatol": 1e-12})
    x = float(res.x)
    if not a <= x <= c:
        x = b
    return x


def _one_sided_minima(params, table, side, window_hi):
    eps = table.epsilon
    step = eps[1] - eps[0]
    R = table.R_left if side == "left" else table.R_right
    kind = FeatureKind.INVISIBLE_LEFT if side == "left" else FeatureKind.INVISIBLE_RIGHT
    attr = "R_left" if side == "left" else "R_right"

    def r_of(e):
        return getattr(_scalar(params, e), attr)

    out = []
    for i in range(1, eps.size - 1):
        if not (np.isfinite(R[i]) and R[i] <= R[i - 1] and R[i] < R[i + 1]):
            continue
        e_star = _refine_minimum(r_of, eps[i - 1], eps[i], eps[i + 1])
        if e_star >= window_hi:
            continue
        c = _scalar(params, e_star)
        R_star = getattr(c, attr)
        T_dev = abs((c.T_left if side == "left" else c.T_right) - 1.0)
        if R_star < INVISIBLE_R_TOL and T_dev < INVISIBLE_T_TOL:
            out.append(FeaturePoint(kind, e_star, float(R_star), True, _boundary(params, e_star, step)))
    return out


def find_invisibility_points(params, side, window, grid=None, pair_tol=PAIR_TOL):
    """Zeros of R on one side (``left``/``right``) or both.

    A local grid minimum of R is refined by golden section and kept when
    the refined R is below 1e-8 with |T - 1| < 1e-3.  For ``both``, a left
    and a right point closer than ``pair_tol`` form a bidirectional point
    whose residual is max(R_left, R_right) at their midpoint.
    """
    if side not in ("left", "right", "both"):
        raise ValueError("side must be left, right or both")
    table = _resolve_grid(params, window, grid)
    if side != "both":
        return FeatureResult(points=_one_sided_minima(params, table, side, window[1]))
    left = _one_sided_minima(params, table, "left", window[1])
    right = _one_sided_minima(params, table, "right", window[1])
    step = table.epsilon[1] - table.epsilon[0]
    pts = []
    for p in left:
        for q in right:
            if abs(p.epsilon - q.epsilon) <= pair_tol:
                mid = 0.5 * (p.epsilon + q.epsilon)
                c = _scalar(params, mid)
                res = max(c.R_left, c.R_right)
                pts.append(FeaturePoint(FeatureKind.INVISIBLE_BOTH, mid, float(res), bool(res < INVISIBLE_R_TOL), _boundary(params, mid, step)))
    return FeatureResult(points=pts)


def nearest_pairs(left, right):
    """For each left point, the closest right point and their separation."""
    out = []
    for p in left:
        if not right:
            break
        q = min(right, key=lambda q: abs(q.epsilon - p.epsilon))
        out.append((p, q, abs(q.epsilon - p.epsilon)))
    return out


def find_unitarity_points(params, window, grid=None):
    """Roots of R_left + T - 1, bisected to 1e-10 in energy."""
    table = _resolve_grid(params, window, grid)
    d = table.defect
    finite = np.isfinite(d)
    if np.all(np.abs(d[finite]) <= UNITARITY_TOL):
        return FeatureResult(degenerate=True)

    def func(e):
        return _scalar(params, e).unitarity_defect

    pts = _sign_change_roots(table, d, func, FeatureKind.UNITARITY, UNITARITY_TOL, window[1])
    tail = d[-max(2, d.size // 20):]
    asymptotic = bool(np.all(np.isfinite(tail)) and np.all(np.abs(tail) < ASYMPTOTIC_DEFECT))
    return FeatureResult(points=pts, asymptotic=asymptotic)


def local_minima(values):
    """Indices of interior grid minima."""
    v = np.asarray(values)
    idx = np.where((v[1:-1] <= v[:-2]) & (v[1:-1] < v[2:]))[0] + 1
    return idx
