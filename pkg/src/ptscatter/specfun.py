"""Complex special functions: log-Gamma, Gamma ratios, terminating 2F1.

Everything here works on numpy arrays as well as Python scalars.  Gamma
products are never formed directly; ratios are accumulated in log space
so that arguments with large imaginary parts do not overflow.
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

POLE_TOL = 1e-9

# Lanczos coefficients, g = 7, n = 9 (Godfrey).
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)
_LOG_PI = np.log(np.pi)
_LOG_2 = np.log(2.0)


class Tag(IntEnum):
    FINITE = 0
    ZERO = 1
    POLE = 2
    INDETERMINATE = 3


@dataclass(frozen=True)
class LogGammaValue:
    value: complex
    pole_order: int = 0


def _lanczos(z):
    # valid for Re z >= 0.5
    z = z - 1.0
    x = _LANCZOS_C[0]
    for i in range(1, len(_LANCZOS_C)):
        x = x + _LANCZOS_C[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(x)


def _log_sin_pi(z):
    """Branch of log(sin(pi z)) analytic off the real axis, real on (0, 1)."""
    upper = z.imag >= 0
    w = np.where(upper, z, np.conj(z))
    s = -1j * np.pi * w + np.log1p(-np.exp(2j * np.pi * w)) + 0.5j * np.pi - _LOG_2
    return np.where(upper, s, np.conj(s))


def is_gamma_pole(z, tol=POLE_TOL):
    z = np.asarray(z, dtype=complex)
    m = np.round(z.real)
    return (m <= 0) & (np.abs(z - m) < tol)


def loggamma(z):
    """Vectorised log-Gamma.

    Returns ``(values, poles)``; ``values`` is NaN wherever ``poles`` is
    set.  The branch is the analytic continuation from the positive real
    axis (cut along the negative real axis, upper side taken on the cut).
    """
    z = np.asarray(z, dtype=complex)
    poles = is_gamma_pole(z)
    zs = np.where(poles, 0.5, z)
    left = zs.real < 0.5
    with np.errstate(all="ignore"):
        right_val = _lanczos(np.where(left, 1.0 - zs, zs))
        refl = _LOG_PI - _log_sin_pi(zs) - right_val
    out = np.where(left, refl, right_val)
    out = np.where(poles, complex(np.nan, np.nan), out)
    return out, poles


def log_gamma(z):
    """Scalar log-Gamma with in-band pole classification."""
    values, poles = loggamma(complex(z))
    if poles.item():
        return LogGammaValue(complex(np.nan, np.nan), 1)
    return LogGammaValue(complex(values.item()), 0)


@dataclass(frozen=True)
class GammaRatioSpec:
    numerator_args: tuple
    denominator_args: tuple


@dataclass(frozen=True)
class Tagged:
    """A complex value (or array of values) carrying a singularity tag.

    ``value`` is 0 for ZERO, complex inf for POLE and NaN for
    INDETERMINATE, so plain numeric use stays sensible.
    """

    kind: object
    value: object

    @classmethod
    def finite(cls, value):
        value = np.asarray(value, dtype=complex)
        return cls(np.zeros(value.shape, dtype=np.int8), value)

    def item(self):
        return Tagged(Tag(int(np.asarray(self.kind).item())), complex(np.asarray(self.value).item()))

    @property
    def is_finite(self):
        k = np.asarray(self.kind)
        return (k == Tag.FINITE) | (k == Tag.ZERO)

    def __neg__(self):
        return _clean(self.kind, -np.asarray(self.value))

    def __mul__(self, other):
        return tmul(self, _as_tagged(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return tmul(self, tinv(_as_tagged(other)))

    def __rtruediv__(self, other):
        return tmul(_as_tagged(other), tinv(self))

    def __sub__(self, other):
        return tadd(self, -_as_tagged(other))

    def __add__(self, other):
        return tadd(self, _as_tagged(other))


def _as_tagged(x):
    return x if isinstance(x, Tagged) else Tagged.finite(x)


_NAN = complex(np.nan, np.nan)
_INF = complex(np.inf, 0.0)


def _clean(kind, value):
    kind = np.asarray(kind, dtype=np.int8)
    value = np.asarray(value, dtype=complex)
    value = np.where(kind == Tag.ZERO, 0.0, value)
    value = np.where(kind == Tag.POLE, _INF, value)
    value = np.where(kind == Tag.INDETERMINATE, _NAN, value)
    return Tagged(kind, value)


# kind tables indexed [a, b]
_MUL = np.array(
    [
        [Tag.FINITE, Tag.ZERO, Tag.POLE, Tag.INDETERMINATE],
        [Tag.ZERO, Tag.ZERO, Tag.INDETERMINATE, Tag.INDETERMINATE],
        [Tag.POLE, Tag.INDETERMINATE, Tag.POLE, Tag.INDETERMINATE],
        [Tag.INDETERMINATE] * 4,
    ],
    dtype=np.int8,
)
_ADD = np.array(
    [
        [Tag.FINITE, Tag.FINITE, Tag.POLE, Tag.INDETERMINATE],
        [Tag.FINITE, Tag.ZERO, Tag.POLE, Tag.INDETERMINATE],
        [Tag.POLE, Tag.POLE, Tag.INDETERMINATE, Tag.INDETERMINATE],
        [Tag.INDETERMINATE] * 4,
    ],
    dtype=np.int8,
)
_INV = np.array([Tag.FINITE, Tag.POLE, Tag.ZERO, Tag.INDETERMINATE], dtype=np.int8)


def tmul(a, b):
    kind = _MUL[np.asarray(a.kind), np.asarray(b.kind)]
    with np.errstate(all="ignore"):
        value = np.asarray(a.value) * np.asarray(b.value)
    return _clean(kind, value)


def tinv(a):
    kind = _INV[np.asarray(a.kind)]
    with np.errstate(all="ignore"):
        value = 1.0 / np.asarray(a.value)
    return _clean(kind, value)


def tadd(a, b):
    kind = _ADD[np.asarray(a.kind), np.asarray(b.kind)]
    with np.errstate(all="ignore"):
        value = np.asarray(a.value) + np.asarray(b.value)
    return _clean(kind, value)


def gamma_ratio_array(numerator_args, denominator_args):
    """prod Gamma(num) / prod Gamma(den), elementwise over broadcast args."""
    num = [np.asarray(a, dtype=complex) for a in numerator_args]
    den = [np.asarray(a, dtype=complex) for a in denominator_args]
    shape = np.broadcast_shapes(*(a.shape for a in num + den)) if num + den else ()
    logsum = np.zeros(shape, dtype=complex)
    num_pole = np.zeros(shape, dtype=bool)
    den_pole = np.zeros(shape, dtype=bool)
    for args, sign, poles in ((num, 1.0, num_pole), (den, -1.0, den_pole)):
        for a in args:
            lg, p = loggamma(a)
            poles |= p
            logsum = logsum + sign * np.where(p, 0.0, lg)
    kind = np.full(shape, Tag.FINITE, dtype=np.int8)
    kind[num_pole & ~den_pole] = Tag.POLE
    kind[den_pole & ~num_pole] = Tag.ZERO
    kind[num_pole & den_pole] = Tag.INDETERMINATE
    with np.errstate(over="ignore"):
        value = np.exp(logsum)
    return _clean(kind, value)


def gamma_ratio(spec):
    """Scalar Gamma ratio for a :class:`GammaRatioSpec`."""
    return gamma_ratio_array(spec.numerator_args, spec.denominator_args).item()


def gauss_2f1_terminating(n, beta, c, x):
    """F(-n, beta; c; x) as a finite Horner sum of n + 1 terms."""
    n = int(n)
    if n < 0:
        raise ValueError("n must be a non-negative integer")
    c = complex(c)
    for j in range(n):
        if abs(c + j) < POLE_TOL:
            raise ValueError(f"c = {c} hits a pole before the series terminates (invalid state)")
    x = np.asarray(x, dtype=complex)
    acc = np.ones_like(x)
    for j in range(n - 1, -1, -1):
        acc = 1.0 + ((j - n) * (beta + j) / ((c + j) * (j + 1))) * x * acc
    return acc if acc.ndim else complex(acc)
