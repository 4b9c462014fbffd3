import mpmath
import numpy as np
import pytest

from ptscatter.bound import bound_spectrum, bound_wavefunction, pt_eigenvalue, state_count
from ptscatter.model import PotentialParams
from ptscatter.oracle import bound_oracle


def _reference_state(v, mu, n):
    # independent high-precision arithmetic for b_n, a_n, eps_n
    mpmath.mp.dps = 40
    v, mu = mpmath.mpf(v), mpmath.mpf(mu)
    b = mpmath.sqrt(v * mpmath.cos(mu) ** 2 + mpmath.mpf(1) / 4) - (n + mpmath.mpf(1) / 2)
    a = 1j * v * mpmath.sin(2 * mu) / (2 * b)
    eps = v * mpmath.cos(2 * mu) - a**2 - b**2
    return b, a, eps


def test_single_state_at_pi_over_12():
    states = bound_spectrum(1.0, np.pi / 12)
    assert len(states) == 1
    s = states[0]
    b, a, eps = _reference_state(1.0, np.pi / 12, 0)
    assert abs(s.b_n - float(b)) < 1e-13
    assert abs(s.a_n - complex(a)) < 1e-13
    assert abs(s.epsilon_n - float(mpmath.re(eps))) < 1e-13
    # rounded values quoted for this configuration
    assert abs(s.b_n - 0.587664) < 1e-6
    assert abs(s.a_n.imag - 0.425415) < 5e-6
    assert abs(s.epsilon_n - 0.701651) < 5e-6


def test_fd_oracle_single_state():
    s = bound_spectrum(1.0, np.pi / 12)[0]
    fd = bound_oracle(PotentialParams(1.0, np.pi / 12), grid_n=2000, box=12.0)
    assert len(fd) == 1
    assert abs(fd[0] - s.epsilon_n) < 1e-4


def test_hermitian_limit():
    states = bound_spectrum(6.0, 0.0)
    assert [s.n for s in states] == [0, 1]
    for s in states:
        assert s.a_n == 0
        assert abs(s.epsilon_n - (6.0 - s.b_n**2)) < 1e-14
        assert abs(abs(s.A_n) - 1) < 1e-12
    assert np.allclose([s.epsilon_n for s in states], [2.0, 5.0], atol=1e-14)
    fd = bound_oracle(PotentialParams(6.0, 0.0))
    assert np.allclose(np.real(fd), [2.0, 5.0], atol=1e-4)


def test_shallow_state():
    states = bound_spectrum(0.1, np.pi / 12)
    assert len(states) == 1
    assert abs(states[0].b_n - 0.086) < 1e-3


def test_strict_count():
    # gamma = 1.5 exactly: n = 1 would have b = 0 and is excluded
    assert state_count(2.0, 0.0) == 1
    assert state_count(2.0 + 1e-9, 0.0) == 2
    assert state_count(1e-3, 0.0) == 1
    rng = np.random.default_rng(4)
    for v, mu in zip(rng.uniform(0, 30, 200), rng.uniform(0, np.pi / 2, 200)):
        top = np.sqrt(v * np.cos(mu) ** 2 + 0.25) - 0.5
        assert state_count(v, mu) == int(np.ceil(top)) if top > 0 else 0


def test_invalid_inputs():
    with pytest.raises(ValueError):
        bound_spectrum(0.0, 0.3)
    with pytest.raises(ValueError):
        bound_spectrum(1.0, np.pi / 2)


def _random_states(count, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        v, mu = rng.uniform(0, 10), rng.uniform(0, np.pi / 2)
        out += [(v, mu, s) for s in bound_spectrum(v, mu)]
    return out


def test_reality_and_unit_pt_eigenvalue():
    for v, mu, s in _random_states(200, 1):
        assert isinstance(s.epsilon_n, float)
        assert s.a_n.real == 0
        assert s.b_n > 0
        assert abs(abs(s.A_n) - 1) < 1e-10


def test_pt_relation_pointwise():
    z = np.linspace(-8, 8, 801)
    for v, mu, s in _random_states(60, 2):
        psi = bound_wavefunction(s, v, mu, z)
        image = np.conj(psi[::-1])
        assert np.max(np.abs(image - s.A_n * psi)) <= 1e-8 * np.max(np.abs(psi))


def test_ground_state_shape_and_decay():
    v, mu = 1.0, np.pi / 12
    s = bound_spectrum(v, mu)[0]
    z = np.linspace(-5, 5, 41)
    exact = np.exp(-s.a_n * z) / (np.exp(z) + np.exp(-z)) ** s.b_n
    assert np.allclose(bound_wavefunction(s, v, mu, z), exact, rtol=1e-13)
    psi0 = abs(bound_wavefunction(s, v, mu, 0.0))
    for zz in (-10.0, 10.0):
        assert abs(bound_wavefunction(s, v, mu, zz)) < psi0 * np.exp(-s.b_n * 9)


def test_wavefunction_solves_schrodinger():
    # -psi'' + U psi = eps psi checked with high-precision derivatives
    mpmath.mp.dps = 30
    for v, mu, s in _random_states(25, 3)[:30]:
        g = mpmath.sqrt(v * mpmath.cos(mu) ** 2 + 0.25)
        a, b, n = mpmath.mpc(0, s.a_n.imag), mpmath.mpf(s.b_n), s.n

        def psi(z):
            u = mpmath.exp(-z) / (mpmath.exp(z) + mpmath.exp(-z))
            return mpmath.exp(-a * z) * (mpmath.exp(z) + mpmath.exp(-z)) ** (-b) * mpmath.hyp2f1(-n, 2 * g - n, 1 + a + b, u)

        for z in (-1.3, 0.0, 0.4, 2.2):
            U = v * (mpmath.cos(mu) * mpmath.tanh(z) + 1j * mpmath.sin(mu)) ** 2
            p = psi(z)
            res = -mpmath.diff(psi, z, 2) + (U - s.epsilon_n) * p
            scale = abs(U * p) + abs(s.epsilon_n * p) + abs(p)
            assert abs(res) < 1e-10 * scale


def test_pt_eigenvalue_n0_is_one():
    s = bound_spectrum(3.0, 0.4)[0]
    assert abs(pt_eigenvalue(s, 3.0, 0.4) - 1) < 1e-14


def test_fd_oracle_resolved_states():
    # states decaying within the box and with modest energy are resolved at N=2000
    checked = 0
    for v, mu, s in _random_states(100, 20261015):
        if s.b_n * 12 < 8 or s.epsilon_n > v * np.cos(2 * mu):
            continue
        p = PotentialParams(v, mu)
        fd2 = bound_oracle(p, grid_n=2000, targets=[s.epsilon_n])[0]
        if abs(s.epsilon_n) <= 5:
            assert abs(fd2 - s.epsilon_n) < 1e-4
        # the 3-point stencil error is O(h^2); Richardson removes it
        fd4 = bound_oracle(p, grid_n=4000, targets=[s.epsilon_n])[0]
        assert abs((4 * fd4 - fd2) / 3 - s.epsilon_n) < 1e-6 * max(1.0, abs(s.epsilon_n))
        checked += 1
    assert checked >= 5


def test_fd_oracle_converges_on_embedded_state():
    # an embedded state missed at the coarse setting converges under refinement
    v, mu = 4.233805236733508, 0.41713883233632515
    s = bound_spectrum(v, mu)[1]
    assert s.epsilon_n > v * np.cos(2 * mu)
    p = PotentialParams(v, mu)
    errs = []
    for n_grid in (1000, 2000, 4000):
        fd = bound_oracle(p, grid_n=n_grid, box=20.0, targets=[s.epsilon_n])[0]
        errs.append(abs(fd - s.epsilon_n))
    assert errs[2] < errs[1] < errs[0]
    fd2 = bound_oracle(p, grid_n=2000, box=20.0, targets=[s.epsilon_n])[0]
    fd4 = bound_oracle(p, grid_n=4000, box=20.0, targets=[s.epsilon_n])[0]
    assert abs((4 * fd4 - fd2) / 3 - s.epsilon_n) < 1e-3 * abs(s.epsilon_n)
