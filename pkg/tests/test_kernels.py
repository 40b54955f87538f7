import math

import mpmath
import numpy as np
import pytest

from flrw_kg.errors import DomainError
from flrw_kg.kernels import kernel_E, kernel_K0, kernel_K0_literal, kernel_K1, phi
from flrw_kg.params import CurvedMass


def richardson_minus_dE_db(z, t, M, h=1e-2, levels=4):
    """-dE/db at b = 0 by one-sided differences with Richardson extrapolation."""
    # b < 0 would leave the cone, so only forward differences are used
    rows = []
    for k in range(levels):
        hk = h / 2 ** k
        f0, f1, f2 = (kernel_E(z, t, j * hk, M) for j in (0, 1, 2))
        rows.append(-(-3 * f0 + 4 * f1 - f2) / (2 * hk))
    for order in range(1, levels):
        w = 2 ** (order + 1)
        rows = [(w * rows[i + 1] - rows[i]) / (w - 1) for i in range(len(rows) - 1)]
    return rows[0]


def mp_kernel_E(z, t, b, M):
    mpmath.mp.dps = 30
    z, t, b = mpmath.mpf(z), mpmath.mpf(t), mpmath.mpf(b)
    M = mpmath.mpc(M)
    P = (mpmath.e ** t + mpmath.e ** b) ** 2 - z ** 2
    D = (mpmath.e ** t - mpmath.e ** b) ** 2 - z ** 2
    return complex(4 ** (-M) * mpmath.e ** (-M * (b + t)) * P ** (M - 0.5) * mpmath.hyp2f1(0.5 - M, 0.5 - M, 1, D / P))


def test_phi_and_domain():
    assert phi(0.0) == 0.0
    assert phi(1.0) == pytest.approx(math.e - 1, rel=1e-15)
    with pytest.raises(DomainError):
        phi(-0.1)


@pytest.mark.parametrize("M", [0.3, 0.5, 1.0, 2.0, 1 + 1j])
def test_kernel_E_against_mpmath(M):
    for t, b in ((1.0, 0.0), (2.5, 0.7), (6.0, 1.0)):
        R = math.exp(t) - math.exp(b)
        for frac in (0.0, 0.3, 0.9, 1.0):
            z = frac * R
            ref = mp_kernel_E(z, t, b, M)
            assert abs(kernel_E(z, t, b, M) - ref) <= 1e-12 * abs(ref)


def test_K1_is_E_at_b_zero():
    z = np.linspace(0, math.expm1(1.7), 11)
    for M in (0.3, 2.0, 1 + 1j):
        assert np.max(np.abs(kernel_K1(z, 1.7, M) - kernel_E(z, 1.7, 0.0, M))) == 0.0


def test_half_mass_collapse():
    # M = 1/2: both hypergeometric factors are 1 and K1 = e^{-t/2} / 2
    t = 1.3
    z = np.linspace(0, math.expm1(t), 7)
    assert np.allclose(kernel_K1(z, t, 0.5), 0.5 * math.exp(-t / 2), rtol=1e-14)


def test_domain_is_enforced():
    with pytest.raises(DomainError):
        kernel_E(5.0, 1.0, 0.0, 2.0)
    with pytest.raises(DomainError):
        kernel_K1(-0.1, 1.0, 2.0)


def test_edge_tolerance_accepts_cone_rounding():
    t = 2.0
    z = math.expm1(t) * (1 + 1e-14)
    assert np.isfinite(kernel_K1(z, t, 2.0))


@pytest.mark.parametrize("M", [0.3, 1.0, 2.0, 1 + 1j])
def test_K0_against_richardson_derivative(M):
    for t in (0.5, 1.5, 3.0):
        for frac in (0.0, 0.4, 0.8):
            z = frac * math.expm1(t)
            ref = richardson_minus_dE_db(z, t, M)
            assert abs(kernel_K0(z, t, M) - ref) <= 1e-6 * max(1.0, abs(ref))


@pytest.mark.parametrize("M", [0.3, 2.0, 1 + 1j])
def test_K0_stable_form_matches_printed_form(M):
    t = 2.0
    z = np.linspace(0, 0.95 * math.expm1(t), 9)
    a, b = kernel_K0(z, t, M), kernel_K0_literal(z, t, M)
    assert np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)) < 1e-9


def test_K0_finite_on_the_cone():
    t = 2.0
    for M in (0.3, 2.0, 1 + 1j):
        edge = kernel_K0(math.expm1(t), t, M)
        near = kernel_K0(math.expm1(t) * (1 - 1e-7), t, M)
        assert np.isfinite(edge)
        assert abs(edge - near) < 1e-4 * max(1.0, abs(edge))


def test_curved_mass_principal_branch():
    m = CurvedMass.from_mass_sq(3, -7 / 4)
    assert m.M == 2
    heavy = CurvedMass.from_mass_sq(1, 5.0)
    assert heavy.re == 0 and heavy.im > 0
    assert not heavy.theorem_applicable
    assert kernel_K1(0.3, 1.0, m) == kernel_K1(0.3, 1.0, 2.0)
