import math

import mpmath
import numpy as np
import pytest

from flrw_kg.errors import GridTooSmall, InvalidArgs
from flrw_kg.quadrature import gauss_legendre, graded_rule, lagrange_matrix, uniform_panels
from flrw_kg.waveprop import (
    Grid, GridField, ee_propagate, l2_norm_direct, laplacian, sobolev_norm, sobolev_norm_coeffs,
)


def test_grid_validation():
    with pytest.raises(InvalidArgs):
        Grid(4, 16)
    with pytest.raises(InvalidArgs):
        Grid(1, 24)
    with pytest.raises(InvalidArgs):
        Grid(1, 16, 0.0)


def test_fft_roundtrip_and_parseval():
    g = Grid(2, 32)
    rng = np.random.default_rng(1)
    f = GridField(g, rng.standard_normal(g.shape))
    back = f.to_spectral().to_physical()
    assert np.max(np.abs(back.values - f.values)) < 1e-13
    assert sobolev_norm(f, 0.0) == pytest.approx(l2_norm_direct(f), rel=1e-12)


def test_sobolev_norm_of_a_single_mode():
    g = Grid(1, 64, 2 * math.pi)
    f = GridField.from_function(g, lambda x: np.cos(3 * x))
    # |c_{+-3}| = 1/2, L = 2 pi, weight 10^s
    for s in (0.0, 1.0, 1.5):
        assert sobolev_norm(f, s) == pytest.approx(math.sqrt(2 * math.pi * 0.5 * 10 ** s), rel=1e-13)


def test_vectorised_norm_matches_scalar():
    g = Grid(1, 32)
    rng = np.random.default_rng(2)
    fields = [GridField(g, rng.standard_normal(32)) for _ in range(3)]
    coeffs = np.stack([f.to_spectral().values for f in fields])
    assert np.allclose(sobolev_norm_coeffs(g, coeffs, 1.2), [sobolev_norm(f, 1.2) for f in fields], rtol=1e-13)


def test_propagation_of_a_plane_wave():
    g = Grid(2, 32)
    f = GridField.from_function(g, lambda x, y: np.cos(2 * x + y))
    v = ee_propagate(f, 0.7)
    exact = math.cos(0.7 * math.sqrt(5)) * f.values
    assert np.max(np.abs(v.values - exact)) < 1e-13


def test_propagation_solves_the_wave_equation():
    g = Grid(1, 128)
    f = GridField.from_function(g, lambda x: np.exp(-4 * (x - math.pi) ** 2))
    r, h = 0.8, 1e-3
    vtt = (ee_propagate(f, r + h).values - 2 * ee_propagate(f, r).values + ee_propagate(f, r - h).values) / h ** 2
    assert np.max(np.abs(vtt - laplacian(ee_propagate(f, r)).values)) < 1e-4


def test_propagation_is_dalembert_in_one_dimension():
    g = Grid(1, 256)
    bump = lambda x: np.exp(-8 * (x - math.pi) ** 2)  # noqa: E731
    f = GridField.from_function(g, bump)
    r = 1.1
    exact = 0.5 * (bump(g.axis - r) + bump(g.axis + r))
    assert np.max(np.abs(ee_propagate(f, r).values - exact)) < 1e-10


def test_strict_support_refuses_wraparound():
    g = Grid(1, 64, 2 * math.pi)
    f = GridField.zeros(g)
    ee_propagate(f, 2.0, strict_support=1.0)
    with pytest.raises(GridTooSmall):
        ee_propagate(f, 2.5, strict_support=1.0)
    with pytest.raises(InvalidArgs):
        ee_propagate(f, -1.0)


def test_radial_expansion_uses_unique_values():
    g = Grid(3, 8)
    vals, _ = g.xi_unique
    assert np.array_equal(g.radial(vals), np.round(g.xi_abs, 12))


def test_fields_on_different_grids_do_not_mix():
    with pytest.raises(InvalidArgs):
        GridField.zeros(Grid(1, 8)) + GridField.zeros(Grid(1, 16))


def test_gauss_legendre_exactness():
    x, w = gauss_legendre(6, -1.0, 2.0)
    assert np.sum(w * x ** 11) == pytest.approx((2 ** 12 - 1) / 12, rel=1e-13)


@pytest.mark.parametrize("power", [0.0, -0.5, 1.5, 3.0])
def test_graded_rule_with_endpoint_power(power):
    x, w = graded_rule(16, layer=0.01, level=1, power=power)
    g = np.cos
    # s = u^2 removes the endpoint singularity from the reference integrand
    ref = float(mpmath.quad(lambda u: 2 * u ** (2 * power + 1) * mpmath.cos(u * u), [0, 1]))
    assert np.sum(w * g(x)) == pytest.approx(ref, rel=1e-12)


def test_graded_rule_resolves_a_boundary_layer():
    eps = 1e-3
    x, w = graded_rule(12, layer=eps)
    ref = 1.0 - eps * (1 - math.exp(-1 / eps))
    assert np.sum(w * (1 - np.exp(-(1 - x) / eps))) == pytest.approx(ref, rel=1e-10)


def test_uniform_panels_and_lagrange():
    x, w = uniform_panels(5, 0.0, 3.0, 4)
    assert np.sum(w * np.exp(x)) == pytest.approx(math.expm1(3.0), rel=1e-12)
    nodes, _ = gauss_legendre(8, 0.0, 1.0)
    targets = np.array([0.0, 0.3, nodes[2], 1.0])
    P = lagrange_matrix(nodes, targets)
    assert np.max(np.abs(P @ nodes ** 7 - targets ** 7)) < 1e-12
    assert P[2, 2] == 1.0
