import math

import numpy as np
import pytest

from flrw_kg.errors import InvalidArgs, StiffnessFailure
from flrw_kg.oracle import (
    ModeProblem, StepperConfig, dopri5, lifespan_ladder, mode_solve_linear, mode_solve_rk, mol_solve_semilinear,
)
from flrw_kg.params import ModelParams, NonlinearitySpec
from flrw_kg.transform import LinearProblem, solve_linear
from flrw_kg.waveprop import Grid, GridField

T = np.linspace(0.0, 3.0, 7)


def test_dopri5_hits_outputs_exactly():
    cfg = StepperConfig(rel_tol=1e-12, abs_tol=1e-14)
    t_out = np.array([0.0, 0.1, 0.77, 2.0])
    out, book = dopri5(lambda t, y: -2 * y, 0.0, np.array([1.0]), t_out, cfg)
    assert np.max(np.abs(out[:, 0] - np.exp(-2 * t_out))) < 1e-11
    assert book.accepted > 0 and book.t_last == 2.0


def test_dopri5_watch_stops_the_run():
    cfg = StepperConfig()
    out, book = dopri5(lambda t, y: y, 0.0, np.array([1.0]), [0.5, 5.0], cfg,
                       watch=lambda t, y, step_collapse=False: "big" if y[0] > 10 else "")
    assert book.stopped == "big"
    assert math.isclose(out[0, 0], math.exp(0.5), rel_tol=1e-9)
    assert np.isnan(out[1, 0])


def test_step_collapse_raises_without_a_watch():
    cfg = StepperConfig(min_step=1e-3, max_step=0.05)
    with pytest.raises(StiffnessFailure):
        dopri5(lambda t, y: y ** 2, 0.0, np.array([1.0]), [2.0], cfg)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("M", [0.3, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("xi", [0.0, 0.4, 3.0])
def test_closed_form_modes_match_runge_kutta(n, M, xi):
    params = ModelParams.from_M(n, M)
    for data in ((1.0, 0.0), (0.0, 1.0)):
        p = ModeProblem(xi, params, data)
        exact = mode_solve_linear(p, T)
        rk = mode_solve_rk(p, T, StepperConfig(rel_tol=1e-12, abs_tol=1e-15, max_step=0.01))
        assert np.max(np.abs(exact - rk)) < 1e-8 * max(1.0, np.max(np.abs(exact)))


def test_zero_mode_with_vanishing_M():
    params = ModelParams.from_M(2, 0.0)
    p = ModeProblem(0.0, params, (1.0, 0.5))
    # double root n/2 = 1: y = e^t (1 + (0.5 - 1) t)
    assert np.allclose(mode_solve_linear(p, T), np.exp(T) * (1 - 0.5 * T), rtol=1e-13)


def test_mol_without_nonlinearity_matches_transform():
    spec = NonlinearitySpec(coeff=0.0)
    params = ModelParams.from_M(1, 2.0, nonlinearity=spec)
    grid = Grid(1, 16)
    phi0 = GridField.from_function(grid, lambda x: 0.2 + np.cos(x))
    phi1 = GridField.from_function(grid, lambda x: np.sin(2 * x))
    t = np.array([0.0, 0.5, 1.0, 1.5])
    mol = mol_solve_semilinear(params, phi0, phi1, T=1.5, t_out=t)
    ref = solve_linear(LinearProblem(params, phi0, phi1, t))
    assert not mol.blowup
    assert np.max(np.abs(mol.trace.coeffs - ref.coeffs)) < 1e-8 * np.max(np.abs(ref.coeffs))


def focusing_zero_mode(value):
    # m = 0 (M = n/2), so the zero mode obeys y'' = y' + y^3
    params = ModelParams.from_M(1, 0.5, nonlinearity=NonlinearitySpec("power_signed", alpha=2.0))
    grid = Grid(1, 4)
    return params, GridField(grid, np.full(4, value)), GridField.zeros(grid)


def test_focusing_blowup_is_detected_and_bracketed():
    params, phi0, phi1 = focusing_zero_mode(2.0)
    res = mol_solve_semilinear(params, phi0, phi1, T=5.0, levels=(10.0,))
    assert res.blowup and res.reason in ("threshold", "min_step")
    lo, hi = res.bracket
    assert lo <= res.t_blowup <= hi
    assert res.crossings[10.0] < res.t_blowup
    # y'' = y^3 from rest at y0 = 2 blows up at sqrt(2) * 1.31103 / y0 = 0.927; y' only speeds it up
    assert 0.5 < res.t_blowup < 0.927


def test_larger_data_blows_up_sooner():
    times = []
    for v in (1.0, 2.0, 4.0):
        params, phi0, phi1 = focusing_zero_mode(v)
        times.append(mol_solve_semilinear(params, phi0, phi1, T=10.0).t_blowup)
    assert times[0] > times[1] > times[2]


def test_t_eps_is_recorded():
    params, phi0, phi1 = focusing_zero_mode(0.01)
    res = mol_solve_semilinear(params, phi0, phi1, T=8.0, eps=0.01 * math.sqrt(2 * math.pi) / 2)
    assert np.isfinite(res.t_eps) and res.t_eps > 0


def test_lifespan_ladder_monotone():
    params, phi0, phi1 = focusing_zero_mode(1.0)
    pts = lifespan_ladder(params, phi0, phi1, [1.0, 0.3, 0.1], T_cap=20.0, onset_level=5.0)
    reached = [p.t_reached for p in pts]
    assert all(p.blowup for p in pts)
    assert reached[0] < reached[1] < reached[2]
    assert all(p.onset <= p.t_blowup for p in pts)


def test_stepper_validation():
    with pytest.raises(InvalidArgs):
        StepperConfig(blowup_threshold=1e3)
    with pytest.raises(InvalidArgs):
        StepperConfig(rel_tol=0.0)
    with pytest.raises(InvalidArgs):
        ModeProblem(-1.0, ModelParams())
