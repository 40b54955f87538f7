"""Independent ground truth: per-mode ODE solves and a method-of-lines stepper.

Each Fourier coefficient of a linear solution obeys

    y'' - n y' + (e^{2t} xi^2 + m^2) y = f_hat(t).

With y = e^{nt/2} u and x = xi e^t the homogeneous equation becomes Bessel's
equation of order M, which gives a closed form for real M.  Everything else
goes through an embedded Dormand-Prince 5(4) integrator with PI step control.
"""

from dataclasses import dataclass, field
import logging

import numpy as np
from scipy import special

from .errors import InvalidArgs, StiffnessFailure
from .nonlinearity import pointwise
from .trace import SolutionTrace
from .waveprop import sobolev_norm_coeffs

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepperConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    max_step: float = 0.05
    blowup_threshold: float = 1e8
    min_step: float = 1e-12
    max_steps: int = 2_000_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.max_step > 0 and self.min_step > 0):
            raise InvalidArgs("stepper tolerances and step bounds must be positive")
        if self.blowup_threshold < 1e6:
            raise InvalidArgs("blowup_threshold must be >= 1e6")


@dataclass
class ModeProblem:
    xi_abs: float
    params: object
    data: tuple = (1.0, 0.0)
    source: object = None  # callable b -> complex, or None

    def __post_init__(self):
        if self.xi_abs < 0:
            raise InvalidArgs("|xi| must be non-negative")


# ---------------------------------------------------------------- DOPRI5(4)

_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_E = _B - np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


@dataclass
class StepLog:
    accepted: int = 0
    rejected: int = 0
    t_last: float = 0.0
    h_last: float = 0.0
    stopped: str = ""
    events: dict = field(default_factory=dict)


def dopri5(rhs, t0, y0, t_out, cfg, watch=None):
    """Integrate y' = rhs(t, y) and return y at every time in ``t_out``.

    ``watch(t, y)`` is called after each accepted step; returning a truthy
    string stops the run (the reason is stored in the log).  Outputs past the
    stopping time are left as NaN.
    """
    t_out = np.asarray(t_out, float)
    y = np.array(y0, dtype=complex if np.iscomplexobj(y0) else float)
    out = np.full((len(t_out),) + y.shape, np.nan, dtype=y.dtype)
    logbook = StepLog(t_last=t0)
    t = float(t0)
    k = 0
    while k < len(t_out) and t_out[k] <= t:
        out[k] = y
        k += 1
    if k == len(t_out):
        return out, logbook
    K = [None] * 7
    K[0] = rhs(t, y)
    scale = cfg.abs_tol + cfg.rel_tol * np.abs(y)
    d0 = np.sqrt(np.mean((np.abs(y) / scale) ** 2))
    d1 = np.sqrt(np.mean((np.abs(K[0]) / scale) ** 2))
    h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
    h = min(h, cfg.max_step)
    err_prev = 1e-4
    steps = 0
    while k < len(t_out):
        steps += 1
        if steps > cfg.max_steps:
            raise StiffnessFailure(f"step budget exhausted at t={t:.6g}")
        h = min(h, cfg.max_step, t_out[-1] - t)
        hit = t + h >= t_out[k] - 1e-14 * max(1.0, abs(t))
        if hit:
            h = t_out[k] - t
        # overflow near a singularity just produces a rejected step
        with np.errstate(over="ignore", invalid="ignore"):
            for i in range(1, 7):
                yi = y + h * sum(a * K[j] for j, a in enumerate(_A[i]) if a)
                K[i] = rhs(t + _C[i] * h, yi)
            y_new = yi  # row 7 of the tableau equals the 5th-order weights (FSAL)
            err = h * sum(e * Kj for e, Kj in zip(_E, K) if e)
            scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            en = float(np.sqrt(np.mean((np.abs(err) / scale) ** 2)))
        if not np.isfinite(en):
            en = 1e10
        if en <= 1.0:
            t = t_out[k] if hit else t + h
            y = y_new
            K[0] = K[6]
            logbook.accepted += 1
            logbook.t_last, logbook.h_last = t, h
            fac = 0.9 * en ** -0.14 * err_prev ** 0.08 if en > 0 else 5.0
            h *= min(5.0, max(0.2, fac))
            err_prev = max(en, 1e-4)
            while k < len(t_out) and t_out[k] <= t + 1e-14 * max(1.0, abs(t)):
                out[k] = y
                k += 1
            if watch is not None:
                reason = watch(t, y)
                if reason:
                    logbook.stopped = reason
                    return out, logbook
        else:
            logbook.rejected += 1
            h *= max(0.2, 0.9 * en ** -0.2)
            if h < cfg.min_step:
                logbook.stopped = "min_step"
                logbook.h_last = h
                if watch is not None and watch(t, y, step_collapse=True):
                    return out, logbook
                raise StiffnessFailure(f"step size fell below {cfg.min_step} at t={t:.6g}")
    return out, logbook


# ---------------------------------------------------------------- linear modes

def _roots(params):
    n = params.n
    M = params.mass.M
    return n / 2 + M, n / 2 - M


def _mode_zero(params, d0, d1, t):
    rp, rm = _roots(params)
    M = params.mass.M
    if abs(M) < 1e-14:
        r = params.n / 2
        return np.exp(r * t) * (d0 + (d1 - r * d0) * t)
    ep, em = np.exp(rp * t), np.exp(rm * t)
    return (d0 * (rp * em - rm * ep) + d1 * (ep - em)) / (2 * M)


def _mode_bessel(xi, params, d0, d1, t):
    n = params.n
    M = params.mass.M.real
    u0, up0 = d0, d1 - n / 2 * d0
    J, Y = special.jv(M, xi), special.yv(M, xi)
    Jp, Yp = special.jvp(M, xi), special.yvp(M, xi)
    wr = 2 / (np.pi * xi)
    c1 = (u0 * Yp - up0 / xi * Y) / wr
    c2 = (up0 / xi * J - u0 * Jp) / wr
    x = xi * np.exp(t)
    return np.exp(n * t / 2) * (c1 * special.jv(M, x) + c2 * special.yv(M, x))


def mode_solve_rk(p, t_grid, cfg=StepperConfig()):
    """Adaptive RK path for one mode (any M, optional source)."""
    n, msq, xi2 = p.params.n, complex(p.params.m_sq), p.xi_abs ** 2
    src = p.source

    def rhs(t, y):
        f = src(t) if src is not None else 0.0
        return np.array([y[1], n * y[1] - (np.exp(2 * t) * xi2 + msq) * y[0] + f])

    out, _ = dopri5(rhs, 0.0, np.array(p.data, dtype=complex), t_grid, cfg)
    return out[:, 0]


def mode_solve_linear(p, t_grid, cfg=StepperConfig()):
    """Phi_hat(t) for one Fourier mode: closed form when available, RK otherwise."""
    t = np.asarray(t_grid, float)
    mass = p.params.mass
    d0, d1 = (complex(v) for v in p.data)
    if p.source is None and mass.is_real:
        if p.xi_abs == 0:
            return _mode_zero(p.params, d0, d1, t).astype(complex)
        return _mode_bessel(p.xi_abs, p.params, d0, d1, t).astype(complex)
    if p.source is None and p.xi_abs == 0:
        return _mode_zero(p.params, d0, d1, t).astype(complex)
    return mode_solve_rk(p, t, cfg)


def mode_oracle_trace(params, phi0, phi1, t_grid, cfg=StepperConfig()):
    """Source-free linear solution on a grid, one closed-form solve per distinct mode."""
    grid = phi0.grid
    c0 = phi0.to_spectral().values
    c1 = phi1.to_spectral().values
    out = np.zeros((len(t_grid),) + grid.shape, dtype=complex)
    vals, inv = grid.xi_unique
    t = np.asarray(t_grid, float)
    for k, x in enumerate(vals):
        mask = inv == k
        a = mode_solve_linear(ModeProblem(float(x), params, (1.0, 0.0)), t, cfg)
        b = mode_solve_linear(ModeProblem(float(x), params, (0.0, 1.0)), t, cfg)
        out[:, mask] = a[:, None] * c0[mask][None, :] + b[:, None] * c1[mask][None, :]
    real = np.isrealobj(phi0.values) and np.isrealobj(phi1.values) and params.mass.is_real
    return SolutionTrace(grid, t, out, s=params.s, gamma=params.gamma, real=real, meta={"solver": "mode-oracle"})


# ---------------------------------------------------------------- method of lines

@dataclass
class MolResult:
    trace: SolutionTrace
    blowup: bool = False
    t_blowup: float = float("nan")
    bracket: tuple = (float("nan"), float("nan"))
    t_eps: float = float("nan")
    reason: str = ""
    steps: int = 0
    crossings: dict = field(default_factory=dict)


def mol_solve_semilinear(params, phi0, phi1, cfg=StepperConfig(), T=1.0, t_out=None, eps=None, spec=None,
                         levels=()):
    """Integrate the semilinear equation with a spectral Laplacian until T or blow-up.

    ``eps`` switches on T_eps: the first accepted time with
    e^{gamma t} ||Phi||_{H_s} >= 2 eps.  ``levels`` records the first accepted
    time at which sup |Phi| reaches each level.  The coefficients use
    ``params.n`` even when it differs from the grid dimension, which lets a
    one-dimensional grid carry the ODE of a higher-dimensional model.
    """
    grid = phi0.grid
    spec = spec or params.nonlinearity
    n, msq = params.n, params.m_sq
    xi2 = grid.xi_abs ** 2
    npts = grid.points ** grid.dims
    real = np.isrealobj(phi0.values) and np.isrealobj(phi1.values) and complex(msq).imag == 0
    t_out = np.linspace(0.0, T, 101) if t_out is None else np.asarray(t_out, float)
    if t_out[-1] > T + 1e-14:
        raise InvalidArgs("output times must not exceed T")
    y0 = np.concatenate([phi0.to_spectral().values.ravel(), phi1.to_spectral().values.ravel()]).astype(complex)
    size = y0.size // 2
    shape = grid.shape

    def physical(c):
        v = np.fft.ifftn(c.reshape(shape) * npts)
        return v.real if real else v

    def rhs(t, y):
        a, b = y[:size], y[size:]
        F = np.fft.fftn(pointwise(physical(a), spec)).ravel() / npts
        acc = n * b - (np.exp(2 * t) * xi2.ravel() + msq) * a + np.exp(-spec.gamma_damp * t) * F
        return np.concatenate([b, acc])

    state = {"t_eps": float("nan"), "prev_sup": 0.0, "prev_t": 0.0}
    crossings = {float(v): float("nan") for v in levels}

    def watch(t, y, step_collapse=False):
        sup = float(np.max(np.abs(physical(y[:size]))))
        rising = sup >= state["prev_sup"]
        for v, tc in crossings.items():
            if np.isnan(tc) and sup >= v:
                crossings[v] = t
        if eps is not None and np.isnan(state["t_eps"]):
            w = np.exp(params.gamma * t) * float(sobolev_norm_coeffs(grid, y[:size].reshape(shape), params.s))
            if w >= 2 * eps:
                state["t_eps"] = t
        if step_collapse:
            return "min_step" if rising else ""
        state["prev_sup"], state["prev_t"] = sup, t
        if not np.isfinite(sup) or sup > cfg.blowup_threshold:
            return "threshold"
        return ""

    out, book = dopri5(rhs, 0.0, y0, t_out, cfg, watch)
    done = ~np.isnan(out[:, 0].real)
    coeffs = out[done, :size].reshape((int(done.sum()),) + shape)
    trace = SolutionTrace(grid, t_out[done], coeffs, s=params.s, gamma=params.gamma, real=real,
                          meta={"solver": "mol", "accepted": book.accepted, "rejected": book.rejected})
    res = MolResult(trace, t_eps=state["t_eps"], steps=book.accepted, reason=book.stopped,
                    crossings=crossings)
    if book.stopped:
        res.blowup = True
        res.t_blowup = book.t_last
        res.bracket = (state["prev_t"] if book.stopped == "min_step" else book.t_last - book.h_last, book.t_last)
    return res


@dataclass
class LadderPoint:
    eps: float
    blowup: bool
    t_blowup: float
    onset: float
    t_eps: float
    t_reached: float


def lifespan_ladder(params, phi0, phi1, eps_list, cfg=StepperConfig(), T_cap=8.0, onset_level=1.0):
    """MOL runs with data rescaled so that ||phi0||_{H_s} + ||phi1||_{H_s} = eps.

    Each point carries the detected blow-up time (NaN when none occurs
    before ``T_cap``) and the first time sup |Phi| reaches ``onset_level``.
    """
    from .waveprop import sobolev_norm

    total = sobolev_norm(phi0, params.s) + sobolev_norm(phi1, params.s)
    if total == 0:
        raise InvalidArgs("ladder data must be nonzero")
    points = []
    for eps in eps_list:
        k = eps / total
        res = mol_solve_semilinear(params, phi0 * k, phi1 * k, cfg, T=T_cap, t_out=[0.0, T_cap], eps=eps,
                                   levels=(onset_level,))
        reached = res.t_blowup if res.blowup else T_cap
        points.append(LadderPoint(float(eps), res.blowup, res.t_blowup, res.crossings[float(onset_level)],
                                  res.t_eps, float(reached)))
    return points
