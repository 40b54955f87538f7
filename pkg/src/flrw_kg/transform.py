"""Integral transform K, resolving operator G = K o EE and the linear representation.

For t > 0 the solution of

    Phi_tt - n Phi_t - e^{2t} Laplacian Phi + m^2 Phi = f,  Phi(0) = phi0, Phi_t(0) = phi1

is assembled from four pieces: the source double integral, the boundary
term e^{(n-1)t/2} v_phi0(phi(t)), and two s-integrals against K0 and K1.
Free-wave propagation is the multiplier cos(r|xi|), so every term reduces
to a radial multiplier on the grid; the multipliers are computed once per
distinct |xi| and refined by panel doubling until they settle.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging

import numpy as np

from .errors import InvalidArgs, QuadratureDivergence
from .kernels import kernel_E, kernel_K0, kernel_K1
from .params import CurvedMass, ModelParams
from .quadrature import graded_rule, uniform_panels
from .trace import SolutionTrace
from .waveprop import GridField, ee_propagate

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureSpec:
    nodes_b: int = 48
    nodes_r: int = 48
    nodes_s: int = 64
    tol: float = 1e-6
    max_level: int = 6

    def __post_init__(self):
        if min(self.nodes_b, self.nodes_r, self.nodes_s) < 4:
            raise InvalidArgs("quadrature node counts must be >= 4")
        if not self.tol > 0:
            raise InvalidArgs("quadrature tol must be positive")


@dataclass
class LinearProblem:
    params: ModelParams
    phi0: GridField
    phi1: GridField
    t_grid: np.ndarray
    source: object = None  # callable b -> GridField, or None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t_grid = np.asarray(self.t_grid, dtype=float)
        if self.phi0.grid != self.phi1.grid:
            raise InvalidArgs("phi0 and phi1 must share a grid")
        if self.phi0.grid.dims != self.params.n:
            raise InvalidArgs("grid dimension must equal n")
        if np.any(self.t_grid < 0) or np.any(np.diff(self.t_grid) < 0):
            raise InvalidArgs("t_grid must be ascending and non-negative")


def _mass(M, n=None):
    if isinstance(M, CurvedMass):
        return M.M
    return complex(M)


def _layer(scale, length):
    return min(0.5, scale / length) if length > 0 else 0.5


def _refine(evaluate, q, what):
    """Call evaluate(level) with doubling levels until successive results agree."""
    prev = evaluate(0)
    for level in range(1, q.max_level + 1):
        cur = evaluate(level)
        scale = max(float(np.linalg.norm(cur)), 1e-300)
        change = float(np.linalg.norm(cur - prev))
        if change <= q.tol * scale or change == 0.0:
            return cur, level
        prev = cur
    raise QuadratureDivergence(f"{what}: no agreement to {q.tol} after {q.max_level} doublings")


# ---------------------------------------------------------------- s-integrals

def boundary_multipliers(t, M, n, xi, q, level):
    """Radial multipliers (m0, m1) acting on phi0 and phi1 at time t > 0."""
    Mc = _mass(M)
    ph = np.expm1(t)
    s, w = graded_rule(q.nodes_s, _layer(1.0, ph), level)
    z = ph * s
    k0 = kernel_K0(z, t, Mc)
    k1 = kernel_K1(z, t, Mc)
    cosm = np.cos(np.outer(z, xi))
    m0 = np.exp((n - 1) * t / 2) * np.cos(ph * xi) + np.exp(n * t / 2) * ph * ((w * (2 * k0 - n * k1)) @ cosm)
    m1 = 2 * np.exp(n * t / 2) * ph * ((w * k1) @ cosm)
    return m0, m1


def homogeneous_coeffs(t, M, n, phi0_hat, phi1_hat, grid, q):
    """Spectral coefficients of the source-free solution at t."""
    if t == 0:
        return phi0_hat.copy()
    xi, inv = grid.xi_unique

    def evaluate(level):
        m0, m1 = boundary_multipliers(t, M, n, xi, q, level)
        return m0[inv] * phi0_hat + m1[inv] * phi1_hat

    coeffs, _ = _refine(evaluate, q, f"s-integrals at t={t:g}")
    return coeffs


# ---------------------------------------------------------------- source term

def inner_table(t, b_nodes, M, xi, q, level):
    """h[j, k] = int_0^{e^t - e^{b_j}} cos(r xi_k) E(r, t; 0, b_j; M) dr."""
    Mc = _mass(M)
    b_nodes = np.asarray(b_nodes, float)
    et = np.exp(t)
    rs, ws, seg = [], [], [0]
    for b in b_nodes:
        R = et - np.exp(b)
        u, wu = graded_rule(q.nodes_r, _layer(np.exp(b), R), level)
        rs.append(R * u)
        ws.append(R * wu)
        seg.append(seg[-1] + len(u))
    r = np.concatenate(rs)
    wr = np.concatenate(ws)
    bb = np.repeat(b_nodes, np.diff(seg))
    E = kernel_E(r, t, bb, Mc)
    weighted = (wr * E)[:, None] * np.cos(np.outer(r, xi))
    return np.add.reduceat(weighted, np.asarray(seg[:-1]), axis=0)


def source_coeffs(t, M, n, source_hat, grid, q):
    """Coefficients of G[f](t); ``source_hat(b)`` returns spectral coefficients."""
    if t == 0:
        return np.zeros(grid.shape, dtype=complex)
    xi, inv = grid.xi_unique

    def evaluate(level):
        b, wb = uniform_panels(q.nodes_b, 0.0, t, 2 ** level)
        h = inner_table(t, b, M, xi, q, level)
        acc = np.zeros(grid.shape, dtype=complex)
        for j in range(len(b)):
            acc += (wb[j] * np.exp(-n * b[j] / 2)) * h[j][inv] * source_hat(b[j])
        return 2 * np.exp(n * t / 2) * acc

    coeffs, _ = _refine(evaluate, q, f"source integral at t={t:g}")
    return coeffs


def apply_G(f_provider, t, params, q=QuadratureSpec()):
    """G[f](., t) with f_provider(b) -> GridField (physical)."""
    M = params.mass.M if isinstance(params, ModelParams) else _mass(params)
    n = params.n if isinstance(params, ModelParams) else None
    probe = f_provider(0.0)
    grid = probe.grid
    n = grid.dims if n is None else n
    real = np.isrealobj(probe.values) and complex(M).imag == 0
    coeffs = source_coeffs(t, M, n, lambda b: f_provider(b).to_spectral().values, grid, q)
    return GridField(grid, coeffs, "spectral").to_physical(real=real)


def apply_K(v_provider, t, M, n, q=QuadratureSpec()):
    """K[v](., t) = 2 e^{nt/2} int_0^t db int_0^{e^t-e^b} dr e^{-nb/2} v(., r; b) E(r, t; 0, b; M).

    Generic version that calls ``v_provider(r, b)`` at every node; use
    ``apply_G`` when v is a free-wave propagation.
    """
    Mc = _mass(M)
    probe = v_provider(0.0, 0.0)
    if t <= 0:
        return GridField.zeros(probe.grid, dtype=probe.values.dtype)
    et = np.exp(t)

    def evaluate(level):
        b, wb = uniform_panels(q.nodes_b, 0.0, t, 2 ** level)
        acc = np.zeros(probe.grid.shape, dtype=complex)
        for bj, wj in zip(b, wb):
            R = et - np.exp(bj)
            u, wu = graded_rule(q.nodes_r, _layer(np.exp(bj), R), level)
            E = kernel_E(R * u, t, bj, Mc)
            for rk, ek, wk in zip(R * u, E, R * wu):
                acc += (wj * np.exp(-n * bj / 2) * wk * ek) * v_provider(rk, bj).to_physical().values
        return 2 * np.exp(n * t / 2) * acc

    vals, _ = _refine(evaluate, q, f"K transform at t={t:g}")
    real = np.isrealobj(probe.values) and Mc.imag == 0
    return GridField(probe.grid, vals.real if real else vals)


def ee_then_K(f_provider, t, M, n, q=QuadratureSpec()):
    """apply_K composed with explicit ee_propagate calls (slow reference path)."""
    return apply_K(lambda r, b: ee_propagate(f_provider(b), r), t, M, n, q)


# ---------------------------------------------------------------- full solve

def solve_linear(prob, q=QuadratureSpec(), keep_fields=True, threads=1):
    """Assemble Phi(., t) for every t in prob.t_grid."""
    params = prob.params
    M = params.mass.M
    n = params.n
    grid = prob.phi0.grid
    p0 = prob.phi0.to_spectral().values
    p1 = prob.phi1.to_spectral().values
    cache = {}

    def src(b):
        if b not in cache:
            cache[b] = prob.source(b).to_spectral().values
        return cache[b]

    def one(t):
        c = homogeneous_coeffs(t, M, n, p0, p1, grid, q)
        if prob.source is not None and t > 0:
            c = c + source_coeffs(t, M, n, src, grid, q)
        return c

    ts = list(prob.t_grid)
    if threads == 1 or len(ts) < 2:
        coeffs = [one(t) for t in ts]
    else:
        with ThreadPoolExecutor(max_workers=None if threads == 0 else threads) as pool:
            coeffs = list(pool.map(one, ts))
    real = (np.isrealobj(prob.phi0.values) and np.isrealobj(prob.phi1.values) and M.imag == 0)
    coeffs = np.array(coeffs) if coeffs else np.zeros((0,) + grid.shape, dtype=complex)
    return SolutionTrace(grid, prob.t_grid, coeffs, s=params.s, gamma=params.gamma, real=real,
                         meta={"solver": "transform", "keep_fields": keep_fields})
