"""Picard iteration for Phi = Phi0 + G[e^{-Gamma .} F(Phi)] on a finite time mesh.

The time axis [0, T] is cut into equal panels carrying Gauss nodes; the
iterate lives on those nodes.  For a target time t inside panel k the
b-integral runs over the full panels below k plus the partial piece
[a_k, t], where F(Phi) is interpolated from panel k's nodes.  All kernel
work is done once: ``W[i, j, :]`` maps the source coefficients at node j to
the solution at target i as a radial multiplier, so a sweep is a tensor
contraction.
"""

from dataclasses import dataclass, field
import logging

import numpy as np

from .errors import InvalidArgs, MaxIter, NoContraction
from .nonlinearity import apply_nonlinearity, pointwise
from .quadrature import gauss_legendre, lagrange_matrix
from .trace import SolutionTrace
from .transform import QuadratureSpec, homogeneous_coeffs, inner_table
from .waveprop import GridField, sobolev_norm, sobolev_norm_coeffs

log = logging.getLogger(__name__)

__all__ = ["apply_nonlinearity", "lipschitz_probe", "XNormMonitor", "ConvergenceReport", "TimeMesh", "picard_solve"]


def _random_smooth(grid, rng, decay=2.0):
    c = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    c /= (1.0 + grid.xi_abs ** 2) ** decay
    v = np.fft.ifftn(c).real
    return GridField(grid, v / np.max(np.abs(v)))


def lipschitz_probe(spec, s, trials=200, grid=None, seed=0, pairs=None):
    """Largest observed ||F(a)-F(b)|| / (||a-b|| (||a||^alpha + ||b||^alpha)) in H_s.

    ``pairs`` overrides the random draws; identical pairs are skipped.
    """
    from .waveprop import Grid

    grid = grid or Grid(1, 64, 2 * np.pi)
    if s <= grid.dims / 2:
        raise InvalidArgs("the probe needs s > n/2")
    rng = np.random.default_rng(seed)
    if pairs is None:
        pairs = []
        for _ in range(trials):
            a = _random_smooth(grid, rng) * float(rng.uniform(0.05, 2.0))
            b = _random_smooth(grid, rng) * float(rng.uniform(0.0, 2.0))
            pairs.append((a, b))
    best = 0.0
    for a, b in pairs:
        diff = sobolev_norm(a - b, s)
        if diff == 0.0:
            continue
        num = sobolev_norm(GridField(grid, pointwise(a.values, spec) - pointwise(b.values, spec)), s)
        den = diff * (sobolev_norm(a, s) ** spec.alpha + sobolev_norm(b, s) ** spec.alpha)
        best = max(best, num / den)
    return best


@dataclass
class XNormMonitor:
    """Tracks e^{gamma t} ||Phi(t)||_{H_s} and whether it leaves the ball of radius R."""

    gamma: float = 0.0
    s: float = 1.0
    radius: float = np.inf
    samples: list = field(default_factory=list)

    def record(self, t, norm):
        self.samples.append((float(t), float(np.exp(self.gamma * t) * norm)))

    def reset(self):
        self.samples = []

    @property
    def x_norm(self):
        return max((w for _, w in self.samples), default=0.0)

    @property
    def escaped(self):
        return self.x_norm >= self.radius

    @property
    def escape_time(self):
        for t, w in sorted(self.samples):
            if w >= self.radius:
                return t
        return None


@dataclass
class ConvergenceReport:
    converged: bool = False
    iterations: int = 0
    distances: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    residual: float = float("nan")
    x_norm: float = float("nan")
    escape_time: object = None
    reason: str = ""


@dataclass(frozen=True)
class TimeMesh:
    """Equal panels of width ``panel`` on [0, T] with ``nodes`` Gauss points each."""

    T: float = 10.0
    panel: float = 0.5
    nodes: int = 8

    @property
    def edges(self):
        k = max(1, int(np.ceil(self.T / self.panel - 1e-12)))
        return np.linspace(0.0, self.T, k + 1)

    def node_times(self):
        e = self.edges
        x, _ = gauss_legendre(self.nodes)
        return (e[:-1, None] + np.diff(e)[:, None] * x[None, :]).ravel()

    def panel_of(self, t):
        e = self.edges
        return int(min(max(np.searchsorted(e, t, side="left") - 1, 0), len(e) - 2))


def _source_weights(mesh, targets, M, n, xi, q, level=0):
    """W[i, j, k]: contribution of node j's source coefficient at |xi_k| to target i."""
    e = mesh.edges
    nodes = mesh.node_times()
    p = mesh.nodes
    x, w = gauss_legendre(p)
    W = np.zeros((len(targets), len(nodes), len(xi)), dtype=complex if complex(M).imag else float)
    for i, t in enumerate(targets):
        if t <= 0:
            continue
        k = mesh.panel_of(t)
        full_b = nodes[: k * p]
        full_w = np.repeat(np.diff(e)[:k], p) * np.tile(w, k)
        a = e[k]
        part_b = a + (t - a) * x
        part_w = (t - a) * w
        b = np.concatenate([full_b, part_b])
        h = inner_table(t, b, M, xi, q, level)
        h = (h.real if complex(M).imag == 0 else h) * (np.concatenate([full_w, part_w]) * np.exp(-n * b / 2))[:, None]
        h *= 2 * np.exp(n * t / 2)
        W[i, : k * p] = h[: k * p]
        interp = lagrange_matrix(nodes[k * p:(k + 1) * p], part_b)
        W[i, k * p:(k + 1) * p] += interp.T @ h[k * p:]
    return W


def picard_solve(prob, spec=None, monitor=None, max_iter=50, tol=1e-10, mesh=None, q=QuadratureSpec()):
    """Fixed point of the integral equation; returns (SolutionTrace, ConvergenceReport).

    The trace holds the mesh nodes, t = 0 and every time in ``prob.t_grid``.
    """
    params = prob.params
    spec = spec or params.nonlinearity
    grid = prob.phi0.grid
    n, M = params.n, params.mass.M
    T = float(max(prob.t_grid.max(initial=0.0), mesh.T if mesh else 0.0))
    mesh = mesh or TimeMesh(T=T if T > 0 else 1.0)
    if prob.t_grid.size and prob.t_grid.max() > mesh.T + 1e-12:
        raise InvalidArgs("report times extend past the time mesh")
    monitor = monitor or XNormMonitor(params.gamma, params.s)
    nodes = mesh.node_times()
    extra = np.setdiff1d(np.concatenate([[0.0], prob.t_grid]), nodes)
    targets = np.concatenate([nodes, extra])
    order = np.argsort(targets, kind="stable")
    xi, inv = grid.xi_unique
    real = np.isrealobj(prob.phi0.values) and np.isrealobj(prob.phi1.values) and M.imag == 0

    p0 = prob.phi0.to_spectral().values
    p1 = prob.phi1.to_spectral().values
    base = np.array([homogeneous_coeffs(t, M, n, p0, p1, grid, q) for t in targets])
    W = _source_weights(mesh, targets, M, n, xi, q)[..., inv]  # (targets, nodes, *grid)
    npts = grid.points ** grid.dims
    damp = np.exp(-spec.gamma_damp * nodes)
    nn = len(nodes)
    weight = np.exp(params.gamma * targets)

    def sweep(c):
        vals = np.fft.ifftn(c[:nn] * npts, axes=tuple(range(1, grid.dims + 1)))
        if real:
            vals = vals.real
        fh = np.fft.fftn(pointwise(vals, spec), axes=tuple(range(1, grid.dims + 1))) / npts
        fh *= damp.reshape((-1,) + (1,) * grid.dims)
        return base + np.einsum("ij...,j...->i...", W, fh)

    def xdist(a, b):
        return float(np.max(weight * sobolev_norm_coeffs(grid, a - b, params.s)))

    rep = ConvergenceReport()
    cur = base
    over = 0
    for it in range(1, max_iter + 1):
        nxt = sweep(cur)
        d = xdist(nxt, cur)
        if rep.distances:
            ratio = d / rep.distances[-1] if rep.distances[-1] > 0 else 0.0
            rep.ratios.append(ratio)
            over = over + 1 if ratio > 1 else 0
        rep.distances.append(d)
        rep.iterations = it
        cur = nxt
        log.debug("picard iteration %d: d=%.3e", it, d)
        if d <= tol:
            rep.converged = True
            break
        if over >= 3:
            rep.reason = "no contraction"
            raise NoContraction(f"contraction ratio above 1 for 3 consecutive iterations (d={d:.3e})")
    if not rep.converged:
        rep.reason = "max iterations"
        raise MaxIter(f"distance {rep.distances[-1]:.3e} above tol {tol} after {max_iter} iterations")

    rep.residual = xdist(sweep(cur), cur)
    monitor.reset()
    norms = sobolev_norm_coeffs(grid, cur, params.s)
    for t, v in zip(targets[order], norms[order]):
        monitor.record(t, v)
    rep.x_norm = monitor.x_norm
    rep.escape_time = monitor.escape_time
    trace = SolutionTrace(grid, targets[order], cur[order], s=params.s, gamma=params.gamma, real=real,
                          meta={"solver": "picard", "iterations": rep.iterations})
    return trace, rep
