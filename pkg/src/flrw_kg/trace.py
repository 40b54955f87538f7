"""Time series of grid solutions and their weighted Sobolev norms."""

from dataclasses import dataclass, field

import numpy as np

from .waveprop import Grid, GridField, sobolev_norm_coeffs


@dataclass
class SolutionTrace:
    """Spectral snapshots ``coeffs[i]`` of the solution at ``t[i]``.

    ``gamma`` and ``s`` fix the weighted norm e^{gamma t} ||.||_{H_s}.
    """

    grid: Grid
    t: np.ndarray
    coeffs: np.ndarray
    s: float = 1.0
    gamma: float = 0.0
    real: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.coeffs = np.asarray(self.coeffs)
        if np.any(np.diff(self.t) < 0):
            raise ValueError("t_grid must be ascending")

    def __len__(self):
        return len(self.t)

    @property
    def norms_l2(self):
        return sobolev_norm_coeffs(self.grid, self.coeffs, 0.0)

    @property
    def norms_hs(self):
        return sobolev_norm_coeffs(self.grid, self.coeffs, self.s)

    @property
    def weighted(self):
        return np.exp(self.gamma * self.t) * self.norms_hs

    @property
    def x_norm(self):
        """sup over samples of e^{gamma t} ||Phi(t)||_{H_s}."""
        return float(np.max(self.weighted)) if len(self.t) else 0.0

    def field(self, i):
        return GridField(self.grid, self.coeffs[i], "spectral").to_physical(real=self.real)

    def rows(self):
        """(t, L2, H_s, weighted) tuples for tabular export."""
        return list(zip(self.t.tolist(), self.norms_l2.tolist(), self.norms_hs.tolist(), self.weighted.tolist()))
