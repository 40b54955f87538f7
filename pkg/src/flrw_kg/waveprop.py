"""Periodic grid fields and the free-wave resolving operator.

R^n is modelled by the torus [0, L)^n.  A field's Fourier series
coefficients are ``fft(values) / N^n``; Sobolev norms use the integral
convention, so ``||f||_{L^2}^2 = L^n * sum |c_k|^2``.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GridTooSmall, InvalidArgs

DEFAULT_POINTS = {1: 256, 2: 128, 3: 64}


@dataclass(frozen=True)
class Grid:
    """Immutable grid metadata; transform helpers are cached per instance."""

    dims: int = 1
    points: int = 256
    length: float = 2 * np.pi

    def __post_init__(self):
        if self.dims not in (1, 2, 3):
            raise InvalidArgs("dims must be 1, 2 or 3")
        if self.points < 1 or self.points & (self.points - 1):
            raise InvalidArgs("points_per_axis must be a power of two")
        if not self.length > 0:
            raise InvalidArgs("box length must be positive")

    @property
    def shape(self):
        return (self.points,) * self.dims

    @property
    def cell_volume(self):
        return (self.length / self.points) ** self.dims

    @cached_property
    def axis(self):
        return np.arange(self.points) * (self.length / self.points)

    def coords(self):
        return np.meshgrid(*([self.axis] * self.dims), indexing="ij")

    @cached_property
    def xi_abs(self):
        """|xi| per mode, in fft ordering."""
        k = np.fft.fftfreq(self.points, d=1.0 / self.points) * (2 * np.pi / self.length)
        grids = np.meshgrid(*([k] * self.dims), indexing="ij")
        return np.sqrt(sum(g * g for g in grids))

    @cached_property
    def xi_unique(self):
        """(unique |xi| values, inverse index into them) for radial multipliers."""
        vals, inv = np.unique(np.round(self.xi_abs, 12), return_inverse=True)
        return vals, inv.reshape(self.shape)

    @property
    def xi_max(self):
        return float(self.xi_abs.max())

    def radial(self, multiplier_on_unique):
        """Expand a multiplier sampled at the unique |xi| values onto the grid."""
        _, inv = self.xi_unique
        return np.asarray(multiplier_on_unique)[inv]


@dataclass
class GridField:
    grid: Grid
    values: np.ndarray
    space: str = "physical"

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != self.grid.shape:
            raise InvalidArgs(f"values shape {self.values.shape} != grid shape {self.grid.shape}")
        if self.space not in ("physical", "spectral"):
            raise InvalidArgs("space must be 'physical' or 'spectral'")

    @classmethod
    def zeros(cls, grid, dtype=float):
        return cls(grid, np.zeros(grid.shape, dtype=dtype))

    @classmethod
    def from_function(cls, grid, fn):
        return cls(grid, fn(*grid.coords()))

    def to_spectral(self):
        if self.space == "spectral":
            return self
        n = self.grid.points ** self.grid.dims
        return GridField(self.grid, np.fft.fftn(self.values) / n, "spectral")

    def to_physical(self, real=None):
        if self.space == "physical":
            return self
        n = self.grid.points ** self.grid.dims
        vals = np.fft.ifftn(self.values * n)
        if real is None:
            real = bool(np.all(np.abs(vals.imag) <= 1e-13 * max(np.abs(vals).max(), 1e-300)))
        return GridField(self.grid, vals.real if real else vals, "physical")

    def __add__(self, other):
        other = _same_space(self, other)
        return GridField(self.grid, self.values + other.values, self.space)

    def __sub__(self, other):
        other = _same_space(self, other)
        return GridField(self.grid, self.values - other.values, self.space)

    def __mul__(self, c):
        return GridField(self.grid, self.values * c, self.space)

    __rmul__ = __mul__


def _same_space(a, b):
    if a.grid != b.grid:
        raise InvalidArgs("fields live on different grids")
    return b.to_spectral() if a.space == "spectral" else b.to_physical()


def propagation_horizon(grid, support_radius=0.0):
    """Largest radius a compactly supported field can travel before wrapping."""
    return grid.length / 2 - support_radius


def ee_propagate(f, r, strict_support=None):
    """v(., r) for v_tt = Laplacian v, v(0) = f, v_t(0) = 0: multiplier cos(r|xi|).

    ``strict_support`` (a support radius) turns on the no-wraparound check.
    """
    if r < 0:
        raise InvalidArgs("propagation radius must be non-negative")
    if strict_support is not None and r > propagation_horizon(f.grid, strict_support):
        raise GridTooSmall(f"radius {r} wraps around a torus of side {f.grid.length}")
    was_physical = f.space == "physical"
    spec = f.to_spectral()
    out = GridField(f.grid, spec.values * np.cos(r * f.grid.xi_abs), "spectral")
    if was_physical:
        return out.to_physical(real=np.isrealobj(f.values))
    return out


def spectral_weight(grid, s):
    return (1.0 + grid.xi_abs ** 2) ** s


def sobolev_norm(f, s):
    """(L^n sum_xi (1+|xi|^2)^s |c_xi|^2)^(1/2)."""
    c = f.to_spectral().values
    return float(np.sqrt(f.grid.length ** f.grid.dims * np.sum(spectral_weight(f.grid, s) * np.abs(c) ** 2)))


def sobolev_norm_coeffs(grid, coeffs, s):
    """Sobolev norm from Fourier coefficients over a trailing grid shape (vectorised)."""
    axes = tuple(range(-grid.dims, 0))
    w = spectral_weight(grid, s)
    return np.sqrt(grid.length ** grid.dims * np.sum(w * np.abs(coeffs) ** 2, axis=axes))


def l2_norm_direct(f):
    """Riemann sum of |f|^2 in physical space."""
    v = f.to_physical().values
    return float(np.sqrt(f.grid.cell_volume * np.sum(np.abs(v) ** 2)))


def laplacian(f):
    spec = f.to_spectral()
    out = GridField(f.grid, -spec.values * f.grid.xi_abs ** 2, "spectral")
    return out.to_physical(real=np.isrealobj(f.values)) if f.space == "physical" else out
