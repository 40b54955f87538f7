"""Pointwise self-interaction e^{-Gamma t} F(Phi) on grid values."""

import numpy as np

from .errors import InvalidArgs
from .waveprop import GridField


def pointwise(u, spec):
    """F(u) for an array of samples (no damping factor)."""
    u = np.asarray(u)
    if spec.kind == "power_signed":
        return spec.coeff * np.abs(u) ** spec.alpha * u
    if spec.kind == "power_abs":
        return spec.coeff * np.abs(u) ** (spec.alpha + 1)
    if spec.kind == "higgs_cubic":
        return -spec.coeff * u * u * u
    if spec.kind == "polynomial":
        out = np.zeros_like(u)
        for k, c in enumerate(spec.poly):
            out = out + c * u ** (k + 2)
        return out
    raise InvalidArgs(f"unknown nonlinearity kind {spec.kind!r}")


def apply_nonlinearity(f, spec, t):
    """e^{-Gamma t} F(f) evaluated sample by sample in physical space."""
    if f.space != "physical":
        raise InvalidArgs("apply_nonlinearity expects a physical-space field")
    return GridField(f.grid, np.exp(-spec.gamma_damp * t) * pointwise(f.values, spec))
