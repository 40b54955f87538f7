"""Kernels E, K0, K1 of the integral transform and phi(t) = e^t - 1.

All kernels broadcast over numpy arrays in (z, t, b).  The hypergeometric
argument

    w = ((e^t - e^b)^2 - z^2) / ((e^t + e^b)^2 - z^2)

vanishes on the light cone z = |e^t - e^b| and tends to 1 only at the
centre z -> 0 as t - b grows; 1 - w = 4 e^{t+b} / ((e^t + e^b)^2 - z^2) is
formed directly so that arguments near 1 keep full relative accuracy.
"""

import numpy as np

from .errors import DomainError
from .params import CurvedMass
from .specfun import hyp2f1, hyp2f1_tail

_EDGE_TOL = 1e-12


def phi(t):
    """phi(t) = e^t - 1."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("phi is defined for t >= 0")
    out = np.expm1(t)
    return float(out) if out.ndim == 0 else out


def _mass(M):
    if isinstance(M, CurvedMass):
        return M.M
    return complex(M)


def _geometry(z, t, b):
    z, t, b = np.broadcast_arrays(np.asarray(z, float), np.asarray(t, float), np.asarray(b, float))
    et, eb = np.exp(t), np.exp(b)
    radius = np.abs(et - eb)
    if np.any(z < 0) or np.any(z > radius * (1 + _EDGE_TOL) + _EDGE_TOL):
        raise DomainError("kernel evaluated outside the dependence domain 0 <= z <= |e^t - e^b|")
    z = np.minimum(z, radius)
    S = et + eb
    P = (S - z) * (S + z)
    D = (radius - z) * (radius + z)
    return z, t, b, et, eb, P, D


def kernel_E(z, t, b, M, tol=1e-14):
    """E(z, t; 0, b; M) on 0 <= z <= |e^t - e^b|."""
    Mc = _mass(M)
    z, t, b, et, eb, P, D = _geometry(z, t, b)
    w = D / P
    omw = 4.0 * et * eb / P
    logpref = -Mc * np.log(4.0) - Mc * (b + t) + (Mc - 0.5) * np.log(P)
    F = hyp2f1(0.5 - Mc, 0.5 - Mc, 1.0, w.ravel(), tol, omw.ravel()).reshape(w.shape)
    out = np.exp(logpref) * F
    return out[()] if out.ndim == 0 else out


def kernel_K1(z, t, M, tol=1e-14):
    """K1(z, t; M) = E(z, t; 0, 0; M)."""
    return kernel_E(z, t, 0.0, M, tol)


def kernel_K0(z, t, M, tol=1e-14):
    """K0(z, t; M) = -dE/db at b = 0, closed form.

    The factor 1/((e^t-1)^2 - z^2) of the closed form multiplies a bracket
    that vanishes on the light cone; writing F = 1 + w G with
    G = (F - 1)/w removes the 0/0 exactly, so the kernel is evaluated
    without cancellation up to and including z = e^t - 1.
    """
    Mc = _mass(M)
    z, t, b, et, eb, P, D = _geometry(z, t, 0.0)
    w = (D / P).ravel()
    omw = (4.0 * et / P).ravel()
    G1 = hyp2f1_tail(0.5 - Mc, 0.5 - Mc, 1.0, w, tol, omw).reshape(P.shape)
    G2 = hyp2f1_tail(-0.5 - Mc, 0.5 - Mc, 1.0, w, tol, omw).reshape(P.shape)
    Q = np.expm1(2 * t) - z * z
    bracket_over_D = -0.5 + ((np.expm1(t) + Mc * Q) * G1 - Q * (0.5 + Mc) * G2) / P
    logpref = -Mc * np.log(4.0) - Mc * t + (Mc - 0.5) * np.log(P)
    out = -np.exp(logpref) * bracket_over_D
    return out[()] if out.ndim == 0 else out


def kernel_K0_literal(z, t, M, tol=1e-14):
    """K0 evaluated term by term as printed, for cross-checks away from the cone."""
    Mc = _mass(M)
    z, t, b, et, eb, P, D = _geometry(z, t, 0.0)
    w = (D / P).ravel()
    omw = (4.0 * et / P).ravel()
    F1 = hyp2f1(0.5 - Mc, 0.5 - Mc, 1.0, w, tol, omw).reshape(P.shape)
    F2 = hyp2f1(-0.5 - Mc, 0.5 - Mc, 1.0, w, tol, omw).reshape(P.shape)
    bracket = (et - 1 + Mc * (et ** 2 - 1 - z ** 2)) * F1 + (1 - et ** 2 + z ** 2) * (0.5 + Mc) * F2
    out = -(4.0 ** -Mc) * np.exp(-t * Mc) * P ** Mc / (D * np.sqrt(P)) * bracket
    return out[()] if out.ndim == 0 else out
