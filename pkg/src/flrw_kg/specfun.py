"""Special functions with complex parameters.

The Gauss hypergeometric function is evaluated on ``0 <= z < 1`` only,
which is all the kernels need: a direct power series up to ``z = 0.75``
and the ``z -> 1 - z`` connection formulas beyond, including the
logarithmic case when ``c - a - b`` is an integer.  All routines accept
numpy arrays for ``z`` and broadcast over them; the parameters are scalars.
"""

import math

import numpy as np
from scipy import special

from .errors import DomainError, InvalidArgs, NonConvergence

SWITCH_Z = 0.75
MAX_TERMS = 10_000
MAX_LOG_GAP = 8
_INT_TOL = 1e-12


def loggamma(x):
    """Principal branch of log Gamma for real or complex input."""
    return special.loggamma(x)


def gamma(x):
    return special.gamma(x)


def rgamma(x):
    """1/Gamma(x), zero at the poles."""
    return special.rgamma(x)


def _nonpositive_integer(x):
    x = complex(x)
    return abs(x.imag) < _INT_TOL and x.real < _INT_TOL and abs(x.real - round(x.real)) < _INT_TOL


def _near_integer(x):
    x = complex(x)
    if abs(x.imag) > _INT_TOL or abs(x.real - round(x.real)) > _INT_TOL:
        return None
    return int(round(x.real))


def _series(a, b, c, z, tol, start=0):
    """Sum_{k>=start} (a)_k (b)_k / ((c)_k k!) z^(k-start), vectorised over z."""
    z = np.asarray(z, dtype=complex)
    term = np.ones_like(z)
    # advance the coefficient to index ``start`` without multiplying by z
    coef = 1.0 + 0j
    for k in range(start):
        coef *= (a + k) * (b + k) / ((c + k) * (k + 1))
    term = term * coef
    total = term.copy()
    k = start
    for _ in range(MAX_TERMS):
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1))
        if ratio == 0:
            return total
        term = term * ratio * z
        total = total + term
        k += 1
        scale = np.maximum(np.abs(total), 1e-300)
        if np.all(np.abs(term) <= tol * scale) and k > 2:
            # one more look-ahead term guards against a lucky cancellation
            nxt = term * ((a + k) * (b + k) / ((c + k) * (k + 1))) * z
            if np.all(np.abs(nxt) <= tol * scale):
                return total + nxt
    raise NonConvergence(f"2F1 series exceeded {MAX_TERMS} terms")


def _terminating(a, b, c, z):
    """Finite sum when a or b is a non-positive integer."""
    n = -int(round(complex(a).real)) if _nonpositive_integer(a) else -int(round(complex(b).real))
    z = np.asarray(z, dtype=complex)
    term = np.ones_like(z)
    total = term.copy()
    for k in range(n):
        term = term * ((a + k) * (b + k) / ((c + k) * (k + 1))) * z
        total = total + term
    return total


def _connection_generic(a, b, c, w, tol):
    """Non-integer c-a-b; w = 1 - z."""
    s = c - a - b
    g1 = gamma(c) * gamma(s) * rgamma(c - a) * rgamma(c - b)
    g2 = gamma(c) * gamma(-s) * rgamma(a) * rgamma(b)
    out = g1 * _series(a, b, 1 - s, w, tol)
    if g2 != 0:
        out = out + g2 * w ** s * _series(c - a, c - b, 1 + s, w, tol)
    return out


def _connection_log(a, b, m, w, tol):
    """F(a, b; a+b+m; 1-w) for integer m >= 0 (logarithmic case)."""
    c = a + b + m
    w = np.asarray(w, dtype=complex)
    finite = np.zeros_like(w)
    if m > 0:
        pref = rgamma(a + m) * rgamma(b + m)
        coef = 1.0 + 0j
        zm1 = -w
        power = np.ones_like(w)
        for k in range(m):
            finite = finite + coef * math.factorial(m - k - 1) * power
            coef *= (a + k) * (b + k) / (k + 1)
            power = power * zm1
        finite = pref * finite
    lw = np.log(w)
    # digamma values advance by the recurrence psi(x+1) = psi(x) + 1/x
    psi_k1 = special.digamma(1.0)
    psi_km1 = special.digamma(m + 1.0)
    psi_a = special.digamma(a + m)
    psi_b = special.digamma(b + m)
    coef = 1.0 / math.factorial(m) + 0j
    term_w = np.ones_like(w)
    total = np.zeros_like(w)
    k = 0
    for _ in range(MAX_TERMS):
        term = coef * term_w * (lw - psi_k1 - psi_km1 + psi_a + psi_b)
        total = total + term
        scale = np.maximum(np.abs(total), 1e-300)
        if k > 2 and np.all(np.abs(term) <= tol * scale):
            break
        coef *= (a + m + k) * (b + m + k) / ((k + 1) * (k + m + 1))
        psi_k1 += 1.0 / (k + 1)
        psi_km1 += 1.0 / (k + m + 1)
        psi_a += 1.0 / (a + m + k)
        psi_b += 1.0 / (b + m + k)
        term_w = term_w * w
        k += 1
    else:
        raise NonConvergence(f"logarithmic 2F1 series exceeded {MAX_TERMS} terms")
    tail = (-w) ** m * rgamma(a) * rgamma(b) * total
    return gamma(c) * (finite - tail)


def _near_one(a, b, c, w, tol):
    s = c - a - b
    m = _near_integer(s)
    if m is None:
        return _connection_generic(a, b, c, w, tol)
    if abs(m) > MAX_LOG_GAP:
        raise InvalidArgs(f"integer c-a-b={m} outside the supported range |c-a-b| <= {MAX_LOG_GAP}")
    if m >= 0:
        return _connection_log(a, b, m, w, tol)
    # Euler transformation flips the sign of the gap
    return w ** s * _connection_log(c - a, c - b, -m, w, tol)


def hyp2f1(a, b, c, z, tol=1e-14, one_minus_z=None):
    """Gauss hypergeometric function F(a, b; c; z) for 0 <= z < 1.

    ``one_minus_z`` may be passed when 1 - z is known more accurately than
    the subtraction would give it (arguments very close to 1).
    """
    if not 0 < tol <= 1e-6:
        raise InvalidArgs("tol must lie in (0, 1e-6]")
    a, b, c = complex(a), complex(b), complex(c)
    if _nonpositive_integer(c):
        raise InvalidArgs("c must not be a non-positive integer")
    z_arr = np.asarray(z, dtype=float)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    if np.any(z_arr < 0) or np.any(z_arr >= 1):
        raise DomainError("hyp2f1 is evaluated on 0 <= z < 1 only")
    if one_minus_z is None:
        w_arr = 1.0 - z_arr
    else:
        w_arr = np.atleast_1d(np.asarray(one_minus_z, dtype=float)) * np.ones_like(z_arr)

    if _nonpositive_integer(a) or _nonpositive_integer(b):
        out = _terminating(a, b, c, z_arr)
    else:
        out = np.empty(z_arr.shape, dtype=complex)
        low = z_arr <= SWITCH_Z
        if np.any(low):
            out[low] = _series(a, b, c, z_arr[low], tol)
        if np.any(~low):
            out[~low] = _near_one(a, b, c, w_arr[~low], tol)
    return out[0] if scalar else out


def hyp2f1_tail(a, b, c, z, tol=1e-14, one_minus_z=None):
    """(F(a, b; c; z) - 1) / z, continuous at z = 0.

    Used where F - 1 would otherwise be divided by a vanishing quantity.
    """
    a, b, c = complex(a), complex(b), complex(c)
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    scalar = np.ndim(z) == 0
    out = np.empty(z_arr.shape, dtype=complex)
    low = z_arr <= 0.5
    if np.any(low):
        out[low] = 0 if a == 0 or b == 0 else _series(a, b, c, z_arr[low], tol, start=1)
    if np.any(~low):
        omz = None if one_minus_z is None else (np.ones_like(z_arr) * one_minus_z)[~low]
        out[~low] = (hyp2f1(a, b, c, z_arr[~low], tol, omz) - 1) / z_arr[~low]
    return out[0] if scalar else out


def gauss_sum(a, b, c):
    """F(a, b; c; 1) = Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b))."""
    a, b, c = complex(a), complex(b), complex(c)
    if (c - a - b).real <= 0:
        raise DomainError("Gauss summation needs Re(c - a - b) > 0")
    return gamma(c) * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b)


def bessel_jy(order, x):
    """(J_order(x), Y_order(x)) for real order >= 0 and x > 0."""
    if order < 0:
        raise InvalidArgs("order must be non-negative")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("Bessel functions are evaluated for x > 0 only")
    return special.jv(order, x), special.yv(order, x)


def bessel_jy_prime(order, x):
    """Derivatives (J'_order(x), Y'_order(x))."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("Bessel functions are evaluated for x > 0 only")
    return special.jvp(order, x), special.yvp(order, x)
