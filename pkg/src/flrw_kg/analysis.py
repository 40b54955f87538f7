"""Case analysis in (n, M, alpha, gamma, Gamma), lifespan function I and its inverse,
kernel bound certification and growth-exponent fits."""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import optimize

from .errors import DegenerateWindow, Inapplicable, InvalidArgs, NotInvertible
from .kernels import kernel_K0, kernel_K1
from .params import CurvedMass, ModelParams
from .quadrature import graded_rule

SIGN_TOL = 1e-12
GLOBAL_CASES = ("I", "II", "III")
LIFESPAN_CASES = ("IV", "V", "VI")


def _sign(x, tol=SIGN_TOL):
    return 0 if abs(x) <= tol else (1 if x > 0 else -1)


@dataclass(frozen=True)
class ConditionVerdict:
    """Primary verdict follows the global-existence theorem (Re M in the first
    expression, max{1/2, Re M} in the second); ``secondary`` repeats the
    analysis for the integral equation with Re M alone."""

    case: str
    slacks: tuple
    applicable: bool
    secondary: str
    branch: str
    flags: tuple = ()

    def as_dict(self):
        names = ("n/2+ReM+gamma(alpha+1)+Gamma", "n/2+max(1/2,ReM)+gamma", "gamma*alpha+Gamma")
        return {
            "case": self.case,
            "branch": self.branch,
            "secondary": self.secondary,
            "applicable": self.applicable,
            "slacks": {k: {"value": v, "sign": _sign(v)} for k, v in zip(names, self.slacks)},
            "flags": list(self.flags),
        }


def _growth_cases(P, Q, R):
    """Six-way split of the growth lemma for one value of the mass parameter."""
    p, q, r = _sign(P), _sign(Q), _sign(R)
    if p > 0:
        return "I" if q <= 0 else "IV"
    if p == 0:
        return "II" if q < 0 else "V"
    return "III" if r >= 0 else "VI"


def _slacks(n, re_m, alpha, gamma, Gamma, mass_term):
    P = n / 2 + re_m + gamma * (alpha + 1) + Gamma
    Q = n / 2 + mass_term + gamma
    R = gamma * alpha + Gamma
    return P, Q, R


def classify(params):
    mass = params.mass
    if not mass.theorem_applicable:
        raise Inapplicable(f"Re M = {mass.re:g}, Im M = {mass.im:g}: the case analysis needs Re M > 0 "
                           "and real M when Re M = 1/2")
    n, a, g, G = params.n, params.alpha, params.gamma, params.Gamma_damp
    re = mass.re
    mx = max(0.5, re)
    P, Q, R = _slacks(n, re, a, g, G, mx)
    p, q, r = _sign(P), _sign(Q), _sign(R)
    if p > 0 and q <= 0:
        case = "I"
    elif p == 0 and q < 0:
        case = "II"
    elif p < 0 and q <= 0 and r >= 0:
        case = "III"
    else:
        # lifespan function I(t) is built with max{1/2, Re M} in both places
        lemma = _growth_cases(n / 2 + mx + g * (a + 1) + G, Q, R)
        case = lemma if lemma in LIFESPAN_CASES else "boundary"
    secondary = _growth_cases(*_slacks(n, re, a, g, G, re))
    flags = []
    if case in LIFESPAN_CASES and g > -(n / 2 + mx) + SIGN_TOL:
        flags.append("gamma above -(n/2+max(1/2,ReM)): lower-bound theorem hypothesis not met")
    if case == "boundary":
        flags.append("no listed case applies at max(1/2,ReM) vs ReM")
    if (case in GLOBAL_CASES) != (secondary in GLOBAL_CASES):
        flags.append("primary and Re M-only verdicts disagree")
    branch = "global" if case in GLOBAL_CASES else ("finite-lifespan" if case in LIFESPAN_CASES else "boundary")
    return ConditionVerdict(case, (P, Q, R), True, secondary, branch, tuple(flags))


def classify_inequalities(n, alpha, M, gamma, Gamma):
    """Independent vectorised evaluation of the primary verdict for real M arrays.

    Returns an array of case labels; kept separate from ``classify`` so the
    two can be cross-checked.
    """
    M, gamma, Gamma = np.broadcast_arrays(np.asarray(M, float), np.asarray(gamma, float), np.asarray(Gamma, float))
    mx = np.maximum(0.5, M)
    first = n / 2 + M + gamma * (alpha + 1) + Gamma
    second = n / 2 + mx + gamma
    third = gamma * alpha + Gamma
    lemma_first = n / 2 + mx + gamma * (alpha + 1) + Gamma
    z = lambda x: np.abs(x) <= SIGN_TOL
    pos = lambda x: x > SIGN_TOL
    neg = lambda x: x < -SIGN_TOL
    out = np.full(M.shape, "boundary", dtype=object)
    conds = [
        ("VI", neg(lemma_first) & neg(third)),
        ("V", z(lemma_first) & ~neg(second)),
        ("IV", pos(lemma_first) & pos(second)),
        ("III", neg(first) & ~pos(second) & ~neg(third)),
        ("II", z(first) & neg(second)),
        ("I", pos(first) & ~pos(second)),
    ]
    for label, mask in conds:  # later entries take priority
        out[mask] = label
    out[M <= 0] = "inapplicable"
    return out


# ---------------------------------------------------------------- lifespan

def _lifespan_coeffs(params, use_max=True):
    re = params.mass.re
    mc = max(0.5, re) if use_max else re
    A = params.n / 2 + mc + params.gamma
    B = params.n / 2 + mc + params.gamma * (params.alpha + 1) + params.Gamma_damp
    return A, B


def lifespan_I(t, params, use_max=True):
    """I(t) = e^{At} int_0^t e^{-Bb} db in closed form."""
    A, B = _lifespan_coeffs(params, use_max)
    t = np.asarray(t, float)
    if np.any(t < 0):
        raise InvalidArgs("t must be non-negative")
    if B == 0:
        out = np.exp(A * t) * t
    else:
        out = np.exp(A * t) * (-np.expm1(-B * t)) / B
    return float(out) if out.ndim == 0 else out


def lifespan_I_quad(t, params, use_max=True):
    """Same integral by adaptive quadrature (reference path)."""
    from scipy import integrate

    A, B = _lifespan_coeffs(params, use_max)
    val, _ = integrate.quad(lambda b: math.exp(A * t - B * b), 0.0, t, epsabs=0, epsrel=1e-13, limit=200)
    return val


def lifespan_unbounded(params, use_max=True):
    A, B = _lifespan_coeffs(params, use_max)
    if B > 0:
        return A > 0
    if B == 0:
        return A >= 0
    return A - B > 0


def lifespan_inverse(y, params, use_max=True):
    """t with I(t) = y, to 1e-10 relative."""
    if not y > 0:
        raise InvalidArgs("y must be positive")
    if not lifespan_unbounded(params, use_max):
        raise NotInvertible("I(t) is bounded in this parameter regime")
    f = lambda t: lifespan_I(t, params, use_max) - y
    lo, hi = 0.0, 1e-3
    while f(hi) < 0:
        lo, hi = hi, hi * 2
        if hi > 1e6:
            raise NotInvertible("no bracket for the inverse of I")
    t = optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    A, B = _lifespan_coeffs(params, use_max)
    for _ in range(3):
        d = A * lifespan_I(t, params, use_max) + math.exp((A - B) * t)
        t -= f(t) / d
    if abs(f(t)) > 1e-10 * y:
        raise NotInvertible(f"inverse of I did not reach 1e-10 at y={y:g}")
    return t


def lifespan_lower_bound(params, data_norm, C):
    """Inverse of I at C * data_norm^(-alpha)."""
    if not data_norm > 0:
        raise InvalidArgs("data norm must be positive")
    return lifespan_inverse(C * data_norm ** (-params.alpha), params)


def calibrate_constant(params, data_norm, measured_time):
    """C making the lower bound equal to ``measured_time`` at ``data_norm``."""
    return lifespan_I(measured_time, params) * data_norm ** params.alpha


# ---------------------------------------------------------------- kernel bounds

@dataclass
class BoundReport:
    kernel: str
    a: float
    M: complex
    t: np.ndarray
    integral: np.ndarray
    bound: np.ndarray
    ratio: np.ndarray
    drift: float
    small_t_slope: float
    meta: dict = field(default_factory=dict)

    @property
    def sup_ratio(self):
        return float(np.max(self.ratio))

    def rows(self):
        return list(zip(self.t.tolist(), self.integral.tolist(), self.bound.tolist(), self.ratio.tolist()))


def _mass_of(M):
    return M if isinstance(M, CurvedMass) else CurvedMass.from_M(1, M)


def kernel_moment(kernel, a, M, t, nodes=32, level=0):
    """int_0^phi y^a |K(y, t; M)| dy for kernel in {"K0", "K1"}."""
    if a <= -1:
        raise InvalidArgs("a must exceed -1")
    fn = kernel_K1 if kernel == "K1" else kernel_K0
    ph = math.expm1(t)
    s, w = graded_rule(nodes, min(0.5, 1.0 / ph), level, power=a)
    return ph ** (a + 1) * float(np.sum(w * np.abs(fn(ph * s, t, M))))


def k1_bound(a, M, t):
    re = M.real
    return np.exp(-re * t) * np.expm1(t) ** (a + 1) * (np.exp(t) + 1) ** (2 * re - 1)


def k0_bound(a, M, t):
    re, im = M.real, M.imag
    base = np.expm1(t) ** (a + 1) * (np.exp(t) + 1) ** (re - 1)
    if re > 0.5:
        return base
    return base * ((t if im != 0 else 1.0) + np.exp((0.5 - re) * t))


def _small_t_slope(kernel, a, M, nodes):
    ts = np.geomspace(1e-3, 1e-2, 6)
    vals = [kernel_moment(kernel, a, M, t, nodes) for t in ts]
    return float(np.polyfit(np.log(ts), np.log(vals), 1)[0])


def _certify(kernel, a, M, t_grid, nodes, bound_fn):
    mass = _mass_of(M)
    if mass.re <= 0:
        raise InvalidArgs("certification needs Re M > 0")
    Mc = mass.M
    t = np.asarray(t_grid, float)
    if np.any(t <= 0):
        raise InvalidArgs("t_grid must be positive")
    coarse = np.array([kernel_moment(kernel, a, Mc, x, nodes, 0) for x in t])
    fine = np.array([kernel_moment(kernel, a, Mc, x, nodes, 1) for x in t])
    bound = bound_fn(a, Mc, t)
    ratio = fine / bound
    drift = float(np.max(np.abs(fine - coarse) / np.abs(fine)))
    return BoundReport(kernel, a, Mc, t, fine, bound, ratio, drift, _small_t_slope(kernel, a, Mc, nodes),
                       meta={"nodes": nodes})


def certify_K1_bound(a, M, t_grid, nodes=32):
    return _certify("K1", a, M, t_grid, nodes, k1_bound)


def certify_K0_bound(a, M, t_grid, nodes=32):
    return _certify("K0", a, M, t_grid, nodes, k0_bound)


def power_moment(a, M, t):
    """int_0^{e^t-1} y^a ((e^t+1)^2 - y^2)^{M-1/2} dy in closed form (real M)."""
    from .specfun import hyp2f1

    z = math.exp(t)
    x = ((z - 1) / (z + 1)) ** 2
    F = hyp2f1((1 + a) / 2, 0.5 - M, (3 + a) / 2, np.array([x]), 1e-14)[0]
    return (z - 1) ** (1 + a) * (z + 1) ** (2 * M - 1) * F.real / (1 + a)


# ---------------------------------------------------------------- fits and samples

def fit_growth_exponent(trace, window, norm="l2"):
    """Least-squares slope of log ||Phi(t)|| over t in ``window``."""
    t1, t2 = window
    vals = trace.norms_l2 if norm == "l2" else trace.norms_hs
    mask = (trace.t >= t1) & (trace.t <= t2) & (vals > 0)
    if mask.sum() < 4:
        raise DegenerateWindow(f"need at least 4 samples in [{t1}, {t2}], found {int(mask.sum())}")
    return float(np.polyfit(trace.t[mask], np.log(vals[mask]), 1)[0])


@dataclass
class DomainCloud:
    n: int
    alpha: float
    M: np.ndarray
    gamma: np.ndarray
    Gamma: np.ndarray
    cases: np.ndarray

    def __len__(self):
        return len(self.M)

    def select(self, case):
        mask = self.cases == case
        return DomainCloud(self.n, self.alpha, self.M[mask], self.gamma[mask], self.Gamma[mask], self.cases[mask])

    def rows(self):
        return list(zip(self.M.tolist(), self.gamma.tolist(), self.Gamma.tolist(), self.cases.tolist()))


FIGURE_PANELS = {
    "a": ("I", (0.0, 0.5), (-3.0, -2.0), (4.0, 6.0)),
    "b": ("III", (0.0, 0.5), (-3.0, -2.0), (4.0, 6.0)),
    "c": ("I", (0.5, 1.5), (-3.0, -2.0), (4.0, 6.0)),
    "d": ("III", (0.5, 1.5), (-3.0, -2.0), (4.0, 6.0)),
}


def feasible_domain_sample(n, alpha, box_M, box_gamma, box_Gamma, count, seed=0, case=None):
    """Uniform samples in the open box, each classified; optionally filtered by case."""
    boxes = (box_M, box_gamma, box_Gamma)
    if any(hi < lo for lo, hi in boxes):
        raise InvalidArgs("box bounds must satisfy lo <= hi")
    if any(hi == lo for lo, hi in boxes) or count <= 0:
        empty = np.array([], float)
        return DomainCloud(n, alpha, empty, empty, empty, np.array([], dtype=object))
    rng = np.random.default_rng(seed)
    pts = [rng.uniform(lo, hi, count) for lo, hi in boxes]
    M, g, G = pts
    cases = np.empty(count, dtype=object)
    for i in range(count):
        p = ModelParams.from_M(n, M[i], alpha=alpha, gamma=g[i], Gamma_damp=G[i])
        try:
            cases[i] = classify(p).case
        except Inapplicable:
            cases[i] = "inapplicable"
    cloud = DomainCloud(n, alpha, M, g, G, cases)
    return cloud.select(case) if case else cloud


def random_parameter_draw(rng, margin=0.25, n_choices=(1, 2, 3)):
    """Random (n, M, alpha, gamma, Gamma) whose slacks all stay ``margin`` away from zero."""
    while True:
        n = int(rng.choice(n_choices))
        p = ModelParams.from_M(n, float(rng.uniform(0.05, 3.0)), alpha=float(rng.uniform(0.5, 3.0)),
                               gamma=float(rng.uniform(-4.0, 1.0)), Gamma_damp=float(rng.uniform(-2.0, 6.0)))
        P, Q, R = _slacks(n, p.mass.re, p.alpha, p.gamma, p.Gamma_damp, max(0.5, p.mass.re))
        Pm, _, _ = p.exponents()
        if min(abs(P), abs(Q), abs(R), abs(Pm)) >= margin:
            return p
