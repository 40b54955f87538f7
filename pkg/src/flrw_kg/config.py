"""JSON run configuration: defaults, strict validation, and builders for solver inputs."""

import copy
import json
import math

import numpy as np

from .errors import ConfigError, FlrwKgError
from .oracle import StepperConfig
from .params import ModelParams, NonlinearitySpec
from .transform import QuadratureSpec
from .waveprop import DEFAULT_POINTS, Grid, GridField, sobolev_norm

DEFAULTS = {
    "model": {
        "n": 1,
        "M": 2.0,
        "m_sq": None,
        "alpha": 2.0,
        "gamma": 0.0,
        "Gamma": 0.0,
        "s": 1.0,
        "nonlinearity": {"kind": "power_signed", "coeff": 1.0, "poly": [], "alpha": None, "gamma_damp": None},
    },
    "grid": {"dims": None, "points": None, "length": 2 * math.pi},
    "data": {"phi0": [], "phi1": [], "norm": None},
    "source": {"terms": [], "decay": 0.0},
    "time": {"t_grid": None, "start": 0.2, "stop": 3.0, "count": 15},
    "quadrature": {"nodes_b": 48, "nodes_r": 48, "nodes_s": 64, "tol": 1e-6, "max_level": 6},
    "stepper": {"rel_tol": 1e-10, "abs_tol": 1e-13, "max_step": 0.05, "blowup_threshold": 1e8, "min_step": 1e-12},
    "semilinear": {"method": "picard", "max_iter": 50, "tol": 1e-10, "T": 10.0, "panel": 0.5, "nodes": 8,
                   "radius": None},
    "lifespan": {"eps": [1e-2, 1e-3, 1e-4, 1e-5], "C": None, "measure": False, "T_cap": 8.0,
                 "onset_level": None},
    "certify": {"a": [0.0], "M": [2.0], "t": {"start": 0.1, "stop": 10.0, "count": 12}, "nodes": 32},
    "domain": {"panel": None, "n": 3, "alpha": 2.0, "M": [0.0, 0.5], "gamma": [-3.0, -2.0], "Gamma": [4.0, 6.0],
               "count": 2000, "case": None},
    "oracle": {"compare": True, "rtol": 1e-3},
    "seed": 0,
    "threads": 1,
}

TERM_KEYS = {
    "mode": {"type", "amplitude", "k", "phase"},
    "constant": {"type", "value"},
    "gaussian": {"type", "amplitude", "center", "width"},
}


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _is_complex(v):
    return _is_number(v) or (isinstance(v, list) and len(v) == 2 and all(map(_is_number, v)))


# keys whose default is null (or may be set to null): what a non-null value must look like
NULLABLE = {
    "model.M": (_is_complex, "a number or [re, im]"),
    "model.m_sq": (_is_complex, "a number or [re, im]"),
    "model.nonlinearity.alpha": (_is_number, "a number"),
    "model.nonlinearity.gamma_damp": (_is_number, "a number"),
    "grid.dims": (_is_number, "a number"),
    "grid.points": (_is_number, "a number"),
    "data.norm": (_is_number, "a number"),
    "time.t_grid": (lambda v: isinstance(v, list) and all(map(_is_number, v)), "a list of numbers"),
    "semilinear.radius": (_is_number, "a number"),
    "lifespan.C": (_is_number, "a number"),
    "lifespan.onset_level": (_is_number, "a number"),
    "domain.panel": (lambda v: isinstance(v, str), "a string"),
    "domain.case": (lambda v: isinstance(v, str), "a string"),
}


def _merge(defaults, given, where):
    if not isinstance(given, dict):
        raise ConfigError("expected an object", where or "<root>")
    out = copy.deepcopy(defaults)
    for key, val in given.items():
        loc = f"{where}.{key}" if where else key
        if key not in defaults:
            raise ConfigError(f"unknown key {key!r}", loc)
        ref = defaults[key]
        if loc in NULLABLE:
            check, what = NULLABLE[loc]
            if val is not None and not check(val):
                raise ConfigError(f"expected {what} or null", loc)
            out[key] = val
        elif isinstance(ref, dict):
            out[key] = _merge(ref, val, loc)
        elif isinstance(ref, bool):
            if not isinstance(val, bool):
                raise ConfigError("expected true or false", loc)
            out[key] = val
        elif _is_number(ref):
            if not _is_number(val):
                raise ConfigError("expected a number", loc)
            out[key] = val
        elif isinstance(ref, str):
            if not isinstance(val, str):
                raise ConfigError("expected a string", loc)
            out[key] = val
        elif isinstance(ref, list):
            if not isinstance(val, list):
                raise ConfigError("expected a list", loc)
            out[key] = val
    return out


class RunConfig:
    """Validated configuration; ``data`` holds the fully defaulted document."""

    def __init__(self, data):
        self.data = data

    @classmethod
    def from_dict(cls, raw):
        data = _merge(DEFAULTS, raw, "")
        model = raw.get("model", {})
        if model.get("m_sq") is not None:
            if model.get("M") is not None:
                raise ConfigError("give either M or m_sq, not both", "model")
            data["model"]["M"] = None
        cfg = cls(data)
        cfg._check()
        return cfg

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from exc
        return cls.from_dict(raw)

    def dump(self):
        return json.dumps(self.data, indent=2, sort_keys=True) + "\n"

    # ------------------------------------------------------------ checks

    def _check(self):
        for name in ("phi0", "phi1"):
            for i, term in enumerate(self.data["data"][name]):
                self._check_term(term, f"data.{name}[{i}]")
        for i, term in enumerate(self.data["source"]["terms"]):
            self._check_term(term, f"source.terms[{i}]")
        if self.data["semilinear"]["method"] not in ("picard", "mol"):
            raise ConfigError("method must be 'picard' or 'mol'", "semilinear.method")
        self.model()
        self.grid()
        self.quadrature()
        self.stepper()
        self.t_grid()

    @staticmethod
    def _check_term(term, loc):
        if not isinstance(term, dict) or term.get("type") not in TERM_KEYS:
            raise ConfigError(f"term type must be one of {sorted(TERM_KEYS)}", loc)
        extra = set(term) - TERM_KEYS[term["type"]]
        if extra:
            raise ConfigError(f"unknown key {sorted(extra)[0]!r}", f"{loc}.{sorted(extra)[0]}")

    # ------------------------------------------------------------ builders

    def _wrap(self, loc, fn):
        try:
            return fn()
        except ConfigError:
            raise
        except (FlrwKgError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc), loc) from exc

    def model(self):
        m = self.data["model"]

        def build():
            nl = dict(m["nonlinearity"])
            if nl["alpha"] is None:
                nl["alpha"] = m["alpha"]
            if nl["gamma_damp"] is None:
                nl["gamma_damp"] = m["Gamma"]
            nl["poly"] = tuple(nl["poly"])
            spec = NonlinearitySpec(**nl)
            kw = dict(alpha=m["alpha"], gamma=m["gamma"], Gamma_damp=m["Gamma"], s=m["s"], nonlinearity=spec)
            if m["m_sq"] is not None:
                return ModelParams(n=m["n"], m_sq=_complex(m["m_sq"]), **kw)
            if m["M"] is None:
                raise ValueError("one of M or m_sq is required")
            return ModelParams.from_M(m["n"], _complex(m["M"]), **kw)

        return self._wrap("model", build)

    def grid(self):
        g = self.data["grid"]
        dims = g["dims"] or self.data["model"]["n"]
        if dims not in (1, 2, 3):
            raise ConfigError("grid dimension must be 1, 2 or 3", "grid.dims")
        points = g["points"] or DEFAULT_POINTS[dims]
        return self._wrap("grid", lambda: Grid(int(dims), int(points), float(g["length"])))

    def quadrature(self):
        return self._wrap("quadrature", lambda: QuadratureSpec(**self.data["quadrature"]))

    def stepper(self):
        return self._wrap("stepper", lambda: StepperConfig(**self.data["stepper"]))

    def t_grid(self):
        t = self.data["time"]
        if t["t_grid"] is not None:
            vals = np.asarray(t["t_grid"], float)
        else:
            if t["count"] < 1:
                raise ConfigError("count must be positive", "time.count")
            vals = np.linspace(t["start"], t["stop"], int(t["count"]))
        if vals.ndim != 1 or np.any(vals < 0) or np.any(np.diff(vals) < 0):
            raise ConfigError("times must be ascending and non-negative", "time")
        return vals

    def field(self, name):
        grid = self.grid()
        return _build_field(grid, self.data["data"][name])

    def initial_data(self):
        """(phi0, phi1), rescaled so their H_s norms sum to data.norm when it is set."""
        phi0, phi1 = self.field("phi0"), self.field("phi1")
        target = self.data["data"]["norm"]
        if target is not None:
            s = self.data["model"]["s"]
            total = sobolev_norm(phi0, s) + sobolev_norm(phi1, s)
            if total == 0:
                raise ConfigError("cannot normalise zero data", "data.norm")
            phi0, phi1 = phi0 * (target / total), phi1 * (target / total)
        return phi0, phi1

    def source(self):
        terms = self.data["source"]["terms"]
        if not terms:
            return None
        g = _build_field(self.grid(), terms)
        decay = float(self.data["source"]["decay"])
        return lambda b: g * math.exp(-decay * b)


def _complex(v):
    if isinstance(v, list):
        if len(v) != 2:
            raise ValueError("complex values are written as [re, im]")
        c = complex(v[0], v[1])
    else:
        c = complex(v)
    return c.real if c.imag == 0 else c


def _build_field(grid, terms):
    vals = np.zeros(grid.shape)
    X = grid.coords()
    L = grid.length
    for term in terms:
        kind = term["type"]
        if kind == "constant":
            vals = vals + float(term.get("value", 1.0))
        elif kind == "mode":
            k = term.get("k", [1] * grid.dims)
            k = [k] if _is_number(k) else list(k)
            if len(k) != grid.dims:
                raise ConfigError("mode index needs one entry per dimension", "data")
            arg = sum(2 * math.pi * kk * x / L for kk, x in zip(k, X))
            fn = np.sin if term.get("phase", "cos") == "sin" else np.cos
            vals = vals + float(term.get("amplitude", 1.0)) * fn(arg)
        else:
            c = term.get("center", L / 2)
            c = [c] * grid.dims if _is_number(c) else list(c)
            w = float(term.get("width", L / 16))
            r2 = sum((x - cc) ** 2 for x, cc in zip(X, c))
            vals = vals + float(term.get("amplitude", 1.0)) * np.exp(-r2 / (2 * w * w))
    return GridField(grid, vals)
