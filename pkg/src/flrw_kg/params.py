"""Parameter records shared across the solvers and the analysis layer."""

from dataclasses import dataclass, field, replace
import cmath
import math

from .errors import InvalidArgs

NONLINEARITY_KINDS = ("power_abs", "power_signed", "higgs_cubic", "polynomial")


@dataclass(frozen=True)
class CurvedMass:
    """Curved mass M = (n^2/4 - m^2)^(1/2), principal branch (Re M >= 0)."""

    n: int
    m_sq: complex
    M: complex

    @classmethod
    def from_mass_sq(cls, n, m_sq):
        if n < 1:
            raise InvalidArgs("spatial dimension n must be >= 1")
        m_sq = complex(m_sq)
        M = cmath.sqrt(n * n / 4.0 - m_sq)
        if M.real < 0 or (M.real == 0 and M.imag < 0):
            M = -M
        return cls(int(n), m_sq, M)

    @classmethod
    def from_M(cls, n, M):
        M = complex(M)
        if M.real < 0:
            raise InvalidArgs("principal branch requires Re M >= 0")
        return cls(int(n), n * n / 4.0 - M * M, M)

    @property
    def re(self):
        return self.M.real

    @property
    def im(self):
        return self.M.imag

    @property
    def is_real(self):
        return self.M.imag == 0

    @property
    def theorem_applicable(self):
        return self.M.real > 0 and (self.M.real != 0.5 or self.M.imag == 0)

    @property
    def value(self):
        """M as a Python float when real, complex otherwise."""
        return self.M.real if self.is_real else self.M


@dataclass(frozen=True)
class NonlinearitySpec:
    """Self-interaction e^{-Gamma t} F(Phi).

    kinds: ``power_abs`` coeff*|u|^(alpha+1); ``power_signed`` coeff*|u|^alpha u;
    ``higgs_cubic`` -coeff*u^3 (coeff is lambda, alpha fixed to 2);
    ``polynomial`` sum_k poly[k] u^(k+2), alpha = degree - 1.
    """

    kind: str = "power_signed"
    alpha: float = 2.0
    coeff: float = 1.0
    gamma_damp: float = 0.0
    poly: tuple = ()

    def __post_init__(self):
        if self.kind not in NONLINEARITY_KINDS:
            raise InvalidArgs(f"unknown nonlinearity kind {self.kind!r}")
        if self.kind == "higgs_cubic" and self.alpha != 2.0:
            object.__setattr__(self, "alpha", 2.0)
        if self.kind == "polynomial":
            if not self.poly:
                raise InvalidArgs("polynomial nonlinearity needs coefficients")
            object.__setattr__(self, "poly", tuple(float(c) for c in self.poly))
            object.__setattr__(self, "alpha", float(len(self.poly)))
        if not self.alpha > 0:
            raise InvalidArgs("alpha must be positive")


@dataclass(frozen=True)
class ModelParams:
    """Physical and analytic parameters of one run.

    ``gamma`` is the weight exponent of the solution space and ``Gamma_damp``
    the exponent of the damping factor in front of the nonlinearity.
    """

    n: int = 1
    m_sq: complex = -3.75
    alpha: float = 2.0
    gamma: float = 0.0
    Gamma_damp: float = 0.0
    s: float = 1.0
    nonlinearity: NonlinearitySpec = field(default_factory=NonlinearitySpec)

    @classmethod
    def from_M(cls, n, M, **kw):
        M = complex(M)
        m_sq = n * n / 4.0 - M * M
        if m_sq.imag == 0:
            m_sq = m_sq.real
        return cls(n=n, m_sq=m_sq, **kw)

    @property
    def mass(self):
        return CurvedMass.from_mass_sq(self.n, self.m_sq)

    @property
    def sobolev_ok(self):
        return self.s > self.n / 2.0

    def with_(self, **kw):
        return replace(self, **kw)

    def exponents(self, use_max=True):
        """(P, Q, R): the three combinations entering the case analysis.

        P = n/2 + Mc + gamma(alpha+1) + Gamma,  Q = n/2 + Mc + gamma,
        R = gamma*alpha + Gamma, where Mc = max(1/2, Re M) or Re M.
        """
        re = self.mass.re
        mc = max(0.5, re) if use_max else re
        P = self.n / 2.0 + mc + self.gamma * (self.alpha + 1) + self.Gamma_damp
        Q = self.n / 2.0 + mc + self.gamma
        R = self.gamma * self.alpha + self.Gamma_damp
        return P, Q, R


def is_close_zero(x, tol=1e-12):
    return math.isfinite(x) and abs(x) <= tol
