"""
Special functions behind the Hardy constants and the cylinder symbols.

Everything here is pure: equal arguments always produce bit-identical
results, so these helpers are safe to call from any number of workers.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from hardylab.exceptions import DomainError


@dataclass(frozen=True)
class Params(object):
    """The problem triple ``(N, s, p)`` and the exponents derived from it."""

    N: int
    s: float
    p: float
    p_star_s: float = field(init=False, repr=False)
    q_exp: float = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise DomainError("N must be a positive integer, got %r" % (self.N,))
        if not 0 < self.s <= 1:
            raise DomainError("s must lie in (0, 1], got %r" % (self.s,))
        if self.p < 1:
            raise DomainError("p must be at least 1, got %r" % (self.p,))
        if self.s * self.p >= self.N:
            raise DomainError(
                "need s*p < N, got N=%s s=%s p=%s" % (self.N, self.s, self.p)
            )
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "p", float(self.p))
        sp = self.s * self.p
        object.__setattr__(self, "p_star_s", self.N * self.p / (self.N - sp))
        object.__setattr__(self, "q_exp", 2.0 * self.N / (self.N - sp))

    @property
    def sp(self):
        return self.s * self.p

    @property
    def is_local(self):
        return self.s == 1.0

    @property
    def gamma(self):
        """Decay rate of the virtual extremizer, ``(N - sp) / p``."""
        return (self.N - self.sp) / self.p

    @property
    def alpha_exp(self):
        if self.is_local:
            return max(4.0, 2.0 * self.p)
        if self.p >= 2:
            return 2.0 * self.p
        return 4.0

    def with_p(self, p):
        return Params(self.N, self.s, p)

    def with_s(self, s):
        return Params(self.N, s, self.p)

    def as_dict(self):
        return {"N": self.N, "s": self.s, "p": self.p}


def sphere_area(n):
    """Surface measure of the unit sphere in ``R^n``."""
    if n < 1:
        raise DomainError("sphere_area needs n >= 1, got %r" % (n,))
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def cylinder_eigenvalue(N, ell):
    if N < 2 or ell < 0:
        raise DomainError("cylinder_eigenvalue needs N >= 2, ell >= 0")
    return float(ell * (ell + N - 2))


def trigamma(x):
    if np.any(np.asarray(x) <= 0):
        raise DomainError("trigamma is only evaluated for x > 0, got %r" % (x,))
    return special.polygamma(1, x)


def _gamma_args(N, s):
    if N <= 2 * s:
        raise DomainError("need N > 2s, got N=%s s=%s" % (N, s))
    return (N + 2.0 * s) / 4.0, (N - 2.0 * s) / 4.0


def _fourier_constant(N, s):
    a, b = _gamma_args(N, s)
    return 4.0**s * math.exp(2.0 * (special.gammaln(a) - special.gammaln(b)))


def frac_hardy_constant_fourier(params):
    """``C_{N,s} = 4^s Gamma^2((N+2s)/4) / Gamma^2((N-2s)/4)``."""
    return _fourier_constant(params.N, params.s)


def fractional_laplacian_constant(N, s):
    """Normalisation ``c_{N,s}`` of the singular-integral fractional Laplacian."""
    if not 0 < s < 1:
        raise DomainError("fractional_laplacian_constant needs 0 < s < 1")
    _gamma_args(N, s)
    return (
        s
        * 4.0**s
        * math.gamma((N + 2.0 * s) / 2.0)
        / (math.pi ** (N / 2.0) * math.gamma(1.0 - s))
    )


def _check_spectral(params):
    if params.N < 3:
        raise DomainError("spectral operations need N >= 3, got %s" % params.N)


def _log_ratio(N, s, xi, ell):
    # log of |Gamma(a + ell/2 + i xi/2) / Gamma(b + ell/2 + i xi/2)|^2
    # relative to its value at the origin
    a, b = _gamma_args(N, s)
    y = 0.5j * np.abs(xi)
    shift = 0.5 * np.asarray(ell, dtype=float)
    top = special.loggamma(a + shift + y).real - special.loggamma(a + 0j).real
    bottom = special.loggamma(b + shift + y).real - special.loggamma(b + 0j).real
    return 2.0 * (top - bottom)


def symbol_P(params, xi, ell):
    """
    The exact spectral symbol ``P_s(xi, ell)``.

    Computed as ``C_{N,s} * expm1(D)`` with ``D`` the log of the Gamma ratio
    relative to the origin, so ``P(0, 0) == 0`` exactly and evenness in
    ``xi`` holds bit for bit. Broadcasts over array arguments.
    """
    _check_spectral(params)
    if np.any(np.asarray(ell) < 0):
        raise DomainError("ell must be nonnegative")
    value = _fourier_constant(params.N, params.s) * np.expm1(
        _log_ratio(params.N, params.s, xi, ell)
    )
    if np.ndim(value) == 0:
        return float(value)
    return value


def constant_K(params):
    a, b = _gamma_args(params.N, params.s)
    spread = special.polygamma(1, b) - special.polygamma(1, a)
    return 0.5 * math.sqrt(spread) * math.sqrt(frac_hardy_constant_fourier(params))


def multiplier_m(params, xi, ell):
    """
    ``sqrt(P_s / (xi^2 + mu_ell))`` with the removable point ``(0, 0)``
    filled by ``K_{N,s}``.
    """
    _check_spectral(params)
    xi = np.asarray(xi, dtype=float)
    ell = np.asarray(ell)
    mu = ell * (ell + params.N - 2.0)
    denom = xi * xi + mu
    origin = denom == 0
    P = np.asarray(symbol_P(params, xi, ell), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.sqrt(P / np.where(origin, 1.0, denom))
    value = np.where(origin, constant_K(params), value)
    if value.ndim == 0:
        return float(value)
    return value


def symbol_limit(params, xis=(1e-2, 5e-3, 2.5e-3)):
    """Quadratic Richardson extrapolation of ``P_s(xi, 0) / xi^2`` to 0."""
    xis = np.asarray(xis, dtype=float)
    ratios = np.asarray(symbol_P(params, xis, 0)) / xis**2
    return float(np.polyfit(xis**2, ratios, len(xis) - 1)[-1])


def symbol_sup(params, xi_grid, ells=range(0, 9)):
    """Largest sampled multiplier value; a diagnostic, not a certified bound."""
    xi_grid = np.asarray(xi_grid, dtype=float)
    return max(float(np.max(multiplier_m(params, xi_grid, ell))) for ell in ells)
