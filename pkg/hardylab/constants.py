"""
Sharp and remainder constants of the fractional Hardy inequalities.

The angular kernel ``Phi_{N,s,p}`` is the spherical average of
``|e - r y|^{-(N+sp)}``; every constant and every radial double integral in
the package is built on it. ``kernel_regular`` returns the smooth factor
``Phi(r) (1 - r^2)^{1+sp}`` which is what the tables and the graded
quadratures actually consume.
"""
import logging
import math
import warnings
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import integrate, optimize, special

from hardylab import config
from hardylab.cache import cached
from hardylab.exceptions import DomainError
from hardylab.specfun import (
    Params,
    constant_K,
    fractional_laplacian_constant,
    frac_hardy_constant_fourier,
    sphere_area,
)

log = logging.getLogger("hardylab.constants")


def guarded_quad(f, a, b, **kw):
    """``integrate.quad`` that reports convergence trouble instead of hiding it."""
    kw.setdefault("epsabs", 0.0)
    kw.setdefault("epsrel", config.QUAD_TOL)
    kw.setdefault("limit", 200)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, err = integrate.quad(f, a, b, **kw)
    failed = any(
        issubclass(w.category, integrate.IntegrationWarning) for w in caught
    )
    if failed:
        log.warning("quadrature on [%s, %s] did not converge (err %.2e)", a, b, err)
    return value, err, failed


def _phi_by_quadrature(N, sp, r):
    if N == 1:
        return (1.0 - r) ** (-1.0 - sp) + (1.0 + r) ** (-1.0 - sp)
    expo = -(N + sp) / 2.0
    base = 1.0 + r * r

    def integrand(theta):
        return math.sin(theta) ** (N - 2) * (base - 2.0 * r * math.cos(theta)) ** expo

    # the integrand peaks in a layer of width ~ (1 - r) around theta = 0
    points = []
    width = 1.0 - r
    while width < math.pi:
        points.append(width)
        width *= 4.0
    value, _, _ = guarded_quad(
        integrand, 0.0, math.pi, points=points or None, epsrel=1e-12
    )
    return sphere_area(N - 1) * value


def _regular_hyp2f1(N, sp, r):
    r = np.asarray(r, dtype=float)
    if N == 1:
        return (1.0 + r) ** (1.0 + sp) + (1.0 - r) ** (1.0 + sp)
    return sphere_area(N) * special.hyp2f1(
        -sp / 2.0, (N - 2.0 - sp) / 2.0, N / 2.0, r * r
    )


def _hyp2f1_trusted(N, sp):
    def check():
        for r in (0.3, 0.9, 0.999):
            reference = _phi_by_quadrature(N, sp, r) * (1.0 - r * r) ** (1.0 + sp)
            value = float(_regular_hyp2f1(N, sp, r))
            if not abs(value - reference) <= 1e-9 * abs(reference):
                log.warning(
                    "hyp2f1 kernel off by %.2e at N=%s sp=%s r=%s; using quadrature",
                    abs(value - reference) / abs(reference),
                    N,
                    sp,
                    r,
                )
                return 0
        return 1

    return bool(cached(check, "hyp2f1-trust:%s:%r" % (N, sp)))


def kernel_regular(params, r):
    """``Phi(r) (1 - r^2)^{1+sp}`` on ``[0, 1]``, vectorised over ``r``."""
    N, sp = params.N, params.sp
    if N == 1 or _hyp2f1_trusted(N, sp):
        return _regular_hyp2f1(N, sp, r)
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    flat = out.reshape(-1)
    for i, x in enumerate(r.reshape(-1)):
        if x >= 1.0:
            x = 1.0 - 1e-9
        flat[i] = _phi_by_quadrature(N, sp, x) * (1.0 - x * x) ** (1.0 + sp)
    return out


def angular_kernel_phi(params, r, method="quad"):
    """
    ``Phi_{N,s,p}(r)`` for ``0 < r < 1``.

    ``method="quad"`` integrates over the polar angle; ``method="hyp2f1"``
    goes through the hypergeometric closed form.
    """
    if not 0.0 < r < 1.0:
        raise DomainError("angular_kernel_phi needs 0 < r < 1, got %r" % (r,))
    if method == "quad":
        return _phi_by_quadrature(params.N, params.sp, r)
    if method == "hyp2f1":
        return float(kernel_regular(params, r)) / (1.0 - r * r) ** (1.0 + params.sp)
    raise DomainError("unknown kernel method %r" % (method,))


def _power_ratio(rho, r):
    """``|1 - r^rho| r^{-min(rho, 0)} / (1 - r)``, continuous on ``[0, 1]``."""
    if r >= 1.0:
        return abs(rho)
    if r <= 0.0:
        return 1.0
    return -math.expm1(abs(rho) * math.log(r)) / (1.0 - r)


def kernel_moment(params, theta, rho, q):
    """
    ``int_0^1 r^{theta-1} |1 - r^rho|^q Phi(r) dr`` and its error estimate.

    Returns ``(inf, 0.0)`` when the integral diverges at either end.
    """
    sp = params.sp
    if rho == 0.0:
        return 0.0, 0.0
    alpha = theta - 1.0 + q * min(rho, 0.0)
    beta = q - 1.0 - sp
    if alpha <= -1.0 or beta <= -1.0:
        return config.INF, 0.0

    def smooth(r):
        reg = float(kernel_regular(params, r))
        return _power_ratio(rho, r) ** q * reg / (1.0 + r) ** (1.0 + sp)

    value, err, failed = guarded_quad(
        smooth, 0.0, 1.0, weight="alg", wvar=(alpha, beta)
    )
    if failed:
        err = max(err, abs(value) * config.ORACLE_TOL)
    return value, err


def sharp_constant_frac(params):
    """``C_{N,s,p}`` in Gagliardo form, with an error estimate."""
    if not params.s < 1.0:
        raise DomainError("sharp_constant_frac needs 0 < s < 1")

    def compute():
        value, err = kernel_moment(params, params.sp, params.gamma, params.p)
        return 2.0 * value, 2.0 * err

    key = "frac-sharp:%s:%r:%r" % (params.N, params.s, params.p)
    return tuple(cached(compute, key))


class ElResidual(NamedTuple):
    residual: float
    lhs: float
    failed: bool


def el_residual(params):
    """
    Relative gap between the fractional p-Laplacian of ``|x|^{-gamma}`` at
    ``|x| = 1`` and ``C_{N,s,p}``.

    Radii ``1 + h`` and ``1 - h`` are paired so the odd singular parts cancel
    inside a single integrand.
    """
    N, sp, p, gam = params.N, params.sp, params.p, params.gamma
    if not (1.0 < p and params.s < 1.0):
        raise DomainError("el_residual needs p > 1 and s < 1")

    def regular(r):
        return float(kernel_regular(params, r))

    def paired(h):
        # F(1+h) + F(1-h) divided by h^{p-1-sp}
        h = max(h, 1e-6)
        a = -math.expm1(-gam * math.log1p(h)) / h
        b = math.expm1(-gam * math.log1p(-h)) / h
        upper = (
            a ** (p - 1.0)
            * (1.0 + h) ** (1.0 + sp)
            * regular(1.0 / (1.0 + h))
            / (2.0 + h) ** (1.0 + sp)
        )
        lower = (
            b ** (p - 1.0)
            * (1.0 - h) ** (N - 1)
            * regular(1.0 - h)
            / (2.0 - h) ** (1.0 + sp)
        )
        return (upper - lower) / h

    def inner(rho):
        return -((1.0 - rho**gam) ** (p - 1.0)) * regular(rho) / (
            1.0 - rho * rho
        ) ** (1.0 + sp)

    def outer(r):
        return (1.0 - r**gam) ** (p - 1.0) * regular(r) / (1.0 - r * r) ** (1.0 + sp)

    near, _, f1 = guarded_quad(paired, 0.0, 0.5, weight="alg", wvar=(p - 1.0 - sp, 0.0))
    core, _, f2 = guarded_quad(
        inner, 0.0, 0.5, weight="alg", wvar=(N - 1.0 - gam * (p - 1.0), 0.0)
    )
    far, _, f3 = guarded_quad(outer, 0.0, 2.0 / 3.0, weight="alg", wvar=(sp - 1.0, 0.0))
    lhs = 2.0 * (near + core + far)
    target, _ = sharp_constant_frac(params)
    residual = abs(lhs - target) / target
    log.debug("el residual %.3e at %s", residual, params)
    return ElResidual(residual, lhs, bool(f1 or f2 or f3))


def remainder_constant_cp(p):
    """``c_p = min_{0<tau<1/2} (1-tau)^p - tau^p + p tau^{p-1}``."""
    if p < 2:
        raise DomainError("remainder_constant_cp needs p >= 2, got %r" % (p,))
    if p == 2:
        return 1.0

    def f(tau):
        return (1.0 - tau) ** p - tau**p + p * tau ** (p - 1.0)

    def df(tau):
        return p * (
            -((1.0 - tau) ** (p - 1.0))
            - tau ** (p - 1.0)
            + (p - 1.0) * tau ** (p - 2.0)
        )

    taus = np.linspace(0.0, 0.5, 257)
    values = [f(t) for t in taus]
    k = min(max(int(np.argmin(values)), 1), len(taus) - 2)
    found = optimize.minimize_scalar(
        f, bracket=(taus[k - 1], taus[k], taus[k + 1]), method="golden", tol=1e-10
    )
    tau = found.x
    lo, hi = taus[k - 1], taus[k + 1]
    if df(lo) < 0 < df(hi):
        tau = optimize.brentq(df, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return float(min(f(tau), found.fun))


def remainder_constant_cp_star(p):
    if not 1.0 < p < 2.0:
        raise DomainError("remainder_constant_cp_star needs 1 < p < 2, got %r" % (p,))
    return max((p - 1.0) / p, p * (p - 1.0) / 2.0)


def remainder_constant_nonnegative(p):
    """The constant ``p - 1`` that serves nonnegative functions when 1 < p < 2."""
    if not 1.0 < p < 2.0:
        raise DomainError("needs 1 < p < 2, got %r" % (p,))
    return p - 1.0


def sharp_constant_local(N, p):
    if not 1.0 < p < N:
        raise DomainError(
            "sharp_constant_local needs 1 < p < N, got N=%s p=%s" % (N, p)
        )
    return ((N - p) / p) ** p


def kappa_closed_form(N, s):
    """``2 / c_{N,s}``; the Gagliardo energy is this multiple of the Fourier one."""
    return 2.0 / fractional_laplacian_constant(N, s)


def conversion_kappa(N, s, sigma=1.0):
    """
    ``[G]^2 / int |xi|^{2s} |G^|^2`` for a Gaussian of width ``sigma``.

    The numerator runs through the radial Gagliardo quadrature; the
    denominator is the Gaussian moment in closed form.
    """
    from hardylab import deficits, profiles

    params = Params(N, s, 2.0)
    if not s < 1.0:
        raise DomainError("conversion_kappa needs 0 < s < 1")

    def compute():
        grid = profiles.GridSpec.default().shifted(math.log(sigma))
        gauss = profiles.make_gaussian(sigma, grid=grid)
        energy, err = deficits.gagliardo_seminorm(gauss, params)
        fourier = (
            sphere_area(N)
            * math.gamma((N + 2.0 * s) / 2.0)
            / 2.0
            * sigma ** (N - 2.0 * s)
        )
        if err > config.ORACLE_TOL * energy:
            log.warning("kappa quadrature error %.2e for N=%s s=%s", err, N, s)
        return energy / fourier

    return cached(compute, "kappa:%s:%r:%r" % (N, s, sigma))


@dataclass(frozen=True)
class ConstantSet(object):
    params: Params
    frac_sharp: Optional[float]
    fourier_sharp: Optional[float]
    cp: Optional[float]
    cp_star: Optional[float]
    K: Optional[float]
    local_sharp: Optional[float]
    kappa: Optional[float]
    quad_error: float

    def as_dict(self):
        data = asdict(self)
        data["params"] = self.params.as_dict()
        return data


def constant_set(params, with_kappa=True):
    N, s, p = params.N, params.s, params.p
    frac_sharp, quad_error = None, 0.0
    if s < 1.0:
        frac_sharp, quad_error = sharp_constant_frac(params)
    fourier = K = None
    if N > 2 * s:
        fourier = frac_hardy_constant_fourier(params)
        K = constant_K(params)
    kappa = None
    if with_kappa and p == 2 and s < 1.0:
        kappa = conversion_kappa(N, s)
    return ConstantSet(
        params=params,
        frac_sharp=frac_sharp,
        fourier_sharp=fourier,
        cp=remainder_constant_cp(p) if p >= 2 else None,
        cp_star=remainder_constant_cp_star(p) if 1 < p < 2 else None,
        K=K,
        local_sharp=sharp_constant_local(N, p) if 1 < p < N else None,
        kappa=kappa,
        quad_error=quad_error,
    )
