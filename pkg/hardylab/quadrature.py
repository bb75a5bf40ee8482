"""
Quadrature rules shared by the double integrals.

All radial double integrals are written in log variables as

    int dt e^{lambda t} int_0^inf dh K(h) |g(t) - g(t - h)|^q

with ``K(h) = Phi(e^{-h}) e^{-theta h}``. The helpers here tabulate ``K``,
its tail integrals, and the composite rules used on each band of ``h``.
"""
import logging
import math

import numpy as np
from scipy import special

from hardylab import config
from hardylab.cache import cached
from hardylab.constants import guarded_quad, kernel_regular

log = logging.getLogger("hardylab.quadrature")

GREGORY = np.array([17.0, 59.0, 43.0, 49.0]) / 48.0


def gregory_weights(n, dt):
    """Composite weights exact for cubics; trapezoid for short runs."""
    if n < 1:
        return np.zeros(0)
    if n == 1:
        return np.zeros(1)
    w = np.full(n, dt)
    if n < 8:
        w[0] = w[-1] = 0.5 * dt
        return w
    w[:4] = GREGORY * dt
    w[-4:] = GREGORY[::-1] * dt
    return w


def gauss_legendre_cells(edges, order=8):
    """Nodes and weights of a composite Gauss-Legendre rule over ``edges``."""
    x, w = special.roots_legendre(order)
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = lo + half * (x[None, :] + 1.0)
    weights = half * w[None, :]
    return nodes, weights


def jacobi_rule(beta, length, n):
    """
    Nodes on ``[0, length]`` and weights such that ``sum w f(h)``
    approximates ``int_0^length h^beta f(h) dh``.
    """
    x, w = special.roots_jacobi(n, 0.0, beta)
    half = 0.5 * length
    return half * (x + 1.0), w * half ** (beta + 1.0)


def laguerre_rule(rate, n=None):
    """Rule for ``int_0^inf f(x) dx`` with ``f`` decaying like ``e^{-rate x}``."""
    n = n or config.LAGUERRE_NODES
    x, w = special.roots_laguerre(n)
    return x / rate, w * np.exp(x) / rate


def kernel(params, theta, h):
    """``K(h) = Phi(e^{-h}) e^{-theta h}`` for ``h > 0``."""
    h = np.asarray(h, dtype=float)
    r = np.exp(-h)
    return (
        kernel_regular(params, r)
        / (-np.expm1(-2.0 * h)) ** (1.0 + params.sp)
        * np.exp(-theta * h)
    )


def kernel_scaled(params, theta, h):
    """``K(h) h^{1+sp}``, smooth down to ``h = 0``."""
    h = np.asarray(h, dtype=float)
    safe = np.where(h > 0, h, 1.0)
    ratio = np.where(h > 0, safe / -np.expm1(-2.0 * safe), 0.5)
    return kernel_regular(params, np.exp(-h)) * ratio ** (1.0 + params.sp) * np.exp(
        -theta * h
    )


def _factor(rho, q, h):
    if rho is None:
        return 1.0
    return np.abs(-np.expm1(-rho * h)) ** q


def head_moment(params, theta, rho, q, r_max):
    """``int_0^r_max r^{theta-1} |1 - r^rho|^q Phi(r) dr`` for small ``r_max``."""
    alpha = theta - 1.0
    if rho is not None:
        alpha += q * min(rho, 0.0)
    if alpha <= -1.0:
        return config.INF
    sp = params.sp

    def smooth(r):
        f = float(kernel_regular(params, r)) / (1.0 - r * r) ** (1.0 + sp)
        if rho is not None and r > 0:
            f *= (-math.expm1(abs(rho) * math.log(r))) ** q
        return f

    value, _, _ = guarded_quad(smooth, 0.0, r_max, weight="alg", wvar=(alpha, 0.0))
    return value


def tail_table(params, theta, dt, k_lo, k_hi, rho=None, q=1.0):
    """
    ``T_k = int_{k dt}^inf K(h) |1 - e^{-rho h}|^q dh`` for ``k_lo <= k <= k_hi``.

    With ``rho=None`` the factor is dropped. Cells are summed from the far
    end so the table is monotone.
    """

    def compute():
        edges = dt * np.arange(k_lo, k_hi + 1)
        if len(edges) > 1:
            nodes, weights = gauss_legendre_cells(edges)
            f = kernel(params, theta, nodes) * _factor(rho, q, nodes)
            cells = np.sum(f * weights, axis=1)
        else:
            cells = np.zeros(0)
        remote = head_moment(params, theta, rho, q, math.exp(-edges[-1]))
        table = np.empty(len(edges))
        table[-1] = remote
        table[:-1] = remote + np.cumsum(cells[::-1])[::-1]
        return table

    key = "tail:%s:%r:%r:%r:%r:%s:%s:%r:%r" % (
        params.N, params.sp, params.p, theta, dt, k_lo, k_hi, rho, q,
    )
    return cached(compute, key)
