"""
Physical-space energies, deficits and remainder functionals.

Every fractional double integral goes through :func:`pair_energy`, which
evaluates

    2 |S^{N-1}| int dt e^{lam t} int_0^inf dh K(h) |g(t) - g(t - h)|^q

on the profile grid. The inner integral is split into three bands of ``h``:
a near band ``[0, H0]`` handled by Gauss-Jacobi with the diagonal
singularity in the weight, a far band on grid offsets with Gregory end
corrections, and a tail band where ``t - h`` has left the grid and the
profile follows its inner power law.
"""
import logging
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np

from hardylab import config
from hardylab.constants import (
    guarded_quad,
    kernel_moment,
    kernel_regular,
    remainder_constant_cp,
    remainder_constant_cp_star,
    sharp_constant_frac,
    sharp_constant_local,
)
from hardylab.exceptions import DomainError
from hardylab.norms import hardy_potential
from hardylab.profiles import ZERO_TAIL, RadialProfile, Tail
from hardylab.quadrature import (
    gauss_legendre_cells,
    gregory_weights,
    jacobi_rule,
    kernel,
    kernel_scaled,
    laguerre_rule,
    tail_table,
)
from hardylab.specfun import Params, sphere_area

log = logging.getLogger("hardylab.deficits")

UNWEIGHTED = "unweighted"
SYMMETRIC_POWER = "symmetric_power"
MINMAX = "minmax"
WEIGHT_MODES = (UNWEIGHTED, SYMMETRIC_POWER, MINMAX)


@dataclass(frozen=True)
class WeightedKernelSpec(object):
    """
    Kernel ``max(r, rho)^{-(N+sp)} Phi(min/max)`` together with one of the
    pair weights used by the remainder functionals.
    """

    params: Params
    weight_mode: str = UNWEIGHTED

    def __post_init__(self):
        if self.weight_mode not in WEIGHT_MODES:
            raise DomainError("unknown weight mode %r" % (self.weight_mode,))
        if not self.params.s < 1.0:
            raise DomainError("fractional kernels need 0 < s < 1")

    @property
    def exponents(self):
        """``(lam, theta, q)`` of the log-variable form."""
        N, sp, p, gam = self.params.N, self.params.sp, self.params.p, self.params.gamma
        if self.weight_mode == UNWEIGHTED:
            return N - sp, float(N), p
        if self.weight_mode == SYMMETRIC_POWER:
            return 0.0, (N + sp) / 2.0, p
        return 0.0, sp + gam, 2.0

    def kernel(self, r, rho):
        big, small = np.maximum(r, rho), np.minimum(r, rho)
        ratio = small / big
        return (
            big ** -(self.params.N + self.params.sp)
            * kernel_regular(self.params, ratio)
            / (1.0 - ratio * ratio) ** (1.0 + self.params.sp)
        )

    def weight(self, r, rho):
        gam, p = self.params.gamma, self.params.p
        if self.weight_mode == UNWEIGHTED:
            return np.ones_like(np.asarray(r * rho, dtype=float))
        if self.weight_mode == SYMMETRIC_POWER:
            return (r * rho) ** (-(self.params.N - self.params.sp) / 2.0)
        w_r, w_rho = r**-gam, rho**-gam
        return np.minimum(w_r, w_rho) * np.maximum(w_r, w_rho) ** (p - 1.0)

    def integrand_profile(self, profile):
        """The function whose differences the mode integrates."""
        if self.weight_mode == UNWEIGHTED:
            return profile
        v = ground_state_ratio(profile, self.params)
        if self.weight_mode == SYMMETRIC_POWER:
            return v
        return v.sign_power(self.params.p / 2.0)


class PairEnergy(NamedTuple):
    value: float
    error: float
    paired_deficit: Optional[float] = None


_INF_ENERGY = PairEnergy(config.INF, 0.0, config.INF)


def ground_state_ratio(profile, params):
    """``v = u r^{(N-sp)/p}``."""
    gam = params.gamma
    w = np.exp(gam * profile.grid.t)

    def shift(tl):
        return tl if tl.is_zero else Tail(tl.coeff, tl.exponent + gam)

    return RadialProfile(
        profile.grid,
        profile.nodes * w,
        (profile.slopes + gam * profile.nodes) * w,
        shift(profile.inner_tail),
        shift(profile.outer_tail),
        "v[%s]" % profile.label,
        profile.support,
    )


def _far_band(vals, kf, m, q, dt):
    """
    Far-band sums per node and their trapezoid counterparts.

    Node ``i`` integrates offsets ``k = m..i`` with Gregory end corrections.
    """
    n = len(vals)
    total = np.zeros(n)

    def f(i, k):
        return kf[k] * np.abs(vals[i] - vals[i - k]) ** q

    for k in range(m, n):
        total[k:] += kf[k] * np.abs(vals[k:] - vals[: n - k]) ** q
    total *= dt
    trap = total.copy()
    i = np.arange(n)
    count = i - m + 1
    total[count == 1] = 0.0
    trap[count == 1] = 0.0
    short = np.nonzero((count >= 2) & (count < 8))[0]
    for j in short:
        total[j] -= 0.5 * dt * (f(j, m) + f(j, j))
    many = np.nonzero(count >= 2)[0]
    trap[many] -= 0.5 * dt * (f(many, m) + f(many, many))
    longer = np.nonzero(count >= 8)[0]
    for j, g in enumerate(GREG_DELTA):
        total[longer] += g * dt * (f(longer, m + j) + f(longer, longer - j))
    return total, trap


GREG_DELTA = np.array([17.0, 59.0, 43.0, 49.0]) / 48.0 - 1.0


def _far_comparator(a, m, dt):
    """The far-band rule of :func:`_far_band` applied to ``g_i = 1`` offsets ``a_k``."""
    n = len(a)
    csum = np.concatenate([[0.0], np.cumsum(a[m:])])
    out = np.zeros(n)
    i = np.arange(m, n)
    out[m:] = dt * csum[i - m + 1]
    count = np.arange(n) - m + 1
    out[count == 1] = 0.0
    for j in np.nonzero((count >= 2) & (count < 8))[0]:
        out[j] -= 0.5 * dt * (a[m] + a[j])
    longer = np.nonzero(count >= 8)[0]
    for j, g in enumerate(GREG_DELTA):
        out[longer] += g * dt * (a[m + j] + a[longer - j])
    return out


def _tail_band(g, vals, params, theta, q, m):
    """``int_{h0}^inf K(h) |g_i - g(t_i - h)|^q dh`` with ``h0 = max(m, i) dt``."""
    grid = g.grid
    n, dt, t = grid.n, grid.dt, grid.t
    k0 = np.maximum(np.arange(n), m)
    inner = ZERO_TAIL if g.is_sharp else g.inner_tail
    if inner.is_zero or inner.exponent == 0.0:
        table = tail_table(params, theta, dt, m, n - 1)
        return np.abs(vals - inner.coeff) ** q * table[k0 - m]
    c0, rho0 = inner
    rate = theta + q * min(rho0, 0.0)
    if rate <= 0:
        return np.full(n, config.INF)
    h0 = k0 * dt
    amp = c0 * np.exp(rho0 * (t - h0))
    span = 2.0
    x_cells, w_cells = gauss_legendre_cells(np.linspace(0.0, span, 17))
    x_lag, w_lag = laguerre_rule(rate)
    x = np.concatenate([x_cells.ravel(), span + x_lag])
    w = np.concatenate([w_cells.ravel(), w_lag])
    h = h0[:, None] + x[None, :]
    f = kernel(params, theta, h) * np.abs(
        vals[:, None] - amp[:, None] * np.exp(-rho0 * x[None, :])
    ) ** q
    return f @ w


def _below_grid(g, params, lam, theta, q):
    """Both points of the pair below the grid, on the inner power law."""
    inner = g.inner_tail
    if g.is_sharp or inner.is_zero or inner.exponent == 0.0:
        return 0.0
    c0, rho0 = inner
    rate = lam + q * rho0
    if rate <= 0:
        return config.INF
    moment, _ = kernel_moment(params, theta, rho0, q)
    return abs(c0) ** q * math.exp(rate * g.grid.t_min) / rate * moment


def _above_grid(g, vals, params, lam, theta, q):
    """Pairs with the larger radius beyond the grid; the outer tail is constant."""
    grid = g.grid
    n, dt, t = grid.n, grid.dt, grid.t
    c_out = 0.0 if g.is_sharp else g.outer_tail.coeff
    rate = theta - lam
    if rate <= 0:
        return config.INF
    table = tail_table(params, rate, dt, 1, n - 1)
    gap = np.abs(vals - c_out) ** q * np.exp(lam * t)
    psi = np.zeros(n)
    psi[:-1] = table[::-1]
    if gap[-1] > 0:
        if params.sp >= 1.0:
            return config.INF
        log.warning("%s does not settle to its outer tail at the grid edge", g.label)
        psi[-1] = table[0] * 2.0**params.sp
    total = np.dot(gregory_weights(n, dt), gap * psi)
    # pairs reaching below the grid: Phi is flat there, K ~ |S| e^{-theta h}
    S = sphere_area(params.N)
    inner = ZERO_TAIL if g.is_sharp else g.inner_tail
    if inner.is_zero and c_out == 0.0:
        return total
    c0, rho0 = inner if not inner.is_zero else (0.0, 0.0)
    if c_out == 0.0:
        expo = lam + q * rho0 + rate
        if expo <= 0:
            return config.INF
        total += (
            S * abs(c0) ** q * math.exp(expo * grid.t_min - rate * grid.t_max)
            / (expo * rate)
        )
        return total
    if rho0 == 0.0 and c0 == c_out:
        return total

    def integrand(tau):
        return (
            abs(c0 * math.exp(rho0 * tau) - c_out) ** q
            * math.exp(lam * tau - rate * (grid.t_max - tau))
        )

    value, _, _ = guarded_quad(integrand, -np.inf, grid.t_min)
    return total + S / rate * value


def _outer_ok(g, lam, q):
    outer = g.outer_tail
    if g.is_sharp or outer.is_zero or outer.exponent == 0.0:
        return True
    if lam + q * outer.exponent >= 0:
        return False
    raise DomainError(
        "decaying nonzero outer tails are not supported by the pair quadrature "
        "(%s)" % g.label
    )


def pair_energy(profile, spec, paired=False):
    """
    The double integral of ``spec`` on ``profile`` with an error estimate.

    With ``paired=True`` (unweighted mode only) the deficit against the sharp
    constant is also returned, computed node by node against the extremizer
    through each sample so that the two terms share one discretisation.
    """
    params = spec.params
    lam, theta, q = spec.exponents
    g = spec.integrand_profile(profile)
    if g.is_sharp and params.sp >= 1.0:
        return _INF_ENERGY
    if not _outer_ok(g, lam, q):
        return _INF_ENERGY
    below = _below_grid(g, params, lam, theta, q)
    if math.isinf(below):
        return _INF_ENERGY
    grid = g.grid
    n, dt, t = grid.n, grid.dt, grid.t
    vals = g.values
    m = min(config.NEAR_CELLS, n - 1)
    beta = q - 1.0 - params.sp
    h_near = m * dt

    def near(nodes):
        h, w = jacobi_rule(beta, h_near, nodes)
        diff = np.abs(vals[:, None] - g.at(t[:, None] - h[None, :])) / h[None, :]
        return (diff**q * kernel_scaled(params, theta, h)[None, :]) @ w

    near_full = near(config.JACOBI_NODES)
    near_half = near(max(config.JACOBI_NODES // 2, 4))
    kf = np.zeros(n)
    kf[m:] = kernel(params, theta, dt * np.arange(m, n))
    far, far_trap = _far_band(vals, kf, m, q, dt)
    tail = _tail_band(g, vals, params, theta, q, m)
    if np.any(np.isinf(tail)):
        return _INF_ENERGY
    above = _above_grid(g, vals, params, lam, theta, q)
    if math.isinf(above):
        return _INF_ENERGY
    S = sphere_area(params.N)
    weights = gregory_weights(n, dt) * np.exp(lam * t)
    inner = near_full + far + tail
    value = 2.0 * S * (np.dot(weights, inner) + below + above)
    error = 2.0 * S * np.dot(
        weights, np.abs(near_full - near_half) + np.abs(far - far_trap)
    )
    log.debug("pair energy %s [%s]: %.10g +- %.2e", spec.weight_mode, g.label, value,
              error)
    if not paired:
        return PairEnergy(value, error)
    if spec.weight_mode != UNWEIGHTED:
        raise DomainError("the paired deficit needs the unweighted kernel")
    p, gam = params.p, params.gamma
    h, w = jacobi_rule(beta, h_near, config.JACOBI_NODES)
    near_c = np.dot(
        (np.expm1(gam * h) / h) ** p * kernel_scaled(params, theta, h), w
    )
    offsets = dt * np.arange(n)
    a = kf * np.abs(np.expm1(gam * offsets)) ** p
    far_c = _far_comparator(a, m, dt)
    xi = tail_table(params, params.sp, dt, m, n - 1, rho=gam, q=p)
    tail_c = xi[np.maximum(np.arange(n), m) - m]
    comparator = np.abs(vals) ** p * (near_c + far_c + tail_c)
    C, _ = sharp_constant_frac(params)
    outside = _hardy_outside(g, params)
    deficit = (
        2.0 * S * (np.dot(weights, inner - comparator) + below + above)
        - C * outside
    )
    return PairEnergy(value, error, deficit)


def _hardy_outside(g, params):
    """Hardy potential carried by the tails beyond the grid."""
    if g.is_sharp:
        return 0.0
    S, p, N, sp = sphere_area(params.N), params.p, params.N, params.sp
    total = 0.0
    inner, outer = g.inner_tail, g.outer_tail
    if not inner.is_zero:
        rate = p * inner.exponent + N - sp
        if rate <= 0:
            return config.INF
        total += abs(inner.coeff) ** p * math.exp(rate * g.grid.t_min) / rate
    if not outer.is_zero:
        rate = p * outer.exponent + N - sp
        if rate >= 0:
            return config.INF
        total += abs(outer.coeff) ** p * math.exp(rate * g.grid.t_max) / -rate
    return S * total


def gagliardo_seminorm(profile, params):
    """``[u]^p`` and its error estimate; ``+inf`` when the energy diverges."""
    result = pair_energy(profile, WeightedKernelSpec(params, UNWEIGHTED))
    return result.value, result.error


def weighted_remainder_eps(profile, params):
    if params.p < 2:
        raise DomainError("weighted_remainder_eps needs p >= 2")
    return pair_energy(profile, WeightedKernelSpec(params, SYMMETRIC_POWER)).value


def weighted_remainder_eps_w(profile, params):
    if not 1.0 < params.p < 2.0:
        raise DomainError("weighted_remainder_eps_w needs 1 < p < 2")
    return pair_energy(profile, WeightedKernelSpec(params, MINMAX)).value


def subadditivity_gap(profile, params, weight_mode=UNWEIGHTED):
    """``E(u) - E(u_+) - E(u_-)``; nonnegative for every weight mode."""
    spec = WeightedKernelSpec(params, weight_mode)
    whole = pair_energy(profile, spec)
    plus = pair_energy(profile.positive_part(), spec)
    minus = pair_energy(profile.negative_part(), spec)
    error = whole.error + plus.error + minus.error
    return whole.value - plus.value - minus.value, error


@dataclass(frozen=True)
class DeficitReport(object):
    energy: float
    hardy: float
    sharp_constant: float
    deficit: float
    remainder: Optional[float]
    quad_error: float

    def as_dict(self):
        return asdict(self)


def fractional_deficit(profile, params, with_remainder=True):
    if not params.s < 1.0:
        raise DomainError("fractional_deficit needs s < 1; use local_deficit")
    C, C_err = sharp_constant_frac(params)
    hardy = hardy_potential(profile, params)
    result = pair_energy(profile, WeightedKernelSpec(params), paired=True)
    remainder = None
    if with_remainder and params.p >= 2:
        remainder = weighted_remainder_eps(profile, params)
    elif with_remainder and params.p > 1:
        remainder = weighted_remainder_eps_w(profile, params)
    if math.isinf(result.value) or math.isinf(hardy):
        return DeficitReport(result.value, hardy, C, config.INF, remainder,
                             config.INF)
    unpaired = result.value - C * hardy
    quad_error = (
        result.error + C_err * hardy + abs(result.paired_deficit - unpaired)
    )
    return DeficitReport(result.value, hardy, C, result.paired_deficit, remainder,
                         quad_error)


def _cell_integral(profile, f, order):
    grid = profile.grid
    nodes, weights = gauss_legendre_cells(grid.t, order)
    return np.sum(f(nodes) * weights)


def _local_check(profile, N, p):
    if not 1.0 < p < N:
        raise DomainError("local energies need 1 < p < N")
    if profile.is_sharp:
        raise DomainError("local energies need a ramped (C^1) profile")


def _power_tail_integral(coeff, exponent, edge, upper):
    """``int |coeff|^.. e^{exponent t}`` beyond ``edge``; ``inf`` if divergent."""
    if coeff == 0.0:
        return 0.0
    if (upper and exponent >= 0) or (not upper and exponent <= 0):
        return config.INF
    return coeff * math.exp(exponent * edge) / abs(exponent)


def _local_energy(profile, N, p, shift):
    """
    ``|S| int |d/dt (e^{shift t} g)|^p e^{(N - p - p shift) t} dt`` with tails.
    """
    weight = N - p - p * shift

    def f(t):
        return (
            np.abs(profile.dt_at(t) + shift * profile.at(t)) ** p
            * np.exp(p * shift * t + weight * t)
        )

    body = _cell_integral(profile, f, 4)
    coarse = _cell_integral(profile, f, 3)
    tails = 0.0
    for tl, edge, upper in (
        (profile.inner_tail, profile.grid.t_min, False),
        (profile.outer_tail, profile.grid.t_max, True),
    ):
        if tl.is_zero:
            continue
        coeff = abs(tl.coeff * (tl.exponent + shift)) ** p
        tails += _power_tail_integral(coeff, p * tl.exponent + N - p, edge, upper)
    S = sphere_area(N)
    return S * (body + tails), S * abs(body - coarse)


def local_dirichlet_energy(profile, N, p):
    _local_check(profile, N, p)
    return _local_energy(profile, N, p, 0.0)[0]


def local_remainder(profile, N, p):
    """``int |grad v|^p |x|^{-(N-p)} dx`` with ``v = u |x|^{(N-p)/p}``."""
    _local_check(profile, N, p)
    return _local_energy(profile, N, p, (N - p) / p)[0]


def local_hardy_potential(profile, N, p):
    return hardy_potential(profile, Params(N, 1.0, p))


def local_deficit(profile, N, p, with_remainder=True):
    _local_check(profile, N, p)
    energy, err = _local_energy(profile, N, p, 0.0)
    hardy = local_hardy_potential(profile, N, p)
    sharp = sharp_constant_local(N, p)
    remainder = local_remainder(profile, N, p) if with_remainder else None
    if math.isinf(energy) or math.isinf(hardy):
        return DeficitReport(energy, hardy, sharp, config.INF, remainder, config.INF)
    return DeficitReport(energy, hardy, sharp, energy - sharp * hardy, remainder, err)


def remainder_floor(params):
    """The constant multiplying the remainder in the matching inequality."""
    if params.p >= 2:
        return remainder_constant_cp(params.p)
    return remainder_constant_cp_star(params.p)
