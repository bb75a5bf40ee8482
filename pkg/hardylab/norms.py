"""
Distribution functions, Lorentz quasi-norms, Hardy potentials and the
scale-invariant distances to the extremal ray.

Level sets are computed on a refined copy of the profile grid. The refined
samples interpolate ``ln|u|`` and inside each sub-cell ``|u|`` is log-linear
in ``t = ln r``, so pure powers (the extremizers and their tails) have
exact level sets; the parts of space below and above the grid are handled
through the power-law tails. ``mu`` is smooth between consecutive sampled
magnitudes, and both Lorentz routes integrate cell by cell between them.
"""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import optimize

from hardylab import config
from hardylab.exceptions import DomainError
from hardylab.profiles import ZERO_TAIL, Tail, _add_tails
from hardylab.quadrature import gauss_legendre_cells, jacobi_rule
from hardylab.specfun import sphere_area
from hardylab.workers import parallel_map

log = logging.getLogger("hardylab.norms")

REFINE = 4
LEVEL_SPAN = 40.0
SCAN_LEVELS = 241
CHUNK = 64
CELL_ORDER = 3
JACOBI_ORDER = 8
# offset, relative to the cell width, for one-sided values at a breakpoint
SIDE_STEP = 1e-9
NEWTON_STEPS = 2


def _critical(x):
    return abs(x) < 1e-12


def _strong_finite(inner, outer, N, P):
    """Whether the power tails keep the strong Lorentz norms finite."""
    c0, r0 = inner
    if c0 != 0.0 and r0 < 0 and 1.0 + N / (P * r0) > -1e-12:
        return False
    c1, r1 = outer
    if c1 != 0.0 and (r1 >= 0 or 1.0 + N / (P * r1) <= 0):
        return False
    return True


def _above_levels(inner, N, P, q, top):
    """
    ``int_top^inf lambda^{q-1} mu^{q/P}``; only the inner tail exceeds ``top``.
    """
    c0, r0 = inner
    if c0 == 0.0 or r0 >= 0:
        return 0.0
    e = q * (1.0 + N / (P * r0))
    coeff = (sphere_area(N) / N) ** (q / P) * abs(c0) ** (-N * q / (P * r0))
    return coeff * top**e / -e


def _below_rate(outer, N, P):
    # power of lambda^q mu^{q/P} (over q) as lambda -> 0
    c1, r1 = outer
    return 1.0 if c1 == 0.0 else 1.0 + N / (P * r1)


class LevelSets(object):
    """
    ``|f|`` on the log-radius points ``t`` together with the power tails
    beyond ``t[0]`` and ``t[-1]``.

    Between sample points ``|f|`` is log-linear in ``t`` (linear where a
    sample vanishes), so ``mu`` is smooth between consecutive sample values
    and its breakpoints are exactly the sampled magnitudes.
    """

    def __init__(self, t, values, inner=ZERO_TAIL, outer=ZERO_TAIL, N=3):
        self.t = np.asarray(t, dtype=float)
        self.mag = np.abs(np.asarray(values, dtype=float))
        self.inner = inner
        self.outer = outer
        self.N = N
        self.ball = sphere_area(N) / N
        a, b = self.mag[:-1], self.mag[1:]
        self._a, self._b = a, b
        positive = (a > 0) & (b > 0)
        self._loglinear = positive & (a != b)
        with np.errstate(divide="ignore"):
            self._la = np.where(positive, np.log(np.where(positive, a, 1.0)), 0.0)
            self._lb = np.where(positive, np.log(np.where(positive, b, 1.0)), 0.0)
        self._lo, self._hi = np.minimum(a, b), np.maximum(a, b)
        self._e = np.exp(N * self.t)
        volume = self._e[1:] - self._e[:-1]
        order = np.argsort(self._lo, kind="stable")
        self._sorted_lo = self._lo[order]
        # volume of the segments lying entirely above a level, by rank
        self._suffix = np.append(np.cumsum(volume[order][::-1])[::-1], 0.0)

    @property
    def peak(self):
        return float(self.mag.max())

    def _straddled(self, lams, seg):
        """Measure (over the ball) and its slope from segments crossing ``lams``."""
        lams = lams[:, None]
        t1, t2 = self.t[seg], self.t[seg + 1]
        a, b = self._a[seg], self._b[seg]
        crossing = (self._lo[seg] <= lams) & (self._hi[seg] > lams)
        above_a, above_b = a > lams, b > lams
        span = self._lb[seg] - self._la[seg]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            x_log = (np.log(lams) - self._la[seg]) / span
            x_lin = (lams - a) / (b - a)
            dx = np.where(self._loglinear[seg], 1.0 / (lams * span), 1.0 / (b - a))
        x = np.where(self._loglinear[seg], x_log, x_lin)
        x = np.clip(np.nan_to_num(x, nan=0.5), 0.0, 1.0)
        e_cross = np.exp(self.N * (t1 + x * (t2 - t1)))
        hi = np.where(above_b, self._e[seg + 1], e_cross)
        lo = np.where(above_a, self._e[seg], e_cross)
        part = np.where(crossing, hi - lo, 0.0)
        # exactly one end of a crossing segment lies above the level
        side = np.where(above_b, 0.0, 1.0) - np.where(above_a, 0.0, 1.0)
        dpart = self.N * e_cross * np.nan_to_num(dx) * (t2 - t1) * side
        dpart = np.where(crossing, dpart, 0.0)
        return part.sum(axis=1), dpart.sum(axis=1)

    def _grid_measure(self, lams):
        """Sampled-range part of ``mu`` and ``dmu/dlambda``."""
        full = self._suffix[np.searchsorted(self._sorted_lo, lams, side="right")]
        part = np.zeros_like(lams)
        slope = np.zeros_like(lams)
        order = np.argsort(lams)
        for start in range(0, len(lams), CHUNK):
            idx = order[start:start + CHUNK]
            lam = lams[idx]
            seg = np.nonzero((self._lo <= lam[-1]) & (self._hi > lam[0]))[0]
            if len(seg):
                part[idx], slope[idx] = self._straddled(lam, seg)
        return self.ball * (full + part), self.ball * slope

    def _tail_measure(self, lams):
        N, ball = self.N, self.ball
        out = np.zeros_like(lams)
        slope = np.zeros_like(lams)
        c0, r0 = self.inner
        t0 = self.t[0]
        if c0 != 0.0:
            c0 = abs(c0)
            if r0 == 0.0:
                out += np.where(c0 > lams, ball * self._e[0], 0.0)
            else:
                tc = np.log(lams / c0) / r0
                inside = tc < t0
                cap = ball * np.exp(N * np.minimum(tc, t0))
                if r0 < 0:
                    out += cap
                    slope += np.where(inside, N * cap / (r0 * lams), 0.0)
                else:
                    out += np.where(inside, ball * self._e[0] - cap, 0.0)
                    slope -= np.where(inside, N * cap / (r0 * lams), 0.0)
        c1, r1 = self.outer
        t1 = self.t[-1]
        if c1 != 0.0:
            c1 = abs(c1)
            if r1 > 0:
                out[:] = config.INF
            elif r1 == 0.0:
                out = np.where(c1 > lams, config.INF, out)
            else:
                tc = np.log(lams / c1) / r1
                inside = tc > t1
                with np.errstate(over="ignore"):
                    shell = ball * np.exp(N * np.maximum(tc, t1))
                out += np.where(inside, shell - ball * self._e[-1], 0.0)
                slope += np.where(inside, N * shell / (r1 * lams), 0.0)
        return out, slope

    def measure_and_slope(self, lams):
        """``mu(lambda)`` and ``dmu/dlambda`` for an array of positive levels."""
        lams = np.atleast_1d(np.asarray(lams, dtype=float))
        grid_mu, grid_slope = self._grid_measure(lams)
        tail_mu, tail_slope = self._tail_measure(lams)
        return grid_mu + tail_mu, grid_slope + tail_slope

    def measure(self, lams):
        """``mu(lambda)`` for an array of positive levels."""
        return self.measure_and_slope(lams)[0]

    def _power_limit(self, tail, P, at_top):
        """Limit of ``lambda mu^{1/P}`` as ``lambda`` leaves the sampled range."""
        c, rho = tail
        if c == 0.0:
            return 0.0
        if at_top:
            if rho >= 0:
                return 0.0
        elif rho >= 0:
            return config.INF
        e = 1.0 + self.N / (P * rho)
        if _critical(e):
            return self.ball ** (1.0 / P) * abs(c)
        if (at_top and e > 0) or (not at_top and e < 0):
            return config.INF
        return 0.0

    def weak_norm(self, P):
        """``sup_lambda lambda mu(lambda)^{1/P}``."""
        limits = (
            self._power_limit(self.inner, P, True),
            self._power_limit(self.outer, P, False),
        )
        if math.isinf(max(limits)):
            return config.INF
        top = self.peak
        if top == 0.0:
            return max(limits)
        xs = np.linspace(1e-9, LEVEL_SPAN, SCAN_LEVELS)

        def objective(x):
            lam = top * np.exp(-np.atleast_1d(x))
            return lam * self.measure(lam) ** (1.0 / P)

        values = objective(xs)
        k = int(np.argmax(values))
        lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, len(xs) - 1)]
        res = optimize.minimize_scalar(
            lambda x: -float(objective(x)[0]), bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-10},
        )
        return max(float(values[k]), -float(res.fun), *limits)

    def breakpoints(self):
        """Descending levels: the peak, every sampled value down to the floor."""
        floor = self.peak * math.exp(-LEVEL_SPAN)
        values = self.mag[self.mag > floor]
        return np.unique(np.append(values, floor))[::-1]

    def _vanishes_at_peak(self, levels):
        """``mu`` grows from zero below the peak rather than jumping."""
        if self.measure(levels[:1])[0] > 0:
            return False
        near = levels[0] - SIDE_STEP * (levels[0] - levels[1])
        mu_near, mu_next = self.measure([near, levels[1]])
        return mu_near <= 1e-6 * mu_next

    def strong_norm(self, P, q):
        """Layer-cake form ``(P int lambda^{q-1} mu^{q/P} dlambda)^{1/q}``."""
        if not _strong_finite(self.inner, self.outer, self.N, P):
            return config.INF
        top = self.peak
        if top == 0.0:
            return 0.0
        alpha = q / P
        levels = self.breakpoints()
        total = 0.0
        edges = levels[::-1]
        if self._vanishes_at_peak(levels):
            # mu ~ (top - lambda) just below the peak
            h, w = jacobi_rule(alpha, levels[0] - levels[1], JACOBI_ORDER)
            lam = levels[0] - h
            total += np.dot(w, lam ** (q - 1.0) * (self.measure(lam) / h) ** alpha)
            edges = edges[:-1]
        if len(edges) > 1:
            nodes, weights = gauss_legendre_cells(edges, CELL_ORDER)
            lam = nodes.ravel()
            total += np.dot(lam ** (q - 1.0) * self.measure(lam) ** alpha,
                            weights.ravel())
        total += _above_levels(self.inner, self.N, P, q, top)
        floor = levels[-1]
        f_floor = floor**q * float(self.measure([floor])[0]) ** alpha
        total += f_floor / (q * _below_rate(self.outer, self.N, P))
        return (P * total) ** (1.0 / q)

    def rearranged(self):
        if self.peak == 0.0:
            empty = np.zeros(0)
            return RearrangedFunction(empty, empty, empty, empty, empty, self.N,
                                      self.inner, self.outer)
        levels = self.breakpoints()
        gap = levels[:-1] - levels[1:]
        mu = self.measure(levels)
        mu_below, slope_below = self.measure_and_slope(levels[:-1] - SIDE_STEP * gap)
        slope_above = self.measure_and_slope(levels[1:] + SIDE_STEP * gap)[1]
        # keep the one-sided values ordered when a cell is a few ulps wide
        mu_below = np.clip(mu_below, mu[:-1], mu[1:])
        # a continuous mu only moves by about SIDE_STEP of the cell growth
        smooth = mu_below - mu[:-1] <= 1e-6 * (mu[1:] - mu[:-1])
        mu_below = np.where(smooth, mu[:-1], mu_below)
        return RearrangedFunction(levels, mu, mu_below, slope_below, slope_above,
                                  self.N, self.inner, self.outer, self)


@dataclass(frozen=True, eq=False)
class RearrangedFunction(object):
    """
    Distribution function at the breakpoint levels ``lambda_k`` with the
    one-sided data needed to invert it cell by cell: ``mu_below[k]`` is
    ``mu`` just under ``lambda_k`` (``mu`` jumps there on a plateau), and
    the slopes are ``dmu/dlambda`` at both ends of each cell.
    """

    lambda_grid: np.ndarray
    mu_values: np.ndarray
    mu_below: np.ndarray
    slope_below: np.ndarray
    slope_above: np.ndarray
    N: int
    inner: Tail = ZERO_TAIL
    outer: Tail = ZERO_TAIL
    sets: Optional[LevelSets] = None

    @property
    def ball(self):
        return sphere_area(self.N) / self.N

    def _inverse(self, k, V):
        """Inverse of ``mu`` on cell ``k``; a Hermite guess polished by Newton."""
        lam, mu = self.lambda_grid, self.mu_values
        Va, Vb = self.mu_below[k], mu[k + 1]
        la, lb = lam[k], lam[k + 1]
        H = Vb - Va
        with np.errstate(divide="ignore", invalid="ignore"):
            secant = (lb - la) / H
            da = np.where(self.slope_below[k] < 0, 1.0 / self.slope_below[k], secant)
            db = np.where(self.slope_above[k] < 0, 1.0 / self.slope_above[k], secant)
            s = (V - Va) / H
        s2, s3 = s * s, s * s * s
        out = ((2 * s3 - 3 * s2 + 1) * la + (s3 - 2 * s2 + s) * H * da
               + (3 * s2 - 2 * s3) * lb + (s3 - s2) * H * db)
        guess = np.clip(out, lb, la)
        if self.sets is None:
            return guess
        shape = np.shape(guess)
        guess, V = guess.ravel(), np.broadcast_to(V, shape).ravel()
        la, lb = np.broadcast_to(la, shape).ravel(), np.broadcast_to(lb, shape).ravel()
        for _ in range(NEWTON_STEPS):
            value, slope = self.sets.measure_and_slope(guess)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = (value - V) / slope
            move = (slope < 0) & np.isfinite(step)
            guess = np.where(move, np.clip(guess - step, lb, la), guess)
        return guess.reshape(shape)

    def decreasing(self, V):
        """``f*(V) = inf {lambda : mu(lambda) <= V}``."""
        V = np.asarray(V, dtype=float)
        scalar = V.ndim == 0
        V = np.atleast_1d(V)
        lam, mu = self.lambda_grid, self.mu_values
        out = np.zeros_like(V)
        if len(lam) == 0:
            return float(out[0]) if scalar else out
        k = np.searchsorted(mu, V, side="right") - 1
        cell = (k >= 0) & (k < len(lam) - 1)
        kc = np.where(cell, k, 0)
        plateau = cell & (V <= self.mu_below[np.minimum(kc, len(lam) - 2)])
        out = np.where(plateau, lam[kc], out)
        sloped = cell & ~plateau
        out[sloped] = self._inverse(kc[sloped], V[sloped])
        c0, r0 = self.inner
        head = k < 0
        with np.errstate(divide="ignore", over="ignore"):
            if c0 != 0.0 and r0 < 0:
                out[head] = abs(c0) * (V[head] / self.ball) ** (r0 / self.N)
            else:
                out[head] = lam[0]
            beyond = k >= len(lam) - 1
            c1, r1 = self.outer
            if c1 != 0.0 and r1 < 0:
                out[beyond] = np.minimum(
                    lam[-1], abs(c1) * (V[beyond] / self.ball) ** (r1 / self.N)
                )
        return float(out[0]) if scalar else out

    def lorentz_norm(self, P, q):
        """Rearrangement form ``(int (V^{1/P} f*(V))^q dV/V)^{1/q}``."""
        if not _strong_finite(self.inner, self.outer, self.N, P):
            return config.INF
        lam, mu = self.lambda_grid, self.mu_values
        if len(lam) < 2:
            return 0.0
        alpha = q / P
        top, floor = lam[0], lam[-1]
        total = P * _above_levels(self.inner, self.N, P, q, top)
        total += top**q * mu[0] ** alpha / alpha
        # f* is constant on each jump of mu
        jumps = self.mu_below**alpha - mu[:-1] ** alpha
        total += np.sum(lam[:-1] ** q * jumps) / alpha
        edges = np.append(np.column_stack([mu[:-1], self.mu_below]).ravel(), mu[-1])
        nodes, weights = gauss_legendre_cells(edges, CELL_ORDER)
        nodes, weights = nodes[1::2], weights[1::2]
        Va, Vb = self.mu_below, mu[1:]
        sloped = Vb > Va
        first = sloped & (Va == 0.0)
        for k in np.nonzero(first)[0]:
            # weight V^{alpha-1} is singular at V = 0
            h, w = jacobi_rule(alpha - 1.0, Vb[k], JACOBI_ORDER)
            total += np.dot(w, self._inverse(np.full(len(h), k), h) ** q)
        rest = np.nonzero(sloped & ~first)[0]
        if len(rest):
            V, W = nodes[rest], weights[rest]
            fstar = self._inverse(np.repeat(rest[:, None], V.shape[1], axis=1), V)
            total += np.sum(W * V ** (alpha - 1.0) * fstar**q)
        rate = _below_rate(self.outer, self.N, P)
        total += floor**q * mu[-1] ** alpha / alpha * (1.0 / rate - 1.0)
        return total ** (1.0 / q)


def _refined_points(profile):
    grid = profile.grid
    t = np.linspace(grid.t_min, grid.t_max, REFINE * (grid.n - 1) + 1)
    if profile.is_sharp:
        lo, hi = profile.support
        # the jump happens between adjacent floats
        edges = [np.nextafter(lo, -np.inf), lo, hi, np.nextafter(hi, np.inf)]
        t = np.union1d(t, np.clip(edges, grid.t_min, grid.t_max))
    return t


def level_sets(profile, N):
    t = _refined_points(profile)
    if profile.is_sharp:
        return LevelSets(t, profile.at_log(t), N=N)
    values = profile.at_log(t)
    return LevelSets(t, values, profile.inner_tail, profile.outer_tail, N)


def distribution_function(profile, lam, N):
    if not lam > 0:
        raise DomainError("levels must be positive, got %r" % (lam,))
    return float(level_sets(profile, N).measure([lam])[0])


def rearrange(profile, N):
    return level_sets(profile, N).rearranged()


def lorentz_norm(profile, N, p, q):
    """``||u||_{L^{p,q}}``; ``q = inf`` gives the weak (Marcinkiewicz) norm."""
    if not (p > 0 and q > 0):
        raise DomainError("Lorentz indices must be positive")
    sets = level_sets(profile, N)
    if math.isinf(q):
        return sets.weak_norm(p)
    return sets.strong_norm(p, q)


def weak_embedding_constant(p, q):
    """Best ``C`` in ``||f||_{L^{p,inf}} <= C ||f||_{L^{p,q}}``."""
    return (q / p) ** (1.0 / q)


def _radial_integral(profile, N, power, weight):
    """``|S| int |u(e^t)|^power e^{weight t} dt`` including the tails."""
    grid = profile.grid
    if profile.is_sharp:
        lo, hi = profile.support
        edges = np.concatenate([[lo], grid.t[(grid.t > lo) & (grid.t < hi)], [hi]])
    else:
        edges = grid.t
    nodes, weights = gauss_legendre_cells(edges)
    body = np.sum(np.abs(profile.at(nodes)) ** power * np.exp(weight * nodes)
                  * weights)
    tails = 0.0
    if not profile.is_sharp:
        for tl, edge, upper in (
            (profile.inner_tail, grid.t_min, False),
            (profile.outer_tail, grid.t_max, True),
        ):
            if tl.is_zero:
                continue
            rate = power * tl.exponent + weight
            if (upper and rate >= 0) or (not upper and rate <= 0):
                return config.INF
            tails += abs(tl.coeff) ** power * math.exp(rate * edge) / abs(rate)
    return sphere_area(N) * (body + tails)


def hardy_potential(profile, params):
    """``int |u|^p |x|^{-sp} dx``; ``+inf`` when a tail diverges."""
    return _radial_integral(profile, params.N, params.p, params.N - params.sp)


def lebesgue_norm(profile, N, p):
    value = _radial_integral(profile, N, p, float(N))
    return value ** (1.0 / p)


def lorentz_hardy_bound(profile, params):
    """
    ``(hardy, bound)`` where ``bound = (|S|/N)^{sp/N} ||u||^p_{L^{p*_s,p}}``
    dominates the Hardy potential, with equality for decreasing profiles.
    """
    N, sp, p = params.N, params.sp, params.p
    strong = lorentz_norm(profile, N, params.p_star_s, p)
    bound = (sphere_area(N) / N) ** (sp / N) * strong**p
    return hardy_potential(profile, params), bound


@dataclass(frozen=True)
class DistanceResult(object):
    value: float
    minimizer_a: float
    bracket: Tuple[float, float]
    scan_resolution: float

    def as_dict(self):
        out = asdict(self)
        out["bracket"] = list(self.bracket)
        return out


def _sign_power(x, b):
    return np.sign(x) * np.abs(x) ** b


def _tail_power(tl, b):
    if tl.is_zero:
        return ZERO_TAIL
    return Tail(math.copysign(abs(tl.coeff) ** b, tl.coeff), tl.exponent * b)


class _RayObjective(object):
    """``a -> ||f - a r^{-decay}||_{L^{P,inf}}`` on fixed sample points."""

    def __init__(self, profile, N, P, decay, power=1.0):
        self.N, self.P, self.decay = N, P, decay
        self.t = _refined_points(profile)
        self.f = _sign_power(profile.at_log(self.t), power)
        if profile.is_sharp:
            self.inner = self.outer = ZERO_TAIL
        else:
            self.inner = _tail_power(profile.inner_tail, power)
            self.outer = _tail_power(profile.outer_tail, power)
        self.ray = np.exp(-decay * self.t)

    def levels(self, a):
        ray = Tail(-a, -self.decay) if a != 0 else ZERO_TAIL
        return LevelSets(
            self.t,
            self.f - a * self.ray,
            _add_tails(self.inner, ray, inner=True),
            _add_tails(self.outer, ray, inner=False),
            self.N,
        )

    def __call__(self, a):
        return self.levels(a).weak_norm(self.P)


def _minimize_ray(objective, scale):
    """Scan ``a`` over both signs on a log grid, then refine the best bracket."""
    mags = np.logspace(-6, 6, 49)
    grid = np.concatenate([-scale * mags[::-1], [0.0], scale * mags])
    values = np.asarray(parallel_map(objective, grid))
    k = int(np.argmin(values))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(
        objective, bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-8 * scale},
    )
    best_a, best = grid[k], float(values[k])
    if res.fun < best:
        best_a, best = float(res.x), float(res.fun)
    resolution = float(np.max(np.diff(np.log(mags))))
    return best_a, best, (float(lo), float(hi)), resolution


def _distance(objective, denominator, post=None):
    if not (0 < denominator < config.INF):
        raise DomainError(
            "distance undefined: normalising norm is %r" % (denominator,)
        )
    base = objective(0.0)
    unit = LevelSets(objective.t, objective.ray, Tail(1.0, -objective.decay),
                     Tail(1.0, -objective.decay), objective.N).weak_norm(objective.P)
    if math.isinf(base):
        raise DomainError("profile has infinite weak norm")
    scale = base / unit if unit > 0 else 1.0
    a, value, bracket, resolution = _minimize_ray(objective, scale)
    if post is not None:
        a, bracket = post(a), (post(bracket[0]), post(bracket[1]))
    log.debug("distance minimiser a=%.8g value=%.8g", a, value / denominator)
    return DistanceResult(value / denominator, a, bracket, resolution)


def distance_dsp(profile, params):
    """``inf_a ||u - omega_a||_{L^{p*_s,inf}} / ||u||_{L^{p*_s,p}}`` for ``p >= 2``."""
    if params.p < 2 or params.is_local:
        raise DomainError("distance_dsp needs p >= 2 and s < 1")
    P = params.p_star_s
    objective = _RayObjective(profile, params.N, P, params.gamma)
    return _distance(objective, lorentz_norm(profile, params.N, P, params.p))


def distance_Dsp(profile, params):
    """The ``1 < p < 2`` distance, measured on ``u^{<p/2>}`` in ``L^{q,inf}``."""
    if not 1.0 < params.p < 2.0 or params.is_local:
        raise DomainError("distance_Dsp needs 1 < p < 2 and s < 1")
    b = params.p / 2.0
    objective = _RayObjective(profile, params.N, params.q_exp, params.gamma * b,
                              power=b)
    denominator = lorentz_norm(profile, params.N, params.p_star_s, params.p) ** b
    return _distance(objective, denominator,
                     post=lambda c: float(_sign_power(c, 1.0 / b)))


def distance_local(profile, N, p):
    if not 1.0 < p < N:
        raise DomainError("distance_local needs 1 < p < N")
    P = N * p / (N - p)
    objective = _RayObjective(profile, N, P, (N - p) / p)
    return _distance(objective, lorentz_norm(profile, N, P, p))


def distance_pullback(profile, N, s):
    """
    ``inf_a ||T[u - a w_s]||_{L^{2*,inf}} / ||T[u]||_{L^{2*,2}}``.

    ``T`` is linear and maps ``w_s`` to ``K_{N,s} r^{-(N-2)/2}``, so the ray
    is scanned on the image side and the amplitude converted back.
    """
    from hardylab.cylinder import transform_T
    from hardylab.specfun import Params, constant_K

    if N < 3:
        raise DomainError("distance_pullback needs N >= 3")
    image = transform_T(profile, N, s)
    P = 2.0 * N / (N - 2.0)
    K = constant_K(Params(N, s, 2.0))
    objective = _RayObjective(image, N, P, (N - 2.0) / 2.0)
    return _distance(objective, lorentz_norm(image, N, P, 2.0),
                     post=lambda b: b / K)
