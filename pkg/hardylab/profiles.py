"""
Radial test functions sampled on a uniform grid in ``t = ln r``.

A profile stores node values and exact ``d/dt`` slopes, and is evaluated with
a cubic Hermite spline between nodes. Outside the grid it follows power-law
tails ``c r^gamma``. A sharp cutoff is recorded as a support window: the
spline keeps the unclipped data and evaluation returns exact zeros outside
the window.
"""
import json
import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

from hardylab import config
from hardylab.exceptions import DomainError

log = logging.getLogger("hardylab.profiles")


@dataclass(frozen=True)
class GridSpec(object):
    t_min: float
    t_max: float
    n: int

    def __post_init__(self):
        if not self.t_min < self.t_max:
            raise DomainError("grid needs t_min < t_max, got %s" % (self,))
        if self.n < 16:
            raise DomainError("grid needs at least 16 points, got %s" % self.n)

    @classmethod
    def default(cls):
        return cls(config.T_MIN, config.T_MAX, config.GRID_N)

    @property
    def dt(self):
        return (self.t_max - self.t_min) / (self.n - 1)

    @property
    def t(self):
        return self.t_min + self.dt * np.arange(self.n)

    def shifted(self, c):
        return GridSpec(self.t_min + c, self.t_max + c, self.n)

    def refined(self):
        return GridSpec(self.t_min, self.t_max, 2 * self.n - 1)

    def as_dict(self):
        return {"t_min": self.t_min, "t_max": self.t_max, "n": self.n}


class Tail(NamedTuple):
    """``coeff * r**exponent``; a zero coefficient means identically zero."""

    coeff: float
    exponent: float

    @property
    def is_zero(self):
        return self.coeff == 0.0

    def at(self, t):
        if self.is_zero:
            return np.zeros_like(t)
        return self.coeff * np.exp(self.exponent * t)

    def dt(self, t):
        if self.is_zero:
            return np.zeros_like(t)
        return self.coeff * self.exponent * np.exp(self.exponent * t)

    def scaled(self, c):
        return Tail(self.coeff * c, self.exponent)


ZERO_TAIL = Tail(0.0, 0.0)


def _add_tails(a, b, inner):
    if a.is_zero:
        return b
    if b.is_zero:
        return a
    if a.exponent == b.exponent:
        return Tail(a.coeff + b.coeff, a.exponent)
    # keep the term that dominates at the relevant end
    if inner:
        return a if a.exponent < b.exponent else b
    return a if a.exponent > b.exponent else b


@dataclass(frozen=True, eq=False)
class RadialProfile(object):
    grid: GridSpec
    nodes: np.ndarray
    slopes: np.ndarray
    inner_tail: Tail = ZERO_TAIL
    outer_tail: Tail = ZERO_TAIL
    label: str = ""
    support: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        slopes = np.asarray(self.slopes, dtype=float)
        if nodes.shape != (self.grid.n,) or slopes.shape != (self.grid.n,):
            raise DomainError("profile samples do not match the grid")
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(slopes))):
            raise DomainError("profile samples must be finite (%s)" % self.label)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "slopes", slopes)
        if self.support is not None:
            lo, hi = self.support
            if not self.grid.t_min <= lo < hi <= self.grid.t_max:
                raise DomainError("support window must lie inside the grid")

    @classmethod
    def from_samples(cls, grid, values, label="", inner_tail=ZERO_TAIL,
                     outer_tail=ZERO_TAIL):
        """Build a profile from samples alone; slopes come from PCHIP."""
        values = np.asarray(values, dtype=float)
        slopes = PchipInterpolator(grid.t, values).derivative()(grid.t)
        return cls(grid, values, slopes, inner_tail, outer_tail, label)

    @cached_property
    def spline(self):
        return CubicHermiteSpline(self.grid.t, self.nodes, self.slopes)

    @cached_property
    def dspline(self):
        return self.spline.derivative()

    @property
    def is_sharp(self):
        return self.support is not None

    @cached_property
    def values(self):
        """Samples with the support window applied."""
        return self._clip(self.grid.t, self.nodes.copy())

    def _clip(self, t, out):
        if self.support is not None:
            lo, hi = self.support
            out[(t < lo) | (t > hi)] = 0.0
        return out

    def raw(self, t, derivative=False):
        """Spline and tails without the support window; ``d/dt`` on request."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.empty_like(t)
        lo = t < self.grid.t_min
        hi = t > self.grid.t_max
        mid = ~(lo | hi)
        spline = self.dspline if derivative else self.spline
        out[mid] = spline(t[mid])
        if derivative:
            out[lo] = self.inner_tail.dt(t[lo])
            out[hi] = self.outer_tail.dt(t[hi])
        else:
            out[lo] = self.inner_tail.at(t[lo])
            out[hi] = self.outer_tail.at(t[hi])
        return out[0] if scalar else out

    def at(self, t):
        """The profile as a function of ``t = ln r``."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        out = self._clip(np.atleast_1d(t), np.atleast_1d(self.raw(t)).copy())
        return float(out[0]) if scalar else out

    @cached_property
    def log_spline(self):
        """Hermite spline of ``ln|u|``; only meaningful on same-sign cells."""
        mag = np.abs(self.nodes)
        positive = mag > 0
        safe = np.where(positive, self.nodes, 1.0)
        logs = np.where(positive, np.log(np.where(positive, mag, 1.0)), 0.0)
        return CubicHermiteSpline(self.grid.t, logs,
                                  np.where(positive, self.slopes / safe, 0.0))

    def at_log(self, t):
        """
        Like ``at`` but cells whose end nodes share a sign are interpolated in
        ``ln|u|``, which reproduces pure powers of ``r`` exactly.
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.atleast_1d(self.raw(t)).copy()
        grid = self.grid
        same = self.nodes[:-1] * self.nodes[1:] > 0
        if np.any(same):
            cell = np.clip(np.searchsorted(grid.t, t, side="right") - 1, 0,
                           grid.n - 2)
            inside = (t >= grid.t_min) & (t <= grid.t_max) & same[cell]
            sign = np.sign(self.nodes[cell[inside]])
            out[inside] = sign * np.exp(self.log_spline(t[inside]))
        return self._clip(t, out)

    def dt_at(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        out = self._clip(np.atleast_1d(t), np.atleast_1d(self.raw(t, True)).copy())
        return float(out[0]) if scalar else out

    def evaluate(self, r):
        return self.at(np.log(r))

    def derivative(self, r):
        """``du/dr``; the chain rule through ``t = ln r``."""
        return self.dt_at(np.log(r)) / np.asarray(r, dtype=float)

    def hardy_flags(self, N, s, p):
        """Integrability of ``|u|^p |x|^{-sp}`` at the origin and at infinity."""
        inner = self.is_sharp or self.inner_tail.is_zero or (
            self.inner_tail.exponent * p + N - s * p > 0
        )
        outer = self.is_sharp or self.outer_tail.is_zero or (
            self.outer_tail.exponent * p + N - s * p < 0
        )
        return inner, outer

    def is_hardy_integrable(self, N, s, p):
        return all(self.hardy_flags(N, s, p))

    def scaled(self, c, label=None):
        return replace(
            self,
            nodes=self.nodes * c,
            slopes=self.slopes * c,
            inner_tail=self.inner_tail.scaled(c),
            outer_tail=self.outer_tail.scaled(c),
            label=label or "%g*%s" % (c, self.label),
        )

    def plus(self, other, label=None):
        if other.grid != self.grid:
            raise DomainError("profiles live on different grids")
        label = label or "%s+%s" % (self.label, other.label)
        inner = _add_tails(self.inner_tail, other.inner_tail, inner=True)
        outer = _add_tails(self.outer_tail, other.outer_tail, inner=False)
        if self.is_sharp or other.is_sharp:
            return RadialProfile.from_samples(
                self.grid, self.values + other.values, label, inner, outer
            )
        return RadialProfile(
            self.grid,
            self.nodes + other.nodes,
            self.slopes + other.slopes,
            inner,
            outer,
            label,
        )

    def dilate(self, lam):
        """``u(r / lam)`` resampled on the same grid."""
        if not lam > 0:
            raise DomainError("dilation factor must be positive")
        shift = math.log(lam)
        t = self.grid.t - shift
        support = None
        if self.support is not None:
            support = (self.support[0] + shift, self.support[1] + shift)
        return RadialProfile(
            self.grid,
            self.raw(t),
            self.raw(t, derivative=True),
            Tail(self.inner_tail.coeff * lam ** -self.inner_tail.exponent,
                 self.inner_tail.exponent),
            Tail(self.outer_tail.coeff * lam ** -self.outer_tail.exponent,
                 self.outer_tail.exponent),
            "%s(r/%g)" % (self.label, lam),
            support,
        )

    def resample(self, grid):
        if self.support is not None:
            return RadialProfile.from_samples(
                grid, self.at(grid.t), self.label, self.inner_tail, self.outer_tail
            )
        return replace(self, grid=grid, nodes=self.raw(grid.t),
                       slopes=self.raw(grid.t, derivative=True))

    def positive_part(self):
        return RadialProfile.from_samples(
            self.grid,
            np.maximum(self.values, 0.0),
            "(%s)+" % self.label,
            self.inner_tail if self.inner_tail.coeff > 0 else ZERO_TAIL,
            self.outer_tail if self.outer_tail.coeff > 0 else ZERO_TAIL,
        )

    def negative_part(self):
        """``u_- = max(-u, 0)``, so ``u = u_+ - u_-``."""
        return self.scaled(-1.0).positive_part()

    def sign_power(self, b):
        """``|u|^b sgn u`` with chain-rule slopes; zero slope where ``u`` vanishes."""

        def tail(tl):
            if tl.is_zero:
                return ZERO_TAIL
            return Tail(math.copysign(abs(tl.coeff) ** b, tl.coeff), tl.exponent * b)

        u = self.nodes
        mag = np.abs(u)
        nonzero = mag > 0
        safe = np.where(nonzero, mag, 1.0)
        slopes = np.where(nonzero, b * safe ** (b - 1.0) * self.slopes, 0.0)
        return replace(
            self,
            nodes=np.sign(u) * mag**b,
            slopes=slopes,
            inner_tail=tail(self.inner_tail),
            outer_tail=tail(self.outer_tail),
            label="<%s>^%g" % (self.label, b),
        )


def _smoothstep(x):
    x = np.clip(x, 0.0, 1.0)
    return x * x * (3.0 - 2.0 * x), 6.0 * x * (1.0 - x)


def make_extremizer(params, a, grid=None):
    """``omega_a(r) = a r^{-(N-sp)/p}``. Its Hardy potential is infinite."""
    grid = grid or GridSpec.default()
    gam = params.gamma
    t = grid.t
    nodes = a * np.exp(-gam * t)
    return RadialProfile(
        grid,
        nodes,
        -gam * nodes,
        Tail(float(a), -gam),
        Tail(float(a), -gam),
        "extremizer(a=%g)" % a,
    )


def make_truncated_extremizer(params, a, r_in, r_out, ramp=0.0, grid=None):
    grid = grid or GridSpec.default()
    if not (r_in > 0 and r_out > 0 and ramp >= 0):
        raise DomainError("truncation needs positive radii and ramp >= 0")
    if not r_in * math.exp(2.0 * ramp) < r_out:
        raise DomainError("window too narrow for the ramps")
    t_in, t_out = math.log(r_in), math.log(r_out)
    if not (grid.t_min <= t_in and t_out <= grid.t_max):
        raise DomainError("truncation window [%g, %g] leaves the grid" % (r_in, r_out))
    gam = params.gamma
    t = grid.t
    omega = a * np.exp(-gam * t)
    label = "truncated(a=%g, r_in=%g, r_out=%g, ramp=%g)" % (a, r_in, r_out, ramp)
    if ramp == 0:
        return RadialProfile(grid, omega, -gam * omega, label=label,
                             support=(t_in, t_out))
    up, dup = _smoothstep((t - t_in) / ramp)
    down, ddown = _smoothstep((t_out - t) / ramp)
    chi = up * down
    dchi = dup * down / ramp - up * ddown / ramp
    return RadialProfile(grid, omega * chi, omega * (dchi - gam * chi), label=label)


def make_gaussian(sigma, grid=None):
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    grid = grid or GridSpec.default()
    x = np.exp(2.0 * grid.t) / (2.0 * sigma * sigma)
    nodes = np.exp(-x)
    return RadialProfile(
        grid, nodes, -2.0 * x * nodes, Tail(1.0, 0.0), ZERO_TAIL,
        "gaussian(sigma=%g)" % sigma,
    )


def make_cylinder_gaussian(N, weight, A, alpha, grid=None):
    """``A r^{-(N-2 weight)/2} exp(-alpha ln^2 r)``, a Gaussian once lifted."""
    if N < 3:
        raise DomainError("cylinder profiles need N >= 3")
    if not (0 < weight <= 1 and alpha > 0):
        raise DomainError("need 0 < weight <= 1 and alpha > 0")
    grid = grid or GridSpec.default()
    t = grid.t
    k = (N - 2.0 * weight) / 2.0
    nodes = A * np.exp(-k * t - alpha * t * t)
    return RadialProfile(
        grid, nodes, (-k - 2.0 * alpha * t) * nodes,
        label="cylinder_gaussian(N=%s, w=%g, A=%g, alpha=%g)" % (N, weight, A, alpha),
    )


class ProfileSpecError(DomainError):
    pass


_KINDS = {
    "extremizer": ("a",),
    "truncated_extremizer": ("a", "r_in", "r_out"),
    "gaussian": ("sigma",),
    "cylinder_gaussian": ("weight", "A", "alpha"),
}


def profile_from_spec(spec, params):
    """Build a profile from the JSON profile description."""
    if not isinstance(spec, dict):
        raise ProfileSpecError("profile spec must be a JSON object")
    kind = spec.get("kind")
    if kind not in _KINDS:
        raise ProfileSpecError(
            "field 'kind': expected one of %s, got %r" % (sorted(_KINDS), kind)
        )
    args = spec.get("params", {})
    missing = [name for name in _KINDS[kind] if name not in args]
    if missing:
        raise ProfileSpecError("field 'params': missing %s" % ", ".join(missing))
    grid = None
    if "grid" in spec:
        g = spec["grid"]
        try:
            grid = GridSpec(float(g["t_min"]), float(g["t_max"]), int(g["n"]))
        except (KeyError, TypeError, ValueError) as e:
            raise ProfileSpecError("field 'grid': %s" % e)
    try:
        if kind == "extremizer":
            return make_extremizer(params, float(args["a"]), grid)
        if kind == "truncated_extremizer":
            return make_truncated_extremizer(
                params, float(args["a"]), float(args["r_in"]), float(args["r_out"]),
                float(args.get("ramp", 0.0)), grid,
            )
        if kind == "gaussian":
            return make_gaussian(float(args["sigma"]), grid)
        return make_cylinder_gaussian(
            params.N, float(args["weight"]), float(args["A"]), float(args["alpha"]),
            grid,
        )
    except (TypeError, ValueError) as e:
        if isinstance(e, ProfileSpecError):
            raise
        raise ProfileSpecError("field 'params': %s" % e)


def load_profile(path, params):
    with open(path) as fp:
        text = fp.read()
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProfileSpecError(
            "%s: line %d column %d: %s" % (path, e.lineno, e.colno, e.msg)
        )
    return profile_from_spec(spec, params)


PRESETS = (
    "gaussian",
    "extremizer",
    "truncated",
    "sharp-truncated",
    "cyl-gauss",
    "sign-changing",
    "perturbed",
)


def preset(name, params, grid=None, alpha=1.0):
    """Named battery members."""
    grid = grid or GridSpec.default()
    if name == "gaussian":
        return make_gaussian(1.0, grid)
    if name == "extremizer":
        return make_extremizer(params, 1.0, grid)
    if name == "truncated":
        return make_truncated_extremizer(params, 1.0, math.exp(-4), math.exp(4), 1.0,
                                         grid)
    if name == "sharp-truncated":
        return make_truncated_extremizer(params, 1.0, math.exp(-4), math.exp(4), 0.0,
                                         grid)
    if name == "cyl-gauss":
        if params.N < 3:
            raise DomainError("cyl-gauss needs N >= 3")
        return make_cylinder_gaussian(params.N, params.s, 1.0, alpha, grid)
    if name == "sign-changing":
        return make_gaussian(1.0, grid).plus(
            make_gaussian(0.5, grid).scaled(-2.0), label="sign-changing"
        )
    if name == "perturbed":
        base = make_truncated_extremizer(params, 1.0, math.exp(-4), math.exp(4), 1.0,
                                         grid)
        return base.plus(make_gaussian(1.0, grid).scaled(0.1), label="perturbed")
    raise DomainError("unknown preset %r (choose from %s)" % (name, ", ".join(PRESETS)))
