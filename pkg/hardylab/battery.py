"""
The invariant battery, run on a few standard profiles.

Each check returns a :class:`CheckResult`; numerical failures inside a check
are caught and reported as a failed check instead of aborting the run.
"""
import logging
import math
import random
from typing import NamedTuple

import numpy as np

from hardylab import config
from hardylab.cache import numerical_guard
from hardylab.constants import (
    conversion_kappa,
    el_residual,
    kappa_closed_form,
    remainder_constant_cp,
    remainder_constant_cp_star,
    remainder_constant_nonnegative,
)
from hardylab.cylinder import (
    apply_multiplier,
    lift,
    spectral_deficit_fractional,
    spectral_deficit_local,
    transform_T,
    unlift,
)
from hardylab.deficits import (
    MINMAX,
    SYMMETRIC_POWER,
    UNWEIGHTED,
    fractional_deficit,
    gagliardo_seminorm,
    local_deficit,
    subadditivity_gap,
    weighted_remainder_eps,
)
from hardylab.norms import distance_dsp, hardy_potential, lorentz_norm, rearrange
from hardylab.profiles import (
    GridSpec,
    make_extremizer,
    make_gaussian,
    make_truncated_extremizer,
    preset,
)
from hardylab.specfun import (
    Params,
    constant_K,
    frac_hardy_constant_fourier,
    sphere_area,
    symbol_limit,
    symbol_P,
)
from hardylab.uncertainty import equality_state, uncertainty_report

log = logging.getLogger("hardylab.battery")


class CheckResult(NamedTuple):
    name: str
    value: float
    tol: float
    ok: bool

    def as_dict(self):
        return self._asdict()


def _rel(a, b):
    return abs(a - b) / abs(b)


def _result(name, value, tol):
    ok = bool(value <= tol)
    if not ok:
        log.warning("battery check %s: %.3e exceeds %.1e", name, value, tol)
    return CheckResult(name, float(value), tol, ok)


CHECKS = []


def check(name):
    def decorator(f):
        guarded = numerical_guard(lambda: CheckResult(name, config.INF, 0.0, False))(f)
        CHECKS.append((name, guarded))
        return guarded

    return decorator


@check("extremizer weak norm")
def _weak_norm():
    worst = 0.0
    for N, s, p in ((3, 0.5, 2.0), (4, 1.0 / 3.0, 3.0), (2, 0.25, 1.5)):
        params = Params(N, s, p)
        weak = lorentz_norm(make_extremizer(params, 1.0), N, params.p_star_s,
                            math.inf)
        expected = (sphere_area(N) / N) ** (1.0 / params.p_star_s)
        worst = max(worst, _rel(weak, expected))
    return _result("extremizer weak norm", worst, 1e-6)


@check("local symbol identity")
def _local_symbol():
    xi = np.linspace(0.0, 50.0, 501)
    worst = 0.0
    for N in (3, 4, 5):
        params = Params(N, 1.0, 2.0)
        for ell in range(9):
            mu = ell * (ell + N - 2.0)
            exact = xi * xi + mu
            gap = np.abs(symbol_P(params, xi, ell) - exact) / (1 + exact)
            worst = max(worst, float(np.max(gap)))
    return _result("local symbol identity", worst, 1e-9)


@check("symbol curvature at the origin")
def _symbol_limit():
    worst = 0.0
    for N, s in ((4, 0.5), (3, 0.5), (5, 0.75)):
        params = Params(N, s, 2.0)
        worst = max(worst, _rel(symbol_limit(params), constant_K(params) ** 2))
    return _result("symbol curvature at the origin", worst, 1e-6)


@check("closed-form constants")
def _closed_forms():
    gaps = [
        abs(remainder_constant_cp(3.0) - (2.0 - math.sqrt(2.0))),
        abs(remainder_constant_cp(4.0) - 1.0 / 3.0),
        abs(remainder_constant_cp(2.0) - 1.0),
        abs(frac_hardy_constant_fourier(Params(4, 1.0, 2.0)) - 1.0),
    ]
    return _result("closed-form constants", max(gaps), 1e-10)


@check("local Gaussian deficit")
def _local_gaussian():
    report = local_deficit(make_gaussian(1.0), 3, 2.0, with_remainder=False)
    return _result("local Gaussian deficit", _rel(report.deficit, math.pi**1.5), 1e-4)


@check("Gaussian Hardy potential")
def _gaussian_hardy():
    value = hardy_potential(make_gaussian(1.0), Params(3, 0.5, 2.0))
    return _result("Gaussian Hardy potential", _rel(value, 2.0 * math.pi),
                   config.ORACLE_TOL)


@check("deficit preservation")
def _preservation():
    N, s = 4, 0.5
    worst = 0.0
    for u in (make_gaussian(1.0), make_truncated_extremizer(
            Params(N, s, 2.0), 1.0, math.exp(-6), math.exp(6), 1.0)):
        signal = lift(u, N, s)
        image = apply_multiplier(signal.spectrum(), N, s).signal()
        worst = max(worst, _rel(spectral_deficit_local(image, N),
                                spectral_deficit_fractional(signal, N, s)))
    return _result("deficit preservation", worst, config.IDENTITY_TOL)


@check("lift round trip")
def _round_trip():
    u = make_gaussian(1.0)
    back = unlift(lift(u, 4, 0.5), 4, 0.5)
    scale = float(np.max(np.abs(u.nodes)))
    return _result("lift round trip",
                   float(np.max(np.abs(back.nodes - u.nodes))) / scale, 1e-12)


@check("extremizer transport")
def _transport():
    N, s = 4, 0.5
    params = Params(N, s, 2.0)
    u = make_truncated_extremizer(params, 1.0, math.exp(-8), math.exp(8), 1.0)
    image = transform_T(u, N, s)
    t = u.grid.t
    window = (t > -3.0) & (t < 3.0)
    target = constant_K(params) * np.exp(-(N - 2.0) / 2.0 * t[window])
    gap = float(np.max(np.abs(image.nodes[window] - target) / target))
    return _result("extremizer transport", gap, 1e-2)


@check("uncertainty equality")
def _uncertainty():
    report = uncertainty_report(equality_state(4, 0.5, 1.0, 1.0), 4, 0.5)
    return _result("uncertainty equality", abs(report.ratio - 0.25), 1e-6)


@check("layer-cake routes")
def _layer_cake():
    params = Params(3, 0.5, 2.0)
    P = params.p_star_s
    worst = 0.0
    for name in ("gaussian", "truncated", "sharp-truncated", "sign-changing"):
        u = preset(name, params)
        for q in (1.5, 2.0, 4.0):
            direct = lorentz_norm(u, 3, P, q)
            worst = max(worst, _rel(rearrange(u, 3).lorentz_norm(P, q), direct))
    return _result("layer-cake routes", worst, 1e-6)


@check("remainder identity at p = 2")
def _remainder_identity():
    params = Params(3, 0.5, 2.0)
    worst = 0.0
    for name in ("gaussian", "truncated"):
        u = preset(name, params, GridSpec.default())
        deficit = fractional_deficit(u, params, with_remainder=False).deficit
        worst = max(worst, _rel(weighted_remainder_eps(u, params), deficit))
    return _result("remainder identity at p = 2", worst, config.ORACLE_TOL)


def _shortfall(report, floor, remainder):
    """How far ``deficit >= floor * remainder`` misses, over the Hardy potential."""
    slack = report.quad_error + config.ORACLE_TOL * floor * remainder
    return max(0.0, floor * remainder - report.deficit - slack) / report.hardy


@check("deficit nonnegativity")
def _nonnegative():
    worst = 0.0
    for p in (1.5, 2.0, 3.0):
        params = Params(3, 0.5, p)
        for name in ("gaussian", "truncated", "sign-changing"):
            report = fractional_deficit(preset(name, params), params,
                                        with_remainder=False)
            worst = max(worst, -(report.deficit + report.quad_error) / report.hardy)
    for N, p in ((3, 2.0), (4, 3.0)):
        for name in ("gaussian", "truncated"):
            report = local_deficit(preset(name, Params(N, 1.0, p)), N, p,
                                   with_remainder=False)
            worst = max(worst, -(report.deficit + report.quad_error) / report.hardy)
    return _result("deficit nonnegativity", max(worst, 0.0), 0.0)


def _aligned_dilation(u, cells=40):
    """A dilation by a whole number of grid cells, so samples map onto samples."""
    lam = math.exp(cells * u.grid.dt)
    return lam, u.dilate(lam)


@check("norm scaling")
def _norm_scaling():
    params = Params(3, 0.5, 2.0)
    P = params.p_star_s
    u = preset("truncated", params)
    lam, wide = _aligned_dilation(u)
    gaps = []
    for q in (2.0, math.inf):
        norm = lorentz_norm(u, 3, P, q)
        gaps.append(_rel(lorentz_norm(u.scaled(-3.0), 3, P, q), 3.0 * norm))
        gaps.append(_rel(lorentz_norm(wide, 3, P, q), lam ** (3.0 / P) * norm))
    return _result("norm scaling", max(gaps), 1e-6)


@check("energy scaling")
def _energy_scaling():
    params = Params(3, 0.5, 2.0)
    u = preset("truncated", params)
    lam, wide = _aligned_dilation(u)
    power = lam ** (params.N - params.sp)
    energy, _ = gagliardo_seminorm(u, params)
    report = fractional_deficit(u, params, with_remainder=False)
    gaps = [
        _rel(gagliardo_seminorm(u.scaled(-3.0), params)[0], 9.0 * energy),
        _rel(gagliardo_seminorm(wide, params)[0], power * energy),
        _rel(hardy_potential(wide, params), power * report.hardy),
        _rel(fractional_deficit(wide, params, with_remainder=False).deficit,
             power * report.deficit),
    ]
    return _result("energy scaling", max(gaps), config.ORACLE_TOL)


@check("distance invariance")
def _distance_invariance():
    params = Params(3, 0.5, 2.0)
    u = preset("truncated", params)
    base = distance_dsp(u, params).value
    gaps = [_rel(distance_dsp(u.scaled(4.0), params).value, base),
            _rel(distance_dsp(_aligned_dilation(u)[1], params).value, base)]
    return _result("distance invariance", max(gaps), 1e-5)


@check("subadditivity")
def _subadditivity():
    worst = 0.0
    for p, mode in ((2.0, UNWEIGHTED), (3.0, UNWEIGHTED), (2.0, SYMMETRIC_POWER),
                    (1.5, MINMAX)):
        params = Params(3, 0.5, p)
        gap, err = subadditivity_gap(preset("sign-changing", params), params, mode)
        worst = max(worst, -(gap + err))
    return _result("subadditivity", max(worst, 0.0), 0.0)


@check("Plancherel")
def _plancherel():
    worst = 0.0
    for u in (make_gaussian(1.0), preset("truncated", Params(4, 0.5, 2.0))):
        signal = lift(u, 4, 0.5)
        worst = max(worst, _rel(signal.spectrum().norm_squared(),
                                signal.norm_squared()))
    return _result("Plancherel", worst, 1e-12)


@check("lift isometry")
def _isometry():
    worst = 0.0
    for N, s in ((3, 0.5), (4, 0.25)):
        params = Params(N, s, 2.0)
        for u in (make_gaussian(1.0), make_gaussian(2.0)):
            worst = max(worst, _rel(lift(u, N, s).norm_squared(),
                                    hardy_potential(u, params)))
    return _result("lift isometry", worst, 1e-6)


@check("Euler-Lagrange residual")
def _el_residual():
    worst = 0.0
    for N, s, p in ((3, 0.4, 2.0), (1, 0.3, 1.5), (4, 0.3, 3.0)):
        worst = max(worst, el_residual(Params(N, s, p)).residual)
    return _result("Euler-Lagrange residual", worst, config.ORACLE_TOL)


@check("kappa conversion")
def _kappa():
    worst = 0.0
    for N, s in ((3, 0.5), (4, 0.25)):
        worst = max(worst, _rel(conversion_kappa(N, s), kappa_closed_form(N, s)))
    return _result("kappa conversion", worst, config.ORACLE_TOL)


@check("remainder inequality for p >= 2")
def _remainder_large_p():
    worst = 0.0
    for p in (2.0, 2.5, 3.0):
        params = Params(3, 0.5, p)
        floor = remainder_constant_cp(p)
        for name in ("gaussian", "truncated"):
            report = fractional_deficit(preset(name, params), params)
            worst = max(worst, _shortfall(report, floor, report.remainder))
    return _result("remainder inequality for p >= 2", worst, 0.0)


@check("remainder inequality for 1 < p < 2")
def _remainder_small_p():
    worst = 0.0
    for p in (1.3, 1.5, 1.8):
        params = Params(3, 0.5, p)
        cp_star = remainder_constant_cp_star(p)
        report = fractional_deficit(preset("sign-changing", params), params)
        worst = max(worst, _shortfall(report, cp_star, report.remainder))
        report = fractional_deficit(preset("gaussian", params), params)
        for floor in (cp_star, remainder_constant_nonnegative(p)):
            worst = max(worst, _shortfall(report, floor, report.remainder))
    return _result("remainder inequality for 1 < p < 2", worst, 0.0)


@check("local remainder inequality")
def _remainder_local():
    worst = 0.0
    for N, p in ((3, 2.0), (3, 2.5), (4, 3.0)):
        floor = remainder_constant_cp(p)
        for name in ("gaussian", "truncated"):
            report = local_deficit(preset(name, Params(N, 1.0, p)), N, p)
            worst = max(worst, _shortfall(report, floor, report.remainder))
    return _result("local remainder inequality", worst, 0.0)


def run_battery(seed=0, names=None):
    """Run the checks in an order shuffled by ``seed``."""
    checks = [c for c in CHECKS if names is None or c[0] in names]
    random.Random(seed).shuffle(checks)
    results = []
    for name, f in checks:
        log.info("battery: %s", name)
        results.append(f())
    return results
