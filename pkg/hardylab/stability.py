"""
Empirical stability ratios ``deficit / (distance^alpha * weight)``.

The stability constants are only known to exist, so a scan records the
smallest observed ratio as an empirical floor.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional

from hardylab import config
from hardylab.cylinder import apply_multiplier, lift, spectral_deficit_fractional
from hardylab.deficits import fractional_deficit, local_deficit
from hardylab.exceptions import DomainError
from hardylab.norms import (
    DistanceResult,
    distance_dsp,
    distance_Dsp,
    distance_local,
    distance_pullback,
    hardy_potential,
)
from hardylab.profiles import (
    GridSpec,
    make_gaussian,
    make_truncated_extremizer,
)
from hardylab.workers import parallel_map

log = logging.getLogger("hardylab.stability")

FRAC_P_GE_2 = "frac_p_ge_2"
FRAC_P_LT_2 = "frac_p_lt_2"
LOCAL = "local"
PULLBACK_P2 = "pullback_p2"
REGIMES = (FRAC_P_GE_2, FRAC_P_LT_2, LOCAL, PULLBACK_P2)

FAMILIES = ("widening-window", "perturbed", "gaussian")

CSV_HEADER = (
    "param", "deficit", "hardy", "distance", "minimizer_a", "exponent", "ratio",
    "quad_error",
)


def regime_exponent(regime, p):
    """Power of the distance controlled by the deficit."""
    if regime == FRAC_P_GE_2:
        return 2.0 * p
    if regime in (FRAC_P_LT_2, PULLBACK_P2):
        return 4.0
    if regime == LOCAL:
        return max(4.0, 2.0 * p)
    raise DomainError(
        "unknown regime %r (choose from %s)" % (regime, ", ".join(REGIMES))
    )


def check_regime(params, regime):
    N, s, p = params.N, params.s, params.p
    if regime == FRAC_P_GE_2:
        ok = s < 1 and p >= 2
    elif regime == FRAC_P_LT_2:
        ok = s < 1 and 1 < p < 2
    elif regime == LOCAL:
        ok = s == 1 and 1 < p < N
    elif regime == PULLBACK_P2:
        ok = s < 1 and p == 2 and N >= 3
    else:
        regime_exponent(regime, p)
        ok = False
    if not ok:
        raise DomainError("regime %s does not apply to N=%s s=%s p=%s"
                          % (regime, N, s, p))


@dataclass(frozen=True)
class StabilityReport(object):
    params: object
    regime: str
    deficit: float
    hardy: float
    distance: Optional[DistanceResult]
    exponent: float
    ratio: float
    quad_error: float

    def as_row(self, param):
        distance = self.distance
        return (
            param,
            self.deficit,
            self.hardy,
            distance.value if distance else config.INF,
            distance.minimizer_a if distance else float("nan"),
            self.exponent,
            self.ratio,
            self.quad_error,
        )


def _measurements(profile, params, regime):
    N, s, p = params.N, params.s, params.p
    if regime == LOCAL:
        report = local_deficit(profile, N, p, with_remainder=False)
        return report.deficit, report.hardy, report.quad_error
    if regime == PULLBACK_P2:
        signal = lift(profile, N, s)
        weight = apply_multiplier(signal.spectrum(), N, s).norm_squared()
        return spectral_deficit_fractional(signal, N, s), weight, 0.0
    report = fractional_deficit(profile, params, with_remainder=False)
    return report.deficit, report.hardy, report.quad_error


def _distance(profile, params, regime):
    if regime == FRAC_P_GE_2:
        return distance_dsp(profile, params)
    if regime == FRAC_P_LT_2:
        return distance_Dsp(profile, params)
    if regime == LOCAL:
        return distance_local(profile, params.N, params.p)
    return distance_pullback(profile, params.N, params.s)


def stability_report(profile, params, regime):
    check_regime(params, regime)
    exponent = regime_exponent(regime, params.p)
    deficit, weight, quad_error = _measurements(profile, params, regime)
    try:
        distance = _distance(profile, params, regime)
    except DomainError as e:
        log.warning("distance undefined for %s: %s", profile.label, e)
        distance = None
    if distance is None or distance.value == 0 or not 0 < weight < config.INF:
        ratio = config.INF
    else:
        ratio = deficit / (distance.value**exponent * weight)
    return StabilityReport(params, regime, deficit, weight, distance, exponent,
                           ratio, quad_error)


def family_member(family, value, params, grid=None):
    """
    One member of a standard family, normalised to unit Hardy potential.

    ``widening-window``: truncated extremizer on ``[e^{-L/2}, e^{L/2}]``.
    ``perturbed``: the ``L = 8`` truncation plus ``value`` times a Gaussian.
    ``gaussian``: Gaussian of width ``value``.
    """
    grid = grid or GridSpec.default()
    if family == "widening-window":
        half = value / 2.0
        u = make_truncated_extremizer(params, 1.0, math.exp(-half), math.exp(half),
                                      1.0, grid)
    elif family == "perturbed":
        base = make_truncated_extremizer(params, 1.0, math.exp(-4.0), math.exp(4.0),
                                         1.0, grid)
        u = base.plus(make_gaussian(1.0, grid).scaled(value))
    elif family == "gaussian":
        u = make_gaussian(value, grid)
    else:
        raise DomainError("unknown family %r (choose from %s)"
                          % (family, ", ".join(FAMILIES)))
    hardy = hardy_potential(u, params)
    if not 0 < hardy < config.INF:
        raise DomainError("family member has Hardy potential %r" % hardy)
    return u.scaled(hardy ** (-1.0 / params.p), label="%s(%g)" % (family, value))


@dataclass(frozen=True)
class ScanRow(object):
    param: float
    report: Optional[StabilityReport]
    error: Optional[str] = None


@dataclass(frozen=True)
class ScanTable(object):
    family: str
    regime: str
    rows: List[ScanRow]

    @property
    def floor(self):
        """Smallest finite ratio over the scan."""
        ratios = [
            row.report.ratio for row in self.rows
            if row.report is not None and math.isfinite(row.report.ratio)
        ]
        return min(ratios) if ratios else config.INF


def family_scan(family, values, params, regime, grid=None):
    check_regime(params, regime)

    def row(value):
        try:
            member = family_member(family, value, params, grid)
            return ScanRow(value, stability_report(member, params, regime))
        except (DomainError, ArithmeticError) as e:
            log.warning("scan %s(%g) failed: %s", family, value, e)
            return ScanRow(value, None, str(e))

    table = ScanTable(family, regime, parallel_map(row, values))
    log.info("scan %s/%s: floor %.6g over %d rows", family, regime, table.floor,
             len(table.rows))
    return table
