"""
Hardy-Heisenberg uncertainty on the cylinder.

With ``psi = M_s phi_u`` the transformed mass is ``||psi||^2``, the
logarithmic variance is ``int t^2 |psi|^2`` and the fractional deficit is
``int xi^2 |psi_hat|^2`` plus the angular terms. The Gaussian states are
built directly on the cylinder and pulled back through ``T^{-1}``.
"""
import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from hardylab.cylinder import (
    CylinderSignal,
    apply_multiplier,
    inverse_transform_T,
    lift,
    spectral_deficit_fractional,
    unlift,
)
from hardylab.exceptions import DomainError, ToleranceError
from hardylab.profiles import GridSpec, make_cylinder_gaussian
from hardylab.specfun import sphere_area
from hardylab.workers import parallel_map

log = logging.getLogger("hardylab.uncertainty")

HEISENBERG = 0.25
RATIO_TOL = 1e-6


def _check(N):
    if N < 4:
        raise DomainError("the logarithmic variance needs N >= 4, got %s" % N)


def _image(profile, N, s):
    """The radial samples of ``M_s phi_u`` on the profile grid."""
    spectrum = apply_multiplier(lift(profile, N, s).spectrum(), N, s)
    return spectrum, spectrum.signal().mode(0, 1)


def transformed_mass(profile, N, s):
    """
    ``M_T(u) = ||T u||^2_{L^2(|x|^{-2})}``, also ``||u||^2`` of the weighted
    space.
    """
    _check(N)
    spectrum, _ = _image(profile, N, s)
    return spectrum.norm_squared()


def _moments(psi, t, dt):
    density = np.abs(psi) ** 2
    mass = dt * float(np.sum(density))
    variance = dt * float(np.sum(t * t * density))
    centre = dt * float(np.sum(t * density)) / mass if mass > 0 else 0.0
    centred = dt * float(np.sum((t - centre) ** 2 * density))
    return mass, variance, centred


def transformed_variance(profile, N, s):
    """``V_T(u) = int (ln|x|)^2 |T u|^2 |x|^{-2} dx``."""
    _check(N)
    _, psi = _image(profile, N, s)
    grid = profile.grid
    return _moments(psi, grid.t, grid.dt)[1]


@dataclass(frozen=True)
class UncertaintyReport(object):
    deficit: float
    mass: float
    variance: float
    ratio: float
    sharp_gap: float
    centred_variance: float
    centred_ratio: float

    def as_dict(self):
        return asdict(self)


def uncertainty_report(profile, N, s, check=True):
    """
    ``deficit * V_T / M_T^2`` against the sharp value ``1/4``. With
    ``check`` a ratio below ``1/4`` beyond tolerance raises ToleranceError.
    """
    _check(N)
    grid = profile.grid
    _, psi = _image(profile, N, s)
    deficit = spectral_deficit_fractional(lift(profile, N, s), N, s)
    mass, variance, centred = _moments(psi, grid.t, grid.dt)
    if mass == 0:
        raise DomainError("uncertainty ratio undefined for a zero profile")
    ratio = deficit * variance / mass**2
    report = UncertaintyReport(
        deficit, mass, variance, ratio, ratio - HEISENBERG, centred,
        deficit * centred / mass**2,
    )
    if check and ratio < HEISENBERG - RATIO_TOL:
        raise ToleranceError("uncertainty ratio gap", HEISENBERG - ratio, RATIO_TOL)
    log.debug("uncertainty %s: ratio %.12g", profile.label, ratio)
    return report


def equality_state(N, s, A=1.0, alpha=1.0, grid=None):
    """``T^{-1}`` of the cylinder Gaussian ``A sqrt|S| e^{-alpha t^2}``."""
    _check(N)
    gaussian = make_cylinder_gaussian(N, 1.0, A, alpha, grid or GridSpec.default())
    return inverse_transform_T(gaussian, N, s)


def compact_gaussian(N, alpha, R, grid=None):
    """
    The radial profile whose ``alpha = 1`` lift is
    ``sqrt|S| (1 - t^2/R^2)_+^{alpha R^2}``, which tends to ``e^{-alpha t^2}``.
    """
    if not (alpha > 0 and R > 0):
        raise DomainError("compact approximants need alpha > 0 and R > 0")
    grid = grid or GridSpec.default()
    if R > max(-grid.t_min, grid.t_max):
        raise DomainError("window R=%g exceeds the grid" % R)
    t = grid.t
    base = np.clip(1.0 - (t / R) ** 2, 0.0, None)
    samples = math.sqrt(sphere_area(N)) * base ** (alpha * R * R)
    signal = CylinderSignal(grid, N, 1.0, ((0, 1, samples.astype(complex)),))
    return unlift(signal, N, 1.0)


def compact_gap(alpha, R):
    """Exact Heisenberg excess of ``(1 - t^2/R^2)_+^m`` with ``m = alpha R^2``."""
    m = alpha * R * R
    return 3.0 / (8.0 * (2.0 * m + 1.5) * (2.0 * m - 1.0))


def gaussian_sharpness_scan(N, s, alpha, windows, grid=None):
    """Uncertainty ratios of the pulled-back compact Gaussians, one per window."""
    _check(N)

    def ratio(R):
        state = inverse_transform_T(compact_gaussian(N, alpha, R, grid), N, s)
        return uncertainty_report(state, N, s).ratio

    ratios = parallel_map(ratio, windows)
    for R, value in zip(windows, ratios):
        log.debug("sharpness scan alpha=%g R=%g: gap %.3e (closed form %.3e)",
                  alpha, R, value - HEISENBERG, compact_gap(alpha, R))
    return ratios


def axial_deficit(profile, N, s):
    """``sum int xi^2 |psi_hat|^2``: the deficit with the angular terms dropped."""
    spectrum, _ = _image(profile, N, s)
    return spectrum.quadratic_form(lambda xi, ell: xi * xi)
