"""
Emden-Fowler lifts to the cylinder ``R x S^{N-1}`` and the spectral side.

A radial profile is lifted to ``phi(t) = sqrt|S| e^{(N - 2 alpha) t / 2} u(e^t)``
on the uniform ``t`` grid. The axis transform is the unitary discrete Fourier
transform with ``dt`` quadrature weights,

    phi_hat(xi_k) = dt / sqrt(2 pi) * sum_j phi(t_j) e^{-i xi_k t_j},

so ``sum |phi_hat|^2 dxi == sum |phi|^2 dt`` holds exactly in the discrete
model and every identity between the spectral deficits is algebraic.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Tuple

import numpy as np

from hardylab import config
from hardylab.exceptions import DomainError
from hardylab.profiles import RadialProfile, Tail
from hardylab.specfun import (
    Params,
    constant_K,
    cylinder_eigenvalue,
    multiplier_m,
    sphere_area,
    symbol_P,
    symbol_sup,
)

log = logging.getLogger("hardylab.cylinder")

FORWARD = "forward"
INVERSE = "inverse"


def _mode_key(mode):
    return mode[0], mode[1]


@dataclass(frozen=True, eq=False)
class CylinderSignal(object):
    """
    Modes ``(ell, m, samples)`` on ``grid``. The radial mode ``(0, 1)``
    carries the factor ``sqrt|S^{N-1}|`` so that the quadratic sum of all
    modes is the weighted Euclidean norm of the lifted function.
    """

    grid: object
    N: int
    weight: float
    modes: Tuple = ()
    leak: float = 0.0

    def __post_init__(self):
        seen = set()
        for ell, m, samples in self.modes:
            if ell < 0 or not 1 <= m:
                raise DomainError("invalid mode (%s, %s)" % (ell, m))
            if (ell, m) in seen:
                raise DomainError("duplicate mode (%s, %s)" % (ell, m))
            if np.shape(samples) != (self.grid.n,):
                raise DomainError("mode samples do not match the grid")
            seen.add((ell, m))

    def mode(self, ell, m=1):
        for e, k, samples in self.modes:
            if (e, k) == (ell, m):
                return samples
        return np.zeros(self.grid.n, dtype=complex)

    def with_mode(self, ell, m, samples):
        """A copy with the ``(ell, m)`` mode replaced by ``samples``."""
        samples = np.asarray(samples, dtype=complex)
        kept = tuple(md for md in self.modes if _mode_key(md) != (ell, m))
        return replace(self, modes=kept + ((ell, m, samples),))

    @property
    def is_radial(self):
        return all(
            ell == 0 or not np.any(samples) for ell, _, samples in self.modes
        )

    def norm_squared(self):
        return self.grid.dt * sum(
            float(np.sum(np.abs(samples) ** 2)) for _, _, samples in self.modes
        )

    def spectrum(self):
        return spectrum_of(self)


@dataclass(frozen=True, eq=False)
class ModeSpectrum(object):
    grid: object
    N: int
    weight: float
    xi_grid: np.ndarray = field(repr=False)
    coefficients: Tuple = ()

    @property
    def dxi(self):
        return 2.0 * math.pi / (self.grid.n * self.grid.dt)

    def norm_squared(self):
        return self.dxi * sum(
            float(np.sum(np.abs(c) ** 2)) for _, _, c in self.coefficients
        )

    def quadratic_form(self, symbol):
        """``sum_modes sum_k symbol(xi_k, ell) |phi_hat|^2 dxi``."""
        total = 0.0
        for ell, _, coeffs in self.coefficients:
            total += float(np.sum(symbol(self.xi_grid, ell) * np.abs(coeffs) ** 2))
        return self.dxi * total

    def signal(self):
        return signal_of(self)


def _phase(grid):
    xi = 2.0 * math.pi * np.fft.fftfreq(grid.n, d=grid.dt)
    return xi, np.exp(-1j * xi * grid.t_min)


def spectrum_of(signal):
    xi, phase = _phase(signal.grid)
    scale = signal.grid.dt / math.sqrt(2.0 * math.pi)
    coefficients = tuple(
        (ell, m, scale * phase * np.fft.fft(samples))
        for ell, m, samples in signal.modes
    )
    return ModeSpectrum(signal.grid, signal.N, signal.weight, xi, coefficients)


def signal_of(spectrum):
    _, phase = _phase(spectrum.grid)
    scale = math.sqrt(2.0 * math.pi) / spectrum.grid.dt
    modes = tuple(
        (ell, m, scale * np.fft.ifft(coeffs / phase))
        for ell, m, coeffs in spectrum.coefficients
    )
    return CylinderSignal(spectrum.grid, spectrum.N, spectrum.weight, modes)


def _check_N(N):
    if N < 3:
        raise DomainError("cylinder operations need N >= 3, got %s" % N)


def _lift_rate(N, alpha):
    return (N - 2.0 * alpha) / 2.0


def _tail_mass(tail, rate, edge, upper):
    """``int |sqrt|S| c e^{(rho + rate) t}|^2`` beyond ``edge``, without ``|S|``."""
    if tail.is_zero:
        return 0.0
    k = 2.0 * (tail.exponent + rate)
    if (upper and k >= 0) or (not upper and k <= 0):
        return config.INF
    return tail.coeff**2 * math.exp(k * edge) / abs(k)


def lift(profile, N, alpha_weight):
    """The radial mode of ``Phi_alpha u``; warns when mass leaves the window."""
    _check_N(N)
    grid = profile.grid
    rate = _lift_rate(N, alpha_weight)
    S = sphere_area(N)
    samples = math.sqrt(S) * np.exp(rate * grid.t) * profile.at(grid.t)
    signal = CylinderSignal(grid, N, alpha_weight,
                            ((0, 1, samples.astype(complex)),))
    if profile.is_sharp:
        return signal
    outside = S * (
        _tail_mass(profile.inner_tail, rate, grid.t_min, False)
        + _tail_mass(profile.outer_tail, rate, grid.t_max, True)
    )
    inside = signal.norm_squared()
    total = inside + outside
    leak = outside / total if total > 0 else 0.0
    if leak > config.LEAK_TOL:
        log.warning("lift of %s leaves %.3e of its mass outside the window",
                    profile.label, leak)
    return replace(signal, leak=leak)


def unlift(signal, N, alpha_weight):
    """``u(r) = r^{-(N - 2 alpha)/2} phi(ln r) / sqrt|S|`` for radial signals."""
    _check_N(N)
    if not signal.is_radial:
        raise DomainError("unlift needs a radial signal; found modes with ell > 0")
    samples = signal.mode(0, 1)
    if np.linalg.norm(samples.imag) > 1e-9 * np.linalg.norm(samples.real):
        log.warning("discarding imaginary part of a radial signal")
    grid = signal.grid
    values = samples.real * np.exp(-_lift_rate(N, alpha_weight) * grid.t)
    return RadialProfile.from_samples(
        grid, values / math.sqrt(sphere_area(N)), "unlift(alpha=%g)" % alpha_weight
    )


def _multiplier_values(N, s, xi, ell):
    return multiplier_m(Params(N, s, 2.0), xi, ell)


def apply_multiplier(spectrum, N, s, direction=FORWARD):
    """Multiply every coefficient by ``m(xi, ell)`` or by its reciprocal."""
    _check_N(N)
    if direction not in (FORWARD, INVERSE):
        raise DomainError("direction must be %r or %r" % (FORWARD, INVERSE))
    coefficients = []
    for ell, m, coeffs in spectrum.coefficients:
        factor = _multiplier_values(N, s, spectrum.xi_grid, ell)
        if direction == INVERSE:
            factor = 1.0 / factor
        coefficients.append((ell, m, coeffs * factor))
    return replace(spectrum, coefficients=tuple(coefficients))


def _lifted_extremizer_amplitude(profile, N, s):
    """``a`` when ``profile`` is exactly ``a r^{-(N-2s)/2}``, else ``None``."""
    if profile.is_sharp:
        return None
    rate = -_lift_rate(N, s)
    inner, outer = profile.inner_tail, profile.outer_tail
    if inner.is_zero or inner != outer or inner.exponent != rate:
        return None
    expected = inner.coeff * np.exp(rate * profile.grid.t)
    if np.max(np.abs(profile.nodes - expected)) > 1e-12 * np.max(np.abs(expected)):
        return None
    return inner.coeff


def transform_T(profile, N, s):
    """
    ``T = Phi_1^{-1} M_s Phi_s``. Exact extremizers ``a r^{-(N-2s)/2}`` map to
    ``K a r^{-(N-2)/2}`` through the constant-mode identity; everything else
    goes through the windowed transform.
    """
    _check_N(N)
    a = _lifted_extremizer_amplitude(profile, N, s)
    if a is not None:
        amp = constant_K(Params(N, s, 2.0)) * a
        rate = -_lift_rate(N, 1.0)
        nodes = amp * np.exp(rate * profile.grid.t)
        return RadialProfile(profile.grid, nodes, rate * nodes, Tail(amp, rate),
                             Tail(amp, rate), "T[%s]" % profile.label)
    spectrum = apply_multiplier(lift(profile, N, s).spectrum(), N, s, FORWARD)
    out = unlift(spectrum.signal(), N, 1.0)
    return replace(out, label="T[%s]" % profile.label)


def inverse_transform_T(profile, N, s):
    _check_N(N)
    spectrum = lift(profile, N, 1.0).spectrum()
    amp = inverse_amplification(spectrum, N, s)
    if amp > 10.0:
        log.warning("inverse transform of %s amplifies by %.3g", profile.label, amp)
    signal = apply_multiplier(spectrum, N, s, INVERSE).signal()
    out = unlift(signal, N, s)
    return replace(out, label="T^-1[%s]" % profile.label)


def spectral_deficit_local(signal, N):
    """``sum int (xi^2 + mu_ell) |phi_hat|^2``; the local ``p = 2`` deficit."""
    _check_N(N)
    return signal.spectrum().quadratic_form(
        lambda xi, ell: xi * xi + cylinder_eigenvalue(N, ell)
    )


def spectral_deficit_fractional(signal, N, s):
    """``sum int P_s(xi, ell) |phi_hat|^2``; the Fourier-form ``delta_{s,2}``."""
    _check_N(N)
    params = Params(N, s, 2.0)
    return signal.spectrum().quadratic_form(
        lambda xi, ell: symbol_P(params, xi, ell)
    )


def inverse_amplification(spectrum, N, s):
    """Energy-weighted growth factor of the inverse multiplier."""
    energy = spectrum.norm_squared()
    if energy == 0:
        return 1.0
    amplified = spectrum.quadratic_form(
        lambda xi, ell: _multiplier_values(N, s, xi, ell) ** -2.0
    )
    return math.sqrt(amplified / energy)


def boundedness_witness(profile, N, s, ells=range(0, 9)):
    """
    ``(ratio, bound)``: the weighted-norm ratio ``||T u|| / ||u||`` and the
    largest sampled multiplier value, which must dominate it.
    """
    signal = lift(profile, N, s)
    image = apply_multiplier(signal.spectrum(), N, s)
    ratio = math.sqrt(image.norm_squared() / signal.norm_squared())
    bound = symbol_sup(Params(N, s, 2.0), image.xi_grid, ells)
    return ratio, bound


def smoothing_witness(signal, N, s):
    """
    ``(lhs, rhs)`` with ``lhs`` the discrete ``H^{1-s}`` norm of ``M_s phi``
    and ``rhs = C ||phi||`` for ``C`` the sampled sup of
    ``(1 + xi^2 + mu_ell)^{(1-s)/2} m(xi, ell)`` over the occupied modes.
    """
    spectrum = signal.spectrum()
    image = apply_multiplier(spectrum, N, s)

    def sobolev(xi, ell):
        return (1.0 + xi * xi + cylinder_eigenvalue(N, ell)) ** (1.0 - s)

    lhs = math.sqrt(image.quadratic_form(sobolev))
    xi = spectrum.xi_grid
    C = max(
        (
            float(np.max(np.sqrt(sobolev(xi, ell))
                         * _multiplier_values(N, s, xi, ell)))
            for ell, _, _ in spectrum.coefficients
        ),
        default=0.0,
    )
    return lhs, C * math.sqrt(spectrum.norm_squared())
