import math

import numpy as np
from django.test import SimpleTestCase

from hardylab import constants, deficits
from hardylab.deficits import WeightedKernelSpec
from hardylab.exceptions import DomainError
from hardylab.profiles import (
    GridSpec,
    Tail,
    make_extremizer,
    make_gaussian,
    make_truncated_extremizer,
    preset,
)
from hardylab.specfun import Params

PARAMS = Params(3, 0.5, 2)
GAUSSIAN_ENERGY = 4 * math.pi**3


def _window(params, half):
    return make_truncated_extremizer(params, 1.0, math.exp(-half), math.exp(half),
                                     1.0, GridSpec.default())


class KernelSpecTestCase(SimpleTestCase):
    def test_invalid(self):
        with self.assertRaises(DomainError):
            WeightedKernelSpec(PARAMS, "harmonic")
        with self.assertRaises(DomainError):
            WeightedKernelSpec(Params(3, 1, 2))

    def test_exponents(self):
        self.assertEqual(WeightedKernelSpec(PARAMS).exponents, (2.0, 3.0, 2.0))
        self.assertEqual(
            WeightedKernelSpec(PARAMS, deficits.SYMMETRIC_POWER).exponents,
            (0.0, 2.0, 2.0),
        )
        self.assertEqual(
            WeightedKernelSpec(Params(3, 0.5, 1.5), deficits.MINMAX).exponents,
            (0.0, 0.75 + 1.5, 2.0),
        )

    def test_kernel_symmetric(self):
        spec = WeightedKernelSpec(PARAMS)
        self.assertAlmostEqual(spec.kernel(0.5, 2.0), spec.kernel(2.0, 0.5))
        self.assertGreater(spec.kernel(1.0, 0.99), spec.kernel(1.0, 0.5))

    def test_weights(self):
        spec = WeightedKernelSpec(Params(3, 0.5, 1.5), deficits.MINMAX)
        gam = spec.params.gamma
        self.assertAlmostEqual(float(spec.weight(1.0, 2.0)),
                               2.0**-gam * 1.0 ** (-gam * 0.5))
        sym = WeightedKernelSpec(PARAMS, deficits.SYMMETRIC_POWER)
        self.assertAlmostEqual(float(sym.weight(2.0, 2.0)), 0.25)
        self.assertEqual(float(WeightedKernelSpec(PARAMS).weight(3.0, 4.0)), 1.0)

    def test_ground_state_ratio(self):
        v = deficits.ground_state_ratio(make_extremizer(PARAMS, 3.0), PARAMS)
        np.testing.assert_allclose(v.nodes, 3.0, rtol=1e-12)
        self.assertEqual(v.inner_tail, Tail(3.0, 0.0))


class GagliardoTestCase(SimpleTestCase):
    def test_gaussian(self):
        value, err = deficits.gagliardo_seminorm(make_gaussian(1.0), PARAMS)
        self.assertLessEqual(abs(value - GAUSSIAN_ENERGY), 1e-3 * GAUSSIAN_ENERGY)
        self.assertLess(err, 1e-2 * value)

    def test_homogeneous(self):
        g = make_gaussian(1.0)
        one, _ = deficits.gagliardo_seminorm(g, PARAMS)
        three, _ = deficits.gagliardo_seminorm(g.scaled(-3.0), PARAMS)
        self.assertLessEqual(abs(three - 9.0 * one), 1e-9 * three)

    def test_dilation(self):
        g = make_gaussian(1.0)
        one, _ = deficits.gagliardo_seminorm(g, PARAMS)
        wide, _ = deficits.gagliardo_seminorm(g.dilate(2.0), PARAMS)
        self.assertLessEqual(abs(wide - 4.0 * one), 1e-3 * wide)

    def test_sharp_cutoff_diverges(self):
        u = preset("sharp-truncated", PARAMS)
        self.assertEqual(deficits.gagliardo_seminorm(u, PARAMS), (math.inf, 0.0))

    def test_subadditivity(self):
        u = preset("sign-changing", PARAMS)
        for mode in (deficits.UNWEIGHTED, deficits.SYMMETRIC_POWER):
            gap, err = deficits.subadditivity_gap(u, PARAMS, mode)
            self.assertGreaterEqual(gap, -err)


class FractionalDeficitTestCase(SimpleTestCase):
    def test_gaussian(self):
        report = deficits.fractional_deficit(make_gaussian(1.0), PARAMS)
        expected = GAUSSIAN_ENERGY - 8 * math.pi**2
        self.assertLessEqual(abs(report.deficit - expected), 1e-3 * expected)
        self.assertLessEqual(abs(report.hardy - 2 * math.pi), 1e-6)
        self.assertLessEqual(abs(report.sharp_constant - 4 * math.pi),
                             1e-3 * 4 * math.pi)
        self.assertLessEqual(abs(report.remainder - report.deficit),
                             1e-3 * report.deficit)
        self.assertEqual(
            sorted(report.as_dict()),
            ["deficit", "energy", "hardy", "quad_error", "remainder",
             "sharp_constant"],
        )

    def test_extremizer(self):
        report = deficits.fractional_deficit(make_extremizer(PARAMS, 1.0), PARAMS,
                                             with_remainder=False)
        self.assertEqual(report.deficit, math.inf)
        self.assertIsNone(report.remainder)

    def test_widening_windows(self):
        ratios = []
        for half in (2.0, 4.0):
            report = deficits.fractional_deficit(_window(PARAMS, half), PARAMS,
                                                 with_remainder=False)
            self.assertGreaterEqual(report.deficit, -report.quad_error)
            ratios.append(report.deficit / report.hardy)
        self.assertLess(ratios[1], ratios[0])

    def test_small_p(self):
        params = Params(3, 0.5, 1.5)
        report = deficits.fractional_deficit(make_gaussian(1.0), params)
        self.assertGreaterEqual(report.deficit, -report.quad_error)
        self.assertGreater(report.remainder, 0)
        self.assertTrue(math.isfinite(report.remainder))

    def test_needs_fractional_order(self):
        with self.assertRaises(DomainError):
            deficits.fractional_deficit(make_gaussian(1.0), Params(3, 1, 2))

    def test_remainder_domains(self):
        with self.assertRaises(DomainError):
            deficits.weighted_remainder_eps(make_gaussian(1.0), Params(3, 0.5, 1.5))
        with self.assertRaises(DomainError):
            deficits.weighted_remainder_eps_w(make_gaussian(1.0), PARAMS)

    def test_remainder_floor(self):
        self.assertEqual(deficits.remainder_floor(PARAMS), 1.0)
        self.assertEqual(deficits.remainder_floor(Params(3, 0.5, 1.5)), 0.375)


class LocalDeficitTestCase(SimpleTestCase):
    def test_gaussian_moments(self):
        g = make_gaussian(1.0)
        energy = deficits.local_dirichlet_energy(g, 3, 2.0)
        self.assertLessEqual(abs(energy - 1.5 * math.pi**1.5), 1e-5 * energy)
        hardy = deficits.local_hardy_potential(g, 3, 2.0)
        self.assertLessEqual(abs(hardy - 2 * math.pi**1.5), 1e-6 * hardy)

    def test_gaussian_deficit(self):
        report = deficits.local_deficit(make_gaussian(1.0), 3, 2.0)
        self.assertLessEqual(abs(report.deficit - math.pi**1.5), 1e-4 * math.pi**1.5)
        self.assertEqual(report.sharp_constant, 0.25)
        # the p = 2 ground state identity
        self.assertLessEqual(abs(report.remainder - report.deficit),
                             1e-4 * report.deficit)

    def test_domain(self):
        with self.assertRaises(DomainError):
            deficits.local_deficit(make_gaussian(1.0), 3, 3.0)
        with self.assertRaises(DomainError):
            deficits.local_deficit(preset("sharp-truncated", PARAMS), 3, 2.0)

    def test_extremizer(self):
        report = deficits.local_deficit(make_extremizer(Params(3, 1, 2), 1.0), 3, 2.0,
                                        with_remainder=False)
        self.assertEqual(report.deficit, math.inf)


def _shortfall(report, floor):
    """``floor * remainder - deficit`` beyond the quadrature slack."""
    slack = report.quad_error + 1e-3 * floor * report.remainder
    return floor * report.remainder - report.deficit - slack


class RemainderInequalityTestCase(SimpleTestCase):
    def test_identity_on_truncated_extremizer(self):
        u = _window(PARAMS, 2.0)
        report = deficits.fractional_deficit(u, PARAMS)
        self.assertLessEqual(abs(report.remainder - report.deficit),
                             1e-3 * report.deficit)

    def test_large_p(self):
        for p in (2.5, 3.0):
            params = Params(3, 0.5, p)
            floor = constants.remainder_constant_cp(p)
            for u in (make_gaussian(1.0), _window(params, 3.0)):
                report = deficits.fractional_deficit(u, params)
                self.assertGreater(report.remainder, 0)
                self.assertLessEqual(_shortfall(report, floor), 0.0, (p, u.label))

    def test_small_p(self):
        for p in (1.3, 1.5, 1.8):
            params = Params(3, 0.5, p)
            cp_star = constants.remainder_constant_cp_star(p)
            report = deficits.fractional_deficit(make_gaussian(1.0), params)
            self.assertLessEqual(_shortfall(report, cp_star), 0.0, p)
            nonnegative = constants.remainder_constant_nonnegative(p)
            self.assertLessEqual(_shortfall(report, nonnegative), 0.0, p)
            report = deficits.fractional_deficit(preset("sign-changing", params),
                                                 params)
            self.assertLessEqual(_shortfall(report, cp_star), 0.0, p)

    def test_local(self):
        for N, p in ((3, 2.5), (4, 3.0)):
            floor = constants.remainder_constant_cp(p)
            report = deficits.local_deficit(make_gaussian(1.0), N, p)
            self.assertGreater(report.remainder, 0)
            self.assertLessEqual(_shortfall(report, floor), 0.0, (N, p))

    def test_subadditivity_minmax(self):
        params = Params(3, 0.5, 1.5)
        gap, err = deficits.subadditivity_gap(preset("sign-changing", params),
                                              params, deficits.MINMAX)
        self.assertGreater(gap, err)
