import math
from unittest import mock

from django.test import SimpleTestCase

from hardylab import constants
from hardylab.exceptions import DomainError
from hardylab.specfun import Params, frac_hardy_constant_fourier


class KernelTestCase(SimpleTestCase):
    def test_routes_agree(self):
        for N, s, p in ((3, 0.5, 2), (4, 0.3, 3), (2, 0.25, 1.5)):
            params = Params(N, s, p)
            for r in (0.1, 0.5, 0.95):
                quad = constants.angular_kernel_phi(params, r, "quad")
                closed = constants.angular_kernel_phi(params, r, "hyp2f1")
                self.assertLessEqual(abs(quad - closed), 1e-9 * quad)

    def test_one_dimension(self):
        params = Params(1, 0.25, 2)
        value = constants.angular_kernel_phi(params, 0.5, "hyp2f1")
        self.assertAlmostEqual(value, 0.5**-1.5 + 1.5**-1.5, places=12)

    def test_bad_arguments(self):
        params = Params(3, 0.5, 2)
        with self.assertRaises(DomainError):
            constants.angular_kernel_phi(params, 1.0)
        with self.assertRaises(DomainError):
            constants.angular_kernel_phi(params, 0.5, "bessel")

    def test_divergent_moment(self):
        params = Params(3, 0.5, 2)
        self.assertEqual(constants.kernel_moment(params, -1.0, 1.0, 2.0)[0], math.inf)
        self.assertEqual(constants.kernel_moment(params, 1.0, 0.0, 2.0), (0.0, 0.0))


class SharpConstantTestCase(SimpleTestCase):
    def test_frac_matches_kappa_times_fourier(self):
        params = Params(3, 0.5, 2)
        value, err = constants.sharp_constant_frac(params)
        self.assertLess(err, 1e-4 * value)
        expected = constants.kappa_closed_form(3, 0.5) * frac_hardy_constant_fourier(
            params
        )
        self.assertLessEqual(abs(value - expected), 1e-3 * value)

    def test_kappa_closed_form(self):
        self.assertAlmostEqual(constants.kappa_closed_form(3, 0.5), 2 * math.pi**2)

    def test_conversion_kappa(self):
        kappa = constants.conversion_kappa(3, 0.5)
        self.assertLessEqual(abs(kappa - 2 * math.pi**2), 1e-3 * kappa)

    def test_frac_needs_s_below_one(self):
        with self.assertRaises(DomainError):
            constants.sharp_constant_frac(Params(3, 1, 2))

    def test_local(self):
        self.assertEqual(constants.sharp_constant_local(3, 2), 0.25)
        with self.assertRaises(DomainError):
            constants.sharp_constant_local(3, 3)

    def test_el_residual(self):
        for N, s, p in ((3, 0.4, 2), (1, 0.3, 1.5), (4, 0.3, 3)):
            result = constants.el_residual(Params(N, s, p))
            self.assertLessEqual(result.residual, 1e-3, (N, s, p))

    def test_conversion_kappa_four_dimensions(self):
        kappa = constants.conversion_kappa(4, 0.25)
        self.assertLessEqual(abs(kappa - 60.38477), 1e-3 * 60.38477)
        closed = constants.kappa_closed_form(4, 0.25)
        self.assertLessEqual(abs(kappa - closed), 1e-3 * closed)

    @mock.patch("hardylab.constants.cached")
    def test_sharp_constant_is_cached(self, cached_mock):
        cached_mock.return_value = (1.5, 0.0)
        self.assertEqual(constants.sharp_constant_frac(Params(3, 0.5, 2)), (1.5, 0.0))
        args, kwargs = cached_mock.call_args
        self.assertEqual(args[1], "frac-sharp:3:0.5:2.0")


class RemainderConstantTestCase(SimpleTestCase):
    def test_closed_forms(self):
        self.assertEqual(constants.remainder_constant_cp(2), 1.0)
        self.assertLessEqual(
            abs(constants.remainder_constant_cp(3) - (2 - math.sqrt(2))), 1e-10
        )
        self.assertLessEqual(abs(constants.remainder_constant_cp(4) - 1 / 3), 1e-10)

    def test_domains(self):
        with self.assertRaises(DomainError):
            constants.remainder_constant_cp(1.5)
        with self.assertRaises(DomainError):
            constants.remainder_constant_cp_star(2.0)
        with self.assertRaises(DomainError):
            constants.remainder_constant_nonnegative(2.5)

    def test_cp_star(self):
        self.assertEqual(constants.remainder_constant_cp_star(1.5), 0.375)
        self.assertAlmostEqual(constants.remainder_constant_cp_star(1.2), 1 / 6)
        self.assertAlmostEqual(constants.remainder_constant_nonnegative(1.5), 0.5)


class ConstantSetTestCase(SimpleTestCase):
    def test_local_set(self):
        result = constants.constant_set(Params(4, 1, 2))
        self.assertIsNone(result.frac_sharp)
        self.assertIsNone(result.kappa)
        self.assertIsNone(result.cp_star)
        self.assertEqual(result.cp, 1.0)
        self.assertAlmostEqual(result.fourier_sharp, 1.0)
        self.assertAlmostEqual(result.local_sharp, 1.0)
        self.assertEqual(result.as_dict()["params"], {"N": 4, "s": 1.0, "p": 2.0})

    def test_p_below_two(self):
        result = constants.constant_set(Params(3, 0.5, 1.5), with_kappa=False)
        self.assertIsNone(result.cp)
        self.assertEqual(result.cp_star, 0.375)
        self.assertIsNone(result.kappa)
        self.assertGreater(result.frac_sharp, 0)
