import json
import math
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase

from hardylab import profiles
from hardylab.exceptions import DomainError
from hardylab.profiles import GridSpec, ProfileSpecError, Tail
from hardylab.specfun import Params

GRID = GridSpec(-10.0, 10.0, 401)
PARAMS = Params(3, 0.5, 2)


class GridSpecTestCase(SimpleTestCase):
    def test_spacing(self):
        self.assertAlmostEqual(GRID.dt, 0.05)
        self.assertEqual(GRID.t[0], -10.0)
        self.assertAlmostEqual(GRID.t[-1], 10.0)
        self.assertEqual(GRID.refined().n, 801)
        self.assertEqual(GRID.shifted(1.0).t_max, 11.0)

    def test_invalid(self):
        with self.assertRaises(DomainError):
            GridSpec(1.0, 1.0, 100)
        with self.assertRaises(DomainError):
            GridSpec(-1.0, 1.0, 8)


class ProfileTestCase(SimpleTestCase):
    def test_extremizer_tails(self):
        u = profiles.make_extremizer(PARAMS, 2.0, GRID)
        self.assertEqual(u.inner_tail, Tail(2.0, -1.0))
        self.assertAlmostEqual(u.evaluate(math.exp(-15.0)) / math.exp(15.0), 2.0)
        self.assertAlmostEqual(u.evaluate(1.0), 2.0)
        self.assertFalse(u.is_hardy_integrable(3, 0.5, 2))

    def test_gaussian(self):
        u = profiles.make_gaussian(1.0, GRID)
        for r in (0.3, 1.0, 1.7):
            self.assertAlmostEqual(u.evaluate(r), math.exp(-r * r / 2), places=5)
            self.assertAlmostEqual(u.derivative(r), -r * math.exp(-r * r / 2),
                                   places=3)
        self.assertEqual(u.evaluate(math.exp(-20.0)), 1.0)
        self.assertTrue(u.is_hardy_integrable(3, 0.5, 2))

    def test_sharp_truncation(self):
        u = profiles.make_truncated_extremizer(PARAMS, 1.0, math.exp(-2), math.exp(2),
                                               grid=GRID)
        self.assertTrue(u.is_sharp)
        self.assertEqual(u.evaluate(math.exp(2.5)), 0.0)
        self.assertEqual(u.evaluate(math.exp(-2.5)), 0.0)
        self.assertAlmostEqual(u.evaluate(1.0), 1.0)
        self.assertTrue(u.is_hardy_integrable(3, 0.5, 2))

    def test_ramped_truncation(self):
        u = profiles.make_truncated_extremizer(PARAMS, 1.0, math.exp(-4), math.exp(4),
                                               1.0, GRID)
        self.assertFalse(u.is_sharp)
        self.assertAlmostEqual(u.evaluate(math.exp(-4.0)), 0.0)
        self.assertAlmostEqual(u.evaluate(1.0), 1.0)

    def test_truncation_errors(self):
        with self.assertRaises(DomainError):
            profiles.make_truncated_extremizer(PARAMS, 1.0, 1.0, 2.0, 1.0, GRID)
        with self.assertRaises(DomainError):
            profiles.make_truncated_extremizer(PARAMS, 1.0, 1.0, math.exp(12), 0.0,
                                               GRID)

    def test_scaled_and_plus(self):
        g = profiles.make_gaussian(1.0, GRID)
        w = g.plus(g.scaled(-3.0))
        np.testing.assert_allclose(w.nodes, -2.0 * g.nodes)
        self.assertEqual(w.inner_tail, Tail(-2.0, 0.0))

    def test_plus_keeps_dominant_tail(self):
        e = profiles.make_extremizer(PARAMS, 1.0, GRID)
        g = profiles.make_gaussian(1.0, GRID)
        self.assertEqual(e.plus(g).inner_tail, e.inner_tail)
        self.assertEqual(e.plus(g).outer_tail, e.outer_tail)
        with self.assertRaises(DomainError):
            g.plus(profiles.make_gaussian(1.0, GridSpec(-10.0, 10.0, 201)))

    def test_dilate(self):
        g = profiles.make_gaussian(1.0, GRID)
        d = g.dilate(2.0)
        self.assertAlmostEqual(d.evaluate(2.0), g.evaluate(1.0), places=5)
        e = profiles.make_extremizer(PARAMS, 1.0, GRID).dilate(2.0)
        self.assertAlmostEqual(e.inner_tail.coeff, 2.0)
        with self.assertRaises(DomainError):
            g.dilate(0.0)

    def test_parts(self):
        u = profiles.preset("sign-changing", PARAMS, GRID)
        plus, minus = u.positive_part(), u.negative_part()
        np.testing.assert_allclose(plus.values - minus.values, u.values, atol=1e-14)
        self.assertTrue(np.all(plus.values >= 0))
        self.assertTrue(np.all(minus.values >= 0))

    def test_sign_power(self):
        u = profiles.preset("sign-changing", PARAMS, GRID)
        v = u.sign_power(2.0)
        np.testing.assert_allclose(v.nodes, np.sign(u.nodes) * u.nodes**2)
        self.assertEqual(v.inner_tail, Tail(-1.0, 0.0))

    def test_from_samples(self):
        g = profiles.make_gaussian(1.0, GRID)
        h = profiles.RadialProfile.from_samples(GRID, g.nodes)
        self.assertAlmostEqual(h.evaluate(1.0), g.evaluate(1.0), places=12)
        with self.assertRaises(DomainError):
            profiles.RadialProfile(GRID, np.zeros(3), np.zeros(3))

    def test_cylinder_gaussian(self):
        u = profiles.make_cylinder_gaussian(4, 0.5, 1.0, 1.0, GRID)
        self.assertAlmostEqual(u.evaluate(1.0), 1.0)
        self.assertAlmostEqual(u.evaluate(math.e), math.exp(-1.5 - 1.0))
        with self.assertRaises(DomainError):
            profiles.make_cylinder_gaussian(2, 0.5, 1.0, 1.0, GRID)


class PresetTestCase(SimpleTestCase):
    def test_all_presets(self):
        for name in profiles.PRESETS:
            u = profiles.preset(name, PARAMS, GRID)
            self.assertEqual(u.grid, GRID)

    def test_unknown(self):
        with self.assertRaises(DomainError):
            profiles.preset("square", PARAMS, GRID)


class ProfileSpecTestCase(SimpleTestCase):
    def _load(self, text):
        fd, path = tempfile.mkstemp(suffix=".json")
        self.addCleanup(os.remove, path)
        with os.fdopen(fd, "w") as fp:
            fp.write(text)
        return profiles.load_profile(path, PARAMS)

    def test_load(self):
        spec = {
            "kind": "truncated_extremizer",
            "params": {"a": 2.0, "r_in": 0.1, "r_out": 10.0, "ramp": 0.5},
            "grid": {"t_min": -8, "t_max": 8, "n": 257},
        }
        u = self._load(json.dumps(spec))
        self.assertEqual(u.grid, GridSpec(-8.0, 8.0, 257))
        self.assertAlmostEqual(u.evaluate(1.0), 2.0)

    def test_bad_json(self):
        with self.assertRaisesRegex(ProfileSpecError, "line 1"):
            self._load("{kind: gaussian}")

    def test_unknown_kind(self):
        with self.assertRaisesRegex(ProfileSpecError, "field 'kind'"):
            profiles.profile_from_spec({"kind": "box"}, PARAMS)

    def test_missing_field(self):
        with self.assertRaisesRegex(ProfileSpecError, "missing sigma"):
            profiles.profile_from_spec({"kind": "gaussian", "params": {}}, PARAMS)

    def test_bad_value(self):
        with self.assertRaisesRegex(ProfileSpecError, "field 'params'"):
            profiles.profile_from_spec(
                {"kind": "gaussian", "params": {"sigma": "wide"}}, PARAMS
            )

    def test_bad_grid(self):
        with self.assertRaisesRegex(ProfileSpecError, "field 'grid'"):
            profiles.profile_from_spec(
                {"kind": "gaussian", "params": {"sigma": 1}, "grid": {"n": 10}},
                PARAMS,
            )
