import math
from unittest import mock

from django.test import SimpleTestCase

from hardylab import battery


class BatteryTestCase(SimpleTestCase):
    def test_selected_checks_pass(self):
        names = ["closed-form constants", "lift round trip"]
        results = battery.run_battery(names=names)
        self.assertEqual(sorted(r.name for r in results), sorted(names))
        for result in results:
            self.assertTrue(result.ok, result)

    def test_norm_checks_pass(self):
        names = ["layer-cake routes", "norm scaling", "Plancherel", "lift isometry"]
        for result in battery.run_battery(names=names):
            self.assertTrue(result.ok, result)

    def test_shortfall(self):
        report = mock.Mock(deficit=1.0, quad_error=0.0, hardy=2.0)
        self.assertEqual(battery._shortfall(report, 0.5, 1.0), 0.0)
        self.assertAlmostEqual(battery._shortfall(report, 1.0, 3.0),
                               (3.0 - 1.0 - 3e-3) / 2.0)

    def test_order_follows_seed(self):
        def order(seed):
            with mock.patch.object(battery, "CHECKS", [
                (name, mock.Mock(return_value=name)) for name, _ in battery.CHECKS
            ]):
                return battery.run_battery(seed=seed)

        self.assertEqual(order(5), order(5))
        self.assertEqual(sorted(order(5)), sorted(name for name, _ in battery.CHECKS))

    def test_names_are_unique(self):
        names = [name for name, _ in battery.CHECKS]
        self.assertEqual(len(names), len(set(names)))
        self.assertGreaterEqual(len(names), 20)

    def test_failing_check_is_reported(self):
        with mock.patch.object(battery, "CHECKS", []):
            @battery.check("broken")
            def broken():
                return 1.0 / 0.0

            results = battery.run_battery()
        self.assertEqual(len(results), 1)
        result = results[0]
        self.assertEqual(result.name, "broken")
        self.assertFalse(result.ok)
        self.assertTrue(math.isinf(result.value))

    def test_result_over_tolerance(self):
        with mock.patch.object(battery.log, "warning") as warning:
            result = battery._result("gap", 1e-3, 1e-6)
        self.assertFalse(result.ok)
        self.assertTrue(warning.called)
        self.assertEqual(result.as_dict()["tol"], 1e-6)
        self.assertTrue(battery._result("gap", 0.0, 1e-6).ok)
