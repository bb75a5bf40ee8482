import io
import json
import math
import os
import tempfile
from unittest import mock

from django.test import SimpleTestCase

from hardylab import cli, config
from hardylab.battery import CheckResult
from hardylab.exceptions import ToleranceError
from hardylab.stability import ScanRow, ScanTable


class CliTestCase(SimpleTestCase):
    def run_cli(self, *argv):
        stdout, stderr = io.StringIO(), io.StringIO()
        with mock.patch("sys.stdout", stdout), mock.patch("sys.stderr", stderr):
            code = cli.run(list(argv))
        return code, stdout.getvalue(), stderr.getvalue()

    def test_constants(self):
        code, out, _ = self.run_cli("constants", "--N", "4", "--s", "1", "--p", "2",
                                    "--no-kappa")
        self.assertEqual(code, cli.EXIT_OK)
        doc = json.loads(out)
        self.assertAlmostEqual(doc["fourier_sharp"], 1.0)
        self.assertAlmostEqual(doc["local_sharp"], 1.0)
        self.assertIsNone(doc["frac_sharp"])
        self.assertEqual(doc["config"]["subcommand"], "constants")
        self.assertEqual(doc["config"]["N"], 4)
        self.assertTrue(doc["config"]["options"]["no_kappa"])

    def test_symbol_csv(self):
        code, out, _ = self.run_cli("symbol", "--N", "4", "--xi-count", "11",
                                    "--ell-max", "1")
        self.assertEqual(code, cli.EXIT_OK)
        lines = out.splitlines()
        self.assertTrue(lines[0].startswith("# config: "))
        self.assertEqual(json.loads(lines[0][len("# config: "):])["N"], 4)
        self.assertEqual(lines[1], "xi,ell,P_s,m")
        self.assertEqual(len(lines), 2 + 22)
        self.assertEqual(lines[2].split(",")[:2], ["0.0", "0"])

    def test_symbol_as_json(self):
        code, out, _ = self.run_cli("symbol", "--N", "4", "--xi-count", "3",
                                    "--ell-max", "0", "--format", "json")
        self.assertEqual(code, cli.EXIT_OK)
        rows = json.loads(out)["rows"]
        self.assertEqual([r["ell"] for r in rows], [0, 0, 0])

    def test_json_only_payload_has_no_csv(self):
        code, _, err = self.run_cli("constants", "--no-kappa", "--format", "csv")
        self.assertEqual(code, cli.EXIT_USAGE)
        self.assertIn("no CSV form", err)

    def test_usage_errors(self):
        self.assertEqual(self.run_cli("nope")[0], cli.EXIT_USAGE)
        self.assertEqual(self.run_cli("constants", "--s", "0")[0], cli.EXIT_USAGE)
        self.assertEqual(self.run_cli("constants", "--tol", "-1")[0], cli.EXIT_USAGE)
        self.assertEqual(self.run_cli("uncertainty", "--N", "3")[0], cli.EXIT_USAGE)
        self.assertEqual(
            self.run_cli("constants", "--preset", "gaussian", "--profile", "x.json")[0],
            cli.EXIT_USAGE,
        )

    def test_help_and_version(self):
        self.assertEqual(self.run_cli("--help")[0], cli.EXIT_OK)
        code, out, _ = self.run_cli("--version")
        self.assertEqual(code, cli.EXIT_OK)

    def test_bad_profile_file(self):
        fd, path = tempfile.mkstemp(suffix=".json")
        self.addCleanup(os.remove, path)
        with os.fdopen(fd, "w") as fp:
            fp.write('{"kind": "gaussian"')
        code, _, err = self.run_cli("deficit", "--profile", path)
        self.assertEqual(code, cli.EXIT_USAGE)
        self.assertIn("line 1", err)
        code, _, _ = self.run_cli("deficit", "--profile", path + ".missing")
        self.assertEqual(code, cli.EXIT_USAGE)

    def test_out_file(self):
        fd, path = tempfile.mkstemp(suffix=".csv")
        os.close(fd)
        self.addCleanup(os.remove, path)
        code, out, _ = self.run_cli("transform", "--N", "4", "--s", "1", "--out", path)
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(out, "")
        with open(path) as fp:
            lines = fp.read().splitlines()
        self.assertEqual(lines[1], "t,r,value")
        self.assertEqual(len(lines), 2 + config.GRID_N)

    def test_tolerance_restored(self):
        saved = config.QUAD_TOL
        seen = []

        def handler(cfg):
            seen.append(config.QUAD_TOL)
            return {}, cli.EXIT_OK

        with mock.patch.dict(cli.HANDLERS, {"constants": (handler, "json")}):
            self.run_cli("constants", "--tol", "1e-5")
        self.assertEqual(seen, [1e-5])
        self.assertEqual(config.QUAD_TOL, saved)

    @mock.patch("hardylab.uncertainty.uncertainty_report",
                side_effect=ToleranceError("uncertainty ratio gap", 0.1, 1e-6))
    def test_tolerance_failure(self, report_mock):
        code, _, err = self.run_cli("uncertainty", "--N", "4", "--preset", "gaussian")
        self.assertEqual(code, cli.EXIT_TOLERANCE)
        self.assertIn("uncertainty ratio gap", err)

    def test_uncertainty_equality(self):
        code, out, _ = self.run_cli("uncertainty", "--N", "4", "--preset", "cyl-gauss")
        self.assertEqual(code, cli.EXIT_OK)
        doc = json.loads(out)
        self.assertLessEqual(abs(doc["ratio"] - 0.25), 1e-6)
        self.assertEqual(doc["config"]["options"]["alpha"], 1.0)

    @mock.patch("hardylab.uncertainty.gaussian_sharpness_scan",
                return_value=[0.3, 0.26])
    def test_uncertainty_scan(self, scan_mock):
        code, out, _ = self.run_cli("uncertainty", "--N", "4", "--scan", "--windows",
                                    "4,8", "--format", "csv")
        self.assertEqual(code, cli.EXIT_OK)
        lines = out.splitlines()
        self.assertEqual(lines[1], "R,alpha,ratio,gap")
        self.assertEqual(lines[2].split(",")[:3], ["4.0", "1.0", "0.3"])
        self.assertEqual(scan_mock.call_args[0][3], [4.0, 8.0])

    def test_bad_windows(self):
        self.assertEqual(self.run_cli("uncertainty", "--windows", "4,x")[0],
                         cli.EXIT_USAGE)

    @mock.patch("hardylab.stability.family_scan")
    def test_stability_scan(self, scan_mock):
        scan_mock.return_value = ScanTable(
            "widening-window", "frac_p_ge_2", [ScanRow(4.0, None, "boom")]
        )
        code, out, _ = self.run_cli("stability-scan", "--values", "4")
        self.assertEqual(code, cli.EXIT_OK)
        lines = out.splitlines()
        self.assertEqual(lines[1].split(","), ["param", "deficit", "hardy", "distance",
                                               "minimizer_a", "exponent", "ratio",
                                               "quad_error"])
        self.assertEqual(lines[2].split(",")[-1], "boom")
        self.assertEqual(lines[-1], "# floor: inf")
        args = scan_mock.call_args[0]
        self.assertEqual((args[0], args[1], args[3]),
                         ("widening-window", [4.0], "frac_p_ge_2"))

    @mock.patch("hardylab.battery.run_battery")
    def test_battery_failure(self, battery_mock):
        battery_mock.return_value = [
            CheckResult("good", 0.0, 1e-6, True),
            CheckResult("bad", math.inf, 1e-6, False),
        ]
        code, out, _ = self.run_cli("battery", "--seed", "3")
        self.assertEqual(code, cli.EXIT_TOLERANCE)
        doc = json.loads(out)
        self.assertEqual(doc["failed"], ["bad"])
        self.assertEqual(doc["checks"][1]["value"], "inf")
        battery_mock.assert_called_with(seed=3)

    def test_json_value(self):
        self.assertEqual(cli._json_value(float("inf")), "inf")
        self.assertEqual(cli._json_value({"a": [float("-inf"), 1]}),
                         {"a": ["-inf", 1]})

    def test_preset_defaults_to_gaussian(self):
        code, out, _ = self.run_cli("constants", "--no-kappa")
        self.assertEqual(code, cli.EXIT_OK)
        self.assertEqual(json.loads(out)["config"]["preset"], "gaussian")

    def _spectral_verify(self, kappa):
        frac = mock.Mock(deficit=3.0)
        with mock.patch("hardylab.cylinder.lift"), \
                mock.patch("hardylab.cylinder.apply_multiplier"), \
                mock.patch("hardylab.cylinder.spectral_deficit_fractional",
                           return_value=2.0), \
                mock.patch("hardylab.cylinder.spectral_deficit_local",
                           return_value=2.0), \
                mock.patch("hardylab.deficits.fractional_deficit",
                           return_value=frac), \
                mock.patch("hardylab.constants.kappa_closed_form",
                           return_value=kappa):
            return self.run_cli("spectral-verify")

    def test_spectral_verify_kappa_oracle(self):
        code, out, _ = self.run_cli_json(self._spectral_verify(1.5))
        self.assertEqual(code, cli.EXIT_OK)
        self.assertAlmostEqual(out["rel_errors"]["kappa_oracle"], 0.0)
        code, out, _ = self.run_cli_json(self._spectral_verify(1.6))
        self.assertEqual(code, cli.EXIT_TOLERANCE)
        self.assertGreater(out["rel_errors"]["kappa_oracle"], config.ORACLE_TOL)

    def run_cli_json(self, result):
        code, out, err = result
        return code, json.loads(out), err
