"""
Command-line front end.

Every subcommand writes either one JSON document or a CSV table. The run
configuration is echoed into each output, under a ``"config"`` key for JSON
and as a ``# config:`` comment line for CSV. Exit codes: 0 success,
1 numerical tolerance failure, 2 usage error.
"""
import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from hardylab import __version__, config
from hardylab.exceptions import DomainError, ToleranceError
from hardylab.profiles import PRESETS, GridSpec, ProfileSpecError, load_profile, preset
from hardylab.specfun import Params

log = logging.getLogger("hardylab.cli")

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_USAGE = 2

DEFAULT_PRESET = "gaussian"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig(object):
    subcommand: str
    N: int
    s: float
    p: float
    preset: str
    profile: str
    tol: float
    grid_n: int
    t_min: float
    t_max: float
    format: str
    out: str
    seed: int
    options: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args):
        common = {name: getattr(args, name) for name in cls.__dataclass_fields__
                  if name != "options"}
        if common["preset"] is None:
            common["preset"] = "" if common["profile"] else DEFAULT_PRESET
        options = {k: v for k, v in sorted(vars(args).items()) if k not in common}
        return cls(options=options, **common)

    @property
    def params(self):
        return Params(self.N, self.s, self.p)

    @property
    def grid(self):
        return GridSpec(self.t_min, self.t_max, self.grid_n)

    def validate(self):
        if not self.tol > 0:
            raise DomainError("--tol must be positive")
        return self.params, self.grid

    def as_dict(self):
        return asdict(self)


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma separated numbers: %r" % text)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=int, default=3, help="dimension (default: 3)")
    common.add_argument("--s", type=float, default=0.5,
                        help="fractional order in (0, 1] (default: 0.5)")
    common.add_argument("--p", type=float, default=2.0,
                        help="integrability exponent (default: 2)")
    source = common.add_mutually_exclusive_group()
    source.add_argument("--preset", default=None, choices=PRESETS,
                        help="named profile (default: gaussian)")
    source.add_argument("--profile", default="",
                        help="path to a JSON profile description")
    common.add_argument("--tol", type=float, default=config.QUAD_TOL,
                        help="relative quadrature tolerance (default: %(default)s)")
    common.add_argument("--grid-n", type=int, default=config.GRID_N,
                        help="grid points (default: %(default)s)")
    common.add_argument("--t-min", type=float, default=config.T_MIN,
                        help="lower log-radius (default: %(default)s)")
    common.add_argument("--t-max", type=float, default=config.T_MAX,
                        help="upper log-radius (default: %(default)s)")
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format (default: per subcommand)")
    common.add_argument("--out", default="", help="output path (default: stdout)")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for the battery order (default: 0)")

    parser = argparse.ArgumentParser(
        prog="hardylab", description="Fractional Hardy inequality laboratory."
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", metavar="subcommand")
    sub.required = True

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    p = add("constants", "sharp and remainder constants (JSON)")
    p.add_argument("--no-kappa", action="store_true",
                   help="skip the Gaussian kappa quadrature")
    p = add("symbol", "spectral symbol and multiplier samples (CSV)")
    p.add_argument("--xi-max", type=float, default=10.0, help="default: 10")
    p.add_argument("--xi-count", type=int, default=101, help="default: 101")
    p.add_argument("--ell-max", type=int, default=4, help="default: 4")
    add("deficit", "Hardy deficit and remainder of a profile (JSON)")
    p = add("distance", "distance to the extremal ray (JSON)")
    p.add_argument("--pullback", action="store_true",
                   help="use the transported p = 2 distance")
    p = add("transform", "apply T or its inverse (CSV)")
    p.add_argument("--inverse", action="store_true", help="apply T^-1")
    add("spectral-verify", "spectral identities and the kappa oracle (JSON)")
    p = add("uncertainty", "Hardy-Heisenberg ratio (JSON, CSV with --scan)")
    p.add_argument("--alpha", type=float, default=1.0,
                   help="Gaussian width on the cylinder (default: 1)")
    p.add_argument("--scan", action="store_true",
                   help="scan compact Gaussian approximants over --windows")
    p.add_argument("--windows", type=_floats, default=[4.0, 8.0, 12.0],
                   help="comma separated windows (default: 4,8,12)")
    p = add("stability-scan", "stability ratios along a family (CSV)")
    p.add_argument("--family", default="widening-window",
                   choices=("widening-window", "perturbed", "gaussian"))
    p.add_argument("--values", type=_floats, default=[4.0, 8.0, 12.0],
                   help="comma separated family parameters (default: 4,8,12)")
    p.add_argument("--regime", default=None,
                   choices=("frac_p_ge_2", "frac_p_lt_2", "local", "pullback_p2"),
                   help="default: inferred from s and p")
    add("battery", "run the invariant battery (JSON)")
    return parser


def _profile(cfg):
    if cfg.profile:
        return load_profile(cfg.profile, cfg.params)
    if cfg.subcommand == "uncertainty" and cfg.preset == "cyl-gauss":
        from hardylab.uncertainty import equality_state

        return equality_state(cfg.N, cfg.s, 1.0, cfg.options["alpha"], cfg.grid)
    return preset(cfg.preset, cfg.params, cfg.grid, cfg.options.get("alpha", 1.0))


def _constants(cfg):
    from hardylab.constants import constant_set

    result = constant_set(cfg.params, with_kappa=not cfg.options["no_kappa"])
    return result.as_dict(), EXIT_OK


def _symbol(cfg):
    from hardylab.specfun import multiplier_m, symbol_P

    xi = np.linspace(0.0, cfg.options["xi_max"], cfg.options["xi_count"])
    params = Params(cfg.N, cfg.s, 2.0)
    rows = []
    for ell in range(cfg.options["ell_max"] + 1):
        P = symbol_P(params, xi, ell)
        m = multiplier_m(params, xi, ell)
        rows.extend((x, ell, a, b) for x, a, b in zip(xi, P, m))
    return (("xi", "ell", "P_s", "m"), rows), EXIT_OK


def _deficit(cfg):
    from hardylab.deficits import fractional_deficit, local_deficit

    u = _profile(cfg)
    if cfg.params.is_local:
        report = local_deficit(u, cfg.N, cfg.p)
    else:
        report = fractional_deficit(u, cfg.params)
    return report.as_dict(), EXIT_OK


def _distance(cfg):
    from hardylab import norms

    u, params = _profile(cfg), cfg.params
    if cfg.options["pullback"]:
        result = norms.distance_pullback(u, cfg.N, cfg.s)
    elif params.is_local:
        result = norms.distance_local(u, cfg.N, cfg.p)
    elif cfg.p >= 2:
        result = norms.distance_dsp(u, params)
    else:
        result = norms.distance_Dsp(u, params)
    return result.as_dict(), EXIT_OK


def _transform(cfg):
    from hardylab.cylinder import inverse_transform_T, transform_T

    u = _profile(cfg)
    op = inverse_transform_T if cfg.options["inverse"] else transform_T
    image = op(u, cfg.N, cfg.s)
    t = image.grid.t
    return (("t", "r", "value"), zip(t, np.exp(t), image.nodes)), EXIT_OK


def _spectral_verify(cfg):
    from hardylab.constants import kappa_closed_form
    from hardylab.cylinder import (
        apply_multiplier,
        lift,
        spectral_deficit_fractional,
        spectral_deficit_local,
    )
    from hardylab.deficits import fractional_deficit

    params = Params(cfg.N, cfg.s, 2.0)
    u = _profile(cfg)
    signal = lift(u, cfg.N, cfg.s)
    fractional = spectral_deficit_fractional(signal, cfg.N, cfg.s)
    image = apply_multiplier(signal.spectrum(), cfg.N, cfg.s).signal()
    local = spectral_deficit_local(image, cfg.N)
    gagliardo = fractional_deficit(u, params, with_remainder=False).deficit
    kappa = kappa_closed_form(cfg.N, cfg.s)
    rel = {
        "preservation": abs(local - fractional) / abs(fractional),
        "kappa_oracle": abs(kappa * fractional - gagliardo) / abs(gagliardo),
    }
    code = EXIT_OK
    if (rel["preservation"] > config.IDENTITY_TOL
            or rel["kappa_oracle"] > config.ORACLE_TOL):
        code = EXIT_TOLERANCE
    return {
        "fractional_spectral": fractional,
        "local_spectral_after_M": local,
        "gagliardo_form": gagliardo,
        "kappa": kappa,
        "rel_errors": rel,
    }, code


def _uncertainty(cfg):
    from hardylab.uncertainty import (
        gaussian_sharpness_scan,
        uncertainty_report,
    )

    alpha = cfg.options["alpha"]
    if cfg.options["scan"]:
        windows = cfg.options["windows"]
        ratios = gaussian_sharpness_scan(cfg.N, cfg.s, alpha, windows, cfg.grid)
        rows = [(R, alpha, r, r - 0.25) for R, r in zip(windows, ratios)]
        return (("R", "alpha", "ratio", "gap"), rows), EXIT_OK
    return uncertainty_report(_profile(cfg), cfg.N, cfg.s).as_dict(), EXIT_OK


def _default_regime(params):
    if params.is_local:
        return "local"
    return "frac_p_ge_2" if params.p >= 2 else "frac_p_lt_2"


def _stability_scan(cfg):
    from hardylab.stability import CSV_HEADER, family_scan

    regime = cfg.options["regime"] or _default_regime(cfg.params)
    table = family_scan(cfg.options["family"], cfg.options["values"], cfg.params,
                        regime, cfg.grid)
    rows = []
    for row in table.rows:
        if row.report is None:
            rows.append((row.param,) + ("nan",) * (len(CSV_HEADER) - 2) + (row.error,))
        else:
            rows.append(row.report.as_row(row.param))
    return (CSV_HEADER, rows, "floor: %r" % table.floor), EXIT_OK


def _battery(cfg):
    from hardylab.battery import run_battery

    results = run_battery(seed=cfg.seed)
    failed = [r.name for r in results if not r.ok]
    payload = {"checks": [r.as_dict() for r in results], "failed": failed}
    return payload, EXIT_TOLERANCE if failed else EXIT_OK


HANDLERS = {
    "constants": (_constants, "json"),
    "symbol": (_symbol, "csv"),
    "deficit": (_deficit, "json"),
    "distance": (_distance, "json"),
    "transform": (_transform, "csv"),
    "spectral-verify": (_spectral_verify, "json"),
    "uncertainty": (_uncertainty, "json"),
    "stability-scan": (_stability_scan, "csv"),
    "battery": (_battery, "json"),
}


def _json_value(x):
    if isinstance(x, (np.floating, np.integer)):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def render(cfg, payload, fmt):
    echo = _json_value(cfg.as_dict())
    if fmt == "json":
        if not isinstance(payload, dict):
            header, rows = payload[0], payload[1]
            payload = {"rows": [dict(zip(header, r)) for r in rows]}
        doc = dict(_json_value(payload), config=echo)
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if isinstance(payload, dict):
        raise UsageError("%s has no CSV form" % cfg.subcommand)
    header, rows = payload[0], payload[1]
    buf = io.StringIO()
    buf.write("# config: %s\n" % json.dumps(echo, sort_keys=True))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                         for v in row])
    for note in payload[2:]:
        buf.write("# %s\n" % note)
    return buf.getvalue()


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    cfg = RunConfig.from_args(args)
    handler, default_format = HANDLERS[cfg.subcommand]
    fmt = cfg.format or default_format
    saved_tol, config.QUAD_TOL = config.QUAD_TOL, cfg.tol
    try:
        cfg.validate()
        payload, code = handler(cfg)
        text = render(cfg, payload, fmt)
        if cfg.out:
            with open(cfg.out, "w") as fp:
                fp.write(text)
        else:
            sys.stdout.write(text)
    except (ProfileSpecError, DomainError, UsageError, OSError) as e:
        sys.stderr.write("hardylab %s: %s\n" % (cfg.subcommand, e))
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except ToleranceError as e:
        sys.stderr.write("hardylab %s: %s\n" % (cfg.subcommand, e))
        return EXIT_TOLERANCE
    finally:
        config.QUAD_TOL = saved_tol
    return code


def main():
    logging.basicConfig(
        level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s"
    )
    sys.exit(run())
