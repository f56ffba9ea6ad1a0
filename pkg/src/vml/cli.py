"""Command line entry point.

Exit codes: 0 success, 1 failed verification, 2 configuration error,
3 numerical blow-up.
"""
from __future__ import annotations

import argparse
import re
import sys
import warnings

from .config import FORMULATIONS, ConfigError, describe_defaults, load_config
from .euler2d import comparison_table
from .poisson import NonFiniteError
from .timestep import StabilityWarning

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_CONFIG, EXIT_BLOWUP = 0, 1, 2, 3


def _parse_grid(text):
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"grid must look like 64x128, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def build_parser():
    parser = argparse.ArgumentParser(prog="vml", description="Vlasov-Poisson dynamics in density and momentum variables.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario and write diagnostics and snapshots")
    sim.add_argument("config", help="INI configuration file")
    sim.add_argument("--formulation", choices=FORMULATIONS, default="density")
    sim.add_argument("--out", metavar="DIR", help="output directory (overrides [output] dir)")

    ver = sub.add_parser("verify", help="run the identity checks and print a pass/fail table")
    ver.add_argument("--grid", type=_parse_grid, default=(64, 128), metavar="NxM")
    ver.add_argument("--subset", default="all")
    ver.add_argument("--tol", type=float, default=None, help="override every tolerance")

    cmp_ = sub.add_parser("compare", help="print the plasma/fluid comparison table")
    cmp_.add_argument("plasma_config")
    cmp_.add_argument("euler_config")

    sub.add_parser("defaults", help="print every configuration key with its default")
    return parser


def _err(msg):
    print(f"vml: {msg}", file=sys.stderr)


def _simulate(args):
    from .simulate import run

    cfg = load_config(args.config)
    if cfg.is_fluid and args.formulation != "density":
        raise ConfigError("the fluid scenario has a single (vorticity) formulation")
    result = run(cfg, args.formulation, args.out)
    last = result.rows[-1]
    print(f"{cfg.scenario} ({result.formulation}): {len(result.rows)} diagnostic rows to t={last[0]:g}, "
          f"output in {args.out or cfg.out_dir}")
    return EXIT_OK


def _verify(args):
    from .verify import SUBSETS, format_results, run_checks

    if args.subset not in SUBSETS:
        raise ConfigError(f"unknown subset {args.subset!r}; valid subsets: {', '.join(SUBSETS)}")
    n_q, n_p = args.grid
    try:
        results = run_checks(n_q, n_p, args.subset, args.tol)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    sys.stdout.write(format_results(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY_FAILED


def _compare(args):
    from .simulate import run

    plasma = load_config(args.plasma_config)
    fluid = load_config(args.euler_config)
    if plasma.is_fluid or not fluid.is_fluid:
        raise ConfigError("compare needs a plasma config followed by a fluid (taylor_green) config")
    p = run(plasma, "density", write=False)
    f = run(fluid, "density", write=False)
    sys.stdout.write(comparison_table(p.summary(), f.summary()))
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    handlers = {"simulate": _simulate, "verify": _verify, "compare": _compare}
    if args.command == "defaults":
        sys.stdout.write(describe_defaults())
        return EXIT_OK
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", StabilityWarning)
        try:
            code = handlers[args.command](args)
        except ConfigError as exc:
            _err(f"configuration error: {exc}")
            code = EXIT_CONFIG
        except NonFiniteError as exc:
            _err(f"numerical blow-up: {exc}")
            code = EXIT_BLOWUP
    stability = [w for w in caught if issubclass(w.category, StabilityWarning)]
    if stability:
        _err(f"warning: {stability[0].message} ({len(stability)} steps above the bound)")
    for w in caught:
        if not issubclass(w.category, StabilityWarning):
            warnings.showwarning(w.message, w.category, w.filename, w.lineno)
    return code


if __name__ == "__main__":
    sys.exit(main())
