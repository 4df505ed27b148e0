"""Command-line front end.

Every command resolves its parameters from built-in defaults, then the
[command] section of an ini file given with --config, then --key value
flags, and writes its artifacts into --outdir.  Exit codes: 0 all in-run
assertions passed, 1 usage error, 2 numerical failure (blow-up, lost
positivity, stalled quadrature), 3 assertion failure.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ContractError, NumericalError
from .experiments import _SCHEMAS, load_config, run

_HELP = {
    "simulate": "evolve one initial state and record diagnostics",
    "wave": "build a periodic traveling wave and verify it",
    "beta": "resolvent form and its weighted integral on random data",
    "gronwall": "growth-rate ensemble for the weighted form",
    "illposed": "traveling-wave observables along the degenerate limit",
    "smoothing": "operator-norm scan of the depth smoothing bound",
    "twodepth": "two-depth flow against its deep-water limit",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ilw-lab",
        description="spectral experiments for finite-depth dispersive flows")
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name in sorted(_SCHEMAS):
        cmd = sub.add_parser(name, help=_HELP[name])
        cmd.add_argument("--config", metavar="FILE", default=None,
                         help="ini file with a [%s] section" % name)
        cmd.add_argument("--outdir", metavar="DIR", default=None,
                         help="output directory (default ilw_lab_%s)" % name)
        for key in _SCHEMAS[name]:
            cmd.add_argument("--" + key.replace("_", "-"), dest=key,
                             default=None, metavar="V")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    if not args.command:
        parser.print_usage(sys.stderr)
        return 1
    overrides = {key: value for key, value in vars(args).items()
                 if key not in ("command", "config", "outdir")
                 and value is not None}
    try:
        cfg = load_config(args.command, args.config, overrides, args.outdir)
        result = run(cfg)
    except ContractError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return 1
    except NumericalError as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return 2
    except AssertionError as exc:
        print("internal check failed: %s" % exc, file=sys.stderr)
        return 3
    if result.failures:
        for item in result.failures:
            print("FAILED: %s" % item, file=sys.stderr)
        return 3
    print("ok: %s -> %s" % (args.command, cfg.output_dir))
    return 0


if __name__ == "__main__":
    sys.exit(main())
