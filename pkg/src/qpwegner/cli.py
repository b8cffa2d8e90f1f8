"""Command line entry point: ``qpwegner <subcommand> [options]``.

Exit status: 0 when the subcommand's acceptance predicate passes, 2 when it
fails, 1 on configuration errors.  Output is plain text; ``NO_COLOR`` is
respected trivially since nothing is colored.
"""
import argparse
import sys
import time

from .config import parse_config, parse_value
from .harness import EXIT_CONFIG, EXIT_FAIL, EXIT_PASS, SUBCOMMANDS, run_subcommand, write_outcome
from .wegner import ConfigError


def build_parser():
    p = argparse.ArgumentParser(prog="qpwegner", description=__doc__.splitlines()[0])
    p.add_argument("subcommand", choices=sorted(SUBCOMMANDS))
    p.add_argument("--config", metavar="PATH", help="flat key = value configuration file")
    p.add_argument("--seed", type=int, help="sample stream seed")
    p.add_argument("--omega-samples", type=int, dest="omega_samples")
    p.add_argument("--out", metavar="DIR", default="results")
    p.add_argument("--threads", type=int)
    p.add_argument("--verify-eigen", action="store_true", dest="verify_eigen",
                   help="check eigenpair residuals and traces while sampling")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any configuration key (repeatable)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {}
    for item in args.set:
        if "=" not in item:
            print(f"error: --set expects KEY=VALUE, got {item!r}", file=sys.stderr)
            return EXIT_CONFIG
        key, val = item.split("=", 1)
        overrides[key.strip()] = parse_value(val)
    for key in ("seed", "omega_samples", "threads"):
        if getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    if args.verify_eigen:
        overrides["verify_eigen"] = True
    t0 = time.perf_counter()
    try:
        cfg = parse_config(args.config, overrides)
        outcome = run_subcommand(args.subcommand, cfg)
    except (ConfigError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    paths = write_outcome(outcome, args.out)
    status = "PASS" if outcome.passed else "FAIL"
    print(f"{args.subcommand}: {status}  ({time.perf_counter() - t0:.1f} s)")
    for path in paths:
        print(f"  wrote {path}")
    return EXIT_PASS if outcome.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
