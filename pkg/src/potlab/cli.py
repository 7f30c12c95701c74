"""Command line entry point.

    potlab <subcommand> [--config cfg.json] [--out DIR] [--bits N] [--plot]

Subcommands: prop1, stahl-circle, stahl-segment, leja, capacity.
Flags override the JSON config; unknown config keys are rejected.
Exit code is 0 exactly when every asserted invariant of the run passed.
"""

import argparse
import json
import sys

from .experiments import ConfigError, ExperimentConfig, run

_SUBCOMMANDS = {
    "prop1": "prop1",
    "stahl-circle": "stahl_circle",
    "stahl-segment": "stahl_segment",
    "leja": "leja_only",
    "capacity": "capacity_only",
}


def _parser():
    p = argparse.ArgumentParser(prog="potlab",
                                description="discrete-measure potential "
                                            "theory experiments")
    sub = p.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None,
                        help="JSON experiment config")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--bits", type=int, default=None,
                        help="binary precision for big-float stages")
        sp.add_argument("--plot", action="store_true", default=None,
                        help="emit SVG plots")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    experiment = _SUBCOMMANDS[args.command]
    raw = {}
    if args.config:
        with open(args.config) as f:
            raw = json.load(f)
    if raw.get("experiment", experiment) != experiment:
        print(f"config is for {raw['experiment']!r}, not {experiment!r}",
              file=sys.stderr)
        return 2
    raw["experiment"] = experiment
    try:
        cfg = ExperimentConfig.from_json(raw, out_dir=args.out,
                                         bits=args.bits, plot=args.plot)
        report = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    status = "PASS" if report["pass"] else "FAIL"
    print(f"{experiment}: {status} (outputs in {cfg.out_dir})")
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
