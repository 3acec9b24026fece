"""Command-line entry point: ``kfgm <subcommand> [options]``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..errors import InputParseError, KfgmError
from . import commands
from .config import load_scenario

EXIT_OK, EXIT_FAIL, EXIT_REFUSED, EXIT_PARSE = 0, 1, 2, 3

SCENARIO_COMMANDS = {
    "constrain": commands.cmd_constrain,
    "spectrum": commands.cmd_spectrum,
    "evolve": commands.cmd_evolve,
    "verify": commands.cmd_verify,
    "nrlimit": commands.cmd_nrlimit,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="scenario JSON file")
    common.add_argument("--out", type=Path, help="output directory (default from scenario, 'out')")
    common.add_argument("--seed", type=int, help="random seed (default 42)")
    common.add_argument("--grid", type=int, help="number of grid points")
    common.add_argument("--tol-scale", type=float, help="multiply every tolerance by this factor")
    p = _Parser(prog="kfgm", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SCENARIO_COMMANDS:
        sub.add_parser(name, parents=[common])
    c = sub.add_parser("classify", parents=[common])
    c.add_argument("input", type=Path, help="JSON file describing one boundary relation")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sc = load_scenario(args.config, seed=args.seed, grid_n=args.grid, tol_scale=args.tol_scale, out=args.out)
        if args.command == "classify":
            rep = commands.cmd_classify(args.input)
            rep.provenance.update(seed=sc.seed, config_hash=sc.config_hash())
        else:
            rep = SCENARIO_COMMANDS[args.command](sc)
    except InputParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except KfgmError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    path = rep.write(sc.output)
    for line in rep.summary_lines():
        print(line)
    if args.command == "classify":
        print(f"class: {rep.details['label']}")
        member = rep.details.get("member")
        print("member: " + (", ".join(f"{k}={v:.6g}" for k, v in member.items()) if member else rep.details.get("verdict", "no")))
    print(f"report: {path}")
    return EXIT_OK if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
