"""digraph-perf CLI - 有向共识网络性能计算与实验。

Usage:
    digraph-perf COMMAND [OPTIONS]

Commands:
    compute         Closed-form performance metric of one query
    compare         Directed graph against its Hermitian part
    sweep-omega     ω-nearest-neighbor cycles, ω = 1..n−1 (CSV)
    sweep-gamma     Relative position gain sweep (CSV)
    star-complete   Imploding star against the complete graph (CSV)
    oracle-check    Closed form against Gramian and RK4 oracles
    monte-carlo     Random impulse directions against the H2 value

Exit codes:
    0 ok, 1 input/parse error, 2 unstable, 3 assumption violated,
    4 decomposition failure, 5 oracle mismatch
"""
import argparse
import sys
from typing import NoReturn, Optional

from pydantic import ValidationError

from digraph_perf import __version__
from digraph_perf.cli.commands import AVAILABLE_COMMANDS, run
from digraph_perf.cli.display import print_error, write_output
from digraph_perf.core.config import apply_overrides, settings
from digraph_perf.core.errors import DigraphPerfError, InputParseError
from digraph_perf.schemas import RunConfig
from digraph_perf.utils.logger import set_level


def _parse_tol(values: Optional[list[str]]) -> dict[str, float]:
    overrides: dict[str, float] = {}
    for item in values or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"--tol expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = float(value)
    return overrides


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser whose usage errors raise InputParseError (exit 1).

    argparse exits with status 2 on bad arguments, which is the instability code here.
    """

    def error(self, message: str) -> NoReturn:
        raise InputParseError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one sub-parser per command."""
    parser = ArgumentParser(
        prog="digraph-perf",
        description="H2/L2 performance of consensus networks over directed graphs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  digraph-perf compute --graph star:5 --dynamics first --C dav --input identity
  digraph-perf oracle-check --graph cycle:50,1,1 --dynamics second --gains 1,2,5,6.5
  digraph-perf sweep-omega --n 51 --dynamics first
  digraph-perf star-complete --n-range 2:49 --dynamics second --gains 1,1,1,1
        """,
    )
    parser.add_argument(
        "--version",
        "-v",
        action="version",
        version=f"digraph-perf {__version__}",
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", type=str, default=None, help="cycle:n,d,omega | star:n | path:n | complete:n | graph JSON path")
    common.add_argument("--jordan", type=str, default=None, help="Jordan data JSON for --graph")
    common.add_argument("--dynamics", choices=["first", "second"], default="first")
    common.add_argument("--output", choices=["position", "velocity"], default="position")
    common.add_argument("--gains", type=str, default=None, help="kp,kd,gp,gd (second order only)")
    common.add_argument("--C", dest="C", type=str, default="dav", help="dav | local | JSON matrix path")
    common.add_argument("--input", type=str, default="identity", help="identity | w0:FILE | sigma0:FILE")
    common.add_argument("--out", type=str, default=None, help="Write results here instead of stdout")
    common.add_argument("--tol", action="append", default=None, metavar="KEY=VALUE", help="Override a tolerance setting (repeatable)")
    common.add_argument("--log-level", type=str, default=None, help=f"Logger level (default: {settings.LOG_LEVEL})")
    common.add_argument("--n", type=int, default=None, help="Node count for sweep-omega")
    common.add_argument("--n-range", type=str, default=None, help="A:B inclusive, for star-complete")
    common.add_argument("--gamma-grid", type=str, default=None, help="START:STOP:NUM, for sweep-gamma")
    common.add_argument("--samples", type=int, default=10_000, help="Monte-Carlo sample count")
    common.add_argument("--seed", type=int, default=0, help="Monte-Carlo seed")

    sub = parser.add_subparsers(dest="command", required=True)
    for name in AVAILABLE_COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def to_config(args: argparse.Namespace) -> RunConfig:
    data = {
        "command": args.command,
        "graph": args.graph,
        "jordan": args.jordan,
        "dynamics": args.dynamics,
        "output": args.output,
        "gains": args.gains,
        "C": args.C,
        "input": args.input,
        "out": args.out,
        "tol": _parse_tol(args.tol),
        "n": args.n,
        "n_range": args.n_range,
        "gamma_grid": args.gamma_grid,
        "samples": args.samples,
        "seed": args.seed,
    }
    return RunConfig.model_validate(data)


def main(argv: Optional[list[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    try:
        args = build_parser().parse_args(argv)
        if args.log_level:
            set_level(args.log_level)
        config = to_config(args)
        if config.tol:
            apply_overrides(config.tol)
        text, code = run(config)
        write_output(text, config.out)
        return code
    except DigraphPerfError as e:
        print_error(e.to_dict())
        return e.exit_code
    except ValidationError as e:
        message = "; ".join(err["msg"] for err in e.errors())
        print_error({"error": "ValidationError", "message": message, "exit_code": 1})
        return 1
    except (ValueError, OSError) as e:
        print_error({"error": type(e).__name__, "message": str(e), "exit_code": 1})
        return 1


if __name__ == "__main__":
    sys.exit(main())
