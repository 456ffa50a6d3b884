#!/usr/bin/env python3
"""
grangersearch command line
==========================
Subcommands:
- test       one pair, both directions, one lag order
- search     every directed pair of a CSV's numeric columns
- lagselect  one pair over a range of lag orders
- simulate   bivariate VAR(p) data as CSV

Exit codes: 0 success, 2 usage error, 1 data or compute error.
"""

import argparse
import logging
import sys
from enum import Enum
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from engine.series_store import load_csv
from engine.settings import LOG_LEVEL_ENV, THREADS_ENV, RuntimeSettings
from engine.simulation import simulate
from models.errors import GrangerError, InvalidLagSpec, InvalidParameter
from models.models import Adjustment, DfConvention, OutputFormat, RenderOptions, VarSpec
from models.reports import render_granger_result, render_lag_scan, render_search, write_series_csv
from workflows.granger import granger_test_columns
from workflows.lag_select import granger_lag_select_columns
from workflows.search import granger_search

logger = logging.getLogger(__name__)

PROG = "grangersearch"


class Subcommand(str, Enum):
    TEST = "test"
    SEARCH = "search"
    LAGSELECT = "lagselect"
    SIMULATE = "simulate"


# ============================================================================
# ARGUMENT PARSING
# ============================================================================

def parse_lag_spec(spec: str) -> Tuple[int, ...]:
    """'2', '1:8' (inclusive) or '1,2,4' into a strictly increasing tuple."""
    text = str(spec).strip()
    if not text:
        raise InvalidLagSpec(spec, "empty")
    try:
        if ":" in text:
            start, _, stop = text.partition(":")
            lo, hi = int(start), int(stop)
            if hi < lo:
                raise InvalidLagSpec(spec, "range end is below its start")
            lags = tuple(range(lo, hi + 1))
        else:
            lags = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise InvalidLagSpec(spec, "expected an integer, 'a:b' or a comma list") from None
    if any(lag < 1 for lag in lags):
        raise InvalidLagSpec(spec, "lag orders must be positive")
    if any(b <= a for a, b in zip(lags, lags[1:])):
        raise InvalidLagSpec(spec, "lag orders must be strictly increasing")
    return lags


def parse_floats(text: str, name: str) -> Tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise InvalidParameter(name, text, "expected comma-separated numbers") from None


def _pair(text: str, name: str) -> Tuple[float, float]:
    values = parse_floats(text, name)
    if len(values) != 2:
        raise InvalidParameter(name, text, "expected two comma-separated numbers (y, x)")
    return values[0], values[1]


def _coefficients(text: Optional[str], name: str, lag: int) -> Tuple[float, ...]:
    if text is None:
        return (0.0,) * lag
    values = parse_floats(text, name)
    if len(values) != lag:
        raise InvalidParameter(name, text, f"expected {lag} coefficients for lag order {lag}")
    return values


### START: CliConfig ###
"""
CliConfig Model
===============
Purpose: Validated view of one command-line invocation
Features:
- Lag specs already parsed to strictly increasing tuples
- Render options assembled once for every subcommand
- VarSpec built for `simulate`
"""
class CliConfig(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    subcommand: Subcommand
    input_path: Optional[Path] = None
    x: Optional[str] = None
    y: Optional[str] = None
    columns: Optional[List[str]] = None
    lags: Tuple[int, ...] = Field(default=(1,), min_length=1)
    alpha: float = 0.05
    test: str = "F"
    adjustment: Adjustment = Adjustment.NONE
    include_insignificant: bool = False
    df_convention: DfConvention = DfConvention.SYSTEM
    threads: Optional[int] = None
    render: RenderOptions = RenderOptions()
    var_spec: Optional[VarSpec] = None

    @classmethod
    def from_namespace(cls, args: argparse.Namespace) -> "CliConfig":
        subcommand = Subcommand(args.command)
        render = RenderOptions(
            format=OutputFormat(args.format),
            output_path=args.out,
            significant_color=getattr(args, "significant_color", "#4477AA"),
            insignificant_color=getattr(args, "insignificant_color", "#CCCCCC"),
            width_px=getattr(args, "width", 900),
            height_px=getattr(args, "height", 480),
        )
        if subcommand == Subcommand.SIMULATE:
            return cls(subcommand=subcommand, render=render, var_spec=_var_spec(args))

        if subcommand == Subcommand.TEST:
            lags = (args.lag,)
        else:
            lags = parse_lag_spec(args.lags)
        columns = None
        if getattr(args, "columns", None):
            columns = [name.strip() for name in args.columns.split(",")]
        return cls(
            subcommand=subcommand,
            input_path=args.input,
            x=getattr(args, "x", None),
            y=getattr(args, "y", None),
            columns=columns,
            lags=lags,
            alpha=args.alpha,
            test=args.test,
            adjustment=Adjustment(getattr(args, "adjust", "none")),
            include_insignificant=getattr(args, "include_insignificant", False),
            df_convention=DfConvention(args.df_convention),
            threads=getattr(args, "threads", None),
            render=render,
        )
### END: CliConfig ###


def _var_spec(args: argparse.Namespace) -> VarSpec:
    lag = args.lag
    names = tuple(name.strip() for name in args.names.split(","))
    if len(names) != 2:
        raise InvalidParameter("names", args.names, "expected two comma-separated names (x, y)")
    return VarSpec(
        lag=lag,
        intercepts=_pair(args.intercepts, "intercepts"),
        own_coeffs=(_coefficients(args.own_y, "own-y", lag), _coefficients(args.own_x, "own-x", lag)),
        cross_coeffs=(_coefficients(args.cross_xy, "cross-xy", lag), _coefficients(args.cross_yx, "cross-yx", lag)),
        noise_sd=_pair(args.noise_sd, "noise-sd"),
        noise_corr=args.noise_corr,
        n_obs=args.n,
        seed=args.seed,
        burn_in=args.burn_in,
        names=names,
    )


def _add_output_flags(parser: argparse.ArgumentParser, formats: Sequence[str]) -> None:
    parser.add_argument("--format", choices=list(formats), default=OutputFormat.TEXT.value,
                        help="output format (default: %(default)s)")
    parser.add_argument("--out", type=Path, default=None, help="write output to this file instead of stdout")


def _add_test_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=0.05, help="significance level (default: %(default)s)")
    parser.add_argument("--test", default="F", help="test statistic; only F is available (default: %(default)s)")
    parser.add_argument("--df-convention", choices=[c.value for c in DfConvention], default=DfConvention.SYSTEM.value,
                        help="denominator degrees of freedom of the reference F (default: %(default)s)")


def _add_svg_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--width", type=int, default=900, help="SVG width in pixels (default: %(default)s)")
    parser.add_argument("--height", type=int, default=480, help="SVG height in pixels (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="Bivariate Granger causality tests on CSV time series.")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help=f"log progress to stderr; repeat for debug output (or set {LOG_LEVEL_ENV})")
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    test = commands.add_parser("test", help="test x -> y and y -> x at one lag order")
    test.add_argument("input", type=Path, help="CSV file with a header row")
    test.add_argument("--x", required=True, help="first series (column name)")
    test.add_argument("--y", required=True, help="second series (column name)")
    test.add_argument("--lag", type=int, default=1, help="lag order (default: %(default)s)")
    _add_test_flags(test)
    _add_output_flags(test, ["text", "csv", "json"])

    search = commands.add_parser("search", help="test every directed pair of columns")
    search.add_argument("input", type=Path, help="CSV file with a header row")
    search.add_argument("--columns", default=None, help="comma-separated columns to search (default: all numeric)")
    search.add_argument("--lags", "--lag", dest="lags", default="1",
                        help="lag order, inclusive range a:b or comma list; the best lag per pair is kept "
                             "(default: %(default)s)")
    _add_test_flags(search)
    search.add_argument("--include-insignificant", action="store_true", default=False,
                        help="list insignificant pairs too (default: false)")
    search.add_argument("--adjust", choices=[a.value for a in Adjustment], default=Adjustment.NONE.value,
                        help="multiple-testing adjustment (default: %(default)s)")
    search.add_argument("--threads", type=int, default=None,
                        help=f"worker threads (default: {THREADS_ENV} or all cores)")
    _add_output_flags(search, [f.value for f in OutputFormat])
    search.add_argument("--significant-color", default="#4477AA", help="SVG fill for significant cells (default: %(default)s)")
    search.add_argument("--insignificant-color", default="#CCCCCC",
                        help="SVG fill for insignificant cells (default: %(default)s)")
    _add_svg_flags(search)

    lagselect = commands.add_parser("lagselect", help="test one pair over a range of lag orders")
    lagselect.add_argument("input", type=Path, help="CSV file with a header row")
    lagselect.add_argument("--x", required=True, help="first series (column name)")
    lagselect.add_argument("--y", required=True, help="second series (column name)")
    lagselect.add_argument("--lags", "--lag", dest="lags", default="1:4",
                           help="inclusive range a:b or comma list (default: %(default)s)")
    _add_test_flags(lagselect)
    _add_output_flags(lagselect, [f.value for f in OutputFormat])
    _add_svg_flags(lagselect)

    sim = commands.add_parser("simulate", help="write a simulated bivariate VAR(p) series as CSV")
    sim.add_argument("--n", type=int, default=200, help="observations kept after burn-in (default: %(default)s)")
    sim.add_argument("--lag", type=int, default=1, help="VAR order (default: %(default)s)")
    sim.add_argument("--seed", type=int, default=0, help="generator seed (default: %(default)s)")
    sim.add_argument("--burn-in", type=int, default=100, help="discarded warm-up steps (default: %(default)s)")
    sim.add_argument("--intercepts", default="0,0", help="intercepts of the y and x equations (default: %(default)s)")
    sim.add_argument("--own-y", default=None, help="y on its own lags, one per lag (default: zeros)")
    sim.add_argument("--own-x", default=None, help="x on its own lags, one per lag (default: zeros)")
    sim.add_argument("--cross-xy", default=None, help="y on lags of x, one per lag (default: zeros)")
    sim.add_argument("--cross-yx", default=None, help="x on lags of y, one per lag (default: zeros)")
    sim.add_argument("--noise-sd", default="1,1", help="innovation sd of y and x (default: %(default)s)")
    sim.add_argument("--noise-corr", type=float, default=0.0, help="innovation correlation (default: %(default)s)")
    sim.add_argument("--names", default="x,y", help="output column names, x first (default: %(default)s)")
    _add_output_flags(sim, ["csv"])
    sim.set_defaults(format="csv")
    return parser


# ============================================================================
# DISPATCH
# ============================================================================

def execute(config: CliConfig) -> str:
    """Run one validated invocation and return what it rendered."""
    if config.subcommand == Subcommand.SIMULATE:
        return write_series_csv(simulate(config.var_spec), config.render.output_path)

    table = load_csv(config.input_path)
    if config.subcommand == Subcommand.TEST:
        result = granger_test_columns(
            table, config.x, config.y, lag=config.lags[0], alpha=config.alpha, test=config.test,
            df_convention=config.df_convention,
        )
        return render_granger_result(result, config.render)
    if config.subcommand == Subcommand.SEARCH:
        result = granger_search(
            table, columns=config.columns, lags=config.lags, alpha=config.alpha,
            include_insignificant=config.include_insignificant, adjustment=config.adjustment, test=config.test,
            df_convention=config.df_convention, threads=config.threads,
        )
        return render_search(result, config.render)
    result = granger_lag_select_columns(
        table, config.x, config.y, lags=config.lags, alpha=config.alpha, test=config.test,
        df_convention=config.df_convention, threads=config.threads,
    )
    return render_lag_scan(result, config.render)


def _log_level(verbose: int) -> int:
    if verbose >= 2:
        return logging.DEBUG
    if verbose == 1:
        return logging.INFO
    return RuntimeSettings.from_env().log_level


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        logging.basicConfig(stream=sys.stderr, level=_log_level(args.verbose),
                            format="%(levelname)s %(name)s: %(message)s")
        config = CliConfig.from_namespace(args)
        logger.info("running %s", config.subcommand.value)
        content = execute(config)
    except GrangerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValidationError as exc:
        problems = "; ".join(f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}" for error in exc.errors())
        print(f"error: invalid arguments: {problems}", file=sys.stderr)
        return 2

    if config.render.output_path is None:
        sys.stdout.write(content)
    return 0


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
