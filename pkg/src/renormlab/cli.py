import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .numerics import PrecisionExhaustedError, as_rational
from .reports import summary_frame, write_summary_workbook
from .scenarios import SCENARIOS, ScenarioConfig, ScenarioResult, run_scenario

EXIT_OK = 0
EXIT_UNMET = 1
EXIT_USAGE = 2
EXIT_PRECISION = 3


def _add_settings(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--trials", type=int, default=None, help="Samples per check (scenario default if omitted).")
    parser.add_argument("--precision", type=as_rational, default=None, help="Starting precision, e.g. 1/2^64 as p/q.")
    parser.add_argument("--dim", type=int, default=12)
    parser.add_argument("--window", type=int, default=32)
    parser.add_argument("--depth", type=int, default=10)
    parser.add_argument("--verbose", action="store_true")


def _function_text(value: str) -> str:
    """Step function JSON given inline or as `@FILE`."""
    if not value.startswith("@"):
        return value
    try:
        return Path(value[1:]).read_text(encoding="utf-8")
    except OSError as e:
        raise argparse.ArgumentTypeError(f"Cannot read step function file: {e}") from e


def _parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="renormlab",
        description="Exact verification of invariant strictly convex renormings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="Run one scenario.")
    run.add_argument("scenario", choices=sorted(SCENARIOS))
    _add_settings(run)
    run.add_argument(
        "--function", type=_function_text, default=None, help="Step function JSON, inline or as @FILE (find-np)."
    )
    run.add_argument("--out", type=Path, default=None, help="Report file; stdout if omitted.")
    sub.add_parser("list", help="List the scenario catalog.")
    verify = sub.add_parser("verify-all", help="Run every scenario.")
    _add_settings(verify)
    verify.add_argument("--out", type=Path, default=None, help="Directory for one report per scenario.")
    verify.add_argument("--xlsx", type=Path, default=None, help="Excel summary workbook.")
    return parser.parse_args(argv)


def _config(args: argparse.Namespace, scenario: str, out: Optional[Path]) -> ScenarioConfig:
    settings = dict(seed=args.seed, trials=args.trials, dim=args.dim, window=args.window, depth=args.depth, out=out)
    function = getattr(args, "function", None)
    if function is not None:
        settings["function"] = function
    if args.precision is not None:
        settings["precision"] = args.precision
    return ScenarioConfig(scenario, **settings)


def _status(result: ScenarioResult) -> str:
    return f"{'PASS' if result.met else 'FAIL'} {result.scenario}: {result.verdict.value} ({result.paper_result})"


def _run(args: argparse.Namespace) -> int:
    try:
        cfg = _config(args, args.scenario, args.out)
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    result = run_scenario(cfg, verbose=args.verbose)
    if args.out is None:
        print(result.to_json())
    else:
        print(_status(result))
    return EXIT_OK if result.met else EXIT_UNMET


def _verify_all(args: argparse.Namespace) -> int:
    try:
        configs = {
            name: _config(args, name, None if args.out is None else args.out / f"{name}.json") for name in SCENARIOS
        }
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
    results = []
    exhausted = False
    for name, cfg in configs.items():
        try:
            result = run_scenario(cfg, verbose=args.verbose)
        except PrecisionExhaustedError as e:
            print(f"INCONCLUSIVE {name}: {e}", file=sys.stderr)
            exhausted = True
            continue
        results.append(result)
        print(_status(result))
    if args.xlsx is not None:
        write_summary_workbook(summary_frame([r.summary() for r in results]), args.xlsx)
    if exhausted:
        return EXIT_PRECISION
    return EXIT_OK if all(r.met for r in results) else EXIT_UNMET


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point of the `renormlab` command.

    Returns:
        int: 0 when every expectation holds, 1 when one is violated, 2 on usage
        errors and 3 when a check stayed undecided at the precision cap. Other
        errors, such as an unwritable report file, propagate.
    """
    try:
        args = _parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    try:
        if args.command == "list":
            for name, scenario in SCENARIOS.items():
                print(f"{name}\t{scenario.paper_result}")
            return EXIT_OK
        if args.command == "run":
            return _run(args)
        return _verify_all(args)
    except PrecisionExhaustedError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_PRECISION


if __name__ == "__main__":
    raise SystemExit(main())
