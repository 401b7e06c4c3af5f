"""
Command line entry point: ``python -m ambistop solve|verify|sweep <spec.json>``

Exit codes: 0 ok, 2 spec error, 3 solver error, 4 verification failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError

from .config.settings import Settings, configure_logging, get_settings
from .models.problem import ProblemSpec
from .services.solver_service import SolverService
from .utils.errors import AmbistopError

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4

SWEEP_PARAMS = ("kappa", "r", "K", "a_norm")

logger = logging.getLogger("ambistop.cli")


class SpecError(Exception):
    """Unreadable or invalid problem spec."""


def load_spec(path: Path) -> ProblemSpec:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpecError(f"cannot read {path}: {e.strerror}") from e
    try:
        return ProblemSpec.model_validate_json(text)
    except ValidationError as e:
        lines = []
        for err in e.errors():
            where = ".".join(str(part) for part in err["loc"]) or "<root>"
            lines.append(f"{where}: {err['msg']}")
        raise SpecError(f"invalid spec {path}:\n  " + "\n  ".join(lines)) from e


def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m ambistop",
        description="Optimal stopping of Brownian motion under drift ambiguity.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve a problem spec")
    solve.add_argument("spec", type=Path)
    solve.add_argument("--out", type=Path)
    solve.add_argument("--format", choices=("json", "csv"), default="json")

    verify = sub.add_parser("verify", help="cross-check the analytic solution")
    verify.add_argument("spec", type=Path)
    verify.add_argument("--mc", action="store_true", help="Monte Carlo check at the start point")
    verify.add_argument("--pde", action="store_true", help="finite-difference threshold check")
    verify.add_argument("--paths", type=int)
    verify.add_argument("--grid", type=int)
    verify.add_argument("--seed", type=int)
    verify.add_argument("--out", type=Path)

    sweep = sub.add_parser("sweep", help="re-solve over a list of parameter values")
    sweep.add_argument("spec", type=Path)
    sweep.add_argument("--param", choices=SWEEP_PARAMS, required=True)
    sweep.add_argument("--values", type=_float_list, required=True)
    sweep.add_argument("--out", type=Path)
    sweep.add_argument("--format", choices=("json", "csv"), default="csv")
    return parser


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.write_text(text, encoding="utf-8")
        logger.info(f"wrote {out}")


def run(args: argparse.Namespace, service: SolverService) -> int:
    spec = load_spec(args.spec)

    if args.command == "solve":
        report, sol = service.solve(spec)
        if args.format == "csv":
            _emit(service.sample_table(spec, sol).to_csv(index=False), args.out)
        else:
            _emit(report.to_json(), args.out)
        return EXIT_OK

    if args.command == "verify":
        if not (args.mc or args.pde):
            logger.warning("no verification engine requested; use --mc and/or --pde")
        report = service.verify(spec, mc=args.mc, pde=args.pde, paths=args.paths, grid=args.grid, seed=args.seed)
        _emit(report.to_json(), args.out)
        return EXIT_VERIFY if report.passed is False else EXIT_OK

    report, table = service.sweep(spec, args.param, args.values)
    _emit(table.to_csv(index=False) if args.format == "csv" else report.to_json(), args.out)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, settings: Optional[Settings] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = settings or get_settings()
    configure_logging(settings)
    try:
        return run(args, SolverService(settings))
    except SpecError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_SPEC
    except ValidationError as e:
        sys.stderr.write(f"invalid input: {e}\n")
        return EXIT_SPEC
    except AmbistopError as e:
        logger.error(f"{e.code}: {e.message}")
        sys.stderr.write(f"{e}\n")
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
