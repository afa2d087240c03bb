import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from rich.console import Console
from rich.table import Table

from src.core.config import get_settings
from src.core.exceptions import VALIDATION_ERRORS, NumericalError, QuadratureError, SolverError
from src.models.run import COMMANDS, load_run_config
from src.services.experiments import ExperimentService
from src.utils import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(prog="roughint", description=settings.DESCRIPTION)
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration")
    common.add_argument("--beta", type=float, help="Hölder exponent of the paths")
    common.add_argument("--alpha", type=float, help="Fractional order of the integral")
    common.add_argument("--epsilon", type=float, help="Gap in the Γ order α - ε")
    common.add_argument("--lambda", dest="lam", type=float, help="Hölder order of ∂f")
    common.add_argument("--grid", type=int, help="Grid intervals N for synthetic inputs")
    common.add_argument("--seed", type=int, help="Random seed")
    common.add_argument("--out", help="Output directory")
    common.add_argument("--field", help="Built-in vector field name")
    common.add_argument("--x", help="Path CSV for the integrand path")
    common.add_argument("--y", help="Path CSV for the driver")
    common.add_argument("--area", help="Area CSV for (x, y, x⊗y)")

    sub = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        p = sub.add_parser(command, parents=[common])
        if command == "wz-study":
            p.add_argument("--n", type=_int_list, help="Polygon resolutions, e.g. 16,32,64")
            p.add_argument("--seeds", type=int, help="Number of seeds")
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    """Flag values as a nested mapping; unset flags stay out."""
    overrides: Dict[str, Any] = {
        "beta": args.beta,
        "alpha": args.alpha,
        "epsilon": args.epsilon,
        "lambda": args.lam,
        "grid": args.grid,
        "seed": args.seed,
        "output_dir": args.out,
        "paths": {"x": args.x, "y": args.y, "area": args.area},
    }
    if args.field:
        overrides["field"] = {"name": args.field}
    study = {"n_values": getattr(args, "n", None), "seeds": getattr(args, "seeds", None)}
    if any(v is not None for v in study.values()):
        overrides["study"] = study
    return overrides


def _format(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, list) and len(value) > 6:
        return f"[{', '.join(_format(v) for v in value[:6])}, ...]"
    if isinstance(value, list):
        return f"[{', '.join(_format(v) for v in value)}]"
    if isinstance(value, dict):
        return ", ".join(f"{k}={_format(v)}" for k, v in value.items())
    return str(value)


def render_report(console: Console, command: str, report: Dict[str, Any]) -> None:
    table = Table(title=f"roughint {command}")
    table.add_column("quantity", style="cyan")
    table.add_column("value")
    for key, value in report.items():
        table.add_row(key, _format(value))
    console.print(table)


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    setup_logging(get_settings().LOGGING_CONFIG_PATH)
    args = build_parser().parse_args(argv)
    console = Console(stderr=True)

    try:
        config = load_run_config(args.command, args.config, overrides_from_args(args))
        report = ExperimentService(config).run()
    except VALIDATION_ERRORS as e:
        logger.error(f"{args.command}: invalid input: {e}")
        console.print(f"[red]validation error:[/red] {e}")
        return EXIT_VALIDATION
    except QuadratureError as e:
        logger.error(f"{args.command}: quadrature failed in term {e.term}: {e}")
        console.print(f"[red]numerical failure[/red] (term {e.term}): {e}")
        return EXIT_NUMERICAL
    except SolverError as e:
        logger.error(f"{args.command}: solver failed: {e}; diagnostics {e.diagnostics}")
        console.print(f"[red]solver failure:[/red] {e}")
        for record in e.diagnostics:
            console.print(f"  {record}")
        return EXIT_NUMERICAL
    except NumericalError as e:
        logger.error(f"{args.command}: numerical failure: {e}")
        console.print(f"[red]numerical failure:[/red] {e}")
        return EXIT_NUMERICAL

    render_report(console, args.command, report)
    console.print(f"artifacts written to {config.output_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
