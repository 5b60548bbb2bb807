import argparse
import sys
from typing import Any, Dict, List, Optional

from climtrend.commands import COMMANDS
from climtrend.config import load_run_config, settings
from climtrend.exceptions import ClimtrendError
from climtrend.logger import logger
from climtrend.models import Aggregation, Command, DatasetKind, DecadalMethod, ReportFormat


def _values(enum_cls) -> List[str]:
    return [member.value for member in enum_cls]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=settings.APP_NAME, description=settings.APP_DESCRIPTION)
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for command in Command:
        sub = subparsers.add_parser(command.value)
        sub.add_argument("--input", action="append", help="input CSV (repeatable)")
        sub.add_argument("--kind", choices=_values(DatasetKind))
        sub.add_argument("--alpha", type=float)
        sub.add_argument("--confidence", type=float)
        sub.add_argument("--aggregation", choices=_values(Aggregation))
        sub.add_argument("--end-year", type=int)
        sub.add_argument("--decadal-method", choices=_values(DecadalMethod))
        sub.add_argument("--out", help="output directory")
        sub.add_argument("--format", action="append", choices=_values(ReportFormat), help="report format (repeatable)")
        sub.add_argument("--station-id")
        sub.add_argument("--config", help="key=value config file; flags override it")
        sub.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    flags = {
        "input": args.input,
        "kind": args.kind,
        "alpha": args.alpha,
        "confidence": args.confidence,
        "aggregation": args.aggregation,
        "end_year": args.end_year,
        "decadal_method": args.decadal_method,
        "out": args.out,
        "format": args.format,
        "station_id": args.station_id,
    }
    return {key: value for key, value in flags.items() if value is not None}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        logger.set_level(args.log_level)

    try:
        config = load_run_config(args.command, overrides=_overrides(args), config_file=args.config)
        COMMANDS[config.command](config)
    except ClimtrendError as e:
        print(f"{settings.APP_NAME}: error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.error(f"Unhandled exception: {str(e)}", exc_info=True)
        print(f"{settings.APP_NAME}: internal error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
