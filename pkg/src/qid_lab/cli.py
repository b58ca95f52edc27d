from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np

from .commands import RunConfig, build_registry, dispatch_command
from .config import ConfigError, load_config
from .models import EXIT_OK, EXIT_VALIDATION, error_envelope

logger = logging.getLogger(__name__)


class ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise ArgumentError(message)


def _add_grid(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--t-min", type=float, default=0.0)
    parser.add_argument("--t-max", type=float, default=2.0 * np.pi)
    parser.add_argument("--n-points", type=int, default=1024)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol", type=float, default=None, help="certificate tolerance (default QIDLAB_TOL)")
    parser.add_argument("--threads", type=int, default=None, help="thread cap (default QIDLAB_THREADS)")
    parser.add_argument("--out", dest="output_path", default=None, help="write the result here instead of stdout")
    parser.add_argument("--format", choices=("csv", "json"), default=None)
    parser.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    registry = build_registry()
    parser = _Parser(
        prog="qid-lab",
        description="Characteristic functions, spectral pairs and certified infima of mixed distributions.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name: str) -> argparse.ArgumentParser:
        meta = registry.get_command(name)
        assert meta is not None
        child = sub.add_parser(name, help=meta.summary, description=meta.summary)
        _add_common(child)
        return child

    child = command("eval")
    child.add_argument("--spec", dest="spec_path", required=True, help="spec JSON path or catalog:NAME")
    child.add_argument("--part", choices=("full", "d", "a", "s", "c"), default="full")
    _add_grid(child)

    child = command("inf")
    child.add_argument("--spec", dest="spec_path", required=True)
    child.add_argument("--target", choices=("full", "d"), default="full")

    child = command("check")
    child.add_argument("--spec", dest="spec_path", required=True)

    child = command("spectral")
    child.add_argument("--spec", dest="spec_path", required=True)

    child = command("synth")
    child.add_argument("--pair", dest="pair_path", required=True, help="pair JSON path or catalog:NAME")
    _add_grid(child)

    child = command("verify")
    child.add_argument("--spec", dest="spec_path", default=None)
    child.add_argument("--pair", dest="pair_path", default=None)
    child.add_argument("--lemma", type=int, choices=(1, 2), default=None)
    child.add_argument("--integrals", action="store_true")
    child.add_argument("--parseval", action="store_true")
    child.add_argument("--translations", action="store_true")
    child.add_argument("--t", dest="t", type=float, default=0.0)
    child.add_argument("--tau", type=float, default=10.0)
    child.add_argument("--epsilon", type=float, default=0.1)
    child.add_argument("--mu", type=float, default=None)
    child.add_argument("--window", type=float, default=100.0)
    child.add_argument("--t-eps", type=float, default=None, help="follow |f_d| along the translation chain from this t")
    child.add_argument("--scan-step", type=float, default=0.01)
    child.add_argument("--csv", dest="csv_path", default=None, help="write per-grid-point margins here")
    _add_grid(child)
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    fields = {name: getattr(args, name) for name in RunConfig.__dataclass_fields__ if hasattr(args, name)}
    return RunConfig(**fields)


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def dump_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"


def dump_csv(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(float(value), ".17g") for value in row])
    return buffer.getvalue()


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")


def _configure_logging(level: int) -> None:
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def main(argv: Sequence[str] | None = None) -> int:
    command = "qid-lab"
    try:
        args = build_parser().parse_args(argv)
        command = args.command
        lab = load_config().with_overrides(threads=args.threads)
    except (ArgumentError, ConfigError) as exc:
        sys.stderr.write(dump_json(error_envelope(status=EXIT_VALIDATION, command=command, error={"message": str(exc)})))
        return EXIT_VALIDATION

    level = lab.logging_level
    if args.verbose:
        level = logging.DEBUG if args.verbose > 1 else logging.INFO
    _configure_logging(level)

    config = _run_config(args)
    envelope = dispatch_command(config, lab=lab)
    if envelope["status"] != EXIT_OK:
        sys.stderr.write(dump_json(envelope))
        return int(envelope["status"])

    data = envelope["data"]
    meta = build_registry().get_command(config.command)
    fmt = config.format or (meta.default_format if meta else "json")
    if fmt == "csv":
        _write(dump_csv(data["header"], data["rows"]), config.output_path)
    else:
        _write(dump_json(data["report"]), config.output_path)
    if config.csv_path and data["rows"]:
        _write(dump_csv(data["header"], data["rows"]), config.csv_path)

    if data["summary"]:
        stream = sys.stdout if config.output_path else sys.stderr
        stream.write(data["summary"] + "\n")
    return EXIT_OK


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
