"""Command line entry points for the mock EHR.

    mock-ehr serve --fixtures demo.csv --bind 127.0.0.1:8090
    mock-ehr generate --seed 7 --visits 6 --out patient7.csv
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from ..config import ConfigError, load_config
from ..model import ConceptRegistry, default_registry
from .generate import GeneratorSpec, generate_fixture
from .server import FAIL_MODES, MockEhrServer
from .store import FixtureError, load_fixtures

logger = logging.getLogger(__name__)


def parse_bind(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not host:
        raise argparse.ArgumentTypeError(f"bind address must be host:port, got {text!r}")
    try:
        return host, int(port)
    except ValueError:
        raise argparse.ArgumentTypeError(f"port in {text!r} is not an integer") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mock-ehr", description="Mock EHR REST server and fixture generator.")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="serve observation fixtures over the REST protocol")
    serve.add_argument("--fixtures", required=True, type=Path, help="fixture CSV file")
    serve.add_argument("--bind", type=parse_bind, default=("127.0.0.1", 8090), help="host:port to listen on")
    serve.add_argument("--fail-mode", choices=FAIL_MODES, default="none", help="failure injection mode")
    serve.add_argument("--config", type=Path, default=None, help="dashboard config supplying the concept registry")

    generate = sub.add_parser("generate", help="write a deterministic fixture CSV")
    generate.add_argument("--seed", required=True, type=int, help="RNG seed; same seed, same file")
    generate.add_argument("--visits", type=int, default=6, help="number of monthly visits")
    generate.add_argument("--out", type=Path, default=None, help="output path (default: stdout)")

    return parser


def _registry_from(config_path: Path | None) -> ConceptRegistry:
    if config_path is None:
        return default_registry()
    return load_config(config_path).registry


def run_serve(args: argparse.Namespace) -> int:
    try:
        registry = _registry_from(args.config)
        store = load_fixtures(args.fixtures.read_text(encoding="utf-8"), registry)
    except OSError as exc:
        print(f"mock-ehr: cannot read {args.fixtures}: {exc}", file=sys.stderr)
        return 2
    except (FixtureError, ConfigError) as exc:
        print(f"mock-ehr: {exc}", file=sys.stderr)
        return 2

    host, port = args.bind
    server = MockEhrServer(store, registry, host=host, port=port, fail_mode=args.fail_mode)
    server.start()
    print(f"mock-ehr serving {len(store)} observations for {len(store.patients)} patients on {server.url}")
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        server.stop()
    return 0


def run_generate(args: argparse.Namespace) -> int:
    try:
        spec = GeneratorSpec(seed=args.seed, visits=args.visits)
    except ValueError as exc:
        print(f"mock-ehr: {exc}", file=sys.stderr)
        return 2
    text = generate_fixture(spec, default_registry())
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8")
        print(f"wrote {args.out}", file=sys.stderr)
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return run_serve(args)
    return run_generate(args)


if __name__ == "__main__":
    sys.exit(main())
