"""Operator CLI: `labdash serve`.

Configuration resolution order for each setting is flag, then environment
variable, then (for the config path) the bundled default file. The process
refuses to start on any config validation failure; it never serves with an
invalid band spec.

Environment variables: LABDASH_CONFIG, LABDASH_BIND, LABDASH_EHR_URL.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import uvicorn

from .api import create_app
from .config import ConfigError, default_config_path, load_config

logger = logging.getLogger(__name__)

DEFAULT_BIND = "127.0.0.1:8080"
DEFAULT_CACHE_DIR = "~/.cache/labdash"


def parse_bind(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not host:
        raise ValueError(f"bind address must be host:port, got {text!r}")
    try:
        return host, int(port)
    except ValueError:
        raise ValueError(f"port in {text!r} is not an integer") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="labdash", description="Diabetes lab dashboard service.")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="start the dashboard API server")
    serve.add_argument("--config", type=Path, default=None, help="config YAML (default: $LABDASH_CONFIG or bundled)")
    serve.add_argument("--bind", default=None, help="host:port to listen on (default: $LABDASH_BIND or 127.0.0.1:8080)")
    serve.add_argument("--ehr-url", default=None, help="EHR base URL (default: $LABDASH_EHR_URL or config value)")
    serve.add_argument("--cache-dir", type=Path, default=None, help="offline cache directory")
    serve.add_argument("--serve-ui", type=Path, default=None, help="directory of built web UI statics to serve at /")

    return parser


def run_serve(args: argparse.Namespace) -> int:
    config_path = args.config or _env_path("LABDASH_CONFIG") or default_config_path()
    bind_text = args.bind or os.environ.get("LABDASH_BIND") or DEFAULT_BIND
    ehr_url = args.ehr_url or os.environ.get("LABDASH_EHR_URL") or None
    cache_dir = args.cache_dir or Path(DEFAULT_CACHE_DIR).expanduser()

    try:
        host, port = parse_bind(bind_text)
    except ValueError as exc:
        print(f"labdash: {exc}", file=sys.stderr)
        return 2

    try:
        config = load_config(config_path)
    except ConfigError as exc:
        print(f"labdash: invalid config: {exc}", file=sys.stderr)
        return 2

    if args.serve_ui is not None and not args.serve_ui.is_dir():
        print(f"labdash: --serve-ui directory {args.serve_ui} does not exist", file=sys.stderr)
        return 2

    try:
        app = create_app(config, cache_dir, ehr_url=ehr_url, ui_dir=args.serve_ui)
    except ConfigError as exc:
        print(f"labdash: {exc}", file=sys.stderr)
        return 2

    logger.info("serving on http://%s:%d (config %s)", host, port, config_path)
    uvicorn.run(app, host=host, port=port, log_level="info")
    return 0


def _env_path(name: str) -> Path | None:
    value = os.environ.get(name)
    return Path(value) if value else None


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return run_serve(args)


if __name__ == "__main__":
    sys.exit(main())
