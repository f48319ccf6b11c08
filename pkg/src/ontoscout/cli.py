"""Command line interface: ``ontoscout build`` and ``ontoscout serve``.

Flag values override ONTOSCOUT_* environment variables, which override the
--config JSON file. Build failures exit nonzero with the failing stage named
(config errors exit 2).
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import Config, resolve_config
from .errors import OntoscoutError
from .pipeline import BuildFailure, ExplorationIndex, build_index


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--ontology", dest="ontology_path", help="ontology file (.ttl/.nt)")
    parser.add_argument("--data", dest="data_path", help="instance data file (.ttl/.nt)")
    parser.add_argument("--endpoint", dest="endpoint_url", help="SPARQL endpoint URL")
    parser.add_argument("--index", dest="index_path", help="index file path")
    parser.add_argument("--port", type=int, help="HTTP port")
    parser.add_argument("--host", help="HTTP bind host")
    parser.add_argument(
        "--embedder", choices=["offline", "remote"], help="embedding provider mode"
    )
    parser.add_argument("--embedder-url", dest="embedder_url", help="remote embedder URL")
    parser.add_argument("--embedder-model", dest="embedder_model", help="remote embedder model")
    parser.add_argument(
        "--labeler", choices=["offline", "remote"], help="topic labeling provider mode"
    )
    parser.add_argument("--labeler-url", dest="labeler_url", help="remote labeler URL")
    parser.add_argument("--dimension", type=int, help="embedding dimension")
    parser.add_argument("--leaf-count", dest="leaf_count", type=int, help="leaf topic count")


def _config_from_args(args: argparse.Namespace) -> Config:
    cli_values = {
        key: value
        for key, value in vars(args).items()
        if key not in ("command", "config") and value is not None
    }
    return resolve_config(cli_values=cli_values, config_file=args.config)


def _fail(stage: str, error: Exception, exit_code: int) -> int:
    payload = {"stage": stage, "error": str(error)}
    if isinstance(error, OntoscoutError):
        payload["code"] = error.code
    print(json.dumps(payload, separators=(",", ":")), file=sys.stderr)
    return exit_code


def cmd_build(args: argparse.Namespace) -> int:
    try:
        config = _config_from_args(args)
    except OntoscoutError as exc:
        return _fail("config", exc, 2)
    try:
        report = build_index(config)
    except BuildFailure as exc:
        return _fail(exc.stage, exc.cause, 2 if exc.stage == "config" else 1)
    print(json.dumps(report.to_payload(), separators=(",", ":")))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    try:
        config = _config_from_args(args)
        config.validate_for_serve()
        artifact = ExplorationIndex.load(config.index_path)
    except OntoscoutError as exc:
        return _fail("startup", exc, 2)

    from .service import create_app
    import uvicorn

    app = create_app(artifact, config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="ontoscout")
    subparsers = parser.add_subparsers(dest="command", required=True)

    build_parser = subparsers.add_parser("build", help="build the exploration index")
    _add_common_flags(build_parser)
    build_parser.set_defaults(handler=cmd_build)

    serve_parser = subparsers.add_parser("serve", help="serve the HTTP API")
    _add_common_flags(serve_parser)
    serve_parser.set_defaults(handler=cmd_serve)

    args = parser.parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
