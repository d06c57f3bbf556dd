"""Batch front door: discovery reports, plan application, and the server."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import importlib

from . import discovery, table

# The package re-exports the materialize() function under the same name as
# this module, so fetch the module itself for late-bound lookups.
materialize = importlib.import_module(__package__ + ".materialize")
from .client import BackendConfig, KgClient
from .errors import KgForageError
from .plans import JoinPlan

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kgforage", description="Augment tabular data from knowledge graphs")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    disc = sub.add_parser("discover", help="report joinable attributes for a column")
    disc.add_argument("--input", required=True, help="CSV file")
    disc.add_argument("--column", required=True, help="string column to discover for")
    disc.add_argument("--backend", required=True, help="local:<fixture> or remote:<sparql url>")
    disc.add_argument("--seed", type=int, default=None)
    disc.add_argument("--sample-size", type=int, default=25)
    disc.add_argument("--top-k", type=int, default=50)
    disc.add_argument("--format", choices=("tsv", "json"), default="tsv")

    join = sub.add_parser("join", help="apply a plan file and write the augmented CSV")
    join.add_argument("--input", required=True, help="CSV file")
    join.add_argument("--plans", required=True, help="plan JSON file")
    join.add_argument("--output", required=True, help="augmented CSV path")
    join.add_argument("--backend", required=True)
    join.add_argument("--sidecar", default=None, help="provenance sidecar path (default <output>.plan.json)")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--backend", required=True)
    serve.add_argument("--ui-dir", default=None, help="directory of built UI assets")
    return parser


def _client(selector: str) -> KgClient:
    return KgClient(BackendConfig.from_selector(selector))


def _cmd_discover(args) -> int:
    dataset = table.import_csv(Path(args.input).read_bytes())
    cfg = discovery.DiscoveryConfig(
        sample_size=args.sample_size, top_k=args.top_k, rng_seed=args.seed
    )
    descriptors = discovery.discover_related(_client(args.backend), dataset, args.column, cfg)
    if args.format == "json":
        print(json.dumps([d.to_json() for d in descriptors], indent=2))
        return EXIT_OK
    print("property\tlabel\tcoverage\tdatatype\tcardinality\texamples")
    for d in descriptors:
        examples = "|".join(v.render() for v in d.examples)
        print(f"{d.property}\t{d.label}\t{d.coverage:.4f}\t{d.datatype}\t{d.cardinality}\t{examples}")
    return EXIT_OK


def _cmd_join(args) -> int:
    client = _client(args.backend)
    dataset = table.import_csv(Path(args.input).read_bytes())
    for plan in JoinPlan.list_from_file(args.plans):
        dataset = materialize.materialize(client, dataset, plan)
    Path(args.output).write_bytes(table.export_csv(dataset))
    sidecar = args.sidecar or f"{args.output}.plan.json"
    Path(sidecar).write_bytes(table.plan_sidecar(dataset))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        default_backend=BackendConfig.from_selector(args.backend), ui_dir=args.ui_dir
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.subcommand == "discover":
            return _cmd_discover(args)
        if args.subcommand == "join":
            return _cmd_join(args)
        return _cmd_serve(args)
    except (KgForageError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
