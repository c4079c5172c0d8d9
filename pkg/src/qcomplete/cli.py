"""Command-line workbench: qc load / query / complete / demo-packages / serve.

Relations live in a workspace directory as normalized CSV files with a
JSON schema sidecar, so types survive reloading.  The workspace comes
from --workspace, else the QC_WORKSPACE environment variable, else
``.qc_workspace`` in the current directory.

Exit codes: 0 success (warnings go to stderr), 2 bad usage or bad
input, 3 internal fault.  Data goes to stdout, everything else to
stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from .engine import EngineConfig, complete, verify
from .errors import InputError
from .evaluate import evaluate
from .features import FeatureConfig
from .service import completion_set_json, create_app
from .sqlmodel import format_number, parse
from .store import (
    ColumnSchema,
    Relation,
    RelationStore,
    demo_packages,
    relation_to_csv,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def workspace_path(arg: str | None) -> Path:
    return Path(arg or os.environ.get("QC_WORKSPACE") or ".qc_workspace")


def save_relation(ws: Path, name: str, relation: Relation) -> None:
    ws.mkdir(parents=True, exist_ok=True)
    (ws / f"{name}.csv").write_text(relation_to_csv(relation), encoding="utf-8")
    sidecar = {"columns": [{"name": c.name, "type": c.type, "nullable": c.nullable}
                           for c in relation.schema]}
    (ws / f"{name}.schema.json").write_text(json.dumps(sidecar, indent=2) + "\n",
                                            encoding="utf-8")


def open_store(directory: Path) -> RelationStore:
    """Load every CSV in a directory, honoring schema sidecars."""
    store = RelationStore()
    if not directory.is_dir():
        return store
    for csv_path in sorted(directory.glob("*.csv")):
        name = csv_path.stem
        sidecar = csv_path.parent / f"{name}.schema.json"
        schema = None
        if sidecar.exists():
            spec = json.loads(sidecar.read_text(encoding="utf-8"))
            schema = [ColumnSchema(c["name"], c["type"], c["nullable"])
                      for c in spec["columns"]]
        store.load_csv(csv_path, name, schema=schema)
    return store


def _cell_text(value, null_as: str = "") -> str:
    if value is None:
        return null_as
    if isinstance(value, float):
        return format_number(value)
    return value


# --- subcommands ------------------------------------------------------------


def cmd_load(args) -> int:
    ws = workspace_path(args.workspace)
    path = Path(args.csv_file)
    if not path.is_file():
        raise InputError(f"no such file: {path}")
    name = args.name or path.stem
    store = RelationStore()
    relation = store.load_csv(path, name)
    save_relation(ws, name, relation)
    print(f"loaded {relation.row_count} rows into {name} "
          f"({len(relation.schema)} columns)")
    return EXIT_OK


def cmd_query(args) -> int:
    store = open_store(workspace_path(args.workspace))
    rs = evaluate(parse(args.sql), store.snapshot(), max_rows=args.max_rows)
    names = [c.name for c in rs.columns]
    if args.format == "json":
        print(json.dumps({
            "columns": [{"table": c.table, "name": c.name, "type": c.schema.type,
                         "nullable": c.schema.nullable} for c in rs.columns],
            "rows": [list(r) for r in rs.rows],
            "truncated": rs.truncated,
        }, indent=2))
    elif args.format == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(names)
        for row in rs.rows:
            writer.writerow([_cell_text(v) for v in row])
    else:
        grid = [names] + [[_cell_text(v, "NULL") for v in row] for row in rs.rows]
        widths = [max(len(r[j]) for r in grid) for j in range(len(names))]
        for r, row in enumerate(grid):
            print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
            if r == 0:
                print("  ".join("-" * w for w in widths))
    note = " (truncated)" if rs.truncated else ""
    print(f"{len(rs.rows)} rows{note}", file=sys.stderr)
    return EXIT_OK


def cmd_complete(args) -> int:
    store = open_store(workspace_path(args.workspace))
    db = store.snapshot()
    cfg = EngineConfig(k=args.k, seed=args.seed, max_rows=args.max_rows,
                       feature=FeatureConfig(), debug_tree=args.debug_tree)
    cs = complete(args.sql, cfg, db)
    report = verify(cs, db) if args.verify else None

    if args.debug_tree and "tree_dump" in cs.diagnostics:
        print(cs.diagnostics["tree_dump"], file=sys.stderr)

    if args.format == "json":
        payload = completion_set_json(cs)
        if report is not None:
            payload["verification"] = {
                "ok": report.ok,
                "each_is_completion": report.each_is_completion,
                "pairwise_disjoint": report.pairwise_disjoint,
                "covers_original": report.covers_original,
                "checked_rows": report.checked_rows,
                "truncated": report.truncated,
                "witnesses": report.witnesses,
            }
        print(json.dumps(payload, indent=2))
    else:
        d = cs.diagnostics
        print(f"# k_requested={cs.k_requested} k_delivered={cs.k_delivered} "
              f"working_rows={d['working_rows']} "
              f"truncated={str(d['truncated']).lower()} "
              f"insufficient_diversity={str(d['insufficient_diversity']).lower()}")
        for i, comp in enumerate(cs.completions, start=1):
            print(f"[{i}] ({comp.row_count} rows) {comp.rendered}")
        if report is not None:
            if report.ok:
                print("partition: OK")
            else:
                print("partition: FAILED")
                for w in report.witnesses:
                    print(f"  {w}")

    if cs.diagnostics["insufficient_diversity"]:
        print(f"warning: only {cs.k_delivered} of {cs.k_requested} completions "
              "possible (insufficient diversity)", file=sys.stderr)
    if report is not None and not report.ok:
        return EXIT_INTERNAL  # a broken partition is our bug, not the user's
    return EXIT_OK


def cmd_demo_packages(args) -> int:
    ws = workspace_path(args.workspace)
    db = demo_packages(seed=args.seed)
    for name, rel in db.relations.items():
        save_relation(ws, name, rel)
        print(f"wrote {name}: {rel.row_count} rows")
    print(f"workspace: {ws}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    data_dir = Path(args.data) if args.data else workspace_path(args.workspace)
    store = open_store(data_dir)
    names = ", ".join(store.snapshot().relations) or "none"
    print(f"serving relations: {names}", file=sys.stderr)
    app = create_app(store, timeout=args.timeout)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


# --- wiring --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qc",
        description="Partition a query's answer into k readable sub-queries.")
    parser.add_argument("--workspace", metavar="DIR",
                        help="relation directory (default: $QC_WORKSPACE or .qc_workspace)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("load", help="ingest a CSV file into the workspace")
    p.add_argument("csv_file")
    p.add_argument("--name", help="relation name (default: file stem)")
    p.set_defaults(func=cmd_load)

    p = sub.add_parser("query", help="evaluate a query and print its rows")
    p.add_argument("sql")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--max-rows", type=int, default=None)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("complete", help="split a query into k sub-queries")
    p.add_argument("sql")
    p.add_argument("--k", type=int, required=True, help="number of completions (>= 2)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-rows", type=int, default=100_000)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--verify", action="store_true",
                   help="re-check disjointness and cover, print the result")
    p.add_argument("--debug-tree", action="store_true",
                   help="dump the decision tree to stderr")
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("demo-packages",
                       help="generate the Cities/Packages demo data into the workspace")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_demo_packages)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default=os.environ.get("QC_HOST", "127.0.0.1"))
    p.add_argument("--port", type=int, default=int(os.environ.get("QC_PORT", "8177")))
    p.add_argument("--data", default=os.environ.get("QC_DATA"),
                   help="directory of CSVs to serve (default: the workspace)")
    p.add_argument("--timeout", type=float,
                   default=float(os.environ.get("QC_TIMEOUT", "30")))
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - last-resort boundary
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
