"""Command-line front end: explain / compare / serve.

Reports are written as canonical JSON bytes (no trailing newline), so a
CLI run and an HTTP request with the same inputs and seed produce
byte-identical output. Status chatter goes to stderr only.

Exit codes: 0 success, 2 input/usage error, 3 degenerate or overlapping
selection.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
from pathlib import Path

from .canonical import canonical_bytes
from .errors import (
    ClusterLensError,
    DegenerateLabelsError,
    DegenerateSelectionError,
    SelectionOverlapError,
)
from .explain import ClusterSelection, compare_selections, explain_selection
from .training import TrainingConfig

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3

DEFAULT_LISTEN = "127.0.0.1:8080"


class _CliInputError(Exception):
    pass


def _read_ids_file(path: str) -> tuple[int, ...]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _CliInputError(f"cannot read selection file {path}: {exc}") from None
    ids = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            ids.append(int(line))
        except ValueError:
            raise _CliInputError(
                f"{path}:{lineno}: {line!r} is not an integer point id"
            ) from None
    return tuple(ids)


def _parse_ids_list(raw: str) -> tuple[int, ...]:
    ids = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            ids.append(int(part))
        except ValueError:
            raise _CliInputError(f"{part!r} is not an integer point id") from None
    return tuple(ids)


def _selection_from_args(file_arg, ids_arg, flag: str) -> ClusterSelection:
    if file_arg is None and ids_arg is None:
        raise _CliInputError(f"provide {flag} FILE or {flag}-ids LIST")
    if file_arg is not None and ids_arg is not None:
        raise _CliInputError(f"{flag} and {flag}-ids are mutually exclusive")
    ids = _read_ids_file(file_arg) if file_arg is not None else _parse_ids_list(ids_arg)
    return ClusterSelection(ids)


def _load_config(path, seed) -> TrainingConfig:
    doc = {}
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise _CliInputError(f"cannot read config file {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise _CliInputError(f"{path} is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise _CliInputError(f"{path} must hold a JSON object")
    if seed is not None:
        doc = {**doc, "seed": seed}
    try:
        return TrainingConfig.from_json_dict(doc)
    except TypeError as exc:
        raise _CliInputError(f"bad training config: {exc}") from None


def _load_dataset(path: str):
    from .data import load_csv

    source = Path(path)
    if not source.exists():
        raise _CliInputError(f"no such file: {path}")
    return load_csv(source.read_bytes(), name=source.name)


def _emit_report(report, out_path) -> None:
    payload = canonical_bytes(report.to_json_dict())
    if out_path is None or out_path == "-":
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    else:
        Path(out_path).write_bytes(payload)
        print(f"wrote report to {out_path}", file=sys.stderr)


def cmd_explain(args) -> int:
    dataset = _load_dataset(args.data)
    selection = _selection_from_args(args.select, args.select_ids, "--select")
    config = _load_config(args.config, args.seed)
    report = explain_selection(dataset, selection, config)
    _emit_report(report, args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    dataset = _load_dataset(args.data)
    sel_a = _selection_from_args(args.select_a, args.select_ids_a, "--select-a")
    sel_b = _selection_from_args(args.select_b, args.select_ids_b, "--select-b")
    config = _load_config(args.config, args.seed)
    report = compare_selections(dataset, sel_a, sel_b, config)
    _emit_report(report, args.out)
    return EXIT_OK


def _parse_listen(value: str):
    host, sep, port = value.rpartition(":")
    if not sep or not host or not port.isdigit():
        raise _CliInputError(f"--listen needs HOST:PORT, got {value!r}")
    return host, int(port)


def cmd_serve(args) -> int:
    import os

    listen = args.listen or os.environ.get("LISTEN_ADDR", DEFAULT_LISTEN)
    host, port = _parse_listen(listen)
    # Fail fast with a clean exit code instead of a uvicorn traceback.
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        raise _CliInputError(f"cannot listen on {host}:{port}: {exc}") from None
    finally:
        probe.close()

    import uvicorn

    from .service import create_app

    app = create_app(args.data_dir)
    print(f"listening on http://{host}:{port}", file=sys.stderr)
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clusterlens",
        description="Explain scatterplot selections with a glass-box additive model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--data", required=True, help="feature CSV (header optional)")
        p.add_argument("--config", help="JSON file of training config overrides")
        p.add_argument("--seed", type=int, help="training seed (overrides config file)")
        p.add_argument("--out", help="write report JSON here instead of stdout")

    p_explain = sub.add_parser("explain", help="explain one selection vs the rest")
    add_common(p_explain)
    p_explain.add_argument("--select", help="file with one selected point id per line")
    p_explain.add_argument("--select-ids", help="comma-separated selected point ids")
    p_explain.set_defaults(func=cmd_explain)

    p_compare = sub.add_parser("compare", help="contrast two disjoint selections")
    add_common(p_compare)
    p_compare.add_argument("--select-a", help="file of point ids for side A")
    p_compare.add_argument("--select-ids-a", help="comma-separated ids for side A")
    p_compare.add_argument("--select-b", help="file of point ids for side B")
    p_compare.add_argument("--select-ids-b", help="comma-separated ids for side B")
    p_compare.set_defaults(func=cmd_compare)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--listen", help="HOST:PORT (default env LISTEN_ADDR or "
                         f"{DEFAULT_LISTEN})")
    p_serve.add_argument("--data-dir", help="artifact directory (default env DATA_DIR "
                         "or ./data)")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DegenerateSelectionError, SelectionOverlapError, DegenerateLabelsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (_CliInputError, ClusterLensError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
