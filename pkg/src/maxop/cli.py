"""``maxop`` command line: run experiment configs, list kinds, print the version."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .experiments import KINDS, RUNNERS, ConfigError, default_params, load_config
from .inequalities import write_reports

CSV_COLUMNS = ("experiment", "m", "n", "alpha", "param", "quantity", "value")


# ---------------------------------------------------------------------------
# serialisation with 17 significant digits
# ---------------------------------------------------------------------------


def format_float(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    return format(v, ".17g")


def _plain(v):
    if dataclasses.is_dataclass(v) and not isinstance(v, type):
        return _plain(dataclasses.asdict(v))
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with sorted keys and floats at 17 significant digits."""
    obj = _plain(obj) if _level == 0 else obj
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, (int, str)):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(f"{inner}{json.dumps(k, ensure_ascii=False)}: {dumps(obj[k], indent, _level + 1)}"
                          for k in sorted(obj))
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(inner + dumps(x, indent, _level + 1) for x in obj) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _csv_text(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([format_float(float(r[c])) if isinstance(r[c], (float, np.floating)) else r[c]
                    for c in CSV_COLUMNS])
    return buf.getvalue()


def _write(path: Path, text: str) -> str:
    data = text.encode("utf-8")
    path.write_bytes(data)
    return hashlib.sha256(data).hexdigest()


# ---------------------------------------------------------------------------
# task execution
# ---------------------------------------------------------------------------


def _call(job):
    fn, args = job
    return fn(*args)


class _Mapper:
    """Ordered map over task descriptors; a process pool only when threads > 1."""

    def __init__(self, threads: int):
        self.threads = threads
        self.pool = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None

    def __call__(self, fn, arg_list):
        jobs = [(fn, tuple(a)) for a in arg_list]
        if self.pool is None or len(jobs) < 2:
            return [_call(j) for j in jobs]
        return list(self.pool.map(_call, jobs))

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()


def run_config(config_path, out_dir, threads: int | None = None, stream=sys.stdout) -> int:
    try:
        text, runs, runner = load_config(config_path)
    except ConfigError as exc:
        print(f"maxop: invalid config: {exc}", file=sys.stderr)
        return 2
    threads = threads or runner.get("threads") or os.cpu_count() or 1
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"maxop: cannot create output directory {out}: {exc}", file=sys.stderr)
        return 2
    started = time.time()
    mapper = _Mapper(threads)
    outputs, summaries, all_reports, failures = {}, [], [], []
    try:
        for spec in runs:
            t0 = time.time()
            rows, summary, reports, ok = RUNNERS[spec.kind](spec, mapper)
            doc = {"name": spec.name, "kind": spec.kind, "version": __version__,
                   "params": dataclasses.asdict(spec.params), "summary": summary, "pass": bool(ok)}
            outputs[f"{spec.name}.csv"] = _write(out / f"{spec.name}.csv", _csv_text(rows))
            outputs[f"{spec.name}.json"] = _write(out / f"{spec.name}.json", dumps(doc) + "\n")
            all_reports.extend(reports)
            summaries.append({"name": spec.name, "kind": spec.kind, "pass": bool(ok),
                              "wall_seconds": time.time() - t0})
            print(f"{spec.name} [{spec.kind}]: {'PASS' if ok else 'FAIL'}", file=stream)
            if not ok:
                failures.append(spec.name)
    except (ValueError, ArithmeticError) as exc:
        print(f"maxop: run failed: {exc}", file=sys.stderr)
        return 2
    finally:
        mapper.close()
    reports_path = out / "reports.jsonl"
    write_reports(reports_path, all_reports)
    manifest = {
        "tool": "maxop",
        "version": __version__,
        "command": ["maxop", "run", str(config_path), "--out", str(out_dir), "--threads", str(threads)],
        "config_path": str(Path(config_path).resolve()),
        "config_text": text,
        "runs": [spec.describe() for spec in runs],
        "results": summaries,
        "outputs_sha256": outputs,
        "threads": threads,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "wall_seconds": time.time() - started,
    }
    (out / "manifest.json").write_text(dumps(manifest) + "\n", encoding="utf-8")
    if failures:
        for name in failures:
            print(f"maxop: check failed in run {name!r}; see {out / (name + '.json')} and {reports_path}",
                  file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# listing
# ---------------------------------------------------------------------------


def list_experiments() -> list:
    items = []
    for kind, (cls, blurb) in KINDS.items():
        items.append({"kind": kind, "description": blurb,
                      "defaults": _plain(dataclasses.asdict(default_params(kind)))})
    return items


def _listing_text() -> str:
    lines = []
    for item in list_experiments():
        lines.append(f"{item['kind']:<11} {item['description']}")
        defaults = ", ".join(f"{k}={_short(v)}" for k, v in item["defaults"].items())
        lines.append(f"{'':<11} defaults: {defaults}")
    return "\n".join(lines)


def _short(v):
    if isinstance(v, float):
        return format(v, "g")
    if isinstance(v, list):
        return ",".join(str(_short(x)) for x in v)
    return v


def build_parser() -> argparse.ArgumentParser:
    kinds = "\n".join(f"  {k:<11} {blurb}" for k, (_, blurb) in KINDS.items())
    parser = argparse.ArgumentParser(
        prog="maxop",
        description="Multilinear maximal averages: experiment runner.",
        epilog="experiment kinds:\n" + kinds,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command")
    run = sub.add_parser("run", help="run every [run.<name>] section of a config")
    run.add_argument("config", help="INI config path")
    run.add_argument("--out", default="maxop-out", help="output directory (default: maxop-out)")
    run.add_argument("--threads", type=int, default=None,
                     help="worker processes (default: [runner] threads, else logical CPU count)")
    lst = sub.add_parser("list", help="list experiment kinds with default parameters")
    lst.add_argument("--json", action="store_true", help="machine-readable listing")
    sub.add_parser("version", help="print the library version")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2
    if args.command == "version":
        print(__version__)
        return 0
    if args.command == "list":
        print(dumps(list_experiments()) if args.json else _listing_text())
        return 0
    if args.threads is not None and args.threads < 1:
        print("maxop: --threads must be >= 1", file=sys.stderr)
        return 2
    return run_config(args.config, args.out, args.threads)


if __name__ == "__main__":
    sys.exit(main())
