#!/usr/bin/env python3
"""
journal.py: Event log of runs, anchor checks and errors

JSONL files, one event per line, timestamped.
- runs.jsonl     one line per CLI command
- anchors.jsonl  one line per checked anchor
- errors.jsonl   exceptions caught on the way out

Set TORUS_LOGS to another directory, or to "off" to write nothing.
"""

import json
import os
import sys
import traceback
import functools
from pathlib import Path
from datetime import datetime
from typing import Callable, Optional

from errors import TorusError

DEFAULT_LOG_DIR = Path(__file__).parent / "logs"


def log_dir() -> Optional[Path]:
    """Resolved log directory, None when logging is off"""
    value = os.environ.get("TORUS_LOGS", "")
    if value.lower() == "off":
        return None
    path = Path(value) if value else DEFAULT_LOG_DIR
    path.mkdir(parents=True, exist_ok=True)
    return path


def stream(name: str) -> Optional[Path]:
    base = log_dir()
    return None if base is None else base / f"{name}.jsonl"


def append_event(name: str, event: dict):
    """One JSON line in <name>.jsonl, stamped; no-op when logging is off"""
    path = stream(name)
    if path is None:
        return
    line = json.dumps({**event, "timestamp": datetime.now().isoformat()}, ensure_ascii=False)
    with open(path, "a") as f:
        f.write(line + "\n")


def say(tag: str, message: str):
    """Tagged status line on stderr; stdout is reserved for reports"""
    print(f"[{tag}] {message}", file=sys.stderr)


# === ERRORS ===

def _failure(error: Exception) -> dict:
    # TorusError marks bad input; anything else is a bug in the toolkit
    return {
        "type": "input_error" if isinstance(error, TorusError) else "code_error",
        "error_type": type(error).__name__,
        "error_msg": str(error),
        "traceback": traceback.format_exc(),
    }


def log_error(error: Exception, context: str = ""):
    """Record an exception that was handled where it happened"""
    append_event("errors", {**_failure(error), "context": context})


def catch_error(command: Callable) -> Callable:
    """Wrap a cmd_* handler: journal what it raised with its settings, re-raise"""
    @functools.wraps(command)
    def wrapper(cfg, *rest):
        try:
            return command(cfg, *rest)
        except Exception as e:
            settings = vars(cfg) if hasattr(cfg, "__dict__") else cfg
            append_event("errors", {
                **_failure(e),
                "command": command.__name__.removeprefix("cmd_"),
                "settings": repr(settings)[:400],
            })
            raise
    return wrapper


# === RUNS & ANCHORS ===

def log_run(command: str, arguments: dict, exit_code: int, seconds: float):
    append_event("runs", {
        "type": "run",
        "command": command,
        "arguments": arguments,
        "exit_code": exit_code,
        "seconds": round(seconds, 6),
    })


def log_anchor(anchor_id: str, value, expected, passed: bool):
    append_event("anchors", {
        "type": "anchor",
        "id": anchor_id,
        "value": value,
        "expected": expected,
        "status": "PASS" if passed else "FAIL",
    })


# === READING ===

def read_entries(name: str, limit: int = 50) -> list:
    path = stream(name)
    if path is None or not path.exists():
        return []
    entries = []
    with open(path, 'r') as f:
        for line in f:
            try:
                entries.append(json.loads(line))
            except json.JSONDecodeError:
                continue
    return entries[-limit:]


def failing_anchors(limit: int = 50) -> list:
    """Anchor ids whose most recent check failed"""
    latest = {}
    for entry in read_entries("anchors", limit=10 ** 6):
        latest[entry.get("id")] = entry.get("status")
    return sorted(k for k, v in latest.items() if v == "FAIL")[:limit]


def main():
    import argparse
    parser = argparse.ArgumentParser(description="Journal of runs, anchors and errors")
    parser.add_argument('command', choices=['runs', 'errors', 'anchors', 'failing'])
    parser.add_argument('--limit', type=int, default=10)
    args = parser.parse_args()

    if args.command == 'failing':
        for anchor_id in failing_anchors(args.limit):
            print(anchor_id)
        return

    for entry in read_entries(args.command, args.limit):
        print(json.dumps(entry, ensure_ascii=False))


if __name__ == "__main__":
    main()
