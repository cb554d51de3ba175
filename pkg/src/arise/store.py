"""Append-only JSON-lines persistence with full-state rebuild on startup.

One file per entity; records are only ever appended, so restart + replay
reproduces the exact in-memory state and the files stay diff-able. Binary
artifacts (artwork PNGs) live next to the logs as plain files.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path


class JsonlStore:
    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _lock_for(self, entity: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(entity, threading.Lock())

    def path_for(self, entity: str) -> Path:
        return self.data_dir / f"{entity}.jsonl"

    def append(self, entity: str, record: dict) -> None:
        line = json.dumps(record, ensure_ascii=False)
        with self._lock_for(entity):
            with self.path_for(entity).open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def read_all(self, entity: str) -> list[dict]:
        path = self.path_for(entity)
        if not path.exists():
            return []
        records = []
        with self._lock_for(entity):
            with path.open(encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        records.append(json.loads(line))
        return records

    def write_blob(self, relpath: str, data: bytes) -> Path:
        path = self.data_dir / relpath
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
        return path

    def read_blob(self, relpath: str) -> bytes:
        return (self.data_dir / relpath).read_bytes()

    def write_snapshot(self, relpath: str, payload) -> Path:
        """Overwrite a derived-state JSON file (recompute-from-source data)."""
        path = self.data_dir / relpath
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
        return path
