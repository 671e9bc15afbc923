"""Session records and their optional on-disk persistence.

Runtime session state (loaded dataset, simulated home, locks) lives in
the service process; what persists is the durable record: message
history, routing decisions, and agent steps, stored in an embedded
sqlite key-value table so history survives a restart.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from pathlib import Path


class SessionStore:
    """Keyed JSON records; sqlite-backed when a path is given, else in-memory."""

    def __init__(self, db_path: str | Path | None = None):
        self._lock = threading.Lock()
        self._memory: dict[str, dict] = {}
        self._db: sqlite3.Connection | None = None
        if db_path is not None:
            path = Path(db_path)
            path.parent.mkdir(parents=True, exist_ok=True)
            self._db = sqlite3.connect(str(path), check_same_thread=False)
            self._db.execute(
                "CREATE TABLE IF NOT EXISTS sessions (session_id TEXT PRIMARY KEY, body TEXT NOT NULL)"
            )
            self._db.commit()

    def save(self, record: dict) -> None:
        session_id = record["session_id"]
        with self._lock:
            if self._db is not None:
                self._db.execute(
                    "INSERT INTO sessions (session_id, body) VALUES (?, ?) "
                    "ON CONFLICT(session_id) DO UPDATE SET body = excluded.body",
                    (session_id, json.dumps(record)),
                )
                self._db.commit()
            else:
                self._memory[session_id] = record

    def load(self, session_id: str) -> dict | None:
        with self._lock:
            if self._db is not None:
                row = self._db.execute(
                    "SELECT body FROM sessions WHERE session_id = ?", (session_id,)
                ).fetchone()
                return json.loads(row[0]) if row else None
            return self._memory.get(session_id)

    def close(self) -> None:
        with self._lock:
            if self._db is not None:
                self._db.close()
                self._db = None
