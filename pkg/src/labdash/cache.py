"""Persistent response cache backing the offline mode.

One file per (patient, concept-or-header) key, holding the raw response
payload plus the fetch time. Writes go to a temp file in the same directory
and are renamed into place, so a reader never sees a torn entry: after a
crash mid-write it finds either the previous complete entry or nothing.
"""

from __future__ import annotations

import base64
import json
import os
import threading
import uuid
from collections import defaultdict
from datetime import datetime, timezone
from pathlib import Path

CacheKey = tuple[str, str | None]


class CacheError(Exception):
    """Cache storage failed (I/O error or corrupted entry); distinct from a miss."""


class ResponseCache:
    """Disk-backed last-write-wins cache of raw EHR response payloads.

    Writers are serialized per key; readers need no locking because entries
    only ever appear via atomic rename.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._write_locks: dict[CacheKey, threading.Lock] = defaultdict(threading.Lock)
        self._locks_guard = threading.Lock()

    def _lock_for(self, key: CacheKey) -> threading.Lock:
        with self._locks_guard:
            return self._write_locks[key]

    def _path_for(self, key: CacheKey) -> Path:
        patient_uuid, concept_uuid = key
        return self.root / f"{_safe(patient_uuid)}__{_safe(concept_uuid) if concept_uuid else 'header'}.json"

    def put(self, key: CacheKey, payload: bytes) -> None:
        """Store a payload for the key, atomically replacing any previous entry."""
        envelope = json.dumps(
            {
                "fetched_at": datetime.now(timezone.utc).isoformat(),
                "payload_b64": base64.b64encode(payload).decode("ascii"),
            }
        ).encode("utf-8")
        target = self._path_for(key)
        tmp = target.with_name(f".{target.name}.{uuid.uuid4().hex}.tmp")
        with self._lock_for(key):
            try:
                tmp.write_bytes(envelope)
                os.replace(tmp, target)
            except OSError as exc:
                raise CacheError(f"cache write failed for {key}: {exc}") from exc
            finally:
                tmp.unlink(missing_ok=True)

    def get(self, key: CacheKey) -> tuple[bytes, datetime] | None:
        """Return (payload, fetched_at) for the most recent put, or None on a miss."""
        target = self._path_for(key)
        try:
            raw = target.read_bytes()
        except FileNotFoundError:
            return None
        except OSError as exc:
            raise CacheError(f"cache read failed for {key}: {exc}") from exc
        try:
            envelope = json.loads(raw)
            payload = base64.b64decode(envelope["payload_b64"])
            fetched_at = datetime.fromisoformat(envelope["fetched_at"])
        except (ValueError, KeyError, TypeError) as exc:
            raise CacheError(f"cache entry for {key} is corrupted: {exc}") from exc
        return payload, fetched_at


def _safe(part: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in part)
