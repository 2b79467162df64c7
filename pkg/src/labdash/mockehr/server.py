"""HTTP server half of the mock EHR.

A threaded stdlib HTTP server exposing the two REST resources the dashboard
uses, plus switchable failure modes for resilience testing:

    none  healthy operation
    503   every request answers 503 Service Unavailable
    drop  every connection is closed before any response is written

Patient demographics are not part of fixture files; they are synthesized
deterministically from the patient uuid so the same patient always presents
the same name, gender, and birthdate.
"""

from __future__ import annotations

import hashlib
import json
import logging
import socket
import threading
from datetime import date
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlencode, urlsplit

from ..model import ConceptRegistry
from .store import FixtureRow, ObservationStore

logger = logging.getLogger(__name__)

FAIL_MODES = ("none", "503", "drop")

DEFAULT_PAGE_LIMIT = 50

_GIVEN_NAMES = ["Asha", "Ravi", "Meera", "Arjun", "Lakshmi", "Vikram", "Priya", "Suresh", "Anita", "Rahul"]
_FAMILY_NAMES = ["Sharma", "Patel", "Reddy", "Iyer", "Khan", "Das", "Nair", "Gupta", "Bose", "Rao"]


def synth_demographics(patient_uuid: str) -> dict:
    """Deterministic name, gender, and birthdate for a patient uuid."""
    digest = hashlib.sha256(patient_uuid.encode("utf-8")).digest()
    given = _GIVEN_NAMES[digest[0] % len(_GIVEN_NAMES)]
    family = _FAMILY_NAMES[digest[1] % len(_FAMILY_NAMES)]
    gender = "M" if digest[2] % 2 == 0 else "F"
    birthdate = date(1950 + digest[3] % 41, 1 + digest[4] % 12, 1 + digest[5] % 28)
    return {
        "uuid": patient_uuid,
        "display": f"{given} {family}",
        "person": {"gender": gender, "birthdate": birthdate.isoformat()},
    }


class _Server(ThreadingHTTPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address, handler, store: ObservationStore, registry: ConceptRegistry, fail_mode: str):
        super().__init__(address, handler)
        self.store = store
        self.registry = registry
        self.fail_mode = fail_mode


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server: _Server

    def log_message(self, format: str, *args) -> None:
        logger.debug("mock-ehr: " + format, *args)

    def do_GET(self) -> None:
        mode = self.server.fail_mode
        if mode == "drop":
            try:
                self.connection.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            self.close_connection = True
            return
        if mode == "503":
            self._send_json(503, {"error": {"message": "service unavailable"}})
            return

        url = urlsplit(self.path)
        parts = [p for p in url.path.split("/") if p]
        if parts[:3] == ["ws", "rest", "v1"] and len(parts) == 5 and parts[3] == "patient":
            self._handle_patient(parts[4])
        elif parts[:3] == ["ws", "rest", "v1"] and len(parts) == 4 and parts[3] == "obs":
            self._handle_obs(parse_qs(url.query))
        else:
            self._send_json(404, {"error": {"message": f"no such resource: {url.path}"}})

    def _handle_patient(self, patient_uuid: str) -> None:
        if patient_uuid not in self.server.store:
            self._send_json(404, {"error": {"message": f"unknown patient {patient_uuid}"}})
            return
        self._send_json(200, synth_demographics(patient_uuid))

    def _handle_obs(self, query: dict[str, list[str]]) -> None:
        patient = _single(query, "patient")
        concept = _single(query, "concept")
        if patient is None or concept is None:
            self._send_json(400, {"error": {"message": "obs requires 'patient' and 'concept' parameters"}})
            return
        try:
            limit = int(_single(query, "limit") or DEFAULT_PAGE_LIMIT)
            start = int(_single(query, "startIndex") or 0)
        except ValueError:
            self._send_json(400, {"error": {"message": "'limit' and 'startIndex' must be integers"}})
            return
        if limit < 1 or start < 0:
            self._send_json(400, {"error": {"message": "'limit' must be >= 1 and 'startIndex' >= 0"}})
            return

        rows = sorted(
            self.server.store.observations_for(patient, concept),
            key=lambda r: (r.obs_datetime, r.obs_uuid),
        )
        page = rows[start : start + limit]
        body = {"results": [self._render_row(r) for r in page]}
        if start + limit < len(rows):
            next_query = urlencode(
                {"patient": patient, "concept": concept, "v": "full", "limit": limit, "startIndex": start + limit}
            )
            host = self.headers.get("Host") or "{}:{}".format(*self.server.server_address)
            body["links"] = [{"rel": "next", "uri": f"http://{host}/ws/rest/v1/obs?{next_query}"}]
        self._send_json(200, body)

    def _render_row(self, row: FixtureRow) -> dict:
        concept = self.server.registry.get(row.concept_uuid)
        return {
            "uuid": row.obs_uuid,
            "concept": {"uuid": row.concept_uuid, "display": concept.name},
            "obsDatetime": row.obs_datetime.isoformat(),
            "value": row.value,
        }

    def _send_json(self, status: int, body: dict) -> None:
        data = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


class MockEhrServer:
    """Lifecycle wrapper: bind, serve on a daemon thread, stop cleanly.

    fail_mode may be flipped at runtime while requests are in flight.
    """

    def __init__(
        self,
        store: ObservationStore,
        registry: ConceptRegistry,
        host: str = "127.0.0.1",
        port: int = 0,
        fail_mode: str = "none",
    ):
        if fail_mode not in FAIL_MODES:
            raise ValueError(f"fail_mode must be one of {FAIL_MODES}, got {fail_mode!r}")
        self._server = _Server((host, port), _Handler, store, registry, fail_mode)
        self._thread: threading.Thread | None = None

    @property
    def fail_mode(self) -> str:
        return self._server.fail_mode

    @fail_mode.setter
    def fail_mode(self, mode: str) -> None:
        if mode not in FAIL_MODES:
            raise ValueError(f"fail_mode must be one of {FAIL_MODES}, got {mode!r}")
        self._server.fail_mode = mode

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "MockEhrServer":
        thread = threading.Thread(
            target=lambda: self._server.serve_forever(poll_interval=0.05), name="mock-ehr", daemon=True
        )
        thread.start()
        self._thread = thread
        logger.info("mock EHR listening on %s", self.url)
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None

    def __enter__(self) -> "MockEhrServer":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.stop()


def _single(query: dict[str, list[str]], name: str) -> str | None:
    values = query.get(name)
    if not values:
        return None
    return values[0]
