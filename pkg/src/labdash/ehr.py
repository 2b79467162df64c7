"""Client for the OpenMRS-style REST wire protocol, with offline fallback.

Fetches refresh on every call and overwrite the cache; when the network (or
the server) fails, the last cached payload is served instead, flagged stale.
Observation queries follow "next" pagination links until exhausted, with
cycle detection so a corrupted server can never hang the dashboard.

The wire protocol carries no unit field; observation values are interpreted
in the queried concept's canonical unit, which is the contract the bundled
mock EHR enforces at fixture load.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime
from typing import Generic, TypeVar
from urllib.parse import urlencode

import requests

from .cache import CacheKey, ResponseCache
from .config import DashboardConfig
from .model import Gender, Observation, PatientHeader

logger = logging.getLogger(__name__)

T = TypeVar("T")

MAX_PAGES = 1000


class EhrError(Exception):
    """Base class for EHR client failures."""


class UnknownPatientError(EhrError):
    """The EHR answered authoritatively that the patient does not exist."""


class EhrUnavailableError(EhrError):
    """Network or server failure and no cached copy to fall back on."""


class ProtocolError(EhrError):
    """The EHR answered, but the response violates the wire protocol."""


@dataclass(frozen=True)
class EhrEndpoint:
    """Where and how to reach the EHR REST API."""

    base_url: str
    auth: tuple[str, str] | None = None
    request_timeout: float = 10.0

    def __post_init__(self) -> None:
        if not self.base_url.startswith(("http://", "https://")):
            raise ValueError(f"base_url must be absolute, got {self.base_url!r}")
        if self.request_timeout <= 0:
            raise ValueError(f"request_timeout must be > 0, got {self.request_timeout}")

    @property
    def root(self) -> str:
        return self.base_url.rstrip("/")


@dataclass(frozen=True)
class Fetched(Generic[T]):
    """A fetch result plus its provenance.

    stale means the value came from the offline cache because the EHR could
    not be reached; fetched_at is then the cache entry's write time.
    """

    value: T
    stale: bool = False
    fetched_at: datetime | None = None
    skipped_non_numeric: int = 0


class EhrClient:
    """Fetches patient headers and observations, caching every success."""

    def __init__(
        self,
        endpoint: EhrEndpoint,
        cache: ResponseCache,
        config: DashboardConfig,
        page_limit: int = 50,
    ):
        if page_limit < 1:
            raise ValueError(f"page_limit must be >= 1, got {page_limit}")
        self.endpoint = endpoint
        self.cache = cache
        self.config = config
        self.page_limit = page_limit

    # -- patient header -----------------------------------------------------

    def fetch_patient(self, patient_uuid: str) -> Fetched[PatientHeader]:
        key: CacheKey = (patient_uuid, None)
        url = f"{self.endpoint.root}/ws/rest/v1/patient/{patient_uuid}?v=full"
        try:
            payload = self._get(url, patient_uuid)
        except EhrUnavailableError:
            return self._from_cache(key, self._parse_patient)
        header = self._parse_patient(payload)
        self.cache.put(key, payload)
        return Fetched(value=header)

    def _parse_patient(self, payload: bytes) -> PatientHeader:
        doc = _load_json(payload)
        uuid = _require(doc, "uuid")
        display = _require(doc, "display")
        person = _require(doc, "person")
        if not isinstance(person, dict):
            raise ProtocolError("patient resource field 'person' is not an object")
        gender = _require(person, "gender", parent="person")
        birth_raw = _require(person, "birthdate", parent="person")
        try:
            birthdate = datetime.fromisoformat(str(birth_raw)[:10]).date()
        except ValueError as exc:
            raise ProtocolError(f"patient birthdate {birth_raw!r} is not an ISO date") from exc
        try:
            return PatientHeader(
                patient_uuid=str(uuid),
                display_name=str(display),
                gender=Gender.parse(str(gender)),
                birthdate=birthdate,
            )
        except ValueError as exc:
            raise ProtocolError(f"invalid patient resource: {exc}") from exc

    # -- observations -------------------------------------------------------

    def fetch_observations(self, patient_uuid: str, concept_uuid: str) -> Fetched[list[Observation]]:
        key: CacheKey = (patient_uuid, concept_uuid)
        try:
            results = self._fetch_obs_pages(patient_uuid, concept_uuid)
        except EhrUnavailableError:
            return self._from_cache(key, lambda payload: self._parse_observations(payload, patient_uuid, concept_uuid))
        payload = json.dumps({"results": results}).encode("utf-8")
        observations, skipped = self._parse_observations(payload, patient_uuid, concept_uuid)
        self.cache.put(key, payload)
        return Fetched(value=observations, skipped_non_numeric=skipped)

    def fetch_all_observations(self, patient_uuid: str) -> dict[str, Fetched[list[Observation]]]:
        """Fetch every registry concept's observations, one request lane each."""
        uuids = self.config.registry.uuids
        with ThreadPoolExecutor(max_workers=max(1, len(uuids))) as pool:
            fetched = pool.map(lambda c: self.fetch_observations(patient_uuid, c), uuids)
            return dict(zip(uuids, fetched))

    def _fetch_obs_pages(self, patient_uuid: str, concept_uuid: str) -> list[dict]:
        query = urlencode(
            {
                "patient": patient_uuid,
                "concept": concept_uuid,
                "v": "full",
                "limit": self.page_limit,
                "startIndex": 0,
            }
        )
        url = f"{self.endpoint.root}/ws/rest/v1/obs?{query}"
        visited = {url}
        results: list[dict] = []
        for _ in range(MAX_PAGES):
            doc = _load_json(self._get(url, patient_uuid))
            page = doc.get("results")
            if not isinstance(page, list):
                raise ProtocolError("observation response has no 'results' list")
            results.extend(page)
            url = _next_link(doc)
            if url is None:
                return results
            if url in visited:
                raise ProtocolError(f"pagination loop: next link {url} already visited")
            visited.add(url)
        raise ProtocolError(f"pagination did not terminate within {MAX_PAGES} pages")

    def _parse_observations(
        self, payload: bytes, patient_uuid: str, concept_uuid: str
    ) -> tuple[list[Observation], int]:
        doc = _load_json(payload)
        page = doc.get("results")
        if not isinstance(page, list):
            raise ProtocolError("observation response has no 'results' list")
        concept = self.config.registry.get(concept_uuid)
        tz = self.config.tz
        observations: list[Observation] = []
        skipped = 0
        for i, entry in enumerate(page):
            if not isinstance(entry, dict):
                raise ProtocolError(f"results[{i}] is not an object")
            concept_ref = entry.get("concept")
            if not isinstance(concept_ref, dict) or "uuid" not in concept_ref:
                raise ProtocolError(f"results[{i}] is missing 'concept.uuid'")
            when_raw = _require(entry, "obsDatetime", parent=f"results[{i}]")
            try:
                when = datetime.fromisoformat(str(when_raw))
            except ValueError as exc:
                raise ProtocolError(f"results[{i}]: obsDatetime {when_raw!r} is not ISO-8601") from exc
            if when.tzinfo is None:
                raise ProtocolError(f"results[{i}]: obsDatetime {when_raw!r} has no UTC offset")
            value = entry.get("value")
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                # Coded or text observations never reach the dashboard, but
                # are counted so data problems stay visible.
                skipped += 1
                logger.info("skipping non-numeric observation %s for concept %s", entry.get("uuid"), concept_uuid)
                continue
            try:
                observations.append(
                    Observation.make(
                        patient_uuid=patient_uuid,
                        concept_uuid=str(concept_ref["uuid"]),
                        value=float(value),
                        unit=concept.canonical_unit,
                        obs_datetime=when,
                        clinic_tz=tz,
                        obs_uuid=str(entry["uuid"]) if "uuid" in entry else None,
                    )
                )
            except ValueError as exc:
                raise ProtocolError(f"results[{i}]: {exc}") from exc
        return observations, skipped

    # -- transport & fallback ----------------------------------------------

    def _get(self, url: str, patient_uuid: str) -> bytes:
        try:
            response = requests.get(url, auth=self.endpoint.auth, timeout=self.endpoint.request_timeout)
        except requests.RequestException as exc:
            logger.warning("EHR request failed (%s), trying cache", exc)
            raise EhrUnavailableError(f"EHR unreachable: {exc}") from exc
        if response.status_code == 404:
            raise UnknownPatientError(f"patient {patient_uuid} not found in EHR")
        if response.status_code >= 500:
            logger.warning("EHR returned %s, trying cache", response.status_code)
            raise EhrUnavailableError(f"EHR error status {response.status_code}")
        if response.status_code != 200:
            raise ProtocolError(f"unexpected EHR status {response.status_code} for {url}")
        return response.content

    def _from_cache(self, key: CacheKey, parse):
        cached = self.cache.get(key)
        if cached is None:
            raise EhrUnavailableError(f"EHR unreachable and no cached copy for {key}")
        payload, fetched_at = cached
        parsed = parse(payload)
        if isinstance(parsed, tuple):
            value, skipped = parsed
            return Fetched(value=value, stale=True, fetched_at=fetched_at, skipped_non_numeric=skipped)
        return Fetched(value=parsed, stale=True, fetched_at=fetched_at)


def _load_json(payload: bytes) -> dict:
    try:
        doc = json.loads(payload)
    except ValueError as exc:
        raise ProtocolError(f"response body is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ProtocolError("response body is not a JSON object")
    return doc


def _require(doc: dict, name: str, parent: str | None = None):
    if name not in doc or doc[name] is None:
        where = f"{parent}.{name}" if parent else name
        raise ProtocolError(f"response is missing required field '{where}'")
    return doc[name]


def _next_link(doc: dict) -> str | None:
    links = doc.get("links")
    if links is None:
        return None
    if not isinstance(links, list):
        raise ProtocolError("'links' is not a list")
    for link in links:
        if isinstance(link, dict) and link.get("rel") == "next":
            uri = link.get("uri")
            if not isinstance(uri, str) or not uri:
                raise ProtocolError("next link has no uri")
            return uri
    return None
