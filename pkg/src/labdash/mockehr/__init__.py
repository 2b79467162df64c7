"""A small in-process EHR server speaking the OpenMRS-style REST protocol.

Serves observation fixtures from CSV, paginates with next links, and can be
switched into failure modes (503 or dropped connections) to exercise the
dashboard's offline fallback.
"""

from .generate import ConceptTrajectory, GeneratorSpec, generate_fixture
from .server import MockEhrServer
from .store import FixtureError, FixtureRow, ObservationStore, load_fixtures

__all__ = [
    "ConceptTrajectory",
    "FixtureError",
    "FixtureRow",
    "GeneratorSpec",
    "MockEhrServer",
    "ObservationStore",
    "generate_fixture",
    "load_fixtures",
]
