import tempfile
from pathlib import Path

import pytest

from labdash.cache import ResponseCache
from labdash.config import default_config_path, load_config
from labdash.ehr import EhrClient, EhrEndpoint
from labdash.mockehr import MockEhrServer, load_fixtures

REPO_ROOT = Path(__file__).resolve().parent.parent
DEMO_FIXTURE = REPO_ROOT / "fixtures" / "demo-patient.csv"
DEMO_PATIENT = "cc990d23-94c1-511f-9bc3-7d3485e3c724"


@pytest.fixture(scope="session")
def config():
    return load_config(default_config_path())


@pytest.fixture(scope="session")
def demo_csv_text():
    return DEMO_FIXTURE.read_text(encoding="utf-8")


@pytest.fixture
def demo_store(config, demo_csv_text):
    return load_fixtures(demo_csv_text, config.registry)


@pytest.fixture
def mock_server(config, demo_store):
    with MockEhrServer(demo_store, config.registry) as server:
        yield server


@pytest.fixture
def cache_dir(tmp_path):
    return tmp_path / "cache"


@pytest.fixture
def client(config, mock_server, cache_dir):
    return EhrClient(EhrEndpoint(base_url=mock_server.url), ResponseCache(cache_dir), config)


def make_client(config, url, cache_root=None, **kwargs):
    cache_root = cache_root or tempfile.mkdtemp()
    return EhrClient(EhrEndpoint(base_url=url), ResponseCache(cache_root), config, **kwargs)
