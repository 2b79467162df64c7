import pytest
import requests

from labdash.mockehr import (
    FixtureError,
    GeneratorSpec,
    MockEhrServer,
    ObservationStore,
    generate_fixture,
    load_fixtures,
)
from labdash.mockehr.generate import ConceptTrajectory, DEFAULT_TRAJECTORIES
from labdash.mockehr.server import synth_demographics
from labdash.model import HBA1C_UUID, default_registry

from conftest import DEMO_PATIENT

REGISTRY = default_registry()

HEADER = "patient_uuid,concept_uuid,value,unit,obs_datetime"


def row(value="6.1", unit="percent", when="2018-11-30T09:00:00+05:30", concept=HBA1C_UUID):
    return f"p1,{concept},{value},{unit},{when}"


class TestLoadFixtures:
    def test_demo_fixture_loads_48_observations(self, config, demo_csv_text):
        store = load_fixtures(demo_csv_text, config.registry)
        assert len(store) == 48
        assert store.patients == [DEMO_PATIENT]

    def test_empty_file_with_header_is_ok(self):
        store = load_fixtures(HEADER + "\n", REGISTRY)
        assert len(store) == 0

    def test_missing_file_content_rejected(self):
        with pytest.raises(FixtureError, match="empty"):
            load_fixtures("", REGISTRY)

    def test_wrong_header_rejected(self):
        with pytest.raises(FixtureError, match="line 1"):
            load_fixtures("patient,concept,value\n" + row(), REGISTRY)

    def test_text_value_rejected_with_line_number(self):
        text = "\n".join([HEADER, row(), row(value="high")])
        with pytest.raises(FixtureError, match="line 3.*not a number"):
            load_fixtures(text, REGISTRY)

    def test_unknown_concept_rejected_with_uuid(self):
        text = "\n".join([HEADER, row(concept="mystery-concept")])
        with pytest.raises(FixtureError, match="line 2.*mystery-concept"):
            load_fixtures(text, REGISTRY)

    def test_non_canonical_unit_rejected(self):
        # The wire protocol carries no unit field, so a fixture row in a
        # non-canonical unit could never round-trip; refuse it up front.
        text = "\n".join([HEADER, row(unit="mmol_per_mol")])
        with pytest.raises(FixtureError, match="line 2.*canonical"):
            load_fixtures(text, REGISTRY)

    def test_unknown_unit_rejected(self):
        text = "\n".join([HEADER, row(unit="furlongs")])
        with pytest.raises(FixtureError, match="line 2.*unknown unit"):
            load_fixtures(text, REGISTRY)

    def test_naive_timestamp_rejected(self):
        text = "\n".join([HEADER, row(when="2018-11-30T09:00:00")])
        with pytest.raises(FixtureError, match="line 2.*offset"):
            load_fixtures(text, REGISTRY)

    def test_negative_value_rejected(self):
        text = "\n".join([HEADER, row(value="-3")])
        with pytest.raises(FixtureError, match="line 2"):
            load_fixtures(text, REGISTRY)

    def test_obs_uuids_stable_across_reloads(self):
        text = "\n".join([HEADER, row()])
        first = load_fixtures(text, REGISTRY).observations_for("p1", HBA1C_UUID)
        second = load_fixtures(text, REGISTRY).observations_for("p1", HBA1C_UUID)
        assert first[0].obs_uuid == second[0].obs_uuid


class TestGenerator:
    def test_same_seed_same_bytes(self):
        a = generate_fixture(GeneratorSpec(seed=42), REGISTRY)
        b = generate_fixture(GeneratorSpec(seed=42), REGISTRY)
        assert a == b

    def test_different_seeds_differ(self):
        a = generate_fixture(GeneratorSpec(seed=1), REGISTRY)
        b = generate_fixture(GeneratorSpec(seed=2), REGISTRY)
        assert a != b

    def test_six_visits_eight_concepts_is_48_rows(self):
        text = generate_fixture(GeneratorSpec(seed=1, visits=6), REGISTRY)
        lines = text.strip().splitlines()
        assert lines[0] == HEADER
        assert len(lines) - 1 == 48

    def test_output_loads_back_through_fixture_parser(self):
        text = generate_fixture(GeneratorSpec(seed=9, visits=4), REGISTRY)
        store = load_fixtures(text, REGISTRY)
        assert len(store) == 32
        assert len(store.patients) == 1

    def test_degenerate_trajectory_repeats_baseline(self):
        flat = {uuid: ConceptTrajectory(5.0, 0.0, 0.0) for uuid in DEFAULT_TRAJECTORIES}
        text = generate_fixture(GeneratorSpec(seed=3, visits=4, trajectories=flat), REGISTRY)
        store = load_fixtures(text, REGISTRY)
        values = {r.value for rows in store.rows_by_patient.values() for r in rows}
        assert values == {5.0}

    def test_values_floored_at_zero(self):
        sinking = {uuid: ConceptTrajectory(1.0, -10.0, 0.1) for uuid in DEFAULT_TRAJECTORIES}
        text = generate_fixture(GeneratorSpec(seed=3, visits=5, trajectories=sinking), REGISTRY)
        store = load_fixtures(text, REGISTRY)
        assert all(r.value >= 0 for rows in store.rows_by_patient.values() for r in rows)

    def test_visits_spaced_by_interval(self):
        text = generate_fixture(GeneratorSpec(seed=3, visits=3, interval_days=10), REGISTRY)
        store = load_fixtures(text, REGISTRY)
        rows = store.observations_for(GeneratorSpec(seed=3).resolved_patient_uuid(), HBA1C_UUID)
        days = sorted({r.obs_datetime.date() for r in rows})
        assert (days[1] - days[0]).days == 10
        assert (days[2] - days[1]).days == 10

    def test_invalid_spec_rejected(self):
        with pytest.raises(ValueError):
            GeneratorSpec(seed=1, visits=0)
        with pytest.raises(ValueError):
            GeneratorSpec(seed=1, interval_days=0)


class TestServer:
    def test_patient_header_shape(self, config, mock_server):
        response = requests.get(f"{mock_server.url}/ws/rest/v1/patient/{DEMO_PATIENT}?v=full", timeout=5)
        assert response.status_code == 200
        body = response.json()
        assert body["uuid"] == DEMO_PATIENT
        assert body["display"]
        assert body["person"]["gender"] in ("M", "F")
        assert body["person"]["birthdate"] == synth_demographics(DEMO_PATIENT)["person"]["birthdate"]

    def test_unknown_patient_is_404(self, mock_server):
        response = requests.get(f"{mock_server.url}/ws/rest/v1/patient/who?v=full", timeout=5)
        assert response.status_code == 404

    def test_unknown_path_is_404(self, mock_server):
        assert requests.get(f"{mock_server.url}/ws/rest/v1/nonsense", timeout=5).status_code == 404

    def test_obs_requires_patient_and_concept(self, mock_server):
        response = requests.get(f"{mock_server.url}/ws/rest/v1/obs?patient=p1", timeout=5)
        assert response.status_code == 400

    def test_obs_rejects_non_integer_paging(self, mock_server):
        response = requests.get(
            f"{mock_server.url}/ws/rest/v1/obs",
            params={"patient": DEMO_PATIENT, "concept": HBA1C_UUID, "limit": "many"},
            timeout=5,
        )
        assert response.status_code == 400

    def test_pagination_splits_and_links(self, config, mock_server):
        # 7 HbA1c rows at limit=2: pages of 2,2,2,1 and a next link on all but the last
        url = f"{mock_server.url}/ws/rest/v1/obs"
        params = {"patient": DEMO_PATIENT, "concept": HBA1C_UUID, "v": "full", "limit": 2, "startIndex": 0}
        seen = []
        response = requests.get(url, params=params, timeout=5).json()
        while True:
            seen.extend(r["value"] for r in response["results"])
            links = [l for l in response.get("links", []) if l["rel"] == "next"]
            if not links:
                break
            assert len(response["results"]) == 2
            response = requests.get(links[0]["uri"], timeout=5).json()
        assert len(seen) == 7

    def test_unknown_patient_obs_is_empty_200(self, mock_server):
        response = requests.get(
            f"{mock_server.url}/ws/rest/v1/obs",
            params={"patient": "ghost", "concept": HBA1C_UUID},
            timeout=5,
        )
        assert response.status_code == 200
        assert response.json()["results"] == []

    def test_503_mode(self, mock_server):
        mock_server.fail_mode = "503"
        response = requests.get(f"{mock_server.url}/ws/rest/v1/patient/{DEMO_PATIENT}?v=full", timeout=5)
        assert response.status_code == 503

    def test_drop_mode_closes_connection(self, mock_server):
        mock_server.fail_mode = "drop"
        with pytest.raises(requests.RequestException):
            requests.get(f"{mock_server.url}/ws/rest/v1/patient/{DEMO_PATIENT}?v=full", timeout=5)

    def test_fail_mode_is_recoverable(self, mock_server):
        mock_server.fail_mode = "drop"
        mock_server.fail_mode = "none"
        response = requests.get(f"{mock_server.url}/ws/rest/v1/patient/{DEMO_PATIENT}?v=full", timeout=5)
        assert response.status_code == 200

    def test_invalid_fail_mode_rejected(self, config):
        with pytest.raises(ValueError):
            MockEhrServer(ObservationStore(), config.registry, fail_mode="explode")

    def test_registered_patient_with_no_obs(self, config):
        store = ObservationStore()
        store.add_patient("lonely")
        with MockEhrServer(store, config.registry) as server:
            assert requests.get(f"{server.url}/ws/rest/v1/patient/lonely?v=full", timeout=5).status_code == 200
            body = requests.get(
                f"{server.url}/ws/rest/v1/obs", params={"patient": "lonely", "concept": HBA1C_UUID}, timeout=5
            ).json()
            assert body["results"] == []
