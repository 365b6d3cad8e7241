import pytest
from fastapi.testclient import TestClient

from synthcurate.annotation import LabelStore, create_annotation_app
from synthcurate.annotation.store import EmptyExportError
from synthcurate.errors import ValidationError
from synthcurate.orchestrator import pipeline
from synthcurate.orchestrator.runstate import RunState

from conftest import small_pipeline_config


class TestLabelStore:
    def test_durable_across_restart(self, tmp_path):
        log = tmp_path / "labels.jsonl"
        store = LabelStore(log)
        store.submit("c1", "accept", "alice")
        store.submit("c2", "reject", "alice")
        # Forced restart: a fresh store replays the log.
        reopened = LabelStore(log)
        assert [r.to_dict() for r in reopened.records()] == [
            r.to_dict() for r in store.records()
        ]

    def test_last_write_wins_per_annotator(self, tmp_path):
        store = LabelStore(tmp_path / "labels.jsonl")
        store.submit("c1", "accept", "alice")
        store.submit("c1", "reject", "alice")
        labels, _ = store.export("any")
        assert len(labels) == 1
        assert labels[0]["label"] == "reject"

    def test_two_annotators_two_records(self, tmp_path):
        store = LabelStore(tmp_path / "labels.jsonl")
        store.submit("c1", "accept", "alice")
        store.submit("c1", "reject", "bob")
        assert len(store.labels_for("c1")) == 2

    def test_majority_resolution(self, tmp_path):
        store = LabelStore(tmp_path / "labels.jsonl")
        for i, label in enumerate(["accept", "accept", "accept", "reject", "reject"]):
            store.submit("c1", label, f"annotator-{i}")
        labels, ties = store.export("majority")
        assert labels == [
            {
                "candidate_id": "c1",
                "label": "accept",
                "votes": {"accept": 3, "reject": 2},
            }
        ]
        assert ties == []

    def test_tie_excluded_and_reported(self, tmp_path):
        store = LabelStore(tmp_path / "labels.jsonl")
        store.submit("c1", "accept", "alice")
        store.submit("c1", "reject", "bob")
        store.submit("c2", "accept", "alice")
        labels, ties = store.export("majority")
        assert [l["candidate_id"] for l in labels] == ["c2"]
        assert ties == ["c1"]

    def test_any_mode_emits_every_record(self, tmp_path):
        store = LabelStore(tmp_path / "labels.jsonl")
        store.submit("c1", "accept", "alice")
        store.submit("c1", "reject", "bob")
        labels, _ = store.export("any")
        assert len(labels) == 2

    def test_empty_export(self, tmp_path):
        with pytest.raises(EmptyExportError):
            LabelStore(tmp_path / "labels.jsonl").export()

    def test_bad_label_rejected(self, tmp_path):
        with pytest.raises(ValidationError):
            LabelStore(tmp_path / "labels.jsonl").submit("c1", "maybe", "alice")

    def test_export_deterministic(self, tmp_path):
        store = LabelStore(tmp_path / "labels.jsonl")
        store.submit("c2", "accept", "bob")
        store.submit("c1", "reject", "alice")
        assert store.export("any") == LabelStore(tmp_path / "labels.jsonl").export("any")


@pytest.fixture
def gated_run(tmp_path, background_dir):
    cfg = small_pipeline_config(background_dir, candidates_per_background=10)
    state = pipeline.ingest(cfg, tmp_path / "run")
    pipeline.run_stage1(state)
    assert state.in_state("stage1_passed"), "fixture needs at least one pass"
    return state


@pytest.fixture
def client(gated_run):
    return TestClient(create_annotation_app(gated_run))


class TestService:
    def test_queue_oldest_first_and_count(self, gated_run, client):
        passed = [r.candidate_id for r in gated_run.in_state("stage1_passed")]
        resp = client.get("/api/v1/runs/testrun/queue", params={"annotator": "alice", "count": 2})
        items = resp.json()["items"]
        assert [i["candidate_id"] for i in items] == passed[:2]
        assert items[0]["score_card"]["s_det"] is not None
        assert len(items[0]["mask"]) == 4

    def test_unknown_run_404(self, client):
        assert client.get(
            "/api/v1/runs/nope/queue", params={"annotator": "alice"}
        ).status_code == 404

    def test_image_bytes_served(self, gated_run, client):
        rec = gated_run.in_state("stage1_passed")[0]
        resp = client.get(f"/api/v1/images/{rec.image_ref}")
        assert resp.status_code == 200
        assert resp.content[:8] == b"\x89PNG\r\n\x1a\n"

    def test_label_submit_and_queue_shrinks(self, gated_run, client):
        rec = gated_run.in_state("stage1_passed")[0]
        resp = client.post(
            "/api/v1/runs/testrun/labels",
            json={"candidate_id": rec.candidate_id, "label": "accept", "annotator_id": "alice"},
        )
        assert resp.status_code == 200
        queue = client.get(
            "/api/v1/runs/testrun/queue", params={"annotator": "alice", "count": 100}
        ).json()["items"]
        assert rec.candidate_id not in [i["candidate_id"] for i in queue]
        # Other annotators still see it.
        queue_bob = client.get(
            "/api/v1/runs/testrun/queue", params={"annotator": "bob", "count": 100}
        ).json()["items"]
        assert rec.candidate_id in [i["candidate_id"] for i in queue_bob]

    def test_unknown_candidate_404(self, client):
        resp = client.post(
            "/api/v1/runs/testrun/labels",
            json={"candidate_id": "nope", "label": "accept", "annotator_id": "alice"},
        )
        assert resp.status_code == 404

    def test_stage1_failed_candidate_conflict(self, gated_run, client):
        failed = gated_run.in_state("stage1_failed")[0]
        resp = client.post(
            "/api/v1/runs/testrun/labels",
            json={"candidate_id": failed.candidate_id, "label": "accept", "annotator_id": "a"},
        )
        assert resp.status_code == 409

    def test_progress_counts(self, gated_run, client):
        total = len(gated_run.in_state("stage1_passed"))
        before = client.get(
            "/api/v1/runs/testrun/progress", params={"annotator": "alice"}
        ).json()
        assert before == {"pending": total, "labeled": 0, "total": total}
        rec = gated_run.in_state("stage1_passed")[0]
        client.post(
            "/api/v1/runs/testrun/labels",
            json={"candidate_id": rec.candidate_id, "label": "reject", "annotator_id": "alice"},
        )
        after = client.get(
            "/api/v1/runs/testrun/progress", params={"annotator": "alice"}
        ).json()
        assert after == {"pending": total - 1, "labeled": 1, "total": total}

    def test_export_endpoint(self, gated_run, client):
        recs = gated_run.in_state("stage1_passed")
        for rec in recs[:2]:
            client.post(
                "/api/v1/runs/testrun/labels",
                json={"candidate_id": rec.candidate_id, "label": "accept", "annotator_id": "a"},
            )
        data = client.get(
            "/api/v1/runs/testrun/export", params={"resolution": "majority"}
        ).json()
        assert [l["candidate_id"] for l in data["labels"]] == [
            r.candidate_id for r in recs[:2]
        ]

    def test_acknowledged_labels_survive_restart(self, gated_run, client):
        recs = gated_run.in_state("stage1_passed")
        submitted = []
        for i, rec in enumerate(recs[:3]):
            label = "accept" if i % 2 == 0 else "reject"
            resp = client.post(
                "/api/v1/runs/testrun/labels",
                json={"candidate_id": rec.candidate_id, "label": label, "annotator_id": "alice"},
            )
            assert resp.status_code == 200
            submitted.append((rec.candidate_id, label))
        # Forced restart: rebuild state and app from disk only.
        restarted = TestClient(create_annotation_app(RunState.open(gated_run.run_dir)))
        export = restarted.get(
            "/api/v1/runs/testrun/export", params={"resolution": "any"}
        ).json()["labels"]
        assert [(l["candidate_id"], l["label"]) for l in export] == sorted(submitted)
