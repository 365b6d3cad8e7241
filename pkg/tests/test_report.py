import csv

from synthcurate.orchestrator import pipeline
from synthcurate.orchestrator.pipeline import run_all
from synthcurate.report import generate_report

from conftest import small_pipeline_config


def _finished_run(background_dir, tmp_path):
    state = pipeline.ingest(small_pipeline_config(background_dir), tmp_path / "run")
    run_all(state)
    return state


class TestReport:
    def test_artifacts_written(self, background_dir, tmp_path):
        state = _finished_run(background_dir, tmp_path)
        artifacts = generate_report(state)
        for name in ("scores_csv", "score_distributions", "gate_pass_rates", "training_curves"):
            assert artifacts[name].exists(), name
            assert artifacts[name].stat().st_size > 0
        assert artifacts["scores_csv"].parent == state.run_dir / "report"

    def test_scores_csv_one_row_per_candidate(self, background_dir, tmp_path):
        state = _finished_run(background_dir, tmp_path)
        artifacts = generate_report(state, tmp_path / "out")
        with open(artifacts["scores_csv"], newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == len(state.records)
        by_id = {r["candidate_id"]: r for r in rows}
        for rec in state.sorted_records():
            row = by_id[rec.candidate_id]
            assert row["final_state"] == rec.final_state
            if rec.score_card and rec.score_card.s_det is not None:
                assert float(row["s_det"]) == rec.score_card.s_det

    def test_figures_are_png(self, background_dir, tmp_path):
        state = _finished_run(background_dir, tmp_path)
        artifacts = generate_report(state, tmp_path / "figs")
        for name in ("score_distributions", "gate_pass_rates", "training_curves"):
            assert artifacts[name].read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_report_without_training(self, background_dir, tmp_path):
        # A stage-1-only run still reports scores and gate figures.
        state = pipeline.ingest(small_pipeline_config(background_dir), tmp_path / "run")
        pipeline.run_stage1(state)
        artifacts = generate_report(state, tmp_path / "partial")
        assert "training_curves" not in artifacts
        assert artifacts["scores_csv"].exists()
        assert artifacts["gate_pass_rates"].exists()
