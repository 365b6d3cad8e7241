"""Command-line entry point.

Subcommands cover the full run lifecycle: `ingest`, `stage1`,
`annotate-serve`, `stage2-train`, `stage3`, `run-all`, `eval`,
`manifest show`, and `report`. Configuration comes from a JSON config
file; common fields can be overridden by flag. Only the backend URL and
service port may come from environment variables
(SYNTHCURATE_BACKEND_URL, SYNTHCURATE_PORT).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .classifier import load_checkpoint, predict
from .errors import SynthcurateError
from .metrics import confusion, precision_recall_f1
from .orchestrator import RunState
from .orchestrator.config import PipelineConfig
from .orchestrator import pipeline


def _load_config(args) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config)
    overrides = {
        "prompt": getattr(args, "prompt", None),
        "target_class": getattr(args, "target_class", None),
        "candidates_per_background": getattr(args, "candidates_per_background", None),
        "master_seed": getattr(args, "master_seed", None),
        "backend": getattr(args, "backend", None),
        "backend_url": getattr(args, "backend_url", None) or os.environ.get("SYNTHCURATE_BACKEND_URL"),
    }
    d = cfg.to_dict()
    d.update({k: v for k, v in overrides.items() if v is not None})
    return PipelineConfig.from_dict(d)


def cmd_ingest(args):
    state = pipeline.ingest(_load_config(args), args.run_dir)
    backgrounds = [i for i in state.images.ids() if i.startswith("bg-")]
    print(f"ingested {len(backgrounds)} backgrounds into {args.run_dir}")


def cmd_stage1(args):
    state = RunState.open(args.run_dir)
    stats = pipeline.run_stage1(state)
    pipeline.write_manifest(state)
    print(json.dumps(stats, indent=2))


def cmd_annotate_serve(args):
    import uvicorn

    from .annotation import create_annotation_app

    state = RunState.open(args.run_dir)
    port = args.port or int(os.environ.get("SYNTHCURATE_PORT", "8400"))
    uvicorn.run(create_annotation_app(state), host=args.host, port=port)


def cmd_stage2_train(args):
    state = RunState.open(args.run_dir)
    _, report = pipeline.run_stage2(state, resolution=args.resolution)
    best = report["epochs"][report["best_epoch"] - 1]
    print(
        f"trained {report['train_size']}+{report['val_size']} examples, "
        f"best epoch {report['best_epoch']} val F1 {best['val_f1']:.4f}"
        + (" (early stop)" if report["stopped_early"] else "")
    )


def cmd_stage3(args):
    state = RunState.open(args.run_dir)
    manifest = pipeline.run_stage3(state, decision_threshold=args.threshold)
    print(pipeline.manifest_summary(manifest))


def cmd_run_all(args):
    state = pipeline.ingest(_load_config(args), args.run_dir)
    manifest = pipeline.run_all(state)
    print(pipeline.manifest_summary(manifest))


def cmd_eval(args):
    state = RunState.open(args.run_dir)
    model, cfg = load_checkpoint(state.checkpoint_path)
    backends = pipeline.make_backends(state.config, state)
    holdout = [
        json.loads(line)
        for line in Path(args.holdout).read_text().splitlines()
        if line.strip()
    ]
    preds, labels = [], []
    for entry in holdout:
        rec = state.records[entry["candidate_id"]]
        bundle = backends.extract_features(rec.image_ref, pipeline._crop_for(rec, state))
        label, _prob = predict(model, bundle, args.threshold or cfg.decision_threshold)
        preds.append(label)
        labels.append(entry["label"])
    counts = confusion(preds, labels)
    p, r, f1 = precision_recall_f1(counts)
    print(f"{'metric':<12}{'value':>10}")
    for name, value in (("precision", p), ("recall", r), ("f1", f1)):
        print(f"{name:<12}{value:>10.4f}")
    print(f"tp={counts.tp} fp={counts.fp} tn={counts.tn} fn={counts.fn}")
    if state.manifest_path.exists():
        manifest = pipeline.load_manifest(state.manifest_path)
        manifest["evaluation"] = {
            "holdout": str(args.holdout),
            "precision": p,
            "recall": r,
            "f1": f1,
            "confusion": {"tp": counts.tp, "fp": counts.fp, "tn": counts.tn, "fn": counts.fn},
        }
        state.manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True))


def cmd_manifest_show(args):
    manifest = pipeline.load_manifest(Path(args.run_dir) / "manifest.json")
    if args.json:
        print(json.dumps(manifest, indent=2, sort_keys=True))
    else:
        print(pipeline.manifest_summary(manifest))


def cmd_report(args):
    from .report import generate_report

    state = RunState.open(args.run_dir)
    artifacts = generate_report(state, args.out)
    for name, path in artifacts.items():
        print(f"{name}: {path}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="synthcurate", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p):
        p.add_argument("--config", required=True, help="pipeline config JSON")
        p.add_argument("--prompt")
        p.add_argument("--target-class", dest="target_class")
        p.add_argument("--candidates-per-background", dest="candidates_per_background", type=int)
        p.add_argument("--master-seed", dest="master_seed", type=int)
        p.add_argument("--backend", choices=["mock-hash", "http"])
        p.add_argument("--backend-url", dest="backend_url")

    p = sub.add_parser("ingest", help="register backgrounds into a new run")
    add_config_flags(p)
    p.add_argument("--run-dir", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stage1", help="generate and gate candidates")
    p.add_argument("--run-dir", required=True)
    p.set_defaults(func=cmd_stage1)

    p = sub.add_parser("annotate-serve", help="launch the annotation HTTP service")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int)
    p.set_defaults(func=cmd_annotate_serve)

    p = sub.add_parser("stage2-train", help="train the preference classifier from labels")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--resolution", choices=["majority", "any"])
    p.set_defaults(func=cmd_stage2_train)

    p = sub.add_parser("stage3", help="apply the classifier and finalize the manifest")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--threshold", type=float)
    p.set_defaults(func=cmd_stage3)

    p = sub.add_parser("run-all", help="ingest + all three stages (auto-labels if unlabeled)")
    add_config_flags(p)
    p.add_argument("--run-dir", required=True)
    p.set_defaults(func=cmd_run_all)

    p = sub.add_parser("eval", help="metrics over a labeled holdout")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--holdout", required=True, help="JSONL of {candidate_id, label}")
    p.add_argument("--threshold", type=float)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("manifest", help="manifest operations")
    msub = p.add_subparsers(dest="manifest_command", required=True)
    ps = msub.add_parser("show", help="print the manifest summary")
    ps.add_argument("--run-dir", required=True)
    ps.add_argument("--json", action="store_true", help="dump full JSON")
    ps.set_defaults(func=cmd_manifest_show)

    p = sub.add_parser("report", help="render score CSV and figures for a run")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--out", help="output directory (default: RUN_DIR/report)")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except SynthcurateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
