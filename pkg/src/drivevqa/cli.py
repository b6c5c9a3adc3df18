"""Command-line surface: convert datasets, stitch frames, evaluate
predictions, and verify the loss/gradient path.

Exit codes: 0 success; 1 I/O failure; 2 bad input format or an empty
evaluation join; 3 at least one frame failed to stitch; 4 gradient check
over tolerance.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import ingest, locloss
from .metrics import (EvalConfig, HttpJudgeClient, JoinDiagnostics, ScoreWeights,
                      StubJudgeClient, evaluate_corpus, join_pairs,
                      read_predictions, read_references)
from .records import write_records
from .stitch import CoordinatePolicy, StitchLayout, read_frame_manifest, stitch_frame

GRADIENT_TOLERANCE = 1e-4

ADAPTERS = {
    "drivelm": ingest.load_drivelm_records,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drivevqa",
                                     description="Multi-view driving-scene VQA pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="normalize a dataset to JSON-lines records")
    p.add_argument("input", help="dataset file")
    p.add_argument("-o", "--output", required=True, help="records output (JSON-lines)")
    p.add_argument("--adapter", default="drivelm", help="dataset adapter name")
    p.add_argument("--compress", action="store_true",
                   help="merge all QA pairs of a frame into one multi-turn record")
    p.add_argument("--policy", default="original",
                   choices=[pol.value for pol in CoordinatePolicy],
                   help="coordinate space for tags in the output")
    p.add_argument("--native-dims", default=None, metavar="WxH",
                   help="native camera resolution, e.g. 1600x900")
    p.add_argument("--sample-rate", type=float, default=1.0,
                   help="per-record keep probability")
    p.add_argument("--report", default=None, help="summary JSON path (default: OUTPUT.summary.json)")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("stitch", help="compose six-view composites from a frame manifest")
    p.add_argument("manifest", help="JSON-lines frame manifest")
    p.add_argument("--outdir", required=True, help="directory for the stitched PNGs")
    p.add_argument("--native-dims", default=None, metavar="WxH")
    p.add_argument("--jobs", type=int, default=4)

    p = sub.add_parser("eval", help="score predictions against references")
    p.add_argument("--predictions", required=True, help="JSON-lines {question_id, prediction}")
    p.add_argument("--references", required=True,
                   help="JSON-lines {question_id, references, category, closed_form}")
    p.add_argument("-o", "--output", default=None, help="report JSON path")
    p.add_argument("--weights", default=None, help="score weights JSON file")
    p.add_argument("--match-threshold", type=float, default=16.0, metavar="PX")
    p.add_argument("--judge", choices=["stub", "live", "off"], default="stub")
    p.add_argument("--disable", action="append", default=[], metavar="METRIC",
                   help="skip a metric (repeatable)")
    p.add_argument("--jobs", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("losscheck", help="compute the combined loss and verify its gradient")
    p.add_argument("--logits", required=True, help="LGT1 logits file")
    p.add_argument("--alignment", required=True, help="token alignment JSON")
    p.add_argument("--lambda1", type=float, required=True, help="text loss weight")
    p.add_argument("--lambda2", type=float, required=True, help="location loss weight")
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _parse_dims(text: str) -> tuple[int, int]:
    w, _, h = text.lower().partition("x")
    return (int(w), int(h))


def _layout(native_dims: str | None) -> StitchLayout:
    layout = StitchLayout()
    if native_dims:
        layout = layout.with_native_dims(_parse_dims(native_dims))
    return layout


def run_convert(args: argparse.Namespace) -> int:
    if args.adapter not in ADAPTERS:
        print(f"error: unknown adapter {args.adapter!r} "
              f"(available: {', '.join(sorted(ADAPTERS))})", file=sys.stderr)
        return 2
    adapter = ADAPTERS[args.adapter]
    layout = _layout(args.native_dims)
    policy = CoordinatePolicy(args.policy)

    exit_code = 0
    records = []
    try:
        with open(args.input, "r", encoding="utf-8") as fp:
            try:
                for record in adapter(fp):
                    records.append(record)
            except ingest.SchemaError as exc:
                print(f"error: {exc}", file=sys.stderr)
                exit_code = 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    summary = ingest.summarize_dataset(records)
    stream = ingest.sample_records(records, args.sample_rate, args.seed)
    if args.compress:
        stream = ingest.compress_frame_qas(stream)
    stream = (ingest.apply_policy_to_record(r, policy, layout) for r in stream)

    try:
        with open(args.output, "w", encoding="utf-8") as out:
            written = write_records(stream, out)
        report_path = args.report or args.output + ".summary.json"
        with open(report_path, "w", encoding="utf-8") as rp:
            json.dump(summary.to_json() | {"records_written": written}, rp,
                      indent=2, sort_keys=True)
            rp.write("\n")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(summary.to_json() | {"records_written": written}, sort_keys=True),
          file=sys.stderr)
    return exit_code


def run_stitch(args: argparse.Namespace) -> int:
    layout = _layout(args.native_dims)
    outdir = Path(args.outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        with open(args.manifest, "r", encoding="utf-8") as fp:
            entries = list(read_frame_manifest(fp))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: cannot read manifest: {exc}", file=sys.stderr)
        return 1

    def one(entry) -> str | None:
        try:
            image = stitch_frame(entry, layout)
            image.save(outdir / f"{entry.frame_id}.png", format="PNG")
            return None
        except Exception as exc:  # keep going; report per frame
            return f"{entry.frame_id}: {exc}"

    jobs = max(1, args.jobs)
    if jobs > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            failures = [f for f in pool.map(one, entries) if f]
    else:
        failures = [f for f in map(one, entries) if f]
    for failure in failures:
        print(f"error: {failure}", file=sys.stderr)
    return 3 if failures else 0


def run_eval(args: argparse.Namespace) -> int:
    try:
        with open(args.predictions, "r", encoding="utf-8") as fp:
            predictions = read_predictions(fp)
        with open(args.references, "r", encoding="utf-8") as fp:
            references = read_references(fp)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    join_diag = JoinDiagnostics()
    pairs = join_pairs(predictions, references, join_diag)
    if not pairs:
        print("error: no question_id matched between predictions and references",
              file=sys.stderr)
        return 2

    if args.weights:
        with open(args.weights, "r", encoding="utf-8") as fp:
            weights = ScoreWeights.from_json(json.load(fp))
    elif args.judge == "off":
        weights = ScoreWeights.without("judge")
    else:
        weights = ScoreWeights.default()

    judge_client = None
    if args.judge == "stub":
        judge_client = StubJudgeClient(seed=args.seed)
    elif args.judge == "live":
        judge_client = HttpJudgeClient()

    disabled = set(args.disable)
    if args.judge == "off":
        disabled.add("judge")
    config = EvalConfig(weights=weights, disabled=frozenset(disabled),
                        judge_client=judge_client, judge_jobs=args.jobs,
                        match_threshold_px=args.match_threshold)
    report = evaluate_corpus(pairs, config)

    document = {
        "metrics": report.metric_values(),
        "weights": weights.to_json(),
        "diagnostics": list(report.diagnostics),
        "unmatched_predictions": sorted(join_diag.unmatched_predictions),
        "unmatched_references": sorted(join_diag.unmatched_references),
        "pairs_scored": len(pairs),
    }
    text = json.dumps(document, indent=2, sort_keys=True)
    print(text)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    return 0


def run_losscheck(args: argparse.Namespace) -> int:
    try:
        logits = locloss.read_logits_file(args.logits)
        with open(args.alignment, "r", encoding="utf-8") as fp:
            align, numeric_spans = locloss.read_alignment_file(fp)
        mask = locloss.build_location_mask(align, numeric_spans)
        breakdown = locloss.total_loss(logits, align.token_ids, mask,
                                       args.lambda1, args.lambda2)
        error = locloss.finite_difference_check(
            logits, align.token_ids, mask, args.lambda1, args.lambda2,
            epsilon=args.epsilon, sample_count=args.samples, seed=args.seed)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (locloss.LogitsFormatError, locloss.SpanOutOfRange, locloss.LabelOutOfVocab,
            json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    print(json.dumps({
        "loss_text": breakdown.loss_text,
        "loss_location": breakdown.loss_location,
        "lambda1": breakdown.lambda1,
        "lambda2": breakdown.lambda2,
        "total": breakdown.total,
        "grad_l2": float(np.linalg.norm(breakdown.grad)),
        "masked_positions": int(mask.sum()),
        "max_rel_grad_error": error,
    }, indent=2, sort_keys=True))
    return 4 if error > GRADIENT_TOLERANCE else 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "convert": run_convert,
        "stitch": run_stitch,
        "eval": run_eval,
        "losscheck": run_losscheck,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
