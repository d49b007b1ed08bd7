"""Command-line entry points.

Every subcommand reads and writes plain files (JSONL for records,
text for patches and diffs) so the whole pipeline can be driven from
a shell: scan -> fix -> ingest -> serve, plus dataset and metrics
tooling for training-side work.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .backends import backend_from_spec
from .context import extract_context
from .dataset import (build_sample, classify_difficulty, read_samples,
                      select_samples, with_difficulty, write_samples)
from .errors import LintfixError
from .issues import read_issues_jsonl, write_issues_jsonl
from .linting import LinterConfig, run_linter
from .metrics import (AdoptionRecord, EvalRecord, aggregate_adoption,
                      match_adoption, summarize)
from .orchestrator import CompileConfig, FixConfig, FixOutcome, fix_issue
from .patching import apply_patch, parse_patch
from .rewards import score_rollout
from .workspace import Workspace


def _load_linter_config(path: str | None) -> LinterConfig:
    if path is None:
        return LinterConfig()
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return LinterConfig.from_dict(data)


def _read_jsonl(path: str) -> list[dict]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(json.loads(line))
    return out


def _write_jsonl(path: str, records: list[dict]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def _compile_config(spec: str | None) -> CompileConfig | None:
    if spec is None or spec == "none":
        return None
    if spec == "parse":
        return CompileConfig(kind="parse")
    return CompileConfig(kind="command", command=tuple(spec.split()))


def cmd_scan(args) -> int:
    ws = Workspace.from_dir(args.workspace)
    issues = run_linter(ws, _load_linter_config(args.config))
    if args.out:
        write_issues_jsonl(args.out, issues)
    else:
        for issue in issues:
            print(json.dumps(issue.to_dict(), sort_keys=True))
    print(f"{len(issues)} issue(s) found", file=sys.stderr)
    return 0


def cmd_context(args) -> int:
    ws = Workspace.from_dir(args.workspace)
    if args.issues:
        issues = read_issues_jsonl(args.issues)
    else:
        issues = run_linter(ws, LinterConfig())
    matching = [i for i in issues if i.issue_id == args.issue]
    if not matching:
        print(f"issue {args.issue!r} not found", file=sys.stderr)
        return 1
    ctx = extract_context(ws, matching[0], args.budget)
    print(json.dumps(ctx.to_dict(), indent=2, sort_keys=True))
    return 0


def cmd_apply(args) -> int:
    ws = Workspace.from_dir(args.workspace)
    patch = parse_patch(Path(args.patch).read_text(encoding="utf-8"))
    mode = "strict" if args.strict else "trim-trailing"
    report = apply_patch(ws, patch, mode=mode)
    out = {
        "blocks": patch.block_count(),
        "malformed": patch.malformed_count,
        "unapplied": report.unapplied_count,
        "per_block": [{"file": b.file, "status": s}
                      for b, s in zip(patch.blocks, report.per_block)],
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    if args.write:
        report.result.write_to(args.write)
        print(f"result written to {args.write}", file=sys.stderr)
    return 0 if report.unapplied_count == 0 else 1


def cmd_fix(args) -> int:
    ws = Workspace.from_dir(args.workspace)
    issues = read_issues_jsonl(args.issues)
    backend = backend_from_spec(args.backend)
    cfg = FixConfig(
        linter=_load_linter_config(args.config),
        compile_check=_compile_config(args.compile_check),
        max_retries=args.max_retries,
        context_budget=args.budget,
        deny_new_issues=args.deny_new_issues,
    )
    outcomes: list[FixOutcome] = []
    for issue in issues:
        outcome = fix_issue(ws, issue, backend, cfg)
        outcomes.append(outcome)
        print(f"{issue.issue_id}: {outcome.status} "
              f"({len(outcome.attempts)} attempt(s))", file=sys.stderr)
    _write_jsonl(args.out, [o.to_dict() for o in outcomes])
    fixed = sum(1 for o in outcomes if o.status == "fixed")
    print(f"{fixed}/{len(outcomes)} fixed", file=sys.stderr)
    return 0


def cmd_reward(args) -> int:
    samples = {s.sample_id: s for s in read_samples(args.samples)}
    records = []
    for cand in _read_jsonl(args.candidates):
        sample = samples.get(cand["sample_id"])
        if sample is None:
            print(f"unknown sample {cand['sample_id']!r}", file=sys.stderr)
            return 1
        breakdown = score_rollout(sample, cand["text"], beta=args.beta)
        record = {"sample_id": cand["sample_id"]}
        if "candidate_id" in cand:
            record["candidate_id"] = cand["candidate_id"]
        record.update(breakdown.to_dict())
        records.append(record)
    if args.out:
        _write_jsonl(args.out, records)
    else:
        for record in records:
            print(json.dumps(record, sort_keys=True))
    return 0


def cmd_dataset_build(args) -> int:
    repo = Workspace.from_dir(args.repo)
    issues = read_issues_jsonl(args.issues)
    samples, skipped = [], 0
    for issue in issues:
        try:
            samples.append(build_sample(repo, issue, budget=args.budget))
        except LintfixError as exc:
            skipped += 1
            print(f"skipped {issue.issue_id}: {exc}", file=sys.stderr)
    write_samples(args.out, samples)
    print(f"built {len(samples)} sample(s), skipped {skipped}", file=sys.stderr)
    return 0


def cmd_dataset_classify(args) -> int:
    backend = backend_from_spec(args.backend)
    cfg = FixConfig(max_retries=args.max_retries,
                    compile_check=_compile_config(args.compile_check))
    kept, discarded = [], 0
    for sample in read_samples(args.samples):
        if sample.kind != "cold_start":
            kept.append(sample)
            continue
        difficulty = classify_difficulty(sample, backend, attempts=args.attempts,
                                         fix_cfg=cfg)
        if difficulty is None:
            discarded += 1
            print(f"discarded {sample.sample_id}: all {args.attempts} attempts "
                  "succeeded", file=sys.stderr)
            continue
        kept.append(with_difficulty(sample, difficulty))
    write_samples(args.out, kept)
    print(f"classified {len(kept)} sample(s), discarded {discarded}", file=sys.stderr)
    return 0


def cmd_dataset_select(args) -> int:
    selected = select_samples(read_samples(args.samples), per_category_cap=args.cap)
    write_samples(args.out, selected)
    print(f"selected {len(selected)} sample(s)", file=sys.stderr)
    return 0


def cmd_metrics(args) -> int:
    if args.from_outcomes:
        records = []
        for record in _read_jsonl(args.from_outcomes):
            success = record.get("status") == "fixed"
            raw = record.get("final_patch_raw")
            if raw is None:
                attempts = record.get("attempts", [])
                raw = attempts[-1]["raw"] if attempts else ""
            blocks = parse_patch(raw).block_count() if raw else 0
            records.append(EvalRecord(
                sample_id=record["issue"]["issue_id"], success=success,
                blocks_generated=blocks, errors_present=args.errors_present))
    else:
        records = [EvalRecord.from_dict(r) for r in _read_jsonl(args.records)]
    adoption = []
    if args.adoption:
        adoption = [AdoptionRecord.from_dict(r) for r in _read_jsonl(args.adoption)]
    summary = summarize(records, adoption)
    print(json.dumps(summary.to_dict(), indent=2, sort_keys=True))
    return 0


def cmd_adoption(args) -> int:
    if args.events:
        records = [AdoptionRecord.from_dict(r) for r in _read_jsonl(args.events)]
        weekly = aggregate_adoption(records)
        print(f"{'week':<10} {'adopters':>8} {'adoptions':>9}")
        for week, (adopters, adoptions) in weekly.items():
            print(f"{week:<10} {adopters:>8} {adoptions:>9}")
        return 0
    suggested = Path(args.suggested).read_text(encoding="utf-8")
    committed = Path(args.committed).read_text(encoding="utf-8")
    verdict = match_adoption(suggested, committed)
    print(verdict)
    return 0 if verdict == "adopted" else 1


def cmd_ingest(args) -> int:
    from .review import ReviewStore

    store = ReviewStore(args.store)
    ws = Workspace.from_dir(args.workspace)
    new, skipped = store.ingest(_read_jsonl(args.outcomes), ws)
    print(f"ingested {new} suggestion(s), skipped {skipped}", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .review import ReviewStore, create_app

    store = ReviewStore(args.store)
    app = create_app(store, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lintfix",
                                     description="lint finding remediation pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="run the linter over a workspace")
    p.add_argument("--workspace", required=True)
    p.add_argument("--config", default=None, help="linter config JSON")
    p.add_argument("--out", default=None, help="issues JSONL output path")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("context", help="show the extracted context for an issue")
    p.add_argument("--workspace", required=True)
    p.add_argument("--issue", required=True, help="issue id")
    p.add_argument("--issues", default=None, help="issues JSONL (default: rescan)")
    p.add_argument("--budget", type=int, default=4096)
    p.set_defaults(func=cmd_context)

    p = sub.add_parser("apply", help="apply a search/replace patch")
    p.add_argument("--workspace", required=True)
    p.add_argument("--patch", required=True)
    p.add_argument("--strict", action="store_true", help="byte-exact matching")
    p.add_argument("--write", default=None, help="materialize the result here")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("fix", help="run the generate/validate loop over issues")
    p.add_argument("--workspace", required=True)
    p.add_argument("--issues", required=True)
    p.add_argument("--backend", required=True,
                   help="http(s)://... | oracle:<file.json> | scripted:<file.json>")
    p.add_argument("--max-retries", type=int, default=3)
    p.add_argument("--budget", type=int, default=4096)
    p.add_argument("--config", default=None, help="linter config JSON")
    p.add_argument("--compile-check", default=None,
                   help="'parse', 'none', or an external command line")
    p.add_argument("--deny-new-issues", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fix)

    p = sub.add_parser("reward", help="score candidate patches against samples")
    p.add_argument("--samples", required=True)
    p.add_argument("--candidates", required=True,
                   help="JSONL of {sample_id, text[, candidate_id]}")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_reward)

    p = sub.add_parser("dataset", help="training-sample tooling")
    dsub = p.add_subparsers(dest="dataset_command", required=True)

    d = dsub.add_parser("build", help="build cold-start samples from issues")
    d.add_argument("--repo", required=True)
    d.add_argument("--issues", required=True)
    d.add_argument("--budget", type=int, default=4096)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_dataset_build)

    d = dsub.add_parser("classify", help="difficulty-classify samples")
    d.add_argument("--samples", required=True)
    d.add_argument("--backend", required=True)
    d.add_argument("--attempts", type=int, default=8)
    d.add_argument("--max-retries", type=int, default=0)
    d.add_argument("--compile-check", default=None)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_dataset_classify)

    d = dsub.add_parser("select", help="balanced per-category selection")
    d.add_argument("--samples", required=True)
    d.add_argument("--cap", type=int, default=30)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_dataset_select)

    p = sub.add_parser("metrics", help="accuracy/redundancy summary")
    p.add_argument("--records", default=None, help="eval records JSONL")
    p.add_argument("--from-outcomes", default=None,
                   help="derive eval records from an outcomes JSONL")
    p.add_argument("--errors-present", type=int, default=1)
    p.add_argument("--adoption", default=None, help="adoption records JSONL")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("adoption", help="adoption verdicts and weekly aggregates")
    p.add_argument("--suggested", default=None, help="suggested unified diff file")
    p.add_argument("--committed", default=None, help="committed unified diff file")
    p.add_argument("--events", default=None, help="adoption records JSONL")
    p.set_defaults(func=cmd_adoption)

    p = sub.add_parser("ingest", help="load fixed outcomes into a review store")
    p.add_argument("--outcomes", required=True)
    p.add_argument("--workspace", required=True)
    p.add_argument("--store", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("serve", help="run the review service")
    p.add_argument("--store", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8710)
    p.add_argument("--ui", default=None, help="static UI bundle directory")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "metrics" and not (args.records or args.from_outcomes):
        parser.error("metrics requires --records or --from-outcomes")
    if args.command == "adoption" and not args.events:
        if not (args.suggested and args.committed):
            parser.error("adoption requires --suggested and --committed, or --events")
    try:
        return args.func(args)
    except LintfixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
