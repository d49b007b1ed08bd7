import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpus import GARBAGE_TEXT, patch_text, scan_corpus
from lintfix import (LinterConfig, Workspace, apply_patch, build_minimal_workspace,
                     build_sample, classify_difficulty, parse_patch, record_feedback,
                     reproduce_issue, select_samples)
from lintfix.backends import MockOracleBackend, ScriptedBackend
from lintfix.dataset import (FeedbackStore, TrainingSample, difficulty_band,
                             read_samples, template_stub, with_difficulty, write_samples)
from lintfix.diffs import unified_diff_text
from lintfix.errors import (DiffNotApplicable, InvalidGoldenPatch, SampleDiscarded,
                            StubGenerationFailed)
from lintfix.gosyntax import parse_units
from lintfix.orchestrator import FixConfig


def pick(issues, file, rule=None):
    return next(i for i in issues if i.file == file and (rule is None or i.rule_id == rule))


# -- difficulty bands --------------------------------------------------------


@pytest.mark.parametrize("s,band", [(0, "hard"), (2, "hard"), (3, "medium"),
                                    (5, "medium"), (6, "easy"), (7, "easy")])
def test_difficulty_bands(s, band):
    assert difficulty_band(s) == band


def test_difficulty_band_range_checked():
    with pytest.raises(ValueError):
        difficulty_band(8)
    with pytest.raises(ValueError):
        difficulty_band(-1)


# -- stubs -------------------------------------------------------------------


def test_template_stub_shapes():
    text = template_stub("company/logs", "logs", {"CtxInfo": True, "Level": False})
    assert text.startswith("package logs\n")
    assert "func CtxInfo(args ...interface{}) interface{} { return nil }" in text
    assert "var Level interface{}" in text
    parse_units(text)  # must be syntactically valid on its own


def test_template_stub_with_no_references_is_bare_package():
    text = template_stub("company/unused", "unused", {})
    parse_units(text)
    assert "func" not in text and "var" not in text


# -- minimal workspaces ------------------------------------------------------


def test_minimal_workspace_shipment(corpus_ws, corpus_issues):
    issue = pick(corpus_issues, "shipment/handler.go")
    ws, rebased, stubs = build_minimal_workspace(corpus_ws, issue)
    focal = ws.read("shipment/handler.go")
    assert "func Execute" in focal
    # one-layer same-file dependency comes along
    assert "func validate" in focal
    # external imports are stubbed under vendor/
    assert "vendor/company/eventbus/eventbus.go" in ws
    assert "vendor/fmt/fmt.go" in ws
    assert {s.name for s in stubs} == {"eventbus", "fmt"}
    assert all(s.origin == "template" for s in stubs)
    # the finding is still on the assertion line after rebasing
    flagged = focal.split("\n")[rebased.span.start_line - 1]
    assert "eventCtx.(ShipmentContext)" in flagged


def test_minimal_workspace_drops_unrelated_files(corpus_ws, corpus_issues):
    issue = pick(corpus_issues, "sticker/sticker.go")
    ws, _, _ = build_minimal_workspace(corpus_ws, issue)
    assert "scheduler/scheduler.go" not in ws
    assert len(list(ws.paths())) < len(list(corpus_ws.paths()))


def test_minimal_workspace_for_import_finding_keeps_whole_file(corpus_ws, corpus_issues):
    issue = pick(corpus_issues, "audit/log.go", "unused-import")
    ws, rebased, _ = build_minimal_workspace(corpus_ws, issue)
    # usage is file-scoped, so the file survives intact
    assert ws.read("audit/log.go") == corpus_ws.read("audit/log.go")
    assert rebased.span == issue.span


def test_minimal_workspace_in_repo_dependency_not_stubbed(corpus_ws, corpus_issues):
    ws_plus = corpus_ws.with_file(
        "company/eventbus/eventbus.go",
        "package eventbus\n\ntype Event interface {\n\tName() string\n}\n")
    issue = pick(scan_corpus(ws_plus), "shipment/handler.go")
    ws, _, stubs = build_minimal_workspace(ws_plus, issue)
    assert "company/eventbus/eventbus.go" in ws
    assert "vendor/company/eventbus/eventbus.go" not in ws
    assert {s.name for s in stubs} == {"fmt"}


def test_custom_stub_generator_is_validated(corpus_ws, corpus_issues):
    issue = pick(corpus_issues, "shipment/handler.go")

    def broken(import_path, pkg_name, referenced):
        return "package x\nfunc f() {\n"

    with pytest.raises(StubGenerationFailed):
        build_minimal_workspace(corpus_ws, issue, stub_generator=broken)


def test_rebased_issues_reproduce_everywhere(corpus_ws, corpus_issues):
    for issue in corpus_issues:
        ws, rebased, _ = build_minimal_workspace(corpus_ws, issue)
        assert reproduce_issue(ws, rebased), issue.issue_id


# -- build_sample ------------------------------------------------------------


def test_build_sample_fields(corpus_ws, corpus_issues):
    issue = pick(corpus_issues, "sticker/sticker.go")
    sample = build_sample(corpus_ws, issue)
    assert sample.kind == "cold_start"
    assert sample.sample_id.startswith("cs-")
    assert sample.category == issue.rule_id
    assert sample.golden_patch is None
    assert sample.difficulty is None


def test_build_sample_discards_non_reproducing(corpus_ws, corpus_issues):
    issue = pick(corpus_issues, "sticker/sticker.go")
    # retention re-check runs with a linter that cannot see the rule
    muted = LinterConfig(enabled_rules=frozenset({"unused-import"}))
    with pytest.raises(SampleDiscarded):
        build_sample(corpus_ws, issue, linter=muted)


def test_sample_round_trips_through_jsonl(tmp_path, corpus_ws, corpus_issues):
    samples = [build_sample(corpus_ws, i) for i in corpus_issues[:3]]
    path = tmp_path / "samples.jsonl"
    write_samples(path, samples)
    again = read_samples(path)
    assert [s.sample_id for s in again] == [s.sample_id for s in samples]
    assert again[0].workspace == samples[0].workspace
    assert again[0].issue == samples[0].issue


# -- difficulty classification -----------------------------------------------


def test_classify_difficulty_counts_scripted_successes(corpus_ws, corpus_issues, corpus_oracle):
    issue = pick(corpus_issues, "sticker/sticker.go")
    sample = build_sample(corpus_ws, issue)
    golden = corpus_oracle[issue.issue_id]
    # 8 attempts, max_retries=0: one backend call each; pattern gives 3 passes
    backend = ScriptedBackend(outputs=[golden, GARBAGE_TEXT, GARBAGE_TEXT, golden,
                                       GARBAGE_TEXT, golden, GARBAGE_TEXT, GARBAGE_TEXT])
    got = classify_difficulty(sample, backend, attempts=8, fix_cfg=FixConfig(max_retries=0))
    assert got == 3


def test_classify_difficulty_discards_perfect_scores(corpus_ws, corpus_issues, corpus_oracle):
    issue = pick(corpus_issues, "sticker/sticker.go")
    sample = build_sample(corpus_ws, issue)
    backend = MockOracleBackend(corpus_oracle)
    assert classify_difficulty(sample, backend, attempts=8,
                               fix_cfg=FixConfig(max_retries=0)) is None


def test_with_difficulty_sets_band(corpus_ws, corpus_issues):
    sample = build_sample(corpus_ws, pick(corpus_issues, "sticker/sticker.go"))
    hard = with_difficulty(sample, 1)
    assert hard.difficulty == 1
    assert hard.band == "hard"
    assert sample.difficulty is None  # original untouched


# -- selection ---------------------------------------------------------------


def _mk(sample_id, category, difficulty=None, kind="cold_start", template=None):
    base = template
    return TrainingSample(
        sample_id=sample_id, kind=kind, issue=base.issue, context=base.context,
        workspace=base.workspace,
        golden_patch=base.golden_patch if kind == "cold_start" else parse_patch(
            patch_text("sticker/sticker.go", "package sticker", "package sticker")),
        difficulty=difficulty, category=category)


@pytest.fixture()
def sample_template(corpus_ws, corpus_issues):
    return build_sample(corpus_ws, pick(corpus_issues, "sticker/sticker.go"))


def test_select_round_robins_hard_medium_easy_feedback(sample_template):
    pool = [
        _mk("h1", "rule-a", 0, template=sample_template),
        _mk("h2", "rule-a", 2, template=sample_template),
        _mk("m1", "rule-a", 4, template=sample_template),
        _mk("e1", "rule-a", 7, template=sample_template),
        _mk("f1", "rule-a", kind="feedback", template=sample_template),
    ]
    got = [s.sample_id for s in select_samples(pool, per_category_cap=30)]
    # one from each band in order, then the leftover hard sample
    assert got == ["h1", "m1", "e1", "f1", "h2"]


def test_select_honors_cap_per_category(sample_template):
    pool = ([_mk(f"a{i}", "rule-a", 1, template=sample_template) for i in range(40)] +
            [_mk(f"b{i}", "rule-b", 1, template=sample_template) for i in range(5)])
    got = select_samples(pool, per_category_cap=30)
    by_cat = {}
    for s in got:
        by_cat[s.category] = by_cat.get(s.category, 0) + 1
    assert by_cat == {"rule-a": 30, "rule-b": 5}


def test_select_is_deterministic_under_input_order(sample_template):
    pool = [_mk(f"s{i}", "rule-a", i % 8 if i % 8 < 8 else None, template=sample_template)
            for i in range(12)]
    a = [s.sample_id for s in select_samples(pool)]
    b = [s.sample_id for s in select_samples(list(reversed(pool)))]
    assert a == b


def test_select_rejects_unclassified_cold_start(sample_template):
    pool = [_mk("u1", "rule-a", None, template=sample_template)]
    with pytest.raises(ValueError):
        select_samples(pool)


def test_select_cap_zero_selects_nothing(sample_template):
    pool = [_mk("h1", "rule-a", 0, template=sample_template)]
    assert select_samples(pool, per_category_cap=0) == []


# -- feedback samples --------------------------------------------------------


def test_record_feedback_unmodified_suggestion(corpus_ws, corpus_issues, corpus_oracle):
    issue = pick(corpus_issues, "shipment/handler.go")
    suggestion = parse_patch(corpus_oracle[issue.issue_id])
    applied = apply_patch(corpus_ws, suggestion).result
    committed_diff = unified_diff_text(corpus_ws.files, applied.files)
    sample = record_feedback(corpus_ws, issue, suggestion, committed_diff)
    assert sample.kind == "feedback"
    assert sample.sample_id.startswith("fb-")
    # committed state matches the suggestion: the suggestion is the golden
    assert sample.golden_patch == suggestion


def test_record_feedback_modified_commit_reconstructs_golden(corpus_ws, corpus_issues,
                                                             corpus_oracle):
    issue = next(
        i for i in corpus_issues if i.file == "events/router.go"
        and "OrderEvent" in corpus_ws.read(i.file).split("\n")[i.span.start_line - 1])
    suggestion = parse_patch(corpus_oracle[issue.issue_id])
    # the developer commits a different fix than suggested
    flagged = corpus_ws.read(issue.file).split("\n")[issue.span.start_line - 1]
    reviewer_fix = flagged.replace("order := payload.(OrderEvent)",
                                   "order, _ := payload.(OrderEvent)")
    edited = corpus_ws.with_file(
        issue.file, corpus_ws.read(issue.file).replace(flagged, reviewer_fix))
    committed_diff = unified_diff_text(corpus_ws.files, edited.files)
    sample = record_feedback(corpus_ws, issue, suggestion, committed_diff)
    assert sample.golden_patch != suggestion
    # reconstructed golden applies and clears the finding
    result = apply_patch(corpus_ws, sample.golden_patch, mode="strict").result
    assert not reproduce_issue(result, issue, reference=corpus_ws)


def test_record_feedback_rejects_non_fixing_commit(corpus_ws, corpus_issues, corpus_oracle):
    issue = pick(corpus_issues, "shipment/handler.go")
    suggestion = parse_patch(corpus_oracle[issue.issue_id])
    touched = corpus_ws.with_file(
        issue.file, corpus_ws.read(issue.file).replace("missing order id", "no order id"))
    committed_diff = unified_diff_text(corpus_ws.files, touched.files)
    with pytest.raises(InvalidGoldenPatch):
        record_feedback(corpus_ws, issue, suggestion, committed_diff)


def test_record_feedback_rejects_out_of_workspace_diff(corpus_ws, corpus_issues, corpus_oracle):
    issue = pick(corpus_issues, "shipment/handler.go")
    suggestion = parse_patch(corpus_oracle[issue.issue_id])
    alien = "--- a/elsewhere.go\n+++ b/elsewhere.go\n@@ -1 +1 @@\n-x\n+y\n"
    with pytest.raises(DiffNotApplicable):
        record_feedback(corpus_ws, issue, suggestion, alien)


def test_record_feedback_rejects_file_creation(corpus_ws, corpus_issues, corpus_oracle):
    issue = pick(corpus_issues, "shipment/handler.go")
    suggestion = parse_patch(corpus_oracle[issue.issue_id])
    creation = "--- /dev/null\n+++ b/new.go\n@@ -0,0 +1 @@\n+package new\n"
    with pytest.raises(DiffNotApplicable):
        record_feedback(corpus_ws, issue, suggestion, creation)


def test_record_feedback_rejects_empty_diff(corpus_ws, corpus_issues, corpus_oracle):
    issue = pick(corpus_issues, "shipment/handler.go")
    suggestion = parse_patch(corpus_oracle[issue.issue_id])
    with pytest.raises(DiffNotApplicable):
        record_feedback(corpus_ws, issue, suggestion, "")


def test_feedback_store_round_trip(tmp_path, corpus_ws, corpus_issues, corpus_oracle):
    issue = pick(corpus_issues, "shipment/handler.go")
    suggestion = parse_patch(corpus_oracle[issue.issue_id])
    applied = apply_patch(corpus_ws, suggestion).result
    sample = record_feedback(corpus_ws, issue, suggestion,
                             unified_diff_text(corpus_ws.files, applied.files))
    store = FeedbackStore(tmp_path / "feedback.jsonl")
    store.append(sample)
    store.append(sample)
    loaded = store.load()
    assert len(loaded) == 2
    assert loaded[0].sample_id == sample.sample_id
    assert loaded[0].golden_patch.blocks == sample.golden_patch.blocks


def test_feedback_store_rejects_cold_start(tmp_path, corpus_ws, corpus_issues):
    sample = build_sample(corpus_ws, pick(corpus_issues, "sticker/sticker.go"))
    with pytest.raises(ValueError):
        FeedbackStore(tmp_path / "f.jsonl").append(sample)
