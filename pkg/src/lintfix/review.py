"""Review surface server: pending fix suggestions, reviewer actions,
and the conversion of commits into adoption records plus feedback
training samples.

Persistence is a directory of append-only JSONL files. Suggestions are
written once at ingest; every reviewer action is an event; current
states are reconstructed by replaying the event log, so the store can
be audited with a pager and nothing is ever rewritten in place.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional

from .dataset import FeedbackStore, record_feedback
from .diffs import unified_diff_text
from .errors import IllegalTransition, LintfixError, UnknownSuggestion
from .issues import LintIssue
from .linting import RULE_DESCRIPTIONS, LinterConfig
from .metrics import AdoptionRecord, adoption_record
from .patching import apply_patch, parse_patch
from .patching import HEADER_RE, FENCE_CLOSE
from .workspace import Workspace

ACTIONS = ("stage", "copy", "reject", "commit")
TRANSITIONS: dict[str, dict[str, str]] = {
    "pending": {"stage": "staged", "copy": "copied", "reject": "rejected"},
    "staged": {"commit": "committed"},
    "copied": {},
    "rejected": {},
    "committed": {},
}


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def extract_rationale(raw: str) -> str:
    """Prose surrounding the patch blocks of a raw generation."""
    kept: list[str] = []
    skipping = False
    for line in raw.split("\n"):
        if HEADER_RE.match(line):
            skipping = True
            continue
        if skipping:
            if line.rstrip() == FENCE_CLOSE:
                skipping = False
            continue
        kept.append(line)
    return "\n".join(kept).strip()


@dataclass(frozen=True)
class Suggestion:
    suggestion_id: str
    issue: LintIssue
    patch_text: str
    unified_diff: str
    rationale: str
    context_excerpt: str = ""
    workspace_files: Mapping[str, str] = field(default_factory=dict)
    created_at: str = ""
    seq: int = 0
    state: str = "pending"

    def summary(self) -> dict[str, Any]:
        return {
            "suggestion_id": self.suggestion_id,
            "rule_id": self.issue.rule_id,
            "file": self.issue.file,
            "line": self.issue.span.start_line,
            "message": self.issue.message,
            "severity": self.issue.severity.value,
            "state": self.state,
            "created_at": self.created_at,
        }

    def detail(self) -> dict[str, Any]:
        out = self.summary()
        out.update({
            "issue": self.issue.to_dict(),
            "patch_text": self.patch_text,
            "unified_diff": self.unified_diff,
            "rationale": self.rationale,
            "context_excerpt": self.context_excerpt,
            "rule_description": RULE_DESCRIPTIONS.get(self.issue.rule_id, ""),
        })
        return out

    def to_record(self) -> dict[str, Any]:
        return {
            "suggestion_id": self.suggestion_id,
            "issue": self.issue.to_dict(),
            "patch_text": self.patch_text,
            "unified_diff": self.unified_diff,
            "rationale": self.rationale,
            "context_excerpt": self.context_excerpt,
            "workspace_files": dict(self.workspace_files),
            "created_at": self.created_at,
            "seq": self.seq,
        }

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "Suggestion":
        return cls(
            suggestion_id=record["suggestion_id"],
            issue=LintIssue.from_dict(record["issue"]),
            patch_text=record["patch_text"],
            unified_diff=record["unified_diff"],
            rationale=record.get("rationale", ""),
            context_excerpt=record.get("context_excerpt", ""),
            workspace_files=dict(record.get("workspace_files", {})),
            created_at=record.get("created_at", ""),
            seq=int(record.get("seq", 0)),
        )


@dataclass(frozen=True)
class FeedbackEvent:
    suggestion_id: str
    action: str
    timestamp: str
    adopter_id: str = ""
    committed_diff: Optional[str] = None
    idempotency_key: str = ""
    feedback_recorded: Optional[bool] = None
    note: str = ""

    def to_record(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "suggestion_id": self.suggestion_id,
            "action": self.action,
            "timestamp": self.timestamp,
            "adopter_id": self.adopter_id,
            "idempotency_key": self.idempotency_key,
        }
        if self.committed_diff is not None:
            out["committed_diff"] = self.committed_diff
        if self.feedback_recorded is not None:
            out["feedback_recorded"] = self.feedback_recorded
        if self.note:
            out["note"] = self.note
        return out

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "FeedbackEvent":
        return cls(
            suggestion_id=record["suggestion_id"],
            action=record["action"],
            timestamp=record.get("timestamp", ""),
            adopter_id=record.get("adopter_id", ""),
            committed_diff=record.get("committed_diff"),
            idempotency_key=record.get("idempotency_key", ""),
            feedback_recorded=record.get("feedback_recorded"),
            note=record.get("note", ""),
        )


def suggestion_id_for(issue_id: str, patch_raw: str) -> str:
    digest = hashlib.sha256(f"{issue_id}\x00{patch_raw}".encode("utf-8"))
    return digest.hexdigest()[:16]


def _append_jsonl(path: Path, record: dict[str, Any]) -> None:
    with path.open("a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")


def _read_jsonl(path: Path) -> list[dict[str, Any]]:
    if not path.exists():
        return []
    out = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(json.loads(line))
    return out


class ReviewStore:
    """Append-only suggestion/event store with replay-on-load."""

    def __init__(self, root: str | Path, linter: Optional[LinterConfig] = None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.suggestions_path = self.root / "suggestions.jsonl"
        self.events_path = self.root / "events.jsonl"
        self.adoption_path = self.root / "adoption.jsonl"
        self.feedback = FeedbackStore(self.root / "feedback_samples.jsonl")
        self.linter = linter or LinterConfig()
        self._lock = threading.RLock()
        self._suggestions: dict[str, Suggestion] = {}
        self._seen_keys: set[tuple[str, str]] = set()
        self._load()

    def _load(self) -> None:
        for record in _read_jsonl(self.suggestions_path):
            s = Suggestion.from_record(record)
            self._suggestions[s.suggestion_id] = s
        for record in _read_jsonl(self.events_path):
            event = FeedbackEvent.from_record(record)
            self._apply_event_state(event)
            if event.idempotency_key:
                self._seen_keys.add((event.suggestion_id, event.idempotency_key))

    def _apply_event_state(self, event: FeedbackEvent) -> None:
        s = self._suggestions.get(event.suggestion_id)
        if s is None:
            raise UnknownSuggestion(event.suggestion_id)
        new_state = TRANSITIONS[s.state].get(event.action)
        if new_state is None:
            raise IllegalTransition(
                f"{event.action!r} not allowed from state {s.state!r}")
        self._suggestions[event.suggestion_id] = replace(s, state=new_state)

    # -- reads ---------------------------------------------------------

    def get(self, suggestion_id: str) -> Suggestion:
        with self._lock:
            try:
                return self._suggestions[suggestion_id]
            except KeyError:
                raise UnknownSuggestion(suggestion_id) from None

    def list_pending(self) -> list[Suggestion]:
        with self._lock:
            pending = [s for s in self._suggestions.values() if s.state == "pending"]
            return sorted(pending, key=lambda s: (s.created_at, s.seq), reverse=True)

    def all_suggestions(self) -> list[Suggestion]:
        with self._lock:
            return sorted(self._suggestions.values(), key=lambda s: s.seq)

    def adoption_records(self) -> list[AdoptionRecord]:
        with self._lock:
            return [AdoptionRecord.from_dict(r) for r in _read_jsonl(self.adoption_path)]

    # -- writes --------------------------------------------------------

    def ingest(self, outcomes: Iterable[Any], ws: Workspace,
               now: Optional[str] = None) -> tuple[int, int]:
        """Register fixed outcomes as pending suggestions.

        Only status=fixed outcomes with a patch become suggestions;
        everything else is counted as skipped. Idempotent: a suggestion
        id derives from (issue_id, patch text), so re-ingesting the
        same outcomes adds nothing.
        """
        from .context import extract_context

        new, skipped = 0, 0
        with self._lock:
            seq = max((s.seq for s in self._suggestions.values()), default=0)
            for outcome in outcomes:
                record = outcome.to_dict() if hasattr(outcome, "to_dict") else dict(outcome)
                patch_raw = record.get("final_patch_raw")
                if record.get("status") != "fixed" or not patch_raw:
                    skipped += 1
                    continue
                issue = LintIssue.from_dict(record["issue"])
                sid = suggestion_id_for(issue.issue_id, patch_raw)
                if sid in self._suggestions:
                    continue
                patch = parse_patch(patch_raw)
                report = apply_patch(ws, patch)
                if not patch.blocks or report.unapplied_count:
                    skipped += 1
                    continue
                diff = unified_diff_text(ws.files, report.result.files)
                attempts = record.get("attempts", [])
                raw_final = attempts[-1]["raw"] if attempts else patch_raw
                rationale = extract_rationale(raw_final)
                if not rationale:
                    rationale = f"Resolves {issue.rule_id}: {issue.message}"
                try:
                    excerpt = extract_context(ws, issue, 2048).focal_text
                except LintfixError:
                    excerpt = ""
                seq += 1
                suggestion = Suggestion(
                    suggestion_id=sid, issue=issue, patch_text=patch_raw,
                    unified_diff=diff, rationale=rationale, context_excerpt=excerpt,
                    workspace_files=dict(ws.files), created_at=now or _now(), seq=seq)
                _append_jsonl(self.suggestions_path, suggestion.to_record())
                self._suggestions[sid] = suggestion
                new += 1
        return new, skipped

    def act(self, suggestion_id: str, action: str, adopter_id: str = "",
            committed_diff: Optional[str] = None, idempotency_key: str = "",
            now: Optional[str] = None) -> Suggestion:
        """Apply a reviewer action and append the event.

        Commit actions also write an adoption verdict and, when the
        committed diff yields a usable golden patch, a feedback sample.
        A repeated idempotency key replays the stored result instead of
        acting twice.
        """
        if action not in ACTIONS:
            raise ValueError(f"unknown action: {action!r}")
        with self._lock:
            suggestion = self.get(suggestion_id)
            if idempotency_key and (suggestion_id, idempotency_key) in self._seen_keys:
                return suggestion
            new_state = TRANSITIONS[suggestion.state].get(action)
            if new_state is None:
                raise IllegalTransition(
                    f"{action!r} not allowed from state {suggestion.state!r}")
            if action == "commit" and not committed_diff:
                raise ValueError("commit requires committed_diff")

            timestamp = now or _now()
            feedback_recorded: Optional[bool] = None
            note = ""
            if action == "commit":
                assert committed_diff is not None
                verdict = adoption_record(
                    suggestion_id=suggestion_id,
                    suggested=suggestion.unified_diff,
                    committed=committed_diff,
                    adopter_id=adopter_id,
                    timestamp=timestamp,
                )
                _append_jsonl(self.adoption_path, verdict.to_dict())
                snapshot = Workspace(dict(suggestion.workspace_files))
                try:
                    sample = record_feedback(
                        snapshot, suggestion.issue, parse_patch(suggestion.patch_text),
                        committed_diff, linter=self.linter)
                    self.feedback.append(sample)
                    feedback_recorded = True
                except LintfixError as exc:
                    # the commit itself stands; only the training sample is dropped
                    feedback_recorded = False
                    note = f"feedback sample rejected: {exc}"

            event = FeedbackEvent(
                suggestion_id=suggestion_id, action=action, timestamp=timestamp,
                adopter_id=adopter_id, committed_diff=committed_diff,
                idempotency_key=idempotency_key,
                feedback_recorded=feedback_recorded, note=note)
            _append_jsonl(self.events_path, event.to_record())
            self._suggestions[suggestion_id] = replace(suggestion, state=new_state)
            if idempotency_key:
                self._seen_keys.add((suggestion_id, idempotency_key))
            return self._suggestions[suggestion_id]

    def events(self) -> list[FeedbackEvent]:
        return [FeedbackEvent.from_record(r) for r in _read_jsonl(self.events_path)]


def create_app(store: ReviewStore, ui_dir: Optional[str | Path] = None):
    """FastAPI application over a review store."""
    from fastapi import Body, FastAPI, HTTPException
    from fastapi.responses import PlainTextResponse, RedirectResponse

    app = FastAPI(title="lintfix review service")

    @app.get("/suggestions")
    def list_suggestions(state: Optional[str] = None):
        if state in (None, "pending"):
            items = store.list_pending()
        elif state == "all":
            items = store.all_suggestions()
        else:
            items = [s for s in store.all_suggestions() if s.state == state]
        return {"suggestions": [s.summary() for s in items]}

    @app.get("/suggestions/{suggestion_id}")
    def get_suggestion(suggestion_id: str):
        try:
            return store.get(suggestion_id).detail()
        except UnknownSuggestion:
            raise HTTPException(status_code=404, detail="unknown suggestion")

    @app.get("/suggestions/{suggestion_id}/diff", response_class=PlainTextResponse)
    def get_diff(suggestion_id: str):
        try:
            return store.get(suggestion_id).unified_diff
        except UnknownSuggestion:
            raise HTTPException(status_code=404, detail="unknown suggestion")

    @app.get("/rules/{rule_id}")
    def get_rule(rule_id: str):
        if rule_id not in RULE_DESCRIPTIONS:
            raise HTTPException(status_code=404, detail="unknown rule")
        return {"rule_id": rule_id, "description": RULE_DESCRIPTIONS[rule_id]}

    @app.post("/suggestions/{suggestion_id}/actions")
    def post_action(suggestion_id: str, payload: dict = Body(...)):
        action = payload.get("action", "")
        try:
            updated = store.act(
                suggestion_id,
                action,
                adopter_id=str(payload.get("adopter", "")),
                committed_diff=payload.get("committed_diff"),
                idempotency_key=str(payload.get("idempotency_key", "")),
            )
        except UnknownSuggestion:
            raise HTTPException(status_code=404, detail="unknown suggestion")
        except IllegalTransition as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return updated.detail()

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

        @app.get("/", include_in_schema=False)
        def root():
            return RedirectResponse(url="/ui/")

    return app
