"""Evaluation metrics and adoption accounting.

Fix accuracy is the share of runs whose patch applied, compiled, and
cleared the original finding. Fix redundancy is the share whose block
count exceeded the number of errors present. Adoption compares a
suggested diff with what was actually committed: adopted only when
every suggested changed line (with polarity and multiplicity, after
whitespace normalization) appears in the committed diff for the same
file. Weekly aggregates count distinct adopters and total adoptions
per ISO week.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Iterable, Mapping

from .diffs import changed_lines
from .errors import EmptyInput

ADOPTED = "adopted"
NOT_ADOPTED = "not_adopted"


@dataclass(frozen=True)
class EvalRecord:
    sample_id: str
    success: bool
    blocks_generated: int  # P_i
    errors_present: int = 1  # E_i

    def __post_init__(self):
        if self.blocks_generated < 0:
            raise ValueError("blocks_generated must be >= 0")
        if self.errors_present < 1:
            raise ValueError("errors_present must be >= 1")

    def to_dict(self) -> dict[str, Any]:
        return {"sample_id": self.sample_id, "success": self.success,
                "blocks_generated": self.blocks_generated,
                "errors_present": self.errors_present}

    @classmethod
    def from_dict(cls, record: Mapping[str, Any]) -> "EvalRecord":
        return cls(sample_id=str(record["sample_id"]), success=bool(record["success"]),
                   blocks_generated=int(record["blocks_generated"]),
                   errors_present=int(record.get("errors_present", 1)))


def fix_accuracy(records: list[EvalRecord]) -> float:
    if not records:
        raise EmptyInput("no evaluation records")
    return sum(1 for r in records if r.success) / len(records)


def fix_redundancy(records: list[EvalRecord]) -> float:
    if not records:
        raise EmptyInput("no evaluation records")
    return sum(1 for r in records if r.blocks_generated > r.errors_present) / len(records)


def match_adoption(suggested: str, committed: str) -> str:
    """Containment verdict over changed-line multisets, per file.

    Context lines and line positions are ignored; any suggested +/-
    line missing from the committed diff (or present fewer times)
    makes the verdict not_adopted.
    """
    suggested_lines = changed_lines(suggested)
    committed_lines = changed_lines(committed)
    for path, wanted in suggested_lines.items():
        have = committed_lines.get(path)
        if have is None or (wanted - have):
            return NOT_ADOPTED
    return ADOPTED


@dataclass(frozen=True)
class AdoptionRecord:
    suggestion_id: str
    suggested_diff: str
    committed_diff: str
    verdict: str
    adopter_id: str = ""
    timestamp: str = ""  # ISO 8601

    def __post_init__(self):
        if self.verdict not in (ADOPTED, NOT_ADOPTED):
            raise ValueError(f"unknown verdict: {self.verdict!r}")

    def to_dict(self) -> dict[str, Any]:
        return {"suggestion_id": self.suggestion_id, "suggested_diff": self.suggested_diff,
                "committed_diff": self.committed_diff, "verdict": self.verdict,
                "adopter_id": self.adopter_id, "timestamp": self.timestamp}

    @classmethod
    def from_dict(cls, record: Mapping[str, Any]) -> "AdoptionRecord":
        return cls(suggestion_id=str(record["suggestion_id"]),
                   suggested_diff=str(record.get("suggested_diff", "")),
                   committed_diff=str(record.get("committed_diff", "")),
                   verdict=str(record["verdict"]),
                   adopter_id=str(record.get("adopter_id", "")),
                   timestamp=str(record.get("timestamp", "")))


def adoption_record(suggestion_id: str, suggested: str, committed: str,
                    adopter_id: str = "", timestamp: str = "") -> AdoptionRecord:
    return AdoptionRecord(suggestion_id=suggestion_id, suggested_diff=suggested,
                          committed_diff=committed,
                          verdict=match_adoption(suggested, committed),
                          adopter_id=adopter_id, timestamp=timestamp)


def iso_week(timestamp: str | datetime) -> str:
    """ISO week key like 2026-W33."""
    if isinstance(timestamp, str):
        timestamp = datetime.fromisoformat(timestamp)
    year, week, _ = timestamp.isocalendar()
    return f"{year}-W{week:02d}"


def aggregate_adoption(records: Iterable[AdoptionRecord]) -> dict[str, tuple[int, int]]:
    """Per ISO week: (distinct adopters with >=1 adoption, adoption count).

    Weeks appear only when they have at least one record; a week whose
    records were all not_adopted shows (0, 0).
    """
    adopters: dict[str, set[str]] = {}
    adoptions: dict[str, int] = {}
    for record in records:
        week = iso_week(record.timestamp)
        adopters.setdefault(week, set())
        adoptions.setdefault(week, 0)
        if record.verdict == ADOPTED:
            adopters[week].add(record.adopter_id)
            adoptions[week] += 1
    return {week: (len(adopters[week]), adoptions[week]) for week in sorted(adopters)}


@dataclass(frozen=True)
class MetricsSummary:
    n: int
    accuracy: float
    redundancy: float
    adopted_count: int = 0
    weekly: Mapping[str, tuple[int, int]] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "accuracy": self.accuracy, "redundancy": self.redundancy,
                "adopted_count": self.adopted_count,
                "weekly": {k: list(v) for k, v in self.weekly.items()}}


def summarize(records: list[EvalRecord],
              adoption: Iterable[AdoptionRecord] = ()) -> MetricsSummary:
    adoption = list(adoption)
    return MetricsSummary(
        n=len(records),
        accuracy=fix_accuracy(records),
        redundancy=fix_redundancy(records),
        adopted_count=sum(1 for a in adoption if a.verdict == ADOPTED),
        weekly=aggregate_adoption(adoption),
    )


def eval_record_from_outcome(outcome, expected_errors: int = 1) -> EvalRecord:
    """Fold a fix outcome into an evaluation record.

    Success means the loop ended fixed; the block count comes from the
    final attempt's parsed patch (0 when no attempt completed).
    """
    from .patching import parse_patch

    if outcome.status == "fixed" and outcome.final_patch is not None:
        blocks = outcome.final_patch.block_count()
    elif outcome.attempts:
        blocks = parse_patch(outcome.attempts[-1].raw).block_count()
    else:
        blocks = 0
    return EvalRecord(sample_id=outcome.issue.issue_id,
                      success=outcome.status == "fixed",
                      blocks_generated=blocks,
                      errors_present=expected_errors)
