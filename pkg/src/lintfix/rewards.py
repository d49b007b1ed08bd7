"""Rule-based reward for scoring candidate patches.

Three components: a format penalty charging malformed blocks, blocks
that fail to apply, and redundant extra blocks at -0.1 each; a compile
precheck worth 0.3; and a correctness term worth up to 0.7, granted
only when the precheck passed. Correctness evidence is either a
fail-to-pass re-scan (verifiable samples) or an F_beta similarity
against a golden patch (feedback samples). The total is clamped to
[0, 1].
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Any, Optional

from .diffs import tagged_multiset, unified_diff_text
from .errors import EmptyGolden, HarnessFailure
from .patching import ApplyReport, FixPatch, apply_patch, parse_patch

COMPILE_CREDIT = 0.3
CORRECTNESS_CREDIT = 0.7
PENALTY_STEP = 0.1


@dataclass(frozen=True)
class RewardBreakdown:
    r_f: float
    r_p: float
    r_c: float
    total: float
    i_malformed: int
    j_unapplied: int
    k_redundant: int

    def to_dict(self) -> dict[str, Any]:
        return {"r_f": self.r_f, "r_p": self.r_p, "r_c": self.r_c, "total": self.total,
                "i_malformed": self.i_malformed, "j_unapplied": self.j_unapplied,
                "k_redundant": self.k_redundant}


@dataclass(frozen=True)
class CorrectnessEvidence:
    kind: str  # cold_start_fail_to_pass | feedback_similarity
    passed: Optional[bool] = None
    f_beta: Optional[float] = None

    def __post_init__(self):
        if self.kind == "cold_start_fail_to_pass":
            if self.passed is None:
                raise ValueError("cold-start evidence requires passed")
        elif self.kind == "feedback_similarity":
            if self.f_beta is None or not 0.0 <= self.f_beta <= 1.0:
                raise ValueError("feedback evidence requires f_beta in [0,1]")
        else:
            raise ValueError(f"unknown evidence kind: {self.kind!r}")


def format_counts(patch: FixPatch, apply_report: ApplyReport,
                  expected_errors: int) -> tuple[int, int, int]:
    if expected_errors < 1:
        raise ValueError("expected_errors must be >= 1")
    i = patch.malformed_count
    j = apply_report.unapplied_count
    # redundancy counts well-formed blocks only; malformed ones are already charged via i
    k = max(0, patch.block_count() - expected_errors)
    return i, j, k


def format_reward(patch: FixPatch, apply_report: ApplyReport,
                  expected_errors: int = 1) -> float:
    i, j, k = format_counts(patch, apply_report, expected_errors)
    return -PENALTY_STEP * (i + j + k)


def compile_reward(compiled: bool) -> float:
    return COMPILE_CREDIT if compiled else 0.0


def f_beta_score(generated: Counter, golden: Counter, beta: float = 1.0) -> float:
    """Multiset precision/recall over tagged changed lines.

    ``generated`` plays G, ``golden`` plays T: P = |G∩T|/|G|,
    R = |G∩T|/|T|, F = (1+beta^2)PR/(beta^2 P + R); 0 when both are 0.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if not golden or sum(golden.values()) == 0:
        raise EmptyGolden("golden diff has no changed lines")
    if not generated or sum(generated.values()) == 0:
        return 0.0
    overlap = sum((generated & golden).values())
    p = overlap / sum(generated.values())
    r = overlap / sum(golden.values())
    if p == 0.0 and r == 0.0:
        return 0.0
    b2 = beta * beta
    return (1 + b2) * p * r / (b2 * p + r)


def correctness_reward(evidence: CorrectnessEvidence) -> float:
    if evidence.kind == "cold_start_fail_to_pass":
        return CORRECTNESS_CREDIT if evidence.passed else 0.0
    return CORRECTNESS_CREDIT * float(evidence.f_beta)


def total_reward(r_f: float, r_p: float, r_c: float) -> float:
    raw = r_f + r_p + (r_c if r_p > 0 else 0.0)
    return min(1.0, max(0.0, raw))


def assemble(patch: FixPatch, apply_report: ApplyReport, compiled: bool,
             evidence: Optional[CorrectnessEvidence],
             expected_errors: int = 1) -> RewardBreakdown:
    """Compose the components into one breakdown record."""
    i, j, k = format_counts(patch, apply_report, expected_errors)
    r_f = -PENALTY_STEP * (i + j + k)
    r_p = compile_reward(compiled)
    r_c = correctness_reward(evidence) if evidence is not None else 0.0
    return RewardBreakdown(r_f=r_f, r_p=r_p, r_c=r_c,
                           total=total_reward(r_f, r_p, r_c),
                           i_malformed=i, j_unapplied=j, k_redundant=k)


def score_rollout(sample, candidate_text: str, beta: float = 1.0,
                  expected_errors: Optional[int] = None) -> RewardBreakdown:
    """End-to-end scoring of a raw generation against a training sample.

    Parse, apply on the sample workspace, compile-check, then judge
    correctness: verifiable samples re-run issue reproduction and pass
    when the finding is gone; feedback samples compare changed-line
    multisets against the golden patch. Deterministic for a fixed pair.
    """
    from . import dataset as _dataset
    from .orchestrator import CompileConfig, check_compiles

    ws = sample.workspace
    patch = parse_patch(candidate_text)
    report = apply_patch(ws, patch)
    applied = bool(patch.blocks) and report.unapplied_count == 0
    if expected_errors is None:
        expected_errors = 1

    # zero applicable blocks leave no modified program to credit
    compiled = applied and check_compiles(report.result, CompileConfig(kind="parse"))

    evidence: Optional[CorrectnessEvidence] = None
    if compiled:
        if sample.kind == "cold_start":
            try:
                still_present = _dataset.reproduce_issue(report.result, sample.issue,
                                                         reference=ws)
            except Exception as exc:
                raise HarnessFailure(f"issue reproduction failed: {exc}") from exc
            evidence = CorrectnessEvidence(kind="cold_start_fail_to_pass",
                                           passed=not still_present)
        else:
            golden = sample.golden_patch
            if isinstance(golden, str):
                golden = parse_patch(golden)
            golden_report = apply_patch(ws, golden)
            if golden_report.unapplied_count:
                raise HarnessFailure("golden patch does not apply to sample workspace")
            golden_diff = unified_diff_text(ws.files, golden_report.result.files)
            cand_diff = unified_diff_text(ws.files, report.result.files)
            score = f_beta_score(tagged_multiset(cand_diff),
                                 tagged_multiset(golden_diff), beta=beta)
            evidence = CorrectnessEvidence(kind="feedback_similarity", f_beta=score)

    return assemble(patch, report, compiled, evidence, expected_errors=expected_errors)
