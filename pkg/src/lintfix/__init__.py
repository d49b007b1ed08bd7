"""Automated remediation of lint findings.

Scan a workspace, extract focused context for each finding, generate
search/replace patches through a pluggable backend, verify them by
re-applying the linter, and score candidates with a rule-based reward.
Includes dataset construction for training, evaluation metrics, and a
review service that turns accepted fixes into new feedback samples.
"""

from __future__ import annotations

from .backends import (Backend, GenerationRequest, HttpBackend,
                       MockOracleBackend, ScriptedBackend, backend_from_spec)
from .context import CodeContext, SymbolDef, extract_context, token_estimate
from .dataset import (FeedbackStore, StubSpec, TrainingSample, build_minimal_workspace,
                      build_sample, classify_difficulty, difficulty_band,
                      record_feedback, reproduce_issue, select_samples)
from .diffs import changed_lines, parse_unified_diff, tagged_multiset, unified_diff_text
from .errors import LintfixError
from .issues import LintIssue, Severity, Span
from .linting import LinterConfig, issue_fingerprint, run_linter
from .metrics import (AdoptionRecord, EvalRecord, MetricsSummary, aggregate_adoption,
                      fix_accuracy, fix_redundancy, iso_week, match_adoption)
from .orchestrator import (CompileConfig, FixConfig, FixOutcome, ValidationReport,
                           build_prompt, fix_issue, validate_fix)
from .patching import ApplyReport, FixPatch, SearchReplaceBlock, apply_patch, parse_patch, render_patch
from .rewards import (CorrectnessEvidence, RewardBreakdown, compile_reward,
                      correctness_reward, f_beta_score, format_reward, score_rollout,
                      total_reward)
from .workspace import Workspace

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Backend", "GenerationRequest", "HttpBackend", "MockOracleBackend",
    "ScriptedBackend", "backend_from_spec",
    "CodeContext", "SymbolDef", "extract_context", "token_estimate",
    "FeedbackStore", "StubSpec", "TrainingSample", "build_minimal_workspace",
    "build_sample", "classify_difficulty", "difficulty_band", "record_feedback",
    "reproduce_issue", "select_samples",
    "changed_lines", "parse_unified_diff", "tagged_multiset", "unified_diff_text",
    "LintfixError",
    "LintIssue", "Severity", "Span",
    "LinterConfig", "issue_fingerprint", "run_linter",
    "AdoptionRecord", "EvalRecord", "MetricsSummary", "aggregate_adoption",
    "fix_accuracy", "fix_redundancy", "iso_week", "match_adoption",
    "CompileConfig", "FixConfig", "FixOutcome", "ValidationReport",
    "build_prompt", "fix_issue", "validate_fix",
    "ApplyReport", "FixPatch", "SearchReplaceBlock", "apply_patch", "parse_patch",
    "render_patch",
    "CorrectnessEvidence", "RewardBreakdown", "compile_reward", "correctness_reward",
    "f_beta_score", "format_reward", "score_rollout", "total_reward",
    "Workspace",
]
