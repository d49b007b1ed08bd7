"""Exception types shared across the pipeline."""


class LintfixError(Exception):
    """Base class for all package errors."""


class WorkspaceError(LintfixError):
    pass


class FileNotFoundInWorkspace(WorkspaceError):
    """A referenced repo-relative path is not present in the workspace."""


class LinterFailure(LintfixError):
    """The linter itself failed (infrastructure, not a lint finding)."""


class CommandFailed(LinterFailure):
    """External command exited nonzero without producing a usable report."""


class ReportParseError(LinterFailure):
    """A lint report record failed validation.

    ``record_index`` is the 0-based index of the first offending record.
    """

    def __init__(self, message: str, record_index: int | None = None):
        super().__init__(message)
        self.record_index = record_index


class ParseFailure(LintfixError):
    """Source text could not be parsed by the configured grammar."""


class MalformedPatch(LintfixError):
    """Operation requires a structurally clean patch (malformed_count == 0)."""


class NotApplicable(LintfixError):
    """A patch block could not be applied where full application is required."""


class DiffParseError(LintfixError):
    """Unified diff text is structurally invalid."""


class DiffNotApplicable(LintfixError):
    """A unified diff does not apply to the given workspace."""


class EmptyGolden(LintfixError):
    """The golden diff has no changed lines; similarity is undefined."""


class EmptyInput(LintfixError):
    """Metric requested over an empty record list."""


class BackendTransportError(LintfixError):
    """The generation backend failed to return a response."""


class StubGenerationFailed(LintfixError):
    """Virtual-dependency stub construction failed for an import."""


class NotCompilable(LintfixError):
    """A built minimal workspace does not pass the compile/parse check."""


class SampleDiscarded(LintfixError):
    """A built sample failed a retention criterion and must be dropped."""


class HarnessFailure(LintfixError):
    """A cold-start sample's reproduction harness errored while scoring."""


class InvalidGoldenPatch(LintfixError):
    """A candidate golden patch does not clear the issue it claims to fix."""


class UnknownSuggestion(LintfixError):
    """No suggestion with the given id exists in the store."""


class IllegalTransition(LintfixError):
    """The requested action is not legal from the suggestion's current state."""
