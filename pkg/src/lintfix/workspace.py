"""Immutable in-memory workspaces keyed by repo-relative paths.

All file content is normalized to LF line endings on ingest so that
byte-exact patch matching has a single canonical form. A workspace is
never mutated; edits produce a new value.
"""

from __future__ import annotations

import posixpath
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import FileNotFoundInWorkspace, WorkspaceError


def normalize_text(text: str) -> str:
    """Normalize CRLF/CR line endings to LF."""
    return text.replace("\r\n", "\n").replace("\r", "\n")


def validate_relpath(path: str) -> str:
    """Check that ``path`` is a clean repo-relative path and return it."""
    if not path:
        raise WorkspaceError("empty path")
    if path.startswith("/") or path.startswith("\\"):
        raise WorkspaceError(f"path must be relative: {path!r}")
    parts = path.replace("\\", "/").split("/")
    if ".." in parts:
        raise WorkspaceError(f"path must not traverse upward: {path!r}")
    if posixpath.normpath(path) != path:
        raise WorkspaceError(f"path must be normalized: {path!r}")
    return path


class Workspace:
    """A frozen mapping of repo-relative path -> LF-normalized text."""

    __slots__ = ("root", "_files")

    def __init__(self, files: Mapping[str, str], root: str = "."):
        normalized = {}
        for path, content in files.items():
            validate_relpath(path)
            if not isinstance(content, str):
                raise WorkspaceError(f"content of {path!r} is not text")
            normalized[path] = normalize_text(content)
        self.root = root
        self._files = MappingProxyType(dict(sorted(normalized.items())))

    @property
    def files(self) -> Mapping[str, str]:
        return self._files

    def __contains__(self, path: str) -> bool:
        return path in self._files

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Workspace):
            return NotImplemented
        return dict(self._files) == dict(other._files)

    def __hash__(self) -> int:
        return hash(tuple(self._files.items()))

    def __repr__(self) -> str:
        return f"Workspace(root={self.root!r}, files={len(self._files)})"

    def read(self, path: str) -> str:
        try:
            return self._files[path]
        except KeyError:
            raise FileNotFoundInWorkspace(path) from None

    def paths(self) -> Iterable[str]:
        return self._files.keys()

    def line_count(self, path: str) -> int:
        return len(self.read(path).split("\n"))

    def with_file(self, path: str, content: str) -> "Workspace":
        """Return a new workspace with ``path`` added or replaced."""
        files = dict(self._files)
        files[path] = content
        return Workspace(files, root=self.root)

    def without_file(self, path: str) -> "Workspace":
        files = dict(self._files)
        files.pop(path, None)
        return Workspace(files, root=self.root)

    @classmethod
    def from_dir(cls, root: str | Path, suffixes: tuple[str, ...] | None = None) -> "Workspace":
        """Load every text file under ``root`` (optionally filtered by suffix)."""
        rootp = Path(root)
        files: dict[str, str] = {}
        for p in sorted(rootp.rglob("*")):
            if not p.is_file():
                continue
            rel = p.relative_to(rootp).as_posix()
            if suffixes is not None and not rel.endswith(suffixes):
                continue
            try:
                files[rel] = p.read_text(encoding="utf-8")
            except UnicodeDecodeError:
                continue  # binary files are out of scope
        return cls(files, root=str(root))

    def write_to(self, root: str | Path) -> None:
        """Materialize the workspace under ``root`` on disk."""
        rootp = Path(root)
        for rel, content in self._files.items():
            target = rootp / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(content, encoding="utf-8")
