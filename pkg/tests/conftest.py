import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import pytest

from corpus import corpus_workspace, oracle_patches, scan_corpus


@pytest.fixture(scope="session")
def corpus_ws():
    return corpus_workspace()


@pytest.fixture(scope="session")
def corpus_issues(corpus_ws):
    return scan_corpus(corpus_ws)


@pytest.fixture(scope="session")
def corpus_oracle(corpus_ws):
    """issue_id -> golden patch text for every seeded finding."""
    return oracle_patches(corpus_ws)
