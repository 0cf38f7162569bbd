import sys
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"
# lets test modules import the shared fixture tables
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def sample_path():
    return DATA / "sample.conllu"


@pytest.fixture
def sample_text(sample_path):
    return sample_path.read_text(encoding="utf-8")
