import os
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))
os.environ.setdefault("TORUS_LOGS", "off")


@pytest.fixture
def log_home(tmp_path, monkeypatch):
    """Route the JSONL journal into a temporary directory"""
    monkeypatch.setenv("TORUS_LOGS", str(tmp_path))
    return tmp_path


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(20260417)
