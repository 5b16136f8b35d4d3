"""
pytest configuration for the shrinkage toolkit tests.

This file is automatically loaded by pytest before test collection begins.
It sets up the Python path so tests import the package from src/ without
an install step.
"""

import sys
import os

# Calculate paths relative to this file's location
tests_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(tests_dir)
src_dir = os.path.join(project_root, 'src')

# Add src/ to path for the shrinkage package
if src_dir not in sys.path:
    sys.path.insert(0, src_dir)

import pytest

from shrinkage.ncx2 import SeriesControl


# ============================================================================
# Common Test Data
# ============================================================================

@pytest.fixture
def series_control():
    """Default truncation policy used by the exact-risk tests."""
    return SeriesControl(rel_tol=1e-12, max_terms=10_000)


@pytest.fixture
def sample_points():
    """(p, lambda, omega) points shared by the risk tests."""
    return [
        (14, 0.0, 0.0),
        (14, 1.2418, 0.1),
        (18, 5.0019, 0.4),
        (20, 10.4311, 0.0),
        (24, 20.0, 0.7),
    ]


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """Isolated output directory for CLI runs (also set through the environment)."""
    out = tmp_path / "out"
    out.mkdir()
    monkeypatch.setenv("SHRINKAGE_OUTPUT_DIR", str(out))
    return out


@pytest.fixture
def config_file(tmp_path):
    """Write a flat key = value config file and return its path."""
    def _write(text, name="experiment.cfg"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


# ============================================================================
# Helper Functions
# ============================================================================

def read_csv(path):
    """
    Read a CSV file written by the CLI.

    Returns:
        (header, rows) with every cell as a string
    """
    import csv
    with open(path, encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    return rows[0], rows[1:]
