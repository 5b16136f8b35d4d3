#!/usr/bin/env python3
"""
Unit tests for the leveled logger
"""

import io

import pytest

from shrinkage import log as shrinkage_log
from shrinkage.log import LOG_DEBUG, LOG_EXTREME, LOG_INFO, LOG_WARNING, configure, log


@pytest.fixture
def stream():
    buffer = io.StringIO()
    yield buffer
    configure(LOG_WARNING)


@pytest.mark.unit
class TestLog:
    """Test the ladder and handler setup"""

    def test_threshold(self, stream):
        configure(LOG_INFO, stream)
        log("NCX2: shown", LOG_INFO)
        log("NCX2: hidden", LOG_DEBUG)
        text = stream.getvalue()
        assert "NCX2: shown" in text
        assert "hidden" not in text

    def test_level_names(self, stream):
        configure(LOG_EXTREME, stream)
        log("MonteCarlo: traced", "extreme")
        assert "[EXTREME] MonteCarlo: traced" in stream.getvalue()

    def test_configure_replaces_handler(self, stream):
        configure(LOG_INFO, stream)
        configure(LOG_INFO, stream)
        log("CLI: once", LOG_WARNING)
        assert stream.getvalue().count("CLI: once") == 1

    def test_verbosity_is_clamped(self, stream):
        configure(-3, stream)
        assert shrinkage_log.logger.level == 50
        configure(99, stream)
        assert shrinkage_log.logger.level == 5
