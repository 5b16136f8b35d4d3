# MIT License
#
# Copyright (c) 2025 Balanced Shrinkage Contributors
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in
# all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.

"""
Leveled logging for the shrinkage toolkit.

All components log through a single call, ``log(message, level)``, on an
eight-step ladder:

    LOG_CRITICAL = 0   unrecoverable
    LOG_ERROR    = 1   a verification check failed, a run aborted
    LOG_WARNING  = 2   skipped grid cells, degenerate inputs
    LOG_NOTICE   = 3
    LOG_INFO     = 4   run summaries (default threshold)
    LOG_VERBOSE  = 5
    LOG_DEBUG    = 6   series extensions, chunk scheduling
    LOG_EXTREME  = 7   per-term tracing

Records go to the standard library logger named ``shrinkage``. Library code
never installs handlers; the CLI calls ``configure()``.
"""

import logging
import sys

LOG_CRITICAL = 0
LOG_ERROR = 1
LOG_WARNING = 2
LOG_NOTICE = 3
LOG_INFO = 4
LOG_VERBOSE = 5
LOG_DEBUG = 6
LOG_EXTREME = 7

# Ladder position -> stdlib numeric level
_LEVEL_MAP = {
    LOG_CRITICAL: logging.CRITICAL,
    LOG_ERROR: logging.ERROR,
    LOG_WARNING: logging.WARNING,
    LOG_NOTICE: 25,
    LOG_INFO: logging.INFO,
    LOG_VERBOSE: 15,
    LOG_DEBUG: logging.DEBUG,
    LOG_EXTREME: 5,
}

_LEVEL_NAMES = {
    "CRITICAL": LOG_CRITICAL,
    "ERROR": LOG_ERROR,
    "WARNING": LOG_WARNING,
    "NOTICE": LOG_NOTICE,
    "INFO": LOG_INFO,
    "VERBOSE": LOG_VERBOSE,
    "DEBUG": LOG_DEBUG,
    "EXTREME": LOG_EXTREME,
}

for _name, _ladder in _LEVEL_NAMES.items():
    if logging.getLevelName(_LEVEL_MAP[_ladder]).startswith("Level "):
        logging.addLevelName(_LEVEL_MAP[_ladder], _name)

logger = logging.getLogger("shrinkage")


def log(message, level=LOG_INFO):
    """
    Log a message on the shrinkage ladder.

    Args:
        message: Text to log, conventionally prefixed with the component
                 name ("NCX2: ...", "MonteCarlo: ...")
        level: Ladder position (int) or level name ("DEBUG", "EXTREME", ...)
    """
    if isinstance(level, str):
        level = _LEVEL_NAMES.get(level.upper(), LOG_INFO)
    stdlib_level = _LEVEL_MAP.get(level, logging.INFO)
    if logger.isEnabledFor(stdlib_level):
        logger.log(stdlib_level, message)


def configure(verbosity=LOG_INFO, stream=None):
    """
    Attach a stream handler to the ``shrinkage`` logger.

    Calling this more than once replaces the previous handler, so repeated
    CLI invocations inside one process (tests) do not duplicate output.

    Args:
        verbosity: Ladder position; messages above it are dropped
        stream: Output stream (default stderr)
    """
    verbosity = max(LOG_CRITICAL, min(LOG_EXTREME, int(verbosity)))

    for handler in list(logger.handlers):
        if getattr(handler, "_shrinkage_handler", False):
            logger.removeHandler(handler)

    handler = logging.StreamHandler(stream if stream is not None else sys.stderr)
    handler.setFormatter(logging.Formatter("[%(asctime)s] [%(levelname)s] %(message)s",
                                           datefmt="%Y-%m-%d %H:%M:%S"))
    handler._shrinkage_handler = True
    logger.addHandler(handler)
    logger.setLevel(_LEVEL_MAP[verbosity])
    logger.propagate = False
    return handler
