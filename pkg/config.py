"""
Knowledge Share Configuration
=============================
Defaults shared by the library modules and the CLI.

Nothing here is read from the environment: per-run values come from
command-line flags and are passed down explicitly.
"""

import logging
import sys
from pathlib import Path


# ============================================
# CONFIGURATION
# ============================================

# Overlap
ORACLE_ACTOR_LIMIT = 1000
OVERLAP_CHUNK_PAIRS = 4_000_000  # pair contributions buffered before a sparse flush
DEFAULT_WORKERS = 1

# Graph
DEFAULT_THRESHOLD = 0.0
UNION_MODE_WARN_ACTORS = 2000  # union mode scores every pair

# Diffusion
DEFAULT_LAMBDA = 1.0
DEFAULT_MAX_ROUNDS = 100
DEFAULT_TRIALS = 1000
EXPECTED_INFECTION_CUTOFF = 0.5
MAX_RNG_SEED = 2**64 - 1

# Output
TEMPLATES_DIR = Path(__file__).parent / "templates"
LOG_FORMAT = '%(levelname)s:     %(message)s'
DEFAULT_LOG_LEVEL = "WARNING"


def configure_logging(level: str = DEFAULT_LOG_LEVEL) -> None:
    """Route log records to stderr; stdout is reserved for data."""
    numeric = getattr(logging, level.upper(), logging.WARNING)
    logging.basicConfig(level=numeric, format=LOG_FORMAT, stream=sys.stderr)
    # basicConfig is a no-op once handlers exist; the level still applies
    logging.getLogger().setLevel(numeric)
