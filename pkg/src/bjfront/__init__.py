"""Wave front tracking for the Baiti-Jenssen 3x3 system.

Modules
-------
system    flux, eigenstructure, wave-fan curves, Rankine-Hugoniot helpers
riemann   accurate and simplified Riemann solvers, well-prepared data checks
tracking  event-driven front tracking engine
datum     parameter ledger, compression-wave profiles and sampled data
census    group tagging, strength ledgers, shock counts, Burgers oracle
cli       scenario runner and exporter
"""
from ._jit import JIT_ENABLED

__version__ = "0.1.0"

__all__ = ["JIT_ENABLED", "__version__"]
