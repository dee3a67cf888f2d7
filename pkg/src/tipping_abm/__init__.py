"""Phase-diagram laboratory for money-conserving macroeconomic ABMs.

Two engines (a fully agent-based credit economy and a hybrid model with an
aggregate household sector), the analytical reductions that act as their
oracles, phase classification, and a deterministic sweep harness.
"""

from .accounting import EconomyCollapse, audit_money
from .config import ConfigError, PolicyRule, SimConfig, default_config, load_config
from .rng import RngStream, derive_run_seed

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "EconomyCollapse",
    "PolicyRule",
    "RngStream",
    "SimConfig",
    "audit_money",
    "default_config",
    "derive_run_seed",
    "load_config",
    "__version__",
]
