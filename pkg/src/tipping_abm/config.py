"""Run configuration: parameter record, validation, defaults, config-file grammar.

One `SimConfig` drives both engines. The config file grammar is plain
``key = value`` lines (``#`` comments, blank lines ignored); every field
below is a config key of the same name. Keys that the selected engine does
not use are accepted with a logged notice so one file can drive paired
comparisons. Unknown keys are hard errors.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, fields, replace
from typing import Any

log = logging.getLogger("tipping_abm")


class ConfigError(ValueError):
    """Invalid configuration value or malformed config file."""


@dataclass(frozen=True)
class PolicyRule:
    """Accommodation rule: raise the bankruptcy threshold while u is high.

    While u > u_trigger the effective threshold is theta_high, otherwise the
    configured theta. Accommodation raises, never lowers, the threshold.
    """

    u_trigger: float
    theta_high: float

    def validate(self, theta: float) -> None:
        if not 0.0 < self.u_trigger < 1.0:
            raise ConfigError(
                f"policy: u_trigger={self.u_trigger} outside the open interval (0, 1)"
            )
        if self.theta_high <= 0.0:
            raise ConfigError(f"policy: theta_high={self.theta_high} must be positive")
        if self.theta_high < theta:
            raise ConfigError(
                f"policy: theta_high={self.theta_high} below theta={theta}; "
                "accommodation may only raise the threshold"
            )


@dataclass(frozen=True)
class SimConfig:
    """Full parameter record for one run (either engine).

    Fields follow the model parameters: firm count and households-per-firm,
    consumption propensity c, price/wage sensitivity beta, adjustment
    amplitudes gamma_*, hiring/firing propensities eta_±, dividend fraction
    delta (or the dividend-plus-reserves variant delta_plus), bankruptcy
    threshold theta (math.inf disables default resolution), revival
    probability phi, household share of default costs f, plus the credit
    parameters of the fully agent-based engine (rho0, tau, m_goods).
    """

    n_firms: int = 1000
    mu: float = 1.0
    c: float = 0.5
    beta: float = 0.0
    gamma_p: float = 0.05
    gamma_y: float = 0.1
    gamma_w: float = 0.0
    eta_plus: float = 0.2
    eta_minus: float = 0.1
    delta: float = 0.02
    delta_plus: float | None = None
    theta: float = math.inf
    phi: float = 0.1
    f: float = 1.0
    rho0: float = 0.0
    tau: float = 0.05
    m_goods: int = 3
    horizon: int = 10000
    burn_in: int = 0
    seed: int = 0
    policy: PolicyRule | None = None
    rate_noise: bool = False  # re-enables the noise term on the offered rate

    def __post_init__(self) -> None:
        self.validate()

    # -- validation -----------------------------------------------------

    def validate(self) -> None:
        _require(self.n_firms >= 1, "n_firms", self.n_firms, "a positive integer")
        _require(self.mu > 0.0, "mu", self.mu, "a positive real")
        _require(0.0 < self.c <= 1.0, "c", self.c, "in (0, 1]")
        _require(self.beta >= 0.0, "beta", self.beta, "non-negative")
        for name in ("gamma_p", "gamma_y", "gamma_w"):
            v = getattr(self, name)
            _require(0.0 <= v <= 1.0, name, v, "in [0, 1]")
        for name in ("eta_plus", "eta_minus", "delta", "phi", "f", "tau"):
            v = getattr(self, name)
            _require(0.0 <= v <= 1.0, name, v, "in [0, 1]")
        if self.delta_plus is not None:
            _require(
                0.0 <= self.delta_plus <= 1.0, "delta_plus", self.delta_plus, "in [0, 1]"
            )
        _require(self.theta > 0.0, "theta", self.theta, "positive (or inf)")
        _require(self.rho0 >= 0.0, "rho0", self.rho0, "non-negative")
        _require(self.m_goods >= 1, "m_goods", self.m_goods, "a positive integer")
        _require(self.horizon >= 1, "horizon", self.horizon, "a positive integer")
        _require(self.burn_in >= 0, "burn_in", self.burn_in, "non-negative")
        _require(
            -(2**63) <= self.seed < 2**64, "seed", self.seed, "a 64-bit integer"
        )
        if self.policy is not None:
            self.policy.validate(self.theta)

    # -- derived quantities ---------------------------------------------

    @property
    def hire_fire_ratio(self) -> float:
        """R = eta_plus / eta_minus; defined only when eta_minus > 0."""
        if self.eta_minus <= 0.0:
            raise ConfigError("R = eta_plus/eta_minus undefined: eta_minus = 0")
        return self.eta_plus / self.eta_minus

    @property
    def n_households(self) -> int:
        return int(round(self.mu * self.n_firms))

    # -- (de)serialization ----------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {}
        for f_ in fields(self):
            v = getattr(self, f_.name)
            if f_.name == "policy":
                v = None if v is None else f"{v.u_trigger}:{v.theta_high}"
            elif isinstance(v, float) and math.isinf(v):
                v = "inf"
            d[f_.name] = v
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SimConfig":
        known = {f_.name for f_ in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {k: _parse_value(k, v) for k, v in d.items()}
        return cls(**kwargs)


def _require(ok: bool, key: str, value: Any, allowed: str) -> None:
    if not ok:
        raise ConfigError(f"{key} = {value!r} out of range: must be {allowed}")


# ---------------------------------------------------------------------------
# Engine defaults
# ---------------------------------------------------------------------------

# Hybrid-engine defaults (phase-diagram baseline parameters); R = 2 via
# eta_plus/eta_minus is the documented baseline, horizon/burn_in are desk scale.
MARK0_DEFAULTS: dict[str, Any] = dict(
    n_firms=5000,
    mu=1.0,
    c=0.5,
    beta=0.0,
    gamma_p=0.05,
    gamma_y=0.1,
    gamma_w=0.0,
    eta_plus=0.2,
    eta_minus=0.1,
    delta=0.02,
    theta=math.inf,
    phi=0.1,
    f=1.0,
    horizon=10000,
    burn_in=0,
)

# Fully agent-based engine defaults from its parameter blocks:
# gamma_p = gamma_y = 0.1, dividend 0.2, repayment 0.05, M = 3 shops,
# c = 0.8, ten households per firm.
MARK1_DEFAULTS: dict[str, Any] = dict(
    n_firms=1000,
    mu=10.0,
    c=0.8,
    gamma_p=0.1,
    gamma_y=0.1,
    delta=0.2,
    tau=0.05,
    m_goods=3,
    rho0=0.0,
    horizon=10000,
    burn_in=0,
)

_ENGINE_DEFAULTS = {"mark0": MARK0_DEFAULTS, "mark1": MARK1_DEFAULTS}

# Keys each engine actually reads; the rest are accepted with a notice.
MARK0_KEYS = {
    "n_firms", "mu", "c", "beta", "gamma_p", "gamma_w", "eta_plus", "eta_minus",
    "delta", "delta_plus", "theta", "phi", "f", "horizon", "burn_in", "seed",
    "policy",
}
MARK1_KEYS = {
    "n_firms", "mu", "c", "gamma_p", "gamma_y", "delta", "rho0", "tau",
    "m_goods", "horizon", "burn_in", "seed", "rate_noise",
}
_ENGINE_KEYS = {"mark0": MARK0_KEYS, "mark1": MARK1_KEYS}

_INT_KEYS = {"n_firms", "m_goods", "horizon", "burn_in", "seed"}
_BOOL_KEYS = {"rate_noise"}


def default_config(engine: str, **overrides: Any) -> SimConfig:
    """Documented defaults for `engine` ('mark0' or 'mark1'), plus overrides."""
    if engine not in _ENGINE_DEFAULTS:
        raise ConfigError(f"unknown engine {engine!r}; expected 'mark0' or 'mark1'")
    merged = dict(_ENGINE_DEFAULTS[engine])
    merged.update(overrides)
    return SimConfig(**merged)


# ---------------------------------------------------------------------------
# Config file grammar
# ---------------------------------------------------------------------------


def _parse_value(key: str, raw: Any) -> Any:
    if key == "policy":
        if raw in (None, "", "none"):
            return None
        if isinstance(raw, PolicyRule):
            return raw
        try:
            trig, high = str(raw).split(":")
            return PolicyRule(u_trigger=float(trig), theta_high=float(high))
        except ConfigError:
            raise
        except Exception:
            raise ConfigError(
                f"policy = {raw!r} malformed: expected 'u_trigger:theta_high', e.g. 0.1:10"
            ) from None
    if key == "delta_plus" and raw in (None, "", "none"):
        return None
    if key in _BOOL_KEYS:
        if isinstance(raw, bool):
            return raw
        s = str(raw).strip().lower()
        if s in ("1", "true", "yes", "on"):
            return True
        if s in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key} = {raw!r} is not a boolean")
    if key in _INT_KEYS:
        try:
            return int(str(raw), 0)
        except ValueError:
            raise ConfigError(f"{key} = {raw!r} is not an integer") from None
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} = {raw!r} is not a number") from None


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse ``key = value`` lines into a raw string mapping."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigError(f"{source}:{lineno}: empty key or value in {line!r}")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config(
    path: str,
    engine: str,
    overrides: dict[str, Any] | None = None,
) -> SimConfig:
    """Load and validate a config file for `engine`, applying documented defaults.

    Unknown keys are hard errors. Keys irrelevant to `engine` are accepted
    with a logged notice. `overrides` (e.g. CLI flags) win over file values.
    """
    with open(path, encoding="utf-8") as fh:
        raw = parse_config_text(fh.read(), source=path)
    return build_config(raw, engine, overrides)


def build_config(
    raw: dict[str, Any],
    engine: str,
    overrides: dict[str, Any] | None = None,
) -> SimConfig:
    if engine not in _ENGINE_DEFAULTS:
        raise ConfigError(f"unknown engine {engine!r}; expected 'mark0' or 'mark1'")
    known = {f_.name for f_ in fields(SimConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(
            f"unknown config keys: {sorted(unknown)} (known keys: {sorted(known)})"
        )
    irrelevant = set(raw) - _ENGINE_KEYS[engine]
    if irrelevant:
        log.info(
            "config keys %s are not used by engine %s; ignored for this run",
            sorted(irrelevant),
            engine,
        )
    merged = dict(_ENGINE_DEFAULTS[engine])
    merged.update({k: _parse_value(k, v) for k, v in raw.items()})
    if overrides:
        merged.update({k: _parse_value(k, v) for k, v in overrides.items()})
    return SimConfig(**merged)


def with_params(config: SimConfig, **changes: Any) -> SimConfig:
    """Validated copy of `config` with fields replaced."""
    return replace(config, **changes)
