"""Run configuration: flat ``key=value`` text, environment override.

Precedence: built-in defaults, then the file named by the
``PIFORGE_CONFIG`` environment variable (when set), then an explicit
``--config`` path.  All values are positive integers.
"""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from typing import Optional

ENV_VAR = "PIFORGE_CONFIG"


class ConfigError(ValueError):
    """Bad key or value in a config file."""


@dataclass
class RunConfig:
    # digits per check class
    numeric_digits: int = 50          # convergent catalog formulas
    companion_digits: int = 15        # fast companion rows
    slow_companion_digits: int = 6    # companions at the slow boundary
    prop2_digits: int = 30            # weighted-sum-vs-sine numeric check
    modular_digits: int = 40          # eta/j/t_N evaluations
    tau_residual_digits: int = 20     # tau-relation residual target
    # series order per identity class
    series_order: int = 40            # generating-function identities
    involution_order: int = 30
    transformation_order: int = 25    # Clausen/Euler/Pfaff/quadratic
    # caps and performance knobs
    max_terms: int = 10**7
    slow_term_cap: int = 5 * 10**6
    congruence_pmax: int = 499
    oracle_pmax: int = 31
    bs_leaf: int = 32                 # binary-splitting leaf size
    workers: int = 1

    def __post_init__(self) -> None:
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if not isinstance(value, int) or value <= 0:
                raise ConfigError(f"{field.name} must be a positive integer, got {value!r}")

    def to_text(self) -> str:
        lines = [
            f"{field.name}={getattr(self, field.name)}"
            for field in dataclasses.fields(self)
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        return cls(**_parse_overrides(text))


def _parse_overrides(text: str) -> dict:
    overrides = {}
    names = {field.name for field in dataclasses.fields(RunConfig)}
    for lineno, rawline in enumerate(text.split("\n"), start=1):
        line = rawline.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in names:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            overrides[key] = int(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad integer for {key!r}: {value!r}") from None
    return overrides


def load_config(path: Optional[str] = None) -> RunConfig:
    """Defaults, then $PIFORGE_CONFIG (when set), then the explicit path."""
    values = dataclasses.asdict(RunConfig())
    for p in (os.environ.get(ENV_VAR), path):
        if p:
            with open(p, "r", encoding="utf-8") as handle:
                values.update(_parse_overrides(handle.read()))
    return RunConfig(**values)
