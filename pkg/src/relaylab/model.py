"""Domain types for the two-relay half-duplex diamond network.

Nodes are 0 (source), 1 and 2 (relays), 3 (destination).  There is no
direct source-destination link.  Gains are real amplitudes, powers are
linear with the noise variance fixed to 1 on every receiver.

Time slots:

* slot 1: source -> relay 1 while relay 2 -> destination (and relay 1)
* slot 2: source -> relay 2 while relay 1 -> destination (and relay 2)
* slot 3: source broadcasts to both relays
* slot 4: both relays transmit to the destination
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

__all__ = [
    "ValidationError",
    "AllocationError",
    "ChannelGains",
    "PowerBudget",
    "Scenario",
    "TimeAllocation",
    "DpcAllocation",
    "BmeSuccAllocation",
    "BmeBackAllocation",
    "BmeDpcAllocation",
    "DdfAllocation",
    "SsrdAllocation",
    "BoundAllocation",
    "RateReport",
    "OptimizerConfig",
    "validate_scenario",
    "parse_scenario",
    "load_scenario",
    "db_to_linear",
    "linear_to_db",
]

SUM_TOL = 1e-12


class ValidationError(ValueError):
    """A scenario field is malformed.  ``field`` names the offending key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(message)
        self.field = field_name


class AllocationError(ValueError):
    """An allocation violates its simplex, box or budget constraints."""


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x) if x > 0 else -math.inf


def _check_nonneg(obj, names):
    for name in names:
        v = getattr(obj, name)
        try:
            v = float(v)
        except (TypeError, ValueError):
            raise ValidationError(name, f"{name} not a number") from None
        if not math.isfinite(v):
            raise ValidationError(name, f"{name} not finite")
        if v < 0:
            raise ValidationError(name, f"{name} negative")
        object.__setattr__(obj, name, v)


@dataclass(frozen=True)
class ChannelGains:
    """Real link amplitudes.  ``h12`` serves both directions (reciprocity)."""

    h01: float
    h02: float
    h12: float
    h13: float
    h23: float

    def __post_init__(self):
        _check_nonneg(self, ("h01", "h02", "h12", "h13", "h23"))

    def swapped(self) -> "ChannelGains":
        """Same network with relay labels 1 and 2 exchanged."""
        return ChannelGains(self.h02, self.h01, self.h12, self.h23, self.h13)

    def scaled(self, k: float) -> "ChannelGains":
        return ChannelGains(*(k * getattr(self, f.name) for f in fields(self)))


@dataclass(frozen=True)
class PowerBudget:
    """Average power constraints of source and relays (linear, unit noise)."""

    p0: float
    p1: float
    p2: float

    def __post_init__(self):
        _check_nonneg(self, ("p0", "p1", "p2"))

    def swapped(self) -> "PowerBudget":
        return PowerBudget(self.p0, self.p2, self.p1)

    def scaled(self, k: float) -> "PowerBudget":
        return PowerBudget(self.p0 * k, self.p1 * k, self.p2 * k)

    @classmethod
    def from_db(cls, p0_db: float, p1_db: float, p2_db: float) -> "PowerBudget":
        return cls(db_to_linear(p0_db), db_to_linear(p1_db), db_to_linear(p2_db))


@dataclass(frozen=True)
class Scenario:
    gains: ChannelGains
    budget: PowerBudget

    @property
    def relays_ordered(self) -> bool:
        """True when ``h01 >= h02``, the orientation DDF and SSRD require."""
        return self.gains.h01 >= self.gains.h02

    def swapped(self) -> "Scenario":
        return Scenario(self.gains.swapped(), self.budget.swapped())

    def oriented(self) -> tuple["Scenario", bool]:
        """Return the scenario with ``h01 >= h02`` and whether relays were swapped."""
        if self.relays_ordered:
            return self, False
        return self.swapped(), True


def _coerce(cls, value):
    if isinstance(value, cls):
        return value
    if isinstance(value, Mapping):
        missing = [f.name for f in fields(cls) if f.name not in value]
        if missing:
            raise ValidationError(missing[0], f"{missing[0]} missing")
        return cls(**{f.name: value[f.name] for f in fields(cls)})
    return cls(*value)


def validate_scenario(gains, budget) -> Scenario:
    """Check and normalise a scenario.

    ``gains`` and ``budget`` may be the dataclasses themselves, mappings keyed
    by field name, or plain sequences.  Raises :class:`ValidationError` naming
    the first offending field.
    """
    return Scenario(_coerce(ChannelGains, gains), _coerce(PowerBudget, budget))


# -- allocations --------------------------------------------------------------

def _check_fractions(obj, names, *, total=None):
    vals = []
    for name in names:
        v = float(getattr(obj, name))
        if not math.isfinite(v) or v < -SUM_TOL or v > 1 + SUM_TOL:
            raise AllocationError(f"{name}={v!r} outside [0, 1]")
        object.__setattr__(obj, name, min(max(v, 0.0), 1.0))
        vals.append(v)
    if total is not None and abs(math.fsum(vals) - total) > SUM_TOL:
        raise AllocationError(f"{'+'.join(names)} = {math.fsum(vals)!r}, expected {total}")


def _check_powers(obj, names):
    for name in names:
        v = float(getattr(obj, name))
        if not math.isfinite(v) or v < 0:
            raise AllocationError(f"{name}={v!r} must be finite and non-negative")
        object.__setattr__(obj, name, v)


def _check_budget(label, parts, budget_value):
    tol = SUM_TOL * max(1.0, budget_value)
    if abs(math.fsum(parts) - budget_value) > tol:
        raise AllocationError(f"{label} split sums to {math.fsum(parts)!r}, budget is {budget_value!r}")


@dataclass(frozen=True)
class TimeAllocation:
    t1: float
    t2: float
    t3: float
    t4: float

    def __post_init__(self):
        _check_fractions(self, ("t1", "t2", "t3", "t4"), total=1.0)


@dataclass(frozen=True)
class DpcAllocation:
    t1: float
    t2: float
    p0_1: float
    p0_2: float

    def __post_init__(self):
        _check_fractions(self, ("t1", "t2"), total=1.0)
        _check_powers(self, ("p0_1", "p0_2"))

    def check_budget(self, budget: PowerBudget):
        _check_budget("p0", (self.p0_1, self.p0_2), budget.p0)


@dataclass(frozen=True)
class BmeSuccAllocation:
    t1: float
    t2: float
    p0_1: float
    p0_2: float
    alpha1: float
    alpha2: float
    theta1: float
    theta2: float

    def __post_init__(self):
        _check_fractions(self, ("t1", "t2"), total=1.0)
        _check_fractions(self, ("alpha1", "alpha2", "theta1", "theta2"))
        _check_powers(self, ("p0_1", "p0_2"))

    def check_budget(self, budget: PowerBudget):
        _check_budget("p0", (self.p0_1, self.p0_2), budget.p0)


@dataclass(frozen=True)
class BmeBackAllocation:
    t1: float
    t2: float
    p0_1: float
    p0_2: float
    beta1: float
    beta2: float

    def __post_init__(self):
        _check_fractions(self, ("t1", "t2"), total=1.0)
        _check_fractions(self, ("beta1", "beta2"))
        _check_powers(self, ("p0_1", "p0_2"))

    def check_budget(self, budget: PowerBudget):
        _check_budget("p0", (self.p0_1, self.p0_2), budget.p0)


@dataclass(frozen=True)
class BmeDpcAllocation:
    """Composite scheme allocation.

    ``decoding_relay`` picks which relay also decodes its partner's message
    (1 is the orientation in which relay 1 cooperates; 2 is its mirror image).
    """

    t1: float
    t2: float
    p0_1: float
    p0_2: float
    alpha: float
    decoding_relay: int = 1

    def __post_init__(self):
        _check_fractions(self, ("t1", "t2"), total=1.0)
        _check_fractions(self, ("alpha",))
        _check_powers(self, ("p0_1", "p0_2"))
        if self.decoding_relay not in (1, 2):
            raise AllocationError(f"decoding_relay must be 1 or 2, got {self.decoding_relay!r}")

    def check_budget(self, budget: PowerBudget):
        _check_budget("p0", (self.p0_1, self.p0_2), budget.p0)


@dataclass(frozen=True)
class DdfAllocation:
    """Simultaneous relaying: slot 3 broadcast, slot 4 coherent MAC.

    Relay 2 spends all of ``P2`` on the common message.
    """

    t3: float
    t4: float
    p0p: float
    p0c: float
    p1p: float
    p1c: float

    def __post_init__(self):
        _check_fractions(self, ("t3", "t4"), total=1.0)
        _check_powers(self, ("p0p", "p0c", "p1p", "p1c"))

    def check_budget(self, budget: PowerBudget):
        _check_budget("p0", (self.p0p, self.p0c), budget.p0)
        _check_budget("p1", (self.p1p, self.p1c), budget.p1)


@dataclass(frozen=True)
class SsrdAllocation:
    t1: float
    t2: float
    t3: float
    t4: float
    p0_1: float
    p0_2: float
    p0p3: float
    p0c3: float
    p1_2: float
    p1p4: float
    p1c4: float
    p2_1: float
    p2p4: float
    p2c4: float

    def __post_init__(self):
        _check_fractions(self, ("t1", "t2", "t3", "t4"), total=1.0)
        _check_powers(self, ("p0_1", "p0_2", "p0p3", "p0c3", "p1_2", "p1p4",
                             "p1c4", "p2_1", "p2p4", "p2c4"))

    def check_budget(self, budget: PowerBudget):
        _check_budget("p0", (self.p0_1, self.p0_2, self.p0p3, self.p0c3), budget.p0)
        _check_budget("p1", (self.p1_2, self.p1p4, self.p1c4), budget.p1)
        _check_budget("p2", (self.p2_1, self.p2p4, self.p2c4), budget.p2)


@dataclass(frozen=True)
class BoundAllocation:
    """Time-sharing over the four network states plus per-state powers."""

    t1: float
    t2: float
    t3: float
    t4: float
    p0_1: float
    p0_2: float
    p0_3: float
    p1_2: float
    p1_4: float
    p2_1: float
    p2_4: float

    def __post_init__(self):
        _check_fractions(self, ("t1", "t2", "t3", "t4"), total=1.0)
        _check_powers(self, ("p0_1", "p0_2", "p0_3", "p1_2", "p1_4", "p2_1", "p2_4"))

    def check_budget(self, budget: PowerBudget):
        _check_budget("p0", (self.p0_1, self.p0_2, self.p0_3), budget.p0)
        _check_budget("p1", (self.p1_2, self.p1_4), budget.p1)
        _check_budget("p2", (self.p2_1, self.p2_4), budget.p2)


@dataclass(frozen=True)
class RateReport:
    """Outcome of evaluating (or optimizing) one scheme or bound.

    ``total_bpcu`` is always the minimum of ``cut_values``.
    """

    scheme: str
    total_bpcu: float
    components: Mapping[str, float]
    allocation: Any
    cut_values: Mapping[str, float]
    notes: tuple = ()

    def __post_init__(self):
        if self.cut_values:
            m = min(self.cut_values.values())
            if abs(m - self.total_bpcu) > 1e-12:
                raise ValueError(f"total {self.total_bpcu!r} != min cut {m!r}")

    def alloc_params(self) -> dict:
        if self.allocation is None:
            return {}
        return {f.name: getattr(self.allocation, f.name) for f in fields(self.allocation)}


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for :func:`relaylab.optimizer.maximize`.

    ``max_grid_points`` caps the coarse lattice; when the requested
    resolution would exceed it, the resolution is lowered until it fits.
    """

    grid_points_per_dim: int = 9
    multistarts: int = 8
    refine_tol_rate: float = 1e-9
    refine_tol_step: float = 1e-6
    seed: int = 0
    max_grid_points: int = 300_000
    random_directions: int = 8
    max_iterations: int = 250
    polish_starts: int = 4
    polish_iterations: int = 200

    def __post_init__(self):
        if int(self.grid_points_per_dim) != self.grid_points_per_dim or self.grid_points_per_dim < 2:
            raise ValueError("grid_points_per_dim must be an integer >= 2")
        if self.multistarts < 1:
            raise ValueError("multistarts must be >= 1")
        if not (self.refine_tol_rate > 0 and self.refine_tol_step > 0):
            raise ValueError("refinement tolerances must be positive")
        if (self.max_grid_points < 1 or self.random_directions < 0 or self.max_iterations < 1
                or self.polish_starts < 0 or self.polish_iterations < 1):
            raise ValueError("budgets must be positive")

    def replace(self, **kw) -> "OptimizerConfig":
        from dataclasses import replace

        return replace(self, **kw)


# -- scenario files -----------------------------------------------------------

_GAIN_KEYS = ("h01", "h02", "h12", "h13", "h23")
_POWER_KEYS = ("p0", "p1", "p2")
_LINE = re.compile(r"^\s*([A-Za-z0-9_]+)\s*=\s*(\S+)\s*$")


def parse_scenario(text: str) -> Scenario:
    """Parse ``key = value`` scenario text.

    Keys are the five gains (linear) and, per node, either ``pN`` (linear) or
    ``pN_db``.  ``#`` starts a comment.  Duplicate keys and a power given both
    linear and in dB are rejected.
    """
    seen: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ValidationError(f"line {lineno}", f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, val = m.group(1), m.group(2)
        allowed = _GAIN_KEYS + _POWER_KEYS + tuple(k + "_db" for k in _POWER_KEYS)
        if key not in allowed:
            raise ValidationError(key, f"unknown key {key!r} on line {lineno}")
        if key in seen:
            raise ValidationError(key, f"duplicate key {key!r} on line {lineno}")
        try:
            seen[key] = float(val)
        except ValueError:
            raise ValidationError(key, f"{key} not a number: {val!r}") from None

    gains = {}
    for k in _GAIN_KEYS:
        if k not in seen:
            raise ValidationError(k, f"{k} missing")
        gains[k] = seen[k]
    powers = {}
    for k in _POWER_KEYS:
        lin, db = k in seen, k + "_db" in seen
        if lin and db:
            raise ValidationError(k, f"{k} given both linear and in dB")
        if not (lin or db):
            raise ValidationError(k, f"{k} missing")
        if db:
            if not math.isfinite(seen[k + "_db"]):
                raise ValidationError(k + "_db", f"{k}_db not finite")
            powers[k] = db_to_linear(seen[k + "_db"])
        else:
            powers[k] = seen[k]
    return validate_scenario(gains, powers)


def load_scenario(path) -> Scenario:
    return parse_scenario(Path(path).read_text())
