"""Rate-versus-power and rate-versus-inter-relay-gain sweeps.

A sweep produces one :class:`SweepRow` per (axis point, scheme or bound).
Rows are the single source of truth: the CSV and the plot description are
both rendered from them.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from .bounds import BoundKind, cutset_optimize, successive_cutset_optimize
from .model import ChannelGains, OptimizerConfig, PowerBudget, Scenario
from .optimizer import worker_count
from .schemes import (
    SchemeId,
    back_from_succ,
    bme_dpc_from_back,
    optimize,
    ssrd_from_ddf,
    ssrd_from_dpc,
)

__all__ = [
    "SweepKind",
    "SweepConfig",
    "SweepRow",
    "ConfigError",
    "CSV_HEADER",
    "fig8_config",
    "fig9_config",
    "run_sweep",
    "sweep_relay_power",
    "sweep_inter_relay_gain",
    "run_scenario",
    "bound_name",
    "write_csv",
    "read_csv",
    "emit_plot_script",
    "parse_sweep_config",
    "load_sweep_config",
]

CSV_HEADER = ("scenario_id", "axis_value", "h01", "h02", "h12", "h13", "h23", "p0_db", "p1_db", "p2_db",
              "scheme", "rate_bpcu", "t1", "t2", "t3", "t4", "alloc_params")

_SCHEME_ORDER = (SchemeId.BME_SUCC, SchemeId.BME_BACK, SchemeId.BME_DPC,
                 SchemeId.DPC, SchemeId.DDF, SchemeId.SSRD)


class ConfigError(ValueError):
    """Malformed sweep configuration."""


class SweepKind(str, enum.Enum):
    RELAY_POWER = "relay-power"
    INTER_RELAY_GAIN = "inter-relay-gain"


@dataclass(frozen=True)
class SweepConfig:
    """Description of one sweep.

    For ``RELAY_POWER`` the axis is ``P1 = P2`` in dB and ``P0`` sits
    ``offset_db`` above it.  For ``INTER_RELAY_GAIN`` the axis is ``h12`` and
    the powers are fixed at ``powers_db``.  The axis is either
    ``start:step:stop`` (inclusive, linear) or ``points`` log-spaced values
    between ``start`` and ``stop``.
    """

    kind: SweepKind
    gains: ChannelGains
    axis_start: float
    axis_stop: float
    axis_step: float | None = None
    axis_points: int | None = None
    axis_scale: str = "linear"
    offset_db: float = 0.0
    powers_db: tuple = (10.0, 10.0, 10.0)
    schemes: tuple = (SchemeId.DPC, SchemeId.DDF, SchemeId.SSRD)
    bounds: tuple = (BoundKind.FULL_CUTSET,)
    optimizer: OptimizerConfig | None = None
    label: str = "sweep"

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", SweepKind(self.kind))
            object.__setattr__(self, "schemes", tuple(SchemeId(s) for s in self.schemes))
            object.__setattr__(self, "bounds", tuple(BoundKind(b) for b in self.bounds))
        except ValueError as e:
            raise ConfigError(str(e)) from None
        if BoundKind.LOW_SNR_LINEAR in self.bounds:
            raise ConfigError("the low-SNR linear bound is not a sweep bound")
        if not self.schemes and not self.bounds:
            raise ConfigError("sweep needs at least one scheme or bound")
        if self.axis_scale not in ("linear", "log"):
            raise ConfigError(f"axis_scale must be 'linear' or 'log', got {self.axis_scale!r}")
        if not (math.isfinite(self.axis_start) and math.isfinite(self.axis_stop)):
            raise ConfigError("axis bounds must be finite")
        if self.axis_stop < self.axis_start:
            raise ConfigError("axis_stop must be >= axis_start")
        if self.axis_scale == "linear":
            if self.axis_step is None or not self.axis_step > 0:
                raise ConfigError("linear axis needs axis_step > 0")
        else:
            if self.axis_points is None or self.axis_points < 1:
                raise ConfigError("log axis needs axis_points >= 1")
            if self.axis_start <= 0:
                raise ConfigError("log axis needs axis_start > 0")
        if self.kind is SweepKind.INTER_RELAY_GAIN and self.axis_start < 0:
            raise ConfigError("inter-relay gain axis must be non-negative")
        if len(self.powers_db) != 3:
            raise ConfigError("powers_db needs three entries")

    def axis(self) -> np.ndarray:
        if self.axis_scale == "log":
            return np.geomspace(self.axis_start, self.axis_stop, self.axis_points)
        n = int(math.floor((self.axis_stop - self.axis_start) / self.axis_step + 1e-9)) + 1
        return self.axis_start + self.axis_step * np.arange(n)

    def scenario_at(self, x: float) -> tuple[Scenario, tuple]:
        """Scenario at axis value ``x`` and its powers in dB."""
        if self.kind is SweepKind.RELAY_POWER:
            p_db = (x + self.offset_db, x, x)
            return Scenario(self.gains, PowerBudget.from_db(*p_db)), p_db
        g = replace(self.gains, h12=float(x))
        return Scenario(g, PowerBudget.from_db(*self.powers_db)), tuple(self.powers_db)


@dataclass(frozen=True)
class SweepRow:
    scenario_id: str
    axis_value: float
    gains: ChannelGains
    powers_db: tuple
    scheme: str
    rate_bpcu: float
    times: tuple
    alloc_params: dict = field(default_factory=dict)


def fig8_config(offset_db: float, **kw) -> SweepConfig:
    """Rate versus relay power with ``P0 = P1 + offset_db`` and all gains 1."""
    base = dict(kind=SweepKind.RELAY_POWER, gains=ChannelGains(1, 1, 1, 1, 1), axis_start=-10.0,
                axis_stop=30.0, axis_step=2.0, offset_db=offset_db,
                schemes=(SchemeId.DPC, SchemeId.DDF, SchemeId.SSRD), bounds=(BoundKind.FULL_CUTSET,),
                label=f"relay-power{offset_db:+g}dB")
    base.update(kw)
    return SweepConfig(**base)


def fig9_config(**kw) -> SweepConfig:
    """Rate versus inter-relay gain with the other gains 1 and all powers 10 dB."""
    base = dict(kind=SweepKind.INTER_RELAY_GAIN, gains=ChannelGains(1, 1, 1, 1, 1), axis_start=0.1,
                axis_stop=10.0, axis_points=21, axis_scale="log", powers_db=(10.0, 10.0, 10.0),
                schemes=(SchemeId.BME_SUCC, SchemeId.BME_BACK, SchemeId.BME_DPC, SchemeId.DPC),
                bounds=(BoundKind.SUCCESSIVE_CUTSET,), label="inter-relay-gain")
    base.update(kw)
    return SweepConfig(**base)


def bound_name(kind) -> str:
    """Row label of a bound, e.g. ``cutset-full``."""
    return f"cutset-{BoundKind(kind).value}"


def _times(alloc):
    return tuple(float(getattr(alloc, n, 0.0)) for n in ("t1", "t2", "t3", "t4"))


def run_scenario(scn: Scenario, schemes, bounds, cfg: OptimizerConfig | None = None) -> dict:
    """Optimize the requested schemes and bounds on one scenario.

    The scenario is relabeled so that ``h01 >= h02`` (every formula other
    than DDF and SSRD is symmetric under the relabeling).  Dependent schemes
    are seeded from the ones they provably contain: backward from successive
    decoding, the composite from backward decoding, SSRD from DPC and DDF.
    Returns reports keyed by scheme or bound name, in a fixed order.
    """
    scn, swapped = scn.oriented()
    schemes = [SchemeId(s) for s in schemes]
    need = set(schemes)
    if SchemeId.SSRD in need:
        need |= {SchemeId.DPC, SchemeId.DDF}
    out = {}
    for s in _SCHEME_ORDER:
        if s not in need:
            continue
        seeds, kw = [], {}
        if s is SchemeId.BME_BACK and SchemeId.BME_SUCC.value in out:
            seeds = [back_from_succ(out[SchemeId.BME_SUCC.value].allocation)]
        elif s is SchemeId.BME_DPC and SchemeId.BME_BACK.value in out:
            seeds = bme_dpc_from_back(out[SchemeId.BME_BACK.value].allocation)
        elif s is SchemeId.SSRD:
            g, b = scn.gains, scn.budget
            seeds = [ssrd_from_dpc(g, b, out[SchemeId.DPC.value].allocation),
                     ssrd_from_ddf(g, b, out[SchemeId.DDF.value].allocation)]
            kw["embed"] = False
        out[s.value] = optimize(s, scn, cfg, seeds, **kw)
    for bkind in bounds:
        bkind = BoundKind(bkind)
        if bkind is BoundKind.FULL_CUTSET:
            out[bound_name(bkind)] = cutset_optimize(scn.gains, scn.budget)
        elif bkind is BoundKind.SUCCESSIVE_CUTSET:
            out[bound_name(bkind)] = successive_cutset_optimize(scn.gains, scn.budget)
        else:
            raise ConfigError(f"{bkind.value} is not an optimized bound")
    keep = [s.value for s in schemes] + [bound_name(b) for b in bounds]
    result = {k: out[k] for k in keep}
    if swapped:
        result = {k: replace(v, notes=v.notes + ("relays relabeled 1<->2",)) for k, v in result.items()}
    return result


def _sweep(cfg: SweepConfig) -> list:
    xs = [float(x) for x in cfg.axis()]

    def point(ix):
        i, x = ix
        scn, p_db = cfg.scenario_at(x)
        reports = run_scenario(scn, cfg.schemes, cfg.bounds, cfg.optimizer)
        rows = []
        for name, rep in reports.items():
            params = rep.alloc_params()
            if rep.notes:
                params["relabeled"] = 1
            rows.append(SweepRow(f"{cfg.label}-{i:03d}", x, scn.gains, p_db, name, rep.total_bpcu,
                                 _times(rep.allocation), params))
        return rows

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            chunks = list(pool.map(point, enumerate(xs)))
    else:
        chunks = [point(ix) for ix in enumerate(xs)]
    return [r for rows in chunks for r in rows]


def sweep_relay_power(cfg: SweepConfig) -> list:
    """Rows for every relay-power axis point and every scheme and bound."""
    if cfg.kind is not SweepKind.RELAY_POWER:
        raise ConfigError("sweep_relay_power needs a relay-power configuration")
    return _sweep(cfg)


def sweep_inter_relay_gain(cfg: SweepConfig) -> list:
    """Rows for every inter-relay gain on the axis and every scheme and bound."""
    if cfg.kind is not SweepKind.INTER_RELAY_GAIN:
        raise ConfigError("sweep_inter_relay_gain needs an inter-relay-gain configuration")
    return _sweep(cfg)


def run_sweep(cfg: SweepConfig) -> list:
    return sweep_relay_power(cfg) if cfg.kind is SweepKind.RELAY_POWER else sweep_inter_relay_gain(cfg)


# -- output -------------------------------------------------------------------

def _num(x) -> str:
    # fixed nine decimals keep the round-trip error of rates below 1e-9 bits
    return f"{float(x):.9f}"


def _row_fields(r: SweepRow):
    g = r.gains
    params = ";".join(f"{k}={_num(v) if isinstance(v, (int, float)) else v}" for k, v in r.alloc_params.items())
    return ([r.scenario_id, _num(r.axis_value), _num(g.h01), _num(g.h02), _num(g.h12), _num(g.h13),
             _num(g.h23)] + [_num(p) for p in r.powers_db]
            + [r.scheme, _num(r.rate_bpcu)] + [_num(t) for t in r.times] + [params])


def _write_text(text: str, destination) -> int:
    data = text.encode("utf-8")
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_bytes(data)
    return len(data)


def write_csv(rows, destination) -> int:
    """Write rows as CSV; returns the number of bytes written.

    ``destination`` is a path or a text file object.  Numbers carry 9
    decimal places and lines end with ``\\n``.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(_row_fields(r))
    return _write_text(buf.getvalue(), destination)


def read_csv(source) -> list:
    """Parse a file written by :func:`write_csv` back into dictionaries."""
    text = source.read() if hasattr(source, "read") else Path(source).read_text()
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        for k in CSV_HEADER[1:10] + CSV_HEADER[11:16]:
            rec[k] = float(rec[k])
        params = {}
        for item in filter(None, rec["alloc_params"].split(";")):
            key, _, val = item.partition("=")
            params[key] = float(val)
        rec["alloc_params"] = params
        out.append(rec)
    return out


def emit_plot_script(rows, destination) -> int:
    """Write a plain-text plot description, one series per scheme or bound.

    Each series is a ``# series <name>`` line followed by ``x y`` lines;
    series are separated by a blank line.

    Raises
    ------
    ValueError
        If ``rows`` is empty.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to plot")
    series: dict[str, list] = {}
    for r in rows:
        series.setdefault(r.scheme, []).append((r.axis_value, r.rate_bpcu))
    blocks = []
    for name, pts in series.items():
        lines = [f"# series {name}"] + [f"{_num(x)} {_num(y)}" for x, y in pts]
        blocks.append("\n".join(lines) + "\n")
    return _write_text("\n".join(blocks), destination)


# -- config files ---------------------------------------------------------------

_SWEEP_FLOAT_KEYS = ("h01", "h02", "h12", "h13", "h23", "axis_start", "axis_stop", "axis_step",
                     "offset_db", "p0_db", "p1_db", "p2_db")
_SWEEP_INT_KEYS = ("axis_points", "grid", "multistarts", "seed")
_SWEEP_STR_KEYS = ("kind", "axis_scale", "schemes", "bounds", "label")


def parse_sweep_config(text: str) -> SweepConfig:
    """Parse ``key = value`` sweep text into a :class:`SweepConfig`.

    Recognised keys: ``kind`` (required), the five gains (default 1),
    ``axis_start``, ``axis_stop``, ``axis_step`` or ``axis_points`` with
    ``axis_scale = log``, ``offset_db`` for relay-power sweeps,
    ``p0_db``/``p1_db``/``p2_db`` for inter-relay-gain sweeps, comma-separated
    ``schemes`` and ``bounds``, ``label``, and optimizer overrides ``grid``,
    ``multistarts``, ``seed``.
    """
    seen: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = (p.strip() for p in line.partition("="))
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} on line {lineno}")
        try:
            if key in _SWEEP_FLOAT_KEYS:
                seen[key] = float(val)
            elif key in _SWEEP_INT_KEYS:
                seen[key] = int(val)
            elif key in _SWEEP_STR_KEYS:
                seen[key] = val
            else:
                raise ConfigError(f"unknown key {key!r} on line {lineno}")
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"{key} not a number: {val!r}") from None
    if "kind" not in seen:
        raise ConfigError("kind missing")
    gains = ChannelGains(*(seen.get(k, 1.0) for k in ("h01", "h02", "h12", "h13", "h23")))
    kw: dict[str, Any] = dict(kind=seen["kind"], gains=gains)
    for k in ("axis_start", "axis_stop", "axis_step", "axis_points", "axis_scale", "offset_db", "label"):
        if k in seen:
            kw[k] = seen[k]
    for k in ("axis_start", "axis_stop"):
        if k not in kw:
            raise ConfigError(f"{k} missing")
    if any(k in seen for k in ("p0_db", "p1_db", "p2_db")):
        kw["powers_db"] = tuple(seen.get(k, 10.0) for k in ("p0_db", "p1_db", "p2_db"))
    for k in ("schemes", "bounds"):
        if k in seen:
            kw[k] = tuple(x.strip() for x in seen[k].split(",") if x.strip())
    opt = {name: seen[key] for key, name in (("grid", "grid_points_per_dim"), ("multistarts", "multistarts"),
                                             ("seed", "seed")) if key in seen}
    if opt:
        try:
            kw["optimizer"] = OptimizerConfig(**opt)
        except ValueError as e:
            raise ConfigError(str(e)) from None
    return SweepConfig(**kw)


def load_sweep_config(path) -> SweepConfig:
    return parse_sweep_config(Path(path).read_text())
