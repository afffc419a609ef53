"""Numerical checks of the high- and low-SNR optimality results.

Relay powers scale with the source power, ``P1 = gamma1 P0`` and
``P2 = gamma2 P0``.  At high SNR successive relaying with DPC approaches the
cut-set bound, and the bound's optimal share of simultaneous-relaying states
vanishes like ``1/log P0``.  At low SNR, under the gain condition of
:func:`low_snr_condition`, DDF carrying only the common message with
``t3 = t4 = 1/2`` approaches the bound.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any


from .bounds import cutset_optimize, low_snr_linear_bound
from .kernel import _c, _coherent
from .model import (
    ChannelGains,
    DdfAllocation,
    OptimizerConfig,
    PowerBudget,
    Scenario,
    ValidationError,
    db_to_linear,
)
from .optimizer import worker_count
from .schemes import SchemeId, ddf_eval, optimize

__all__ = [
    "AsymptoticScenario",
    "StudyRow",
    "low_snr_condition",
    "all_common_ddf_rate",
    "low_snr_study",
    "high_snr_study",
]


@dataclass(frozen=True)
class AsymptoticScenario:
    gains: ChannelGains
    gamma1: float
    gamma2: float
    p0_grid_db: tuple = ()

    def __post_init__(self):
        for name in ("gamma1", "gamma2"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValidationError(name, f"{name} not finite")
            if v < 0:
                raise ValidationError(name, f"{name} negative")
            object.__setattr__(self, name, v)
        grid = tuple(float(x) for x in self.p0_grid_db)
        if any(not math.isfinite(x) for x in grid):
            raise ValidationError("p0_grid_db", "p0_grid_db not finite")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValidationError("p0_grid_db", "p0_grid_db must be strictly ascending")
        object.__setattr__(self, "p0_grid_db", grid)

    def scenario(self, p0_db: float) -> Scenario:
        p0 = db_to_linear(p0_db)
        return Scenario(self.gains, PowerBudget(p0, self.gamma1 * p0, self.gamma2 * p0))


@dataclass(frozen=True)
class StudyRow:
    """One SNR point of an asymptotic study.

    ``t_hat3_plus_t_hat4`` and ``gap_times_log2_p0`` are filled by the
    high-SNR study; ``fast_path_rate`` and ``linear_bound`` by the low-SNR one.
    """

    p0_db: float
    scheme_rate: float
    bound_rate: float
    ratio: float
    gap_bits: float
    t_hat3_plus_t_hat4: float | None = None
    gap_times_log2_p0: float | None = None
    fast_path_rate: float | None = None
    linear_bound: float | None = None
    condition_violated: bool = False
    scheme_allocation: Any = None
    bound_allocation: Any = None
    relabeled: bool = False


def low_snr_condition(gains: ChannelGains, gamma1: float, gamma2: float) -> bool:
    """``(h13 sqrt(gamma1) + h23 sqrt(gamma2))^2 <= min(h01^2, h02^2)``."""
    if gamma1 < 0 or gamma2 < 0:
        raise ValidationError("gamma", "gamma negative")
    lhs = (gains.h13 * math.sqrt(gamma1) + gains.h23 * math.sqrt(gamma2)) ** 2
    return lhs <= min(gains.h01**2, gains.h02**2)


def all_common_ddf_rate(gains: ChannelGains, budget: PowerBudget) -> float:
    """DDF rate with equal slots and no private message.

    ``min(C(2 h02^2 P0) / 2, C(2 (h13 sqrt(P1) + h23 sqrt(P2))^2) / 2)``.
    """
    a = 0.5 * _c(gains.h02**2 * budget.p0 / 0.5)
    b = 0.5 * _c(_coherent(gains.h13, budget.p1, gains.h23, budget.p2) / 0.5)
    return float(min(a, b))


def _ratio(num, den):
    return num / den if den > 0 else (1.0 if num <= 0 else math.inf)


def _map(fn, items):
    items = list(items)
    workers = worker_count()
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def low_snr_study(scn: AsymptoticScenario, cfg: OptimizerConfig | None = None,
                  bound_cfg: OptimizerConfig | None = None) -> list:
    """DDF against the tighter of the cut-set and linear bounds, per source power.

    DDF is optimized with the slots pinned at ``t3 = t4 = 1/2`` and reported
    with the least private power that supports its rate.  Rows are ordered by
    ``p0_db`` and flagged when the low-SNR gain condition fails.  ``cfg``
    drives the scheme search and ``bound_cfg`` the bound search (defaults to
    the bound's finer configuration).
    """
    violated = not low_snr_condition(scn.gains, scn.gamma1, scn.gamma2)

    def row(p0_db):
        base = scn.scenario(p0_db)
        s, swapped = base.oriented()
        g, b = s.gains, s.budget
        ddf = optimize(SchemeId.DDF, s, cfg, fixed_t=0.5)
        fast = ddf_eval(g, b, DdfAllocation(0.5, 0.5, 0.0, b.p0, 0.0, b.p1)).total_bpcu
        up = cutset_optimize(g, b, bound_cfg).total_bpcu
        gam1, gam2 = (scn.gamma2, scn.gamma1) if swapped else (scn.gamma1, scn.gamma2)
        lin = low_snr_linear_bound(g, gam1, gam2, b.p0)
        bound = min(up, lin)
        return StudyRow(
            p0_db=p0_db,
            scheme_rate=ddf.total_bpcu,
            bound_rate=bound,
            ratio=_ratio(ddf.total_bpcu, bound),
            gap_bits=bound - ddf.total_bpcu,
            fast_path_rate=fast,
            linear_bound=lin,
            condition_violated=violated,
            scheme_allocation=ddf.allocation,
            relabeled=swapped,
        )

    return _map(row, scn.p0_grid_db)


def high_snr_study(scn: AsymptoticScenario, cfg: OptimizerConfig | None = None,
                   bound_cfg: OptimizerConfig | None = None) -> list:
    """DPC against the cut-set bound, per source power.

    Each row also carries the bound-optimal share of simultaneous-relaying
    states ``t3 + t4`` and the gap scaled by ``log2(P0)``, which stays
    bounded when the gap shrinks like ``1/log P0``.
    """

    def row(p0_db):
        s = scn.scenario(p0_db)
        dpc = optimize(SchemeId.DPC, s, cfg)
        up = cutset_optimize(s.gains, s.budget, bound_cfg)
        a = up.allocation
        gap = up.total_bpcu - dpc.total_bpcu
        return StudyRow(
            p0_db=p0_db,
            scheme_rate=dpc.total_bpcu,
            bound_rate=up.total_bpcu,
            ratio=_ratio(dpc.total_bpcu, up.total_bpcu),
            gap_bits=gap,
            t_hat3_plus_t_hat4=a.t3 + a.t4,
            gap_times_log2_p0=gap * math.log2(s.budget.p0) if s.budget.p0 > 0 else math.nan,
            scheme_allocation=dpc.allocation,
            bound_allocation=a,
        )

    return _map(row, scn.p0_grid_db)
