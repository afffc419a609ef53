"""Cut-set upper bounds on the half-duplex diamond network.

The full bound time-shares over the four network states and takes the
minimum over the four cuts separating source from destination, each cut
evaluated with full cooperation among the nodes on either side.  The
successive bound keeps only the two states of successive relaying.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .kernel import T_FLOOR, _as_checked, _c, _coherent, _slot
from .model import BoundAllocation, ChannelGains, OptimizerConfig, PowerBudget, RateReport, Scenario
from .optimizer import SearchSpace, Simplex, maximize

__all__ = [
    "BoundKind",
    "BOUND_CONFIG",
    "cutset_eval",
    "cutset_optimize",
    "successive_cutset_optimize",
    "low_snr_linear_bound",
    "bound_problem",
]

_LN2 = math.log(2.0)

# the bound must not be under-maximized, so it gets a finer lattice than schemes
BOUND_CONFIG = OptimizerConfig(grid_points_per_dim=13, multistarts=16)


class BoundKind(str, enum.Enum):
    FULL_CUTSET = "full"
    SUCCESSIVE_CUTSET = "successive"
    LOW_SNR_LINEAR = "low-snr-linear"


def _mixed(t, direct, relay_sq, h_src, h_rel, h12, p_src, p_rel):
    """Cut with one relay on the source side: 2x1 cooperative link, 1x2 receive."""
    inner = (direct * p_src + relay_sq * p_rel + 2 * h_src * h12 * np.sqrt(p_src * p_rel))
    t = np.asarray(t, dtype=float)
    pos = t > 0
    ts = np.where(pos, np.maximum(t, T_FLOOR), 1.0)
    v = t * _c(inner / ts + (h_src * h_rel) ** 2 * p_src * p_rel / (ts * ts))
    return np.where(pos, v, 0.0)


def _cuts(g: ChannelGains, t1, t2, t3, t4, p01, p02, p03, p12, p14, p21, p24):
    s0 = _slot(t1, g.h01**2 * p01) + _slot(t2, g.h02**2 * p02) + _slot(t3, (g.h01**2 + g.h02**2) * p03)
    s01 = (_mixed(t2, g.h02**2, g.h12**2 + g.h13**2, g.h02, g.h13, g.h12, p02, p12)
           + _slot(t3, g.h02**2 * p03) + _slot(t4, g.h13**2 * p14))
    s02 = (_mixed(t1, g.h01**2, g.h12**2 + g.h23**2, g.h01, g.h23, g.h12, p01, p21)
           + _slot(t3, g.h01**2 * p03) + _slot(t4, g.h23**2 * p24))
    s012 = (_slot(t1, g.h23**2 * p21) + _slot(t2, g.h13**2 * p12)
            + _slot(t4, _coherent(g.h13, p14, g.h23, p24)))
    return {"{0}": s0, "{0,1}": s01, "{0,2}": s02, "{0,1,2}": s012}


def _alloc_args(a: BoundAllocation):
    return (a.t1, a.t2, a.t3, a.t4, a.p0_1, a.p0_2, a.p0_3, a.p1_2, a.p1_4, a.p2_1, a.p2_4)


def cutset_eval(gains: ChannelGains, budget: PowerBudget, alloc: BoundAllocation) -> RateReport:
    """Minimum of the four cut values at one time/power allocation.

    Cuts are keyed by the set of nodes on the source side.
    """
    alloc.check_budget(budget)
    cuts = {k: float(v) for k, v in _cuts(gains, *_alloc_args(alloc)).items()}
    return RateReport(BoundKind.FULL_CUTSET.value, min(cuts.values()), {}, alloc, cuts)


def bound_problem(scn: Scenario, successive: bool = False):
    """Search space, vectorised cut terms ``(N, 4)`` and decoder of the cut-set bound."""
    g, b = scn.gains, scn.budget
    if successive:
        space = SearchSpace([Simplex(2, 1.0), Simplex(2, b.p0)])

        def terms(X):
            z = np.zeros(len(X))
            cuts = _cuts(g, X[:, 0], X[:, 1], z, z, X[:, 2], X[:, 3], z,
                         np.full(len(X), b.p1), z, np.full(len(X), b.p2), z)
            return np.stack(list(cuts.values()), axis=1)

        def dec(x):
            return BoundAllocation(x[0], x[1], 0.0, 0.0, x[2], x[3], 0.0, b.p1, 0.0, b.p2, 0.0)
    else:
        space = SearchSpace([Simplex(4, 1.0), Simplex(3, b.p0), Simplex(2, b.p1), Simplex(2, b.p2)])

        def terms(X):
            cuts = _cuts(g, *(X[:, i] for i in range(11)))
            return np.stack(list(cuts.values()), axis=1)

        def dec(x):
            return BoundAllocation(*map(float, x))
    return space, terms, dec


def _optimize(scn: Scenario, cfg, successive, kind, seeds=()):
    cfg = cfg or BOUND_CONFIG
    space, terms, dec = bound_problem(scn, successive)
    seed_x = None
    if seeds:
        if successive:
            seed_x = np.array([[s.t1, s.t2, s.p0_1, s.p0_2] for s in seeds])
        else:
            seed_x = np.array([list(_alloc_args(s)) for s in seeds])
    x, _ = maximize(lambda X: terms(X).min(axis=1), space, cfg, seeds=seed_x, terms=terms)
    rep = cutset_eval(scn.gains, scn.budget, dec(x))
    return RateReport(kind, rep.total_bpcu, rep.components, rep.allocation, rep.cut_values)


def cutset_optimize(gains: ChannelGains, budget: PowerBudget, cfg: OptimizerConfig | None = None,
                    seeds=()) -> RateReport:
    """Maximize the cut-set bound over time sharing and per-state powers.

    The default configuration uses a 13-point lattice (reduced automatically
    to fit the lattice budget on the 11-coordinate space) and 16 starts.
    """
    return _optimize(Scenario(gains, budget), cfg, False, BoundKind.FULL_CUTSET.value, seeds)


def successive_cutset_optimize(gains: ChannelGains, budget: PowerBudget,
                               cfg: OptimizerConfig | None = None) -> RateReport:
    """Cut-set bound restricted to the two successive-relaying states."""
    return _optimize(Scenario(gains, budget), cfg, True, BoundKind.SUCCESSIVE_CUTSET.value)


def low_snr_linear_bound(gains: ChannelGains, gamma1: float, gamma2: float, p0: float) -> float:
    """Linear-in-power bound ``(h13 sqrt(g1) + h23 sqrt(g2))^2 P0 / (2 ln 2)`` in bits.

    Relay powers are ``P1 = gamma1 P0`` and ``P2 = gamma2 P0``.  It bounds the
    coherent relay cut at low SNR and is meaningful only there.
    """
    g1 = float(_as_checked("gamma1", gamma1))
    g2 = float(_as_checked("gamma2", gamma2))
    p0 = float(_as_checked("p0", p0))
    a = gains.h13 * math.sqrt(g1) + gains.h23 * math.sqrt(g2)
    return a * a * p0 / (2.0 * _LN2)
