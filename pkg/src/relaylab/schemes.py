"""Achievable rates of the relaying schemes.

Each scheme has one vectorised ``_*_cuts`` function holding its formula as a
dictionary of min-terms.  ``*_eval`` evaluates it at a single allocation and
returns a :class:`~relaylab.model.RateReport`; ``optimize`` maximizes the same
function through :mod:`relaylab.optimizer`.

Decision vectors use the allocation's own units: time fractions on a unit
simplex and powers on a simplex whose mass is the node's budget.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .kernel import _coherent, _slot, _slot_inverse, _slot_noisy
from .model import (
    BmeBackAllocation,
    BmeDpcAllocation,
    BmeSuccAllocation,
    ChannelGains,
    DdfAllocation,
    DpcAllocation,
    OptimizerConfig,
    PowerBudget,
    RateReport,
    Scenario,
    SsrdAllocation,
)
from .optimizer import Box, SearchSpace, Simplex, maximize

__all__ = [
    "SchemeId",
    "InfeasibleRateError",
    "PreconditionError",
    "FEASIBILITY_SLACK",
    "dpc_eval",
    "bme_succ_eval",
    "bme_back_eval",
    "bme_dpc_eval",
    "ddf_eval",
    "ddf_corner_decompose",
    "ddf_canonicalize",
    "ssrd_eval",
    "ssrd_check",
    "evaluate",
    "optimize",
    "problem",
    "SchemeProblem",
    "back_from_succ",
    "bme_dpc_from_back",
    "ssrd_from_dpc",
    "ssrd_from_ddf",
    "ddf_from_ssrd",
    "dpc_symmetric_closed_form",
]

FEASIBILITY_SLACK = 1e-12


class SchemeId(str, enum.Enum):
    DPC = "dpc"
    BME_SUCC = "bme-succ"
    BME_BACK = "bme-back"
    BME_DPC = "bme-dpc"
    DDF = "ddf"
    SSRD = "ssrd"


class InfeasibleRateError(ValueError):
    """The allocation violates a rate constraint; ``constraint`` names it."""

    def __init__(self, constraint: str, message: str | None = None):
        super().__init__(message or f"constraint {constraint} violated")
        self.constraint = constraint


class PreconditionError(ValueError):
    """Scenario outside the domain a scheme's formula was derived for."""


def _require_ordered(gains: ChannelGains, what: str):
    if gains.h01 < gains.h02:
        raise PreconditionError(
            f"{what} assumes h01 >= h02 (got h01={gains.h01!r}, h02={gains.h02!r}); "
            "relabel relays 1 and 2 first (Scenario.oriented())"
        )


def _report(scheme, cuts, components, alloc, notes=()):
    cuts = {k: float(v) for k, v in cuts.items()}
    total = min(cuts.values())
    return RateReport(scheme, total, {k: float(v) for k, v in components.items()}, alloc, cuts, tuple(notes))


def _min(cuts: dict):
    return np.minimum.reduce([np.asarray(v, dtype=float) for v in cuts.values()])


def _minof(terms):
    return lambda X: terms(X).min(axis=1)


# -- DPC ----------------------------------------------------------------------

def _dpc_parts(g, b, t1, t2, p01, p02):
    a = _slot(t1, g.h01**2 * p01)
    bb = _slot(t2, g.h13**2 * b.p1)
    c = _slot(t2, g.h02**2 * p02)
    d = _slot(t1, g.h23**2 * b.p2)
    return a, bb, c, d


def _dpc_cuts(g, b, t1, t2, p01, p02):
    a, bb, c, d = _dpc_parts(g, b, t1, t2, p01, p02)
    return {
        "src1+src2": a + c,
        "src1+relay2": a + d,
        "relay1+src2": bb + c,
        "relay1+relay2": bb + d,
    }


def dpc_eval(gains: ChannelGains, budget: PowerBudget, alloc: DpcAllocation) -> RateReport:
    """Successive relaying with the source pre-cancelling inter-relay interference.

    ``R1 = min(t1 C(h01^2 p0_1/t1), t2 C(h13^2 P1/t2))`` and symmetrically for
    ``R2``; the total ``R1 + R2`` is independent of ``h12``.
    """
    alloc.check_budget(budget)
    a, bb, c, d = _dpc_parts(gains, budget, alloc.t1, alloc.t2, alloc.p0_1, alloc.p0_2)
    comps = {"R(1)": min(a, bb), "R(2)": min(c, d)}
    return _report(SchemeId.DPC.value, _dpc_cuts(gains, budget, alloc.t1, alloc.t2, alloc.p0_1, alloc.p0_2),
                   comps, alloc)


def dpc_symmetric_closed_form(h0: float, h3: float, p0: float, p_relay: float) -> float:
    """DPC rate of a symmetric network at ``t1 = t2 = 1/2`` with an even split."""
    from .kernel import c_gauss

    x, y = h0**2 * p0, 2 * h3**2 * p_relay
    return min(c_gauss(x), 0.5 * c_gauss(x) + 0.5 * c_gauss(y), c_gauss(y))


# -- BME, successive decoding ------------------------------------------------

def _succ_cuts(g, b, t1, t2, p01, p02, a1, a2, th1, th2):
    P1, P2 = b.p1, b.p2
    c1_src = _slot(t1, g.h01**2 * a1 * p01)
    c1_rel = _slot_noisy(t1, g.h23**2 * (1 - th2) * P2, g.h23**2 * th2 * P2) + _slot(t2, g.h13**2 * th1 * P1)
    c2_src = _slot(t2, g.h02**2 * a2 * p02)
    c2_rel = _slot_noisy(t2, g.h13**2 * (1 - th1) * P1, g.h13**2 * th1 * P1) + _slot(t1, g.h23**2 * th2 * P2)
    mac1 = _slot(t1, g.h01**2 * p01 + g.h12**2 * th2 * P2
                 + 2 * g.h01 * g.h12 * np.sqrt(np.maximum(1 - a1, 0) * th2 * p01 * P2))
    mac2 = _slot(t2, g.h02**2 * p02 + g.h12**2 * th1 * P1
                 + 2 * g.h02 * g.h12 * np.sqrt(np.maximum(1 - a2, 0) * th1 * p02 * P1))
    return {
        "C1src+C2src": c1_src + c2_src,
        "C1src+C2relay": c1_src + c2_rel,
        "C1relay+C2src": c1_rel + c2_src,
        "C1relay+C2relay": c1_rel + c2_rel,
        "mac1": mac1,
        "mac2": mac2,
    }, (c1_src, c1_rel, c2_src, c2_rel)


def bme_succ_eval(gains: ChannelGains, budget: PowerBudget, alloc: BmeSuccAllocation) -> RateReport:
    """Block-Markov cooperation with successive decoding at the destination."""
    alloc.check_budget(budget)
    a = alloc
    cuts, (c1s, c1r, c2s, c2r) = _succ_cuts(gains, budget, a.t1, a.t2, a.p0_1, a.p0_2,
                                            a.alpha1, a.alpha2, a.theta1, a.theta2)
    comps = {"C_BME1": min(c1s, c1r), "C_BME2": min(c2s, c2r)}
    return _report(SchemeId.BME_SUCC.value, cuts, comps, alloc)


# -- BME, backward decoding ---------------------------------------------------

def _back_cuts(g, b, t1, t2, p01, p02, b1, b2):
    P1, P2 = b.p1, b.p2
    mac1 = _slot(t1, g.h01**2 * p01 + g.h12**2 * P2
                 + 2 * g.h01 * g.h12 * np.sqrt(np.maximum(1 - b1, 0) * p01 * P2))
    mac2 = _slot(t2, g.h02**2 * p02 + g.h12**2 * P1
                 + 2 * g.h02 * g.h12 * np.sqrt(np.maximum(1 - b2, 0) * p02 * P1))
    src = _slot(t1, g.h01**2 * b1 * p01) + _slot(t2, g.h02**2 * b2 * p02)
    rel = _slot(t1, g.h23**2 * P2) + _slot(t2, g.h13**2 * P1)
    return {"mac1": mac1, "mac2": mac2, "source": src, "relays": rel}


def bme_back_eval(gains: ChannelGains, budget: PowerBudget, alloc: BmeBackAllocation) -> RateReport:
    """Block-Markov cooperation with backward decoding at the destination."""
    alloc.check_budget(budget)
    a = alloc
    cuts = _back_cuts(gains, budget, a.t1, a.t2, a.p0_1, a.p0_2, a.beta1, a.beta2)
    return _report(SchemeId.BME_BACK.value, cuts, {}, alloc)


# -- BME-DPC ------------------------------------------------------------------

def _bmedpc_cuts(g, b, t1, t2, p01, p02, alpha, relay=1):
    if relay == 2:
        # mirror image: relabel relays, evaluate, keep cut names
        gs = g.swapped()
        return _bmedpc_cuts(gs, b.swapped(), t2, t1, p02, p01, alpha, 1)
    P1, P2 = b.p1, b.p2
    mac = _slot(t1, g.h01**2 * p01 + g.h12**2 * P2
                + 2 * g.h01 * g.h12 * np.sqrt(np.maximum(1 - alpha, 0) * p01 * P2))
    src = _slot(t1, g.h01**2 * alpha * p01) + _slot(t2, g.h02**2 * p02)
    rel = _slot(t1, g.h23**2 * P2) + _slot(t2, g.h13**2 * P1)
    mixed = _slot(t2, g.h02**2 * p02) + _slot(t2, g.h13**2 * P1)
    return {"mac": mac, "source": src, "relays": rel, "second-slot": mixed}


def bme_dpc_eval(gains: ChannelGains, budget: PowerBudget, alloc: BmeDpcAllocation) -> RateReport:
    """Composite scheme: one relay bins its partner's message, DPC handles the rest.

    ``decoding_relay=1`` evaluates the four printed min-terms; ``2`` evaluates
    them with relay labels exchanged.
    """
    alloc.check_budget(budget)
    a = alloc
    cuts = _bmedpc_cuts(gains, budget, a.t1, a.t2, a.p0_1, a.p0_2, a.alpha, a.decoding_relay)
    return _report(SchemeId.BME_DPC.value, cuts, {}, alloc)


# -- DDF ----------------------------------------------------------------------

def _ddf_parts(g, b, t3, t4, p0p, p0c, p1p, p1c):
    r5 = _slot(t3, g.h01**2 * p0p)
    r6 = _slot_noisy(t3, g.h02**2 * p0c, g.h02**2 * p0p)
    r7 = _slot(t4, g.h13**2 * p1p)
    s = _slot(t4, g.h13**2 * p1p + _coherent(g.h13, p1c, g.h23, b.p2))
    return r5, r6, r7, s


def _ddf_cuts(g, b, t3, t4, p0p, p0c, p1p, p1c):
    r5, r6, r7, s = _ddf_parts(g, b, t3, t4, p0p, p0c, p1p, p1c)
    return {"R5+R6": r5 + r6, "R7+R6": r7 + r6, "sum": s}


def ddf_eval(gains: ChannelGains, budget: PowerBudget, alloc: DdfAllocation) -> RateReport:
    """Simultaneous relaying with a private and a common message.

    The private rate is the single-relay decode-and-forward rate through
    relay 1; the common rate is capped by its broadcast rate at relay 2 and by
    the coherent second-hop sum rate.  Relay 2 sends only the common message.

    Raises
    ------
    PreconditionError
        If ``h01 < h02``.
    """
    _require_ordered(gains, "DDF")
    alloc.check_budget(budget)
    a = alloc
    r5, r6, r7, s = _ddf_parts(gains, budget, a.t3, a.t4, a.p0p, a.p0c, a.p1p, a.p1c)
    rp = min(r5, r7)
    rc = max(0.0, min(r6, s - rp))
    comps = {"Rp": rp, "Rc": rc, "R5": r5, "R6": r6, "R7": r7, "sum_cap": s}
    return _report(SchemeId.DDF.value, _ddf_cuts(gains, budget, a.t3, a.t4, a.p0p, a.p0c, a.p1p, a.p1c),
                   comps, alloc)


def ddf_corner_decompose(gains: ChannelGains, budget: PowerBudget, alloc: DdfAllocation,
                         rp: float | None = None):
    """Rewrite a DDF operating point for successive decoding at the destination.

    Relay 1 keeps just enough private power to carry ``Rp`` and moves the
    rest to the common message; the destination decodes the common message
    treating the private one as noise, then the private message.

    Parameters
    ----------
    rp : float, optional
        Private rate to carry; defaults to the allocation's own ``Rp``.

    Returns
    -------
    (rp_new, rc_new, p1p_new) : tuple of float
        ``rp_new == rp``, ``p1p_new <= p1p`` and ``rp_new + rc_new`` is at
        least the joint-decoding sum rate of ``alloc``.

    Raises
    ------
    InfeasibleRateError
        If ``rp`` exceeds what relay 1 (at full power) or the source can carry.
    """
    _require_ordered(gains, "DDF")
    alloc.check_budget(budget)
    a = alloc
    r5, r6, r7, _ = _ddf_parts(gains, budget, a.t3, a.t4, a.p0p, a.p0c, a.p1p, a.p1c)
    if rp is None:
        rp = min(r5, r7)
    relay_max = float(_slot(a.t4, gains.h13**2 * budget.p1))
    if rp > relay_max + FEASIBILITY_SLACK:
        raise InfeasibleRateError("Rp<=t4C(h13^2 P1/t4)", f"private rate {rp!r} exceeds relay-1 capacity {relay_max!r}")
    if rp > r5 + FEASIBILITY_SLACK:
        raise InfeasibleRateError("Rp<=R5", f"private rate {rp!r} exceeds source private rate {r5!r}")
    rp = max(0.0, float(rp))
    p1p_new = float(min(_slot_inverse(a.t4, gains.h13**2, rp), budget.p1))
    if a.p1c == 0 and rp >= r7:
        p1p_new = a.p1p
    p1c_new = budget.p1 - p1p_new
    coh = _coherent(gains.h13, p1c_new, gains.h23, budget.p2)
    rc_succ = float(_slot_noisy(a.t4, coh, gains.h13**2 * p1p_new))
    rc_new = min(float(r6), rc_succ)
    return rp, rc_new, p1p_new


def ddf_canonicalize(gains: ChannelGains, budget: PowerBudget, alloc: DdfAllocation) -> DdfAllocation:
    """Equivalent allocation spending the least private power.

    Both the source and relay 1 keep exactly the private power that carries
    ``Rp = min(R5, R7)`` and move the remainder to the common message.  The
    rate never decreases.
    """
    _require_ordered(gains, "DDF")
    alloc.check_budget(budget)
    a = alloc
    r5, _, r7, _ = _ddf_parts(gains, budget, a.t3, a.t4, a.p0p, a.p0c, a.p1p, a.p1c)
    rp = min(float(r5), float(r7))
    p0p = min(a.p0p, float(_slot_inverse(a.t3, gains.h01**2, rp))) if rp > 0 else 0.0
    p1p = min(a.p1p, float(_slot_inverse(a.t4, gains.h13**2, rp))) if rp > 0 else 0.0
    new = DdfAllocation(a.t3, a.t4, p0p, budget.p0 - p0p, p1p, budget.p1 - p1p)
    if ddf_eval(gains, budget, new).total_bpcu < ddf_eval(gains, budget, a).total_bpcu:
        return a
    return new


# -- SSRD ---------------------------------------------------------------------

def _ssrd_parts(g, b, t1, t2, t3, t4, p01, p02, p0p3, p0c3, p12, p1p4, p1c4, p21, p2p4, p2c4):
    r1 = _slot(t1, g.h01**2 * p01)
    r2 = _slot(t1, g.h23**2 * p21)
    r3 = _slot(t2, g.h13**2 * p12)
    r4 = _slot(t2, g.h02**2 * p02)
    r5 = _slot(t3, g.h01**2 * p0p3)
    r6 = _slot_noisy(t3, g.h02**2 * p0c3, g.h02**2 * p0p3)
    private4 = g.h13**2 * p1p4 + g.h23**2 * p2p4
    r7 = _slot(t4, g.h13**2 * p1p4)
    r8 = _slot(t4, g.h23**2 * p2p4)
    r78 = _slot(t4, private4)
    r9 = _slot_noisy(t4, _coherent(g.h13, p1c4, g.h23, p2c4), private4)
    return dict(R1=r1, R2=r2, R3=r3, R4=r4, R5=r5, R6=r6, R7=r7, R8=r8, R78=r78, R9=r9)


def _ssrd_cuts(r):
    return {"source": r["R1"] + r["R4"] + r["R5"] + r["R6"],
            "relays": r["R2"] + r["R3"] + r["R78"] + r["R9"]}


def _ssrd_violations(r, slack=FEASIBILITY_SLACK):
    return {
        "R9≤R6": r["R9"] > r["R6"] + slack,
        "R1+R5≤R3+R7": r["R1"] + r["R5"] > r["R3"] + r["R7"] + slack,
        "R4≤R2+R8": r["R4"] > r["R2"] + r["R8"] + slack,
    }


def _ssrd_args(a: SsrdAllocation):
    return (a.t1, a.t2, a.t3, a.t4, a.p0_1, a.p0_2, a.p0p3, a.p0c3,
            a.p1_2, a.p1p4, a.p1c4, a.p2_1, a.p2p4, a.p2c4)


def ssrd_check(gains: ChannelGains, budget: PowerBudget, alloc: SsrdAllocation) -> tuple:
    """Names of the coupling constraints the allocation violates (empty if feasible)."""
    alloc.check_budget(budget)
    r = _ssrd_parts(gains, budget, *_ssrd_args(alloc))
    return tuple(k for k, bad in _ssrd_violations(r).items() if bad)


def ssrd_eval(gains: ChannelGains, budget: PowerBudget, alloc: SsrdAllocation) -> RateReport:
    """Four-slot scheme mixing successive DPC relaying and simultaneous DDF relaying.

    The relay side of the min uses the printed second-hop form: the two
    private streams decoded jointly in slot 4 (``R78``), then the coherent
    common stream on top (``R9``).  The coupling constraints use the
    single-relay terms ``R7`` and ``R8``.

    Raises
    ------
    InfeasibleRateError
        If a coupling constraint fails; ``.constraint`` is one of
        ``"R9≤R6"``, ``"R1+R5≤R3+R7"``, ``"R4≤R2+R8"``.
    PreconditionError
        If ``h01 < h02``.
    """
    _require_ordered(gains, "SSRD")
    alloc.check_budget(budget)
    r = _ssrd_parts(gains, budget, *_ssrd_args(alloc))
    for name, bad in _ssrd_violations(r).items():
        if bad:
            raise InfeasibleRateError(name)
    return _report(SchemeId.SSRD.value, _ssrd_cuts(r), r, alloc)


# -- embeddings between schemes ----------------------------------------------

def back_from_succ(alloc: BmeSuccAllocation) -> BmeBackAllocation:
    """Backward-decoding allocation that does at least as well, with beta_i = alpha_i."""
    return BmeBackAllocation(alloc.t1, alloc.t2, alloc.p0_1, alloc.p0_2, alloc.alpha1, alloc.alpha2)


def bme_dpc_from_back(alloc: BmeBackAllocation) -> list:
    """Both orientations of the composite scheme at the same time and power split."""
    a = alloc
    return [BmeDpcAllocation(a.t1, a.t2, a.p0_1, a.p0_2, a.beta1, 1),
            BmeDpcAllocation(a.t1, a.t2, a.p0_1, a.p0_2, a.beta2, 2)]


def ssrd_from_dpc(gains: ChannelGains, budget: PowerBudget, alloc: DpcAllocation) -> SsrdAllocation:
    """SSRD allocation with empty slots 3 and 4 reproducing a DPC point.

    Source power beyond what each relay can forward is parked in the zero-length
    slot 3, so the coupling constraints hold with the DPC rate unchanged.
    """
    a = alloc
    r1a, r1b, r2a, r2b = _dpc_parts(gains, budget, a.t1, a.t2, a.p0_1, a.p0_2)
    p01 = min(a.p0_1, float(_slot_inverse(a.t1, gains.h01**2, min(r1a, r1b)))) if r1a > 0 else 0.0
    p02 = min(a.p0_2, float(_slot_inverse(a.t2, gains.h02**2, min(r2a, r2b)))) if r2a > 0 else 0.0
    rest = max(0.0, budget.p0 - p01 - p02)
    return SsrdAllocation(a.t1, a.t2, 0.0, 0.0, p01, p02, 0.0, rest,
                          budget.p1, 0.0, 0.0, budget.p2, 0.0, 0.0)


def ssrd_from_ddf(gains: ChannelGains, budget: PowerBudget, alloc: DdfAllocation) -> SsrdAllocation:
    """SSRD allocation with empty slots 1 and 2 doing at least as well as a DDF point.

    The private streams are trimmed to carry exactly ``Rp`` and, if the
    coherent common stream outruns relay 2's broadcast rate, both relays scale
    their common power down until ``R9 = R6``.  Unused relay power is parked in
    the zero-length slots, clamped at zero against rounding.
    """
    _require_ordered(gains, "SSRD")
    a = ddf_canonicalize(gains, budget, alloc)
    g = gains
    r5, r6, r7, _ = (float(v) for v in _ddf_parts(g, budget, a.t3, a.t4, a.p0p, a.p0c, a.p1p, a.p1c))
    p1p, p1c, p2c = a.p1p, a.p1c, budget.p2

    def r9(k):
        return float(_slot_noisy(a.t4, _coherent(g.h13, k * p1c, g.h23, k * p2c), g.h13**2 * p1p))

    k = 1.0
    if r9(1.0) > r6:
        lo, hi = 0.0, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if r9(mid) > r6:
                hi = mid
            else:
                lo = mid
        k = lo
    return SsrdAllocation(0.0, 0.0, a.t3, a.t4, 0.0, 0.0, a.p0p, a.p0c,
                          max(0.0, budget.p1 - p1p - k * p1c), p1p, k * p1c,
                          max(0.0, budget.p2 - k * p2c), 0.0, k * p2c)


def ddf_from_ssrd(alloc: SsrdAllocation, budget: PowerBudget) -> DdfAllocation:
    """DDF sub-allocation of an SSRD point with ``t1 = t2 = 0`` and all of relay 2 in the common stream."""
    a = alloc
    if a.t1 or a.t2 or a.p2p4 or a.p2_1 or a.p1_2:
        raise ValueError("allocation is not a pure simultaneous-relaying point")
    return DdfAllocation(a.t3, a.t4, a.p0p3, a.p0c3, a.p1p4, a.p1c4)


# -- optimization problems ----------------------------------------------------

@dataclass(frozen=True)
class SchemeProblem:
    """A scheme as an optimization problem: space, objective and codecs."""

    scheme: str
    space: SearchSpace
    objective: Callable
    decode: Callable
    encode: Callable
    evaluate: Callable
    terms: Callable | None = None
    constraints: Callable | None = None


def _cols(X, k):
    return [X[:, i] for i in range(k)]


def _stack(cuts: dict):
    return np.stack([np.asarray(v, dtype=float) for v in cuts.values()], axis=1)


# margin kept by the polish step so rounding cannot push a point infeasible
_POLISH_MARGIN = 1e-10


def problem(scheme, scn: Scenario, **kw) -> SchemeProblem:
    """Build the optimization problem for ``scheme`` on ``scn``.

    Keyword options: ``decoding_relay`` (1 or 2) for BME-DPC; ``fixed_t`` for
    DDF to pin ``t3 = t4 = 1/2`` style slot lengths (value is ``t3``).
    """
    scheme = SchemeId(scheme)
    g, b = scn.gains, scn.budget
    T = Simplex(2, 1.0)
    Q0 = Simplex(2, b.p0)

    if scheme is SchemeId.DPC:
        def terms(X):
            return _stack(_dpc_cuts(g, b, *_cols(X, 4)))
        dec = lambda x: DpcAllocation(*map(float, x))
        enc = lambda a: [a.t1, a.t2, a.p0_1, a.p0_2]
        return SchemeProblem(scheme.value, SearchSpace([T, Q0]), _minof(terms), dec, enc, dpc_eval, terms)

    if scheme is SchemeId.BME_SUCC:
        def terms(X):
            return _stack(_succ_cuts(g, b, *_cols(X, 8))[0])
        dec = lambda x: BmeSuccAllocation(*map(float, x))
        enc = lambda a: [a.t1, a.t2, a.p0_1, a.p0_2, a.alpha1, a.alpha2, a.theta1, a.theta2]
        return SchemeProblem(scheme.value, SearchSpace([T, Q0, Box([0] * 4, [1] * 4)]), _minof(terms),
                             dec, enc, bme_succ_eval, terms)

    if scheme is SchemeId.BME_BACK:
        def terms(X):
            return _stack(_back_cuts(g, b, *_cols(X, 6)))
        dec = lambda x: BmeBackAllocation(*map(float, x))
        enc = lambda a: [a.t1, a.t2, a.p0_1, a.p0_2, a.beta1, a.beta2]
        return SchemeProblem(scheme.value, SearchSpace([T, Q0, Box([0, 0], [1, 1])]), _minof(terms),
                             dec, enc, bme_back_eval, terms)

    if scheme is SchemeId.BME_DPC:
        relay = kw.get("decoding_relay", 1)

        def terms(X):
            return _stack(_bmedpc_cuts(g, b, *_cols(X, 5), relay=relay))
        dec = lambda x: BmeDpcAllocation(*map(float, x), decoding_relay=relay)
        enc = lambda a: [a.t1, a.t2, a.p0_1, a.p0_2, a.alpha]
        return SchemeProblem(scheme.value, SearchSpace([T, Q0, Box([0], [1])]), _minof(terms), dec, enc,
                             bme_dpc_eval, terms)

    if scheme is SchemeId.DDF:
        _require_ordered(g, "DDF")
        fixed_t = kw.get("fixed_t")
        tblock = T if fixed_t is None else Box([fixed_t, 1 - fixed_t], [fixed_t, 1 - fixed_t])

        def terms(X):
            return _stack(_ddf_cuts(g, b, *_cols(X, 6)))
        dec = lambda x: DdfAllocation(*map(float, x))
        enc = lambda a: [a.t3, a.t4, a.p0p, a.p0c, a.p1p, a.p1c]
        return SchemeProblem(scheme.value, SearchSpace([tblock, Q0, Simplex(2, b.p1)]), _minof(terms),
                             dec, enc, ddf_eval, terms)

    _require_ordered(g, "SSRD")

    last = [None, None]

    def parts(X):
        # terms and constraints are requested back to back for the same batch
        if last[0] is not X:
            last[0], last[1] = X, _ssrd_parts(g, b, *_cols(X, 14))
        return last[1]

    def obj(X):
        r = parts(X)
        v = _min(_ssrd_cuts(r))
        bad = np.zeros(len(X), dtype=bool)
        for viol in _ssrd_violations(r).values():
            bad |= viol
        return np.where(bad, -np.inf, v)

    def terms(X):
        return _stack(_ssrd_cuts(parts(X)))

    def cons(X):
        r = parts(X)
        return np.stack([r["R6"] - r["R9"], r["R3"] + r["R7"] - r["R1"] - r["R5"],
                         r["R2"] + r["R8"] - r["R4"]], axis=1) - _POLISH_MARGIN
    dec = lambda x: SsrdAllocation(*map(float, x))
    enc = lambda a: list(_ssrd_args(a))
    space = SearchSpace([Simplex(4, 1.0), Simplex(4, b.p0), Simplex(3, b.p1), Simplex(3, b.p2)])
    return SchemeProblem(scheme.value, space, obj, dec, enc, ssrd_eval, terms, cons)


_EVAL = {
    SchemeId.DPC: dpc_eval,
    SchemeId.BME_SUCC: bme_succ_eval,
    SchemeId.BME_BACK: bme_back_eval,
    SchemeId.BME_DPC: bme_dpc_eval,
    SchemeId.DDF: ddf_eval,
    SchemeId.SSRD: ssrd_eval,
}


def evaluate(scheme, gains: ChannelGains, budget: PowerBudget, alloc) -> RateReport:
    return _EVAL[SchemeId(scheme)](gains, budget, alloc)


# SSRD has 14 coordinates; a 5-point lattice already holds ~2.8e5 points
SSRD_CONFIG = dict(grid_points_per_dim=5, multistarts=32)


def _finish(prob: SchemeProblem, scn: Scenario, x) -> RateReport:
    alloc = prob.decode(x)
    return prob.evaluate(scn.gains, scn.budget, alloc)


def optimize(scheme, scn: Scenario, cfg: OptimizerConfig | None = None,
             seeds: Sequence = (), **kw) -> RateReport:
    """Maximize a scheme's rate over its allocations.

    Parameters
    ----------
    scheme : SchemeId or str
    scn : Scenario
    cfg : OptimizerConfig, optional
        Defaults to ``OptimizerConfig()``; SSRD lowers the lattice to 5 points
        per dimension and uses 32 starts unless a config is given.
    seeds : sequence of allocations, optional
        Extra starting points (of this scheme's allocation type).
    **kw
        Passed to :func:`problem`.  BME-DPC tries both decoding relays unless
        ``decoding_relay`` is given.  SSRD is additionally seeded with the DPC
        and DDF optima embedded into its allocation space.

    Returns
    -------
    RateReport
    """
    scheme = SchemeId(scheme)
    if cfg is None:
        cfg = OptimizerConfig(**SSRD_CONFIG) if scheme is SchemeId.SSRD else OptimizerConfig()

    if scheme is SchemeId.BME_DPC and "decoding_relay" not in kw:
        best = None
        for relay in (1, 2):
            own = [s for s in seeds if s.decoding_relay == relay]
            rep = optimize(scheme, scn, cfg, own, decoding_relay=relay, **kw)
            if best is None or rep.total_bpcu > best.total_bpcu:
                best = rep
        return best

    seeds = list(seeds)
    if scheme is SchemeId.SSRD and kw.pop("embed", True):
        scfg = OptimizerConfig(seed=cfg.seed)
        dpc = optimize(SchemeId.DPC, scn, scfg)
        ddf = optimize(SchemeId.DDF, scn, scfg)
        seeds += [ssrd_from_dpc(scn.gains, scn.budget, dpc.allocation),
                  ssrd_from_ddf(scn.gains, scn.budget, ddf.allocation)]

    prob = problem(scheme, scn, **kw)
    seed_x = np.array([prob.encode(s) for s in seeds], dtype=float) if seeds else None
    x, _ = maximize(prob.objective, prob.space, cfg, seeds=seed_x, terms=prob.terms,
                    constraints=prob.constraints)
    rep = _finish(prob, scn, x)
    if scheme is SchemeId.DDF:
        canon = ddf_canonicalize(scn.gains, scn.budget, rep.allocation)
        rep = ddf_eval(scn.gains, scn.budget, canon)
    return rep
