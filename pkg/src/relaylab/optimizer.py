"""Deterministic derivative-free maximizer over products of simplices and boxes.

Objectives are vectorised: they take an ``(N, D)`` array of points and return
``N`` rates, with ``-inf`` marking infeasible points.  The search is a coarse
lattice scan followed by a lockstep multistart pattern search.  Each poll
uses the compass moves of every block plus a few seeded random tangent
directions, which lets the search slide along the ridges that min-of-concave
objectives form where two cuts cross.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np

from .model import OptimizerConfig

__all__ = [
    "Simplex",
    "Box",
    "SearchSpace",
    "Optimum",
    "BudgetError",
    "NoFeasiblePointError",
    "maximize",
    "grid_scan",
    "grid_best",
    "grid_size",
    "project",
    "worker_count",
]

MAX_EVALUATIONS = 10**8
_CHUNK = 16384


class BudgetError(RuntimeError):
    """A lattice scan would exceed the evaluation budget."""


class NoFeasiblePointError(RuntimeError):
    """Every probed point of the search space was infeasible."""


@dataclass(frozen=True)
class Simplex:
    """``dim`` non-negative coordinates summing to ``mass``."""

    dim: int
    mass: float = 1.0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("simplex dimension must be >= 1")
        if not (math.isfinite(self.mass) and self.mass >= 0):
            raise ValueError("simplex mass must be finite and >= 0")


@dataclass(frozen=True)
class Box:
    """Independent coordinates with ``lo[i] <= x[i] <= hi[i]``."""

    lo: tuple
    hi: tuple

    def __init__(self, lo, hi):
        lo = tuple(float(v) for v in np.atleast_1d(lo))
        hi = tuple(float(v) for v in np.atleast_1d(hi))
        if len(lo) != len(hi) or not lo:
            raise ValueError("box bounds must be nonempty and of equal length")
        if any(l > h for l, h in zip(lo, hi)):
            raise ValueError("box requires lo <= hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return len(self.lo)


Block = Union[Simplex, Box]


@dataclass(frozen=True)
class SearchSpace:
    blocks: tuple
    feasible: Callable | None = None

    def __init__(self, blocks: Sequence[Block], feasible=None):
        blocks = tuple(blocks)
        if not blocks:
            raise ValueError("search space needs at least one block")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "feasible", feasible)

    @property
    def dim(self) -> int:
        return sum(b.dim for b in self.blocks)

    def slices(self):
        out, k = [], 0
        for b in self.blocks:
            out.append(slice(k, k + b.dim))
            k += b.dim
        return out


class Optimum(NamedTuple):
    point: np.ndarray
    value: float


def worker_count() -> int:
    """Worker threads for lattice evaluation, capped by ``RELAYLAB_THREADS``."""
    raw = os.environ.get("RELAYLAB_THREADS")
    if raw:
        try:
            n = int(raw)
        except ValueError:
            n = 0
        if n >= 1:
            return n
    return 1


# -- lattices -----------------------------------------------------------------

def _compositions(total: int, parts: int) -> np.ndarray:
    """All non-negative integer vectors of length ``parts`` summing to ``total``.

    Stars-and-bars enumeration in lexicographic order of bar positions.
    """
    if parts == 1:
        return np.array([[total]], dtype=float)
    rows = []
    for bars in combinations(range(total + parts - 1), parts - 1):
        prev, row = -1, []
        for b in bars:
            row.append(b - prev - 1)
            prev = b
        row.append(total + parts - 2 - prev)
        rows.append(row)
    return np.array(rows, dtype=float)


def _factors(space: SearchSpace, n: int):
    """Per-factor lattices; every simplex is one factor, every box coordinate one."""
    out = []
    for b in space.blocks:
        if isinstance(b, Simplex):
            out.append(_compositions(n - 1, b.dim) * (b.mass / (n - 1)))
        else:
            for lo, hi in zip(b.lo, b.hi):
                pts = np.array([lo]) if lo == hi else np.linspace(lo, hi, n)
                out.append(pts[:, None])
    return out


def grid_size(space: SearchSpace, points_per_dim: int) -> int:
    total = 1
    for b in space.blocks:
        if isinstance(b, Simplex):
            total *= math.comb(points_per_dim - 1 + b.dim - 1, b.dim - 1)
        else:
            for lo, hi in zip(b.lo, b.hi):
                total *= 1 if lo == hi else points_per_dim
    return total


def _lattice_chunks(space: SearchSpace, n: int):
    facs = _factors(space, n)
    shape = tuple(len(f) for f in facs)
    total = math.prod(shape)
    for start in range(0, total, _CHUNK):
        idx = np.unravel_index(np.arange(start, min(start + _CHUNK, total)), shape)
        yield np.concatenate([f[i] for f, i in zip(facs, idx)], axis=1)


def _evaluate(objective, space: SearchSpace, X: np.ndarray) -> np.ndarray:
    v = np.asarray(objective(X), dtype=float).reshape(len(X))
    v = np.where(np.isnan(v), -np.inf, v)
    if space.feasible is not None:
        ok = np.asarray(space.feasible(X), dtype=bool)
        v = np.where(ok, v, -np.inf)
    return v


def _scan(objective, space, n, keep):
    """Stream the lattice, keeping the ``keep`` best points (ties: lowest index)."""
    if n < 2:
        raise ValueError("points_per_dim must be >= 2")
    size = grid_size(space, n)
    if size > MAX_EVALUATIONS:
        raise BudgetError(f"lattice of {size} points exceeds budget of {MAX_EVALUATIONS}")
    best_x = np.empty((0, space.dim))
    best_v = np.empty(0)

    def run(X):
        return X, _evaluate(objective, space, X)

    workers = worker_count()
    chunks = _lattice_chunks(space, n)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, chunks))
    else:
        results = map(run, chunks)
    for X, v in results:
        allx = np.concatenate([best_x, X])
        allv = np.concatenate([best_v, v])
        # stable sort keeps the earlier lattice index first among ties
        order = np.argsort(-allv, kind="stable")[:keep]
        best_x, best_v = allx[order], allv[order]
    return best_x, best_v


def grid_scan(objective, space: SearchSpace, points_per_dim: int):
    """Evaluate the full lattice in deterministic order.

    Returns ``(points, values)`` arrays.  Raises :class:`BudgetError` when the
    lattice has more than ``10**8`` points.
    """
    if points_per_dim < 2:
        raise ValueError("points_per_dim must be >= 2")
    size = grid_size(space, points_per_dim)
    if size > MAX_EVALUATIONS:
        raise BudgetError(f"lattice of {size} points exceeds budget of {MAX_EVALUATIONS}")
    xs, vs = [], []
    for X in _lattice_chunks(space, points_per_dim):
        xs.append(X)
        vs.append(_evaluate(objective, space, X))
    return np.concatenate(xs), np.concatenate(vs)


def grid_best(objective, space: SearchSpace, points_per_dim: int) -> Optimum:
    """Best lattice point, streamed so large oracle scans stay in memory."""
    X, v = _scan(objective, space, points_per_dim, 1)
    return Optimum(X[0].copy(), float(v[0]))


# -- projection ---------------------------------------------------------------

def _project_simplex(Y: np.ndarray, mass: float) -> np.ndarray:
    """Row-wise Euclidean projection onto {x >= 0, sum x = mass}."""
    if mass == 0:
        return np.zeros_like(Y)
    d = Y.shape[1]
    U = -np.sort(-Y, axis=1)
    css = np.cumsum(U, axis=1) - mass
    ks = np.arange(1, d + 1)
    cond = U - css / ks > 0
    rho = d - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(len(Y)), rho] / (rho + 1)
    X = np.maximum(Y - theta[:, None], 0.0)
    # absorb rounding so the sum is exact to working precision
    X *= mass / X.sum(axis=1, keepdims=True)
    return X


def project(space: SearchSpace, Y) -> np.ndarray:
    """Project points onto the search space block by block."""
    Y = np.array(Y, dtype=float, ndmin=2)
    out = np.empty_like(Y)
    for b, s in zip(space.blocks, space.slices()):
        if isinstance(b, Simplex):
            out[:, s] = _project_simplex(Y[:, s], b.mass)
        else:
            out[:, s] = np.clip(Y[:, s], b.lo, b.hi)
    return out


def _retract(space: SearchSpace, Y: np.ndarray) -> np.ndarray:
    """Like :func:`project` for points moved along tangent directions.

    Such points keep each simplex sum, so only rows that left the nonnegative
    orthant need the full projection.
    """
    for b, s in zip(space.blocks, space.slices()):
        blk = Y[:, s]
        if isinstance(b, Simplex):
            bad = (blk < 0).any(axis=1)
            if bad.any():
                blk[bad] = _project_simplex(blk[bad], b.mass)
        else:
            np.clip(blk, b.lo, b.hi, out=blk)
    return Y


# -- pattern search -----------------------------------------------------------

def _compass(space: SearchSpace) -> np.ndarray:
    """Unit compass moves in block-scaled coordinates."""
    D = space.dim
    dirs = []
    for b, s in zip(space.blocks, space.slices()):
        if isinstance(b, Simplex):
            if b.mass == 0:
                continue
            for i in range(b.dim):
                for j in range(b.dim):
                    if i != j:
                        v = np.zeros(D)
                        v[s.start + j] = b.mass
                        v[s.start + i] = -b.mass
                        dirs.append(v)
        else:
            for k, (lo, hi) in enumerate(zip(b.lo, b.hi)):
                if hi > lo:
                    for sign in (1.0, -1.0):
                        v = np.zeros(D)
                        v[s.start + k] = sign * (hi - lo)
                        dirs.append(v)
    return np.array(dirs).reshape(-1, D)


def _random_dirs(space: SearchSpace, rng: np.random.Generator, k: int, scale: float) -> np.ndarray:
    """Random directions tangent to every block, of length ``scale``."""
    D = space.dim
    if k == 0:
        return np.empty((0, D))
    R = rng.standard_normal((k, D))
    for b, s in zip(space.blocks, space.slices()):
        if isinstance(b, Simplex):
            blk = R[:, s] - R[:, s].mean(axis=1, keepdims=True)
            R[:, s] = blk * b.mass
        else:
            R[:, s] *= np.subtract(b.hi, b.lo)
    norms = np.linalg.norm(R, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return R / norms * scale


def _fd_jacobian(fun, space: SearchSpace, x: np.ndarray, f0: np.ndarray) -> np.ndarray:
    """One-sided finite differences, evaluated as a single vectorised batch."""
    D = len(x)
    lo, hi, h = np.empty(D), np.empty(D), np.empty(D)
    for b, s in zip(space.blocks, space.slices()):
        if isinstance(b, Simplex):
            lo[s], hi[s], h[s] = 0.0, b.mass, max(b.mass, 1e-300) * 1e-7
        else:
            lo[s], hi[s] = b.lo, b.hi
            h[s] = np.maximum(np.subtract(b.hi, b.lo), 1e-300) * 1e-7
    h = np.where(x + h > hi, -h, h)
    X = x[None, :] + np.diag(h)
    F = fun(X)
    return ((F - f0[None, :]) / h[:, None]).T


def _polish(objective, space, terms, constraints, x0, cfg):
    """Epigraph refinement: maximize r subject to terms(x) >= r.

    The min of smooth cut terms is nonsmooth where cuts cross; lifting it to
    a smooth constrained problem lets SLSQP move along those crossings.
    """
    from scipy.optimize import minimize

    D = space.dim
    f0 = terms(x0[None, :])[0]
    z0 = np.append(x0, float(np.min(f0)))
    bounds = []
    for b in space.blocks:
        if isinstance(b, Simplex):
            bounds += [(0.0, b.mass)] * b.dim
        else:
            bounds += list(zip(b.lo, b.hi))
    bounds.append((None, None))

    def fun(X):
        f = terms(X)
        if constraints is not None:
            f = np.hstack([f, constraints(X)])
        return f

    K = len(f0)
    lift = np.zeros(K if constraints is None else K + constraints(x0[None, :]).shape[1])
    lift[:K] = 1.0
    cache = {}

    def values(z):
        key = z.tobytes()
        if key not in cache:
            cache.clear()
            cache[key] = fun(z[None, :D])[0]
        return cache[key]

    def con(z):
        return values(z) - lift * z[D]

    def con_jac(z):
        x = z[:D]
        J = _fd_jacobian(fun, space, x, values(z))
        return np.hstack([J, -lift[:, None]])

    cons = [{"type": "ineq", "fun": con, "jac": con_jac}]
    for b, s in zip(space.blocks, space.slices()):
        if isinstance(b, Simplex):
            row = np.zeros(D + 1)
            row[s] = 1.0
            cons.append({"type": "eq", "fun": lambda z, s=s, m=b.mass: z[s].sum() - m,
                         "jac": lambda z, row=row: row})
    e = np.zeros(D + 1)
    e[D] = -1.0
    try:
        with np.errstate(all="ignore"), warnings.catch_warnings():
            # SLSQP may step marginally outside the bounds; the result is projected below
            warnings.simplefilter("ignore", RuntimeWarning)
            res = minimize(lambda z: -z[D], z0, jac=lambda z: e, bounds=bounds, constraints=cons,
                           method="SLSQP", options={"maxiter": cfg.polish_iterations, "ftol": 1e-12})
    except (ValueError, ArithmeticError):
        return None
    if not np.all(np.isfinite(res.x)):
        return None
    x = project(space, res.x[:D])
    return x[0]



def maximize(objective, space: SearchSpace, cfg: OptimizerConfig | None = None,
             seeds=None, terms=None, constraints=None) -> Optimum:
    """Maximize a vectorised objective over ``space``.

    Parameters
    ----------
    objective : callable
        Maps an ``(N, D)`` array to ``N`` values; ``-inf`` or NaN means infeasible.
    space : SearchSpace
    cfg : OptimizerConfig, optional
    seeds : array_like, optional
        Extra starting points (projected onto the space) refined alongside the
        best lattice points.

    terms : callable, optional
        Maps ``(N, D)`` to the ``(N, K)`` smooth min-terms whose minimum is the
        objective.  When given, the best refined points are polished by an
        epigraph solve (see :func:`_polish`).
    constraints : callable, optional
        Maps ``(N, D)`` to ``(N, M)`` values that must be non-negative; used
        only by the polish step (the objective must already return ``-inf``
        where they fail).

    Returns
    -------
    Optimum
        ``(point, value)``; the value is never below the best lattice value.

    Raises
    ------
    NoFeasiblePointError
        If no lattice point, seed, or refined point is feasible.
    """
    cfg = cfg or OptimizerConfig()
    n = int(cfg.grid_points_per_dim)
    while n > 2 and grid_size(space, n) > cfg.max_grid_points:
        n -= 1

    X, v = _scan(objective, space, n, cfg.multistarts)
    if seeds is not None:
        S = project(space, np.atleast_2d(np.asarray(seeds, dtype=float)))
        X = np.concatenate([X, S])
        v = np.concatenate([v, _evaluate(objective, space, S)])
    ok = np.isfinite(v)
    X, v = X[ok], v[ok]
    if len(v) == 0:
        raise NoFeasiblePointError("no feasible point found in the search space")

    compass = _compass(space)
    scale = float(np.linalg.norm(compass, axis=1).max(initial=0.0))
    rng = np.random.default_rng(cfg.seed)
    step0 = 1.0 / (n - 1)
    steps = np.full(len(v), step0)
    active = steps >= cfg.refine_tol_step
    it = 0
    while active.any() and it < cfg.max_iterations and (len(compass) or cfg.random_directions):
        it += 1
        dirs = np.concatenate([compass, _random_dirs(space, rng, cfg.random_directions, scale)])
        idx = np.flatnonzero(active)
        m = len(dirs)
        trial = X[idx, None, :] + steps[idx, None, None] * dirs[None, :, :]
        trial = _retract(space, trial.reshape(-1, space.dim))
        tv = _evaluate(objective, space, trial).reshape(len(idx), m)
        j = np.argmax(tv, axis=1)
        bestv = tv[np.arange(len(idx)), j]
        # any gain moves the point; gains within refine_tol_rate count as a
        # stall, so the step still shrinks and the search terminates
        moved = bestv > v[idx]
        grew = bestv > v[idx] + cfg.refine_tol_rate
        X[idx[moved]] = trial.reshape(len(idx), m, -1)[moved, j[moved]]
        v[idx[moved]] = bestv[moved]
        up = idx[grew]
        steps[up] = np.minimum(steps[up] * 2.0, step0)
        steps[idx[~grew]] *= 0.5
        active = steps >= cfg.refine_tol_step

    # clean up rounding drift in the simplex sums; keep the unprojected point
    # only if projection changed its value
    P = project(space, X)
    pv = _evaluate(objective, space, P)
    keep = pv >= v
    X[keep], v[keep] = P[keep], pv[keep]

    if terms is not None and cfg.polish_starts > 0:
        chosen = []
        for i in np.argsort(-v, kind="stable"):
            if all(np.max(np.abs(X[i] - X[j])) > 1e-6 * max(1.0, scale) for j in chosen):
                chosen.append(i)
            if len(chosen) == cfg.polish_starts:
                break
        for i in chosen:
            x = _polish(objective, space, terms, constraints, X[i].copy(), cfg)
            if x is None:
                continue
            fx = float(_evaluate(objective, space, x[None, :])[0])
            if fx > v[i]:
                X[i], v[i] = x, fx
    k = int(np.argmax(v))
    return Optimum(X[k].copy(), float(v[k]))
