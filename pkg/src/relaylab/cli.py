"""Command-line front end.

Subcommands: ``rate``, ``bound``, ``sweep``, ``asym`` and ``compare``.
Exit codes: 0 success, 1 usage error, 2 validation error, 3 infeasibility.
"""

from __future__ import annotations

import argparse
import enum
import math
import sys
from typing import Sequence

from .asymptotics import AsymptoticScenario, high_snr_study, low_snr_study
from .bounds import BoundKind, low_snr_linear_bound
from .experiments import (
    ConfigError,
    SweepRow,
    bound_name,
    emit_plot_script,
    load_sweep_config,
    run_scenario,
    run_sweep,
    write_csv,
)
from .kernel import DomainError
from .model import AllocationError, OptimizerConfig, Scenario, ValidationError, linear_to_db, load_scenario
from .optimizer import BudgetError, NoFeasiblePointError
from .schemes import InfeasibleRateError, PreconditionError, SchemeId

__all__ = ["Command", "run", "main", "EXIT_OK", "EXIT_USAGE", "EXIT_VALIDATION", "EXIT_INFEASIBLE"]

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_INFEASIBLE = 0, 1, 2, 3

ALL_SCHEMES = (SchemeId.DPC, SchemeId.BME_SUCC, SchemeId.BME_BACK, SchemeId.BME_DPC, SchemeId.DDF, SchemeId.SSRD)
RELABEL_NOTE = "note: h01 < h02, relays relabeled 1<->2 (gains and allocations refer to the relabeled network)"


class Command(str, enum.Enum):
    RATE = "rate"
    BOUND = "bound"
    SWEEP = "sweep"
    ASYM = "asym"
    COMPARE = "compare"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="relaylab", description="Rates and cut-set bounds of the half-duplex diamond relay network.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def opt_flags(sp):
        d = OptimizerConfig()
        sp.add_argument("--grid", type=int, default=None, help=f"lattice points per dimension (default {d.grid_points_per_dim})")
        sp.add_argument("--multistarts", type=int, default=None, help=f"refinement starts (default {d.multistarts})")
        sp.add_argument("--seed", type=int, default=d.seed, help="random seed of the search")

    sp = sub.add_parser("rate", help="optimized achievable rate of one or all schemes")
    sp.add_argument("--scenario", required=True)
    sp.add_argument("--scheme", required=True, choices=[s.value for s in ALL_SCHEMES] + ["all"])
    sp.add_argument("--csv")
    opt_flags(sp)

    sp = sub.add_parser("bound", help="cut-set or low-SNR linear upper bound")
    sp.add_argument("--scenario", required=True)
    sp.add_argument("--kind", required=True, choices=[k.value for k in BoundKind])
    sp.add_argument("--gamma1", type=float)
    sp.add_argument("--gamma2", type=float)

    sp = sub.add_parser("sweep", help="rate-versus-power or rate-versus-gain sweep")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--plot")

    sp = sub.add_parser("asym", help="high- or low-SNR study over a list of source powers")
    sp.add_argument("--mode", required=True, choices=["high-snr", "low-snr"])
    sp.add_argument("--scenario", required=True, help="gains are read from it, powers are ignored")
    sp.add_argument("--gamma1", type=float, required=True)
    sp.add_argument("--gamma2", type=float, required=True)
    sp.add_argument("--p0-db-list", required=True, help="comma-separated source powers in dB")
    opt_flags(sp)

    sp = sub.add_parser("compare", help="all schemes and both cut-set bounds, best first")
    sp.add_argument("--scenario", required=True)
    sp.add_argument("--csv")
    opt_flags(sp)
    return p


def _cfg(args):
    kw = {"seed": args.seed}
    if args.grid is not None:
        kw["grid_points_per_dim"] = args.grid
    if args.multistarts is not None:
        kw["multistarts"] = args.multistarts
    if len(kw) == 1 and args.seed == OptimizerConfig().seed:
        return None  # library defaults, including the per-scheme ones
    try:
        return OptimizerConfig(**kw)
    except ValueError as e:
        raise _UsageError(str(e)) from None


def _f(x) -> str:
    return f"{x:.9f}"


def _table(header, rows, out):
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    for r in cells:
        out.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")


def _times(alloc):
    return tuple(float(getattr(alloc, n, 0.0)) for n in ("t1", "t2", "t3", "t4"))


def _csv_rows(scn: Scenario, reports: dict):
    s, _ = scn.oriented()
    p_db = tuple(linear_to_db(p) for p in (s.budget.p0, s.budget.p1, s.budget.p2))
    return [SweepRow("cli", 0.0, s.gains, p_db, name, rep.total_bpcu, _times(rep.allocation), rep.alloc_params())
            for name, rep in reports.items()]


def _cmd_rate(args, out):
    scn = load_scenario(args.scenario)
    schemes = ALL_SCHEMES if args.scheme == "all" else (SchemeId(args.scheme),)
    reports = run_scenario(scn, schemes, (), _cfg(args))
    if not scn.relays_ordered:
        out.write(RELABEL_NOTE + "\n")
    rows = []
    for name, rep in reports.items():
        params = " ".join(f"{k}={v:.6g}" for k, v in rep.alloc_params().items())
        rows.append((name, _f(rep.total_bpcu), params))
    _table(("scheme", "rate_bpcu", "allocation"), rows, out)
    if len(reports) == 1:
        out.write(f"total {_f(next(iter(reports.values())).total_bpcu)}\n")
    if args.csv:
        write_csv(_csv_rows(scn, reports), args.csv)
    return EXIT_OK


def _cmd_bound(args, out):
    scn = load_scenario(args.scenario)
    kind = BoundKind(args.kind)
    if kind is BoundKind.LOW_SNR_LINEAR:
        b = scn.budget
        g1 = args.gamma1 if args.gamma1 is not None else (b.p1 / b.p0 if b.p0 > 0 else math.nan)
        g2 = args.gamma2 if args.gamma2 is not None else (b.p2 / b.p0 if b.p0 > 0 else math.nan)
        if not (math.isfinite(g1) and math.isfinite(g2)):
            raise _UsageError("low-snr-linear needs --gamma1 and --gamma2 when p0 = 0")
        value = low_snr_linear_bound(scn.gains, g1, g2, b.p0)
        out.write(f"{kind.value} {_f(value)}\n")
        return EXIT_OK
    reports = run_scenario(scn, (), (kind,))
    if not scn.relays_ordered:
        out.write(RELABEL_NOTE + "\n")
    rep = reports[bound_name(kind)]
    out.write(f"{bound_name(kind)} {_f(rep.total_bpcu)}\n")
    _table(("cut", "value_bpcu"), [(k, _f(v)) for k, v in rep.cut_values.items()], out)
    return EXIT_OK


def _cmd_sweep(args, out):
    cfg = load_sweep_config(args.config)
    rows = run_sweep(cfg)
    n = write_csv(rows, args.out)
    out.write(f"wrote {len(rows)} rows ({n} bytes) to {args.out}\n")
    if args.plot:
        m = emit_plot_script(rows, args.plot)
        out.write(f"wrote plot description ({m} bytes) to {args.plot}\n")
    return EXIT_OK


def _cmd_asym(args, out):
    scn = load_scenario(args.scenario)
    try:
        grid = tuple(float(x) for x in args.p0_db_list.split(",") if x.strip())
    except ValueError:
        raise _UsageError(f"--p0-db-list must be comma-separated numbers, got {args.p0_db_list!r}") from None
    if not grid:
        raise _UsageError("--p0-db-list is empty")
    asc = AsymptoticScenario(scn.gains, args.gamma1, args.gamma2, tuple(sorted(grid)))
    cfg = _cfg(args)
    if args.mode == "high-snr":
        rows = high_snr_study(asc, cfg)
        _table(("p0_db", "dpc", "cutset", "ratio", "gap_bits", "t3+t4", "gap*log2(p0)"),
               [(f"{r.p0_db:g}", _f(r.scheme_rate), _f(r.bound_rate), f"{r.ratio:.6f}", f"{r.gap_bits:.3e}",
                 f"{r.t_hat3_plus_t_hat4:.6f}", f"{r.gap_times_log2_p0:.6f}") for r in rows], out)
    else:
        rows = low_snr_study(asc, cfg)
        if rows and rows[0].condition_violated:
            out.write("warning: low-SNR gain condition does not hold for these gains\n")
        if any(r.relabeled for r in rows):
            out.write(RELABEL_NOTE + "\n")
        _table(("p0_db", "ddf", "bound", "ratio", "gap_bits", "ddf_t=1/2_common", "linear_bound"),
               [(f"{r.p0_db:g}", _f(r.scheme_rate), _f(r.bound_rate), f"{r.ratio:.6f}", f"{r.gap_bits:.3e}",
                 _f(r.fast_path_rate), _f(r.linear_bound)) for r in rows], out)
    return EXIT_OK


def _cmd_compare(args, out):
    scn = load_scenario(args.scenario)
    bounds = (BoundKind.FULL_CUTSET, BoundKind.SUCCESSIVE_CUTSET)
    reports = run_scenario(scn, ALL_SCHEMES, bounds, _cfg(args))
    if not scn.relays_ordered:
        out.write(RELABEL_NOTE + "\n")
    up = reports[bound_name(BoundKind.FULL_CUTSET)].total_bpcu
    order = sorted(reports.items(), key=lambda kv: -kv[1].total_bpcu)
    rows = []
    for name, rep in order:
        ratio = rep.total_bpcu / up if up > 0 else (1.0 if rep.total_bpcu <= 0 else math.inf)
        rows.append((name, _f(rep.total_bpcu), f"{ratio:.6f}"))
    _table(("name", "rate_bpcu", "ratio_to_cutset"), rows, out)
    if args.csv:
        write_csv(_csv_rows(scn, dict(order)), args.csv)
    return EXIT_OK


_HANDLERS = {
    Command.RATE: _cmd_rate,
    Command.BOUND: _cmd_bound,
    Command.SWEEP: _cmd_sweep,
    Command.ASYM: _cmd_asym,
    Command.COMPARE: _cmd_compare,
}


def run(argv: Sequence[str], out=None, err=None) -> int:
    """Run one command; returns the exit code."""
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(list(argv))
        return _HANDLERS[Command(args.command)](args, out)
    except _UsageError as e:
        err.write(f"{e}\n")
        if not str(e).startswith("usage"):
            err.write(parser.format_usage())
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except (InfeasibleRateError, NoFeasiblePointError) as e:
        err.write(f"infeasible: {e}\n")
        return EXIT_INFEASIBLE
    except ValidationError as e:
        err.write(f"invalid {e.field}: {e}\n")
        return EXIT_VALIDATION
    except (ConfigError, AllocationError, DomainError, PreconditionError, BudgetError) as e:
        err.write(f"invalid: {e}\n")
        return EXIT_VALIDATION
    except OSError as e:
        err.write(f"error: {e}\n")
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(run(sys.argv[1:]))
