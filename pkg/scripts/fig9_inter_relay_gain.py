"""Rate versus inter-relay gain h12 (other gains 1, all powers 10 dB)."""

import argparse
from pathlib import Path

from relaylab.experiments import emit_plot_script, fig9_config, run_sweep, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/fig9")
    ap.add_argument("--points", type=int, default=21)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = run_sweep(fig9_config(axis_points=args.points))
    write_csv(rows, out / "inter_relay_gain.csv")
    emit_plot_script(rows, out / "inter_relay_gain.plot")
    table = {}
    for r in rows:
        table.setdefault(r.axis_value, {})[r.scheme] = r.rate_bpcu
    names = list(next(iter(table.values())))
    print("h12       " + "  ".join(f"{n:>17}" for n in names))
    for x, v in table.items():
        print(f"{x:<8.4g}  " + "  ".join(f"{v[n]:17.9f}" for n in names))


if __name__ == "__main__":
    main()
