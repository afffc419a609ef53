"""High-SNR (DPC) and low-SNR (DDF) optimality studies with all gains 1."""

import argparse

from relaylab.asymptotics import AsymptoticScenario, high_snr_study, low_snr_study
from relaylab.model import ChannelGains


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma-high", type=float, default=1.0, help="P1/P0 = P2/P0 at high SNR")
    ap.add_argument("--gamma-low", type=float, default=0.1, help="P1/P0 = P2/P0 at low SNR")
    args = ap.parse_args()
    g = ChannelGains(1, 1, 1, 1, 1)

    print("high SNR: DPC against the cut-set bound")
    print("p0_db  ratio     t3+t4     gap*log2(P0)")
    for r in high_snr_study(AsymptoticScenario(g, args.gamma_high, args.gamma_high, (20, 40, 60, 80))):
        print(f"{r.p0_db:5g}  {r.ratio:.6f}  {r.t_hat3_plus_t_hat4:.6f}  {r.gap_times_log2_p0:.6f}")

    print("\nlow SNR: DDF against min(cut-set, linear bound)")
    print("p0_db  ratio     t3        private powers")
    for r in low_snr_study(AsymptoticScenario(g, args.gamma_low, args.gamma_low, (-30, -20, -10))):
        a = r.scheme_allocation
        print(f"{r.p0_db:5g}  {r.ratio:.6f}  {a.t3:.6f}  p0p={a.p0p:.3g} p1p={a.p1p:.3g}")


if __name__ == "__main__":
    main()
