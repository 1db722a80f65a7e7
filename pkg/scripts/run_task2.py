"""Compare joint torques of the displaced-CoM (a) and long-arm (b) scenarios."""

import argparse

from comshift.arm import peak_torque, run_task2_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-prefix", help="write <prefix>_a.csv and <prefix>_b.csv")
    args = ap.parse_args()
    peaks = {}
    for scenario in "ab":
        trace = run_task2_scenario(scenario)
        tau1, tau2 = peak_torque(trace)
        peaks[scenario] = max(tau1, tau2)
        L = trace.header["L1"]
        print(f"scenario ({scenario}) L1=L2={L} m  plate={trace.header['plate_position']:.4f} m  "
              f"peak |tau1|={tau1:.3f}  |tau2|={tau2:.3f} N m")
        if args.out_prefix:
            trace.write_csv(f"{args.out_prefix}_{scenario}.csv")
    print(f"ratio (b)/(a) = {peaks['b'] / peaks['a']:.2f}")


if __name__ == "__main__":
    main()
