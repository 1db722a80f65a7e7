"""Run the wall-pushing task and print the settled plate position.

    python3 scripts/run_task1.py [--mu 0.5] [--out trace.csv]
"""

import argparse

from comshift.params import PlatformParams
from comshift.scenarios import run_task1, summarize_task1


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mu", type=float, default=0.5, help="static friction")
    ap.add_argument("--out", help="write the trace CSV here")
    args = ap.parse_args()

    # keep the default pair (0.5, 0.45); other values use mu_k = 0.9 mu_s
    base = PlatformParams()
    params = base if args.mu == base.mu_s else base.with_(mu_s=args.mu,
                                                          mu_k=0.9 * args.mu)
    trace = run_task1(params)
    s = summarize_task1(trace, params)
    print(f"mu_s={params.mu_s}  mu_k={params.mu_k}")
    print(f"l* achieved  {s.l_star_achieved:.4f} m")
    if s.l_star_predicted is not None:
        print(f"l* predicted {s.l_star_predicted:.4f} m")
    print(f"alpha steady {s.alpha_steady:.2f} deg")
    for name, t in s.zones:
        print(f"  {name:8s} t = {t:6.2f} s")
    if s.prediction_note:
        print(s.prediction_note)
    if args.out:
        trace.write_csv(args.out)


if __name__ == "__main__":
    main()
