"""Predicted and simulated plate position across wall friction coefficients.

Kinetic friction is taken as 0.9 of static in every run.
"""

import argparse

from comshift.params import PlatformParams
from comshift.scenarios import run_task1, summarize_task1
from comshift.statics import NoFeasiblePlatePosition, predict_ideal_plate_position


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mu", default="0.3,0.4,0.5,0.6",
                    help="comma-separated static friction values")
    args = ap.parse_args()
    print("mu_s,l_pred,l_sim,alpha_steady")
    for mu in (float(v) for v in args.mu.split(",")):
        p = PlatformParams().with_(mu_s=mu, mu_k=0.9 * mu)
        try:
            pred = f"{predict_ideal_plate_position(p).l_star:.4f}"
        except NoFeasiblePlatePosition:
            pred = "infeasible"
        s = summarize_task1(run_task1(p), p)
        print(f"{mu},{pred},{s.l_star_achieved:.4f},{s.alpha_steady:.2f}")


if __name__ == "__main__":
    main()
