"""Box discrepancy of zeta at sigma = 0.6 on the T ladder (several minutes)."""
import argparse

from _common import run

ap = argparse.ArgumentParser()
ap.add_argument("--T", default="500,2000,8000")
ap.add_argument("--seeds", type=int, default=3)
ap.add_argument("--mc-budget", type=int, default=10**5)
ap.add_argument("--out-dir", default="results/discrepancy")
a = ap.parse_args()

art = run({"kind": "discrepancy", "out_dir": a.out_dir,
           "params": {"T_values": [float(t) for t in a.T.split(",")], "n_seeds": a.seeds,
                      "mc_budget": a.mc_budget},
           "combination": {"members": [{"kind": "zeta"}], "weights": [1]}})
for T, m, sd, n, _ in art["result"]["rows"]:
    print(f"T={T:7g} D={m:.4f} (seed sd {sd:.4f}, {n} points)")
print("check:", art["check"]["message"])
