"""Table of K0 for J = 2, 3 on a few weight vectors, with the J = 2 closed form."""
import argparse

from _common import run

XIS = [[1, 1], [1, 4], [0.5, 2], [1, 1, 1], [1, 2, 0.5], [4, 8, 2]]

ap = argparse.ArgumentParser()
ap.add_argument("--out-dir", default="results/k0")
ap.add_argument("--method", default="quadrature", choices=["quadrature", "montecarlo"])
a = ap.parse_args()

print(f"{'xi':>16} {'K0':>14} {'err est':>10} {'closed form':>14}")
for xi in XIS:
    r = run({"kind": "k0", "params": {"J": len(xi), "xi": xi, "method": a.method},
             "out_dir": a.out_dir})["result"]
    cf = r.get("closed_form")
    print(f"{str(xi):>16} {r['value']:14.10f} {r['abs_error_estimate']:10.1e} "
          f"{'' if cf is None else format(cf, '14.10f')}")
