"""Zero counts right of 1/2 + 1/G for the chi, conj(chi) mod 5 combination."""
import argparse

from _common import run

ap = argparse.ArgumentParser()
ap.add_argument("--T", type=float, default=100.0)
ap.add_argument("--G", default="4,8,16,32,64")
ap.add_argument("--out-dir", default="results/nf")
a = ap.parse_args()

art = run({"kind": "nf-curve", "out_dir": a.out_dir,
           "params": {"T": a.T, "G_values": [float(g) for g in a.G.split(",")]},
           "combination": {"members": [{"kind": "dirichlet", "modulus": 5, "index": [1]},
                                       {"kind": "dirichlet", "modulus": 5, "index": [3]}],
                           "weights": [1, 1]}})
for G, sigma, n in art["result"]["rows"]:
    print(f"G={G:6g} sigma={sigma:.5f} count={n}")
