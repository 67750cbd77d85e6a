"""Coupled increments of E log|zeta + L(chi_4)| over G, next to 2 pi K0 / (log G)^{3/2}."""
import argparse

from _common import run
from lfzeros.density import predicted_increment

ap = argparse.ArgumentParser()
ap.add_argument("--G", default="20,50,200,1000")
ap.add_argument("--n-samples", type=int, default=10**5)
ap.add_argument("--out-dir", default="results/increment")
a = ap.parse_args()

for G in (float(g) for g in a.G.split(",")):
    r = run({"kind": "mc-increment", "out_dir": a.out_dir, "seed": 1,
             "params": {"G": G, "n_samples": a.n_samples},
             "combination": {"members": [{"kind": "zeta"},
                                         {"kind": "dirichlet", "modulus": 4, "index": [1]}],
                             "weights": [1, 1]}})["result"]
    i1, i2 = r["i1"], r["i2"]
    print(f"G={G:6g} i1={i1['mean']:+.5f}+-{i1['std_error']:.5f} "
          f"i2={i2['mean']:+.5f}+-{i2['std_error']:.5f} predicted={predicted_increment((1, 1), G):.5f}")
