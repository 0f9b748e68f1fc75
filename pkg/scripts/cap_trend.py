"""Per-scale cap(beta) ratios on the SG2 resistance network for beta around d_H + 1."""
import argparse

import numpy as np

from cwdlab import harnack as hk
from cwdlab import pcf
from cwdlab.io import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--level", type=int, default=7)
    ap.add_argument("--centers", type=int, default=15)
    ap.add_argument("--offsets", default="-0.5,0,0.5")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="cap_trend.csv")
    args = ap.parse_args()

    ss, hs = pcf.make_sierpinski_gasket(2)
    L = args.level
    m = np.zeros(ss.n_vertices(L))
    for cell in ss.cell_vertices(L):
        m[cell] += 3.0**-L / 3
    form = hk.GraphForm.from_matrix(pcf.energy_matrix(ss, hs, L), m)
    R = pcf.resistance_matrix(ss, hs, L)
    dH = pcf.hausdorff_weight_dimension(hs)
    centers = np.random.default_rng(args.seed).choice(form.n, args.centers, replace=False)
    radii = [0.3 * 0.6**j for j in range(L - 3)]

    rows = []
    for off in (float(v) for v in args.offsets.split(",")):
        res = hk.cap_beta_check(form, R, m, dH + 1 + off, centers=centers, radii=radii)
        print(f"offset {off:+.2f}: slope {res.slope:.3f} trend {res.trend} C1 {res.C1:.3f}")
        rows += [[off, s, r] for s, r in zip(res.scales, res.scale_ratio)]
    write_csv(args.out, ["beta_offset", "radius", "ratio"], rows)


if __name__ == "__main__":
    main()
