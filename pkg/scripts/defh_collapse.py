"""d_h between (0,0) and (0,1) for the weight |x_1|^t on refining planar grids."""
import argparse

import numpy as np

from cwdlab.harnack import defh_matrix, grid_2d, max_semimetric
from cwdlab.io import write_csv


def endpoint_distance(k, t, gamma):
    P = grid_2d(k)
    D = max_semimetric(defh_matrix(P, t=t, gamma=gamma))
    on_axis = np.abs(P[:, 0]) < 1e-12
    i = np.flatnonzero(on_axis & (np.abs(P[:, 1]) < 1e-12))[0]
    j = np.flatnonzero(on_axis & (np.abs(P[:, 1] - 1) < 1e-12))[0]
    return float(D[i, j])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmax", type=int, default=5)
    ap.add_argument("--t", type=float, default=1.0)
    ap.add_argument("--gamma", type=float, default=2.0)
    ap.add_argument("--out", default="defh_collapse.csv")
    args = ap.parse_args()

    rows, prev = [], None
    for k in range(2, args.kmax + 1):
        v = endpoint_distance(k, args.t, args.gamma)
        ratio = v / prev if prev else None
        rows.append([k, v, ratio])
        print(k, v, ratio)
        prev = v
    write_csv(args.out, ["k", "d_h", "ratio_to_previous"], rows)


if __name__ == "__main__":
    main()
