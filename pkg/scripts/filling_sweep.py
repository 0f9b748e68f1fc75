"""Sweep (a, lambda) on the interval grid and record whether the weight synthesis goes through.

Each row reports the horizontal/vertical degrees, how many parents lack a
non-peripheral child, and the outcome of synthesize_weight in non-strict mode.
"""
import argparse
import time

from cwdlab import filling as fl
from cwdlab.errors import CwdlabError
from cwdlab.io import write_csv
from cwdlab.metric_core import build_net_hierarchy


def one(space, form, a, lam, levels, beta, gamma):
    t0 = time.perf_counter()
    g = fl.build_filling(build_net_hierarchy(space, a, levels), lam)
    gentle = fl.gentle_capacity_function(g, fl.ball_masses(g, form.measure), gamma)
    row = [a, lam, levels, g.n_vertices, g.D_h, g.D_v, len(gentle.missing_nonperipheral), float(gentle.delta)]
    try:
        sigma = fl.patch_sigma(fl.local_sigmas(g, form, gentle=gentle, clip=True), gentle, beta)
        w = fl.synthesize_weight(g, gentle, sigma, beta, strict=False)
        h1 = fl.check_H1(w)
        outcome = "ok" if h1.passed and fl.check_H3prime(g, w).passed else "checks fail"
        row += [outcome, h1.eta_minus, h1.eta_plus, fl.check_H2(w), len(w.diagnostics["flags"])]
    except CwdlabError as exc:
        row += [type(exc).__name__, None, None, None, None]
    return row + [time.perf_counter() - t0]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=1000)
    ap.add_argument("--a", default="40,96,192")
    ap.add_argument("--lambda", dest="lam", default="8,16,32")
    ap.add_argument("--levels", type=int, default=2)
    ap.add_argument("--beta", type=float, default=2.5)
    ap.add_argument("--gamma", type=float, default=0.5)
    ap.add_argument("--out", default="filling_sweep.csv")
    args = ap.parse_args()

    space = fl.interval_space(args.grid)
    form = fl.interval_form(space)
    rows = []
    for a in (float(v) for v in args.a.split(",")):
        for lam in (float(v) for v in args.lam.split(",")):
            row = one(space, form, a, lam, args.levels, args.beta, args.gamma)
            print(row)
            rows.append(row)
    cols = ["a", "lambda", "levels", "vertices", "D_h", "D_v", "no_np_child", "delta",
            "outcome", "eta_minus", "eta_plus", "K0", "flags", "seconds"]
    write_csv(args.out, cols, rows)


if __name__ == "__main__":
    main()
