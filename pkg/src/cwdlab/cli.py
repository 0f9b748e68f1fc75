"""Command-line front end: ``cwdlab <group> <verb> [flags]``.

Exit status is 0 when every verdict passes, 1 when some verdict fails and 2
on configuration, input or computation errors.
"""
from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
import time
from pathlib import Path

import numpy as np
from scipy.sparse.csgraph import dijkstra

from . import filling as fl
from . import harnack as hk
from . import pcf
from .errors import ConfigError, CwdlabError, IoError
from .io import ingest_density, ingest_graph, ingest_points, write_csv
from .metric_core import build_net_hierarchy, normalize_diameter
from .report import Report

RESERVED = {"func", "config", "out", "json", "csv", "normalized", "group", "verb"}


# ---------------------------------------------------------------------------
# helpers


def _ints(text):
    return [int(t) for t in str(text).split(",") if t.strip()]


def _floats(text):
    return [float(t) for t in str(text).split(",") if t.strip()]


def _labels(text):
    return [t.strip() for t in str(text).split(",") if t.strip()]


def _range(text):
    lo, _, hi = str(text).partition("-")
    lo = int(lo)
    return lo, int(hi) if hi else lo


def _require(cond, message):
    if not cond:
        raise ConfigError(message)


def _structure(args):
    _require(args.fractal in ("sg", "vicsek", "interval"), f"unknown fractal {args.fractal!r}")
    if args.fractal == "sg":
        _require(args.dim >= 2, "--dim must be at least 2")
    if args.fractal == "vicsek":
        _require(0 < args.r < 0.5, "--r must lie in (0, 1/2)")
    return pcf.make_structure(args.fractal, args.dim, args.r)


def _vertex_index(form, labels):
    ids = form.ids or tuple(str(i) for i in range(form.n))
    lookup = {str(v): i for i, v in enumerate(ids)}
    out = []
    for lab in labels:
        if lab not in lookup:
            raise ConfigError(f"unknown vertex {lab!r}")
        out.append(lookup[lab])
    return out


def _graph_metric(form, kind):
    W = form.adjacency.copy()
    if kind == "hop":
        W.data = np.ones_like(W.data)
    elif kind == "length":
        W.data = 1.0 / W.data
    elif kind == "resistance":
        L = form.laplacian.toarray()
        P = np.linalg.pinv(L, hermitian=True)
        dg = np.diag(P)
        R = np.maximum(dg[:, None] + dg[None, :] - 2 * P, 0.0)
        np.fill_diagonal(R, 0.0)
        return R
    else:
        raise ConfigError(f"unknown metric {kind!r}")
    return dijkstra(W, directed=False)


def _load_graph(args):
    _require(args.graph, "--graph is required")
    return ingest_graph(args.graph, args.measure)


# ---------------------------------------------------------------------------
# pcf


def cmd_pcf_spectrum(args, rep):
    ss, hs = _structure(args)
    word = pcf.parse_word(args.word)
    _require(all(0 <= c < ss.n_letters for c in word), "word letter out of range")
    res = pcf.validate_harmonic_structure(ss, hs)
    sp_ = pcf.fw_star_spectrum(ss, hs, word)
    rows = [[0, 1.0, True]] + [[i + 1, float(v), False] for i, v in enumerate(sp_.eigenvalues)]
    rep.table("spectrum", ["index", "eigenvalue", "constants"], rows)
    rep.verdict("harmonic_structure", res <= 1e-12 * np.abs(hs.D).max(), "validate_harmonic_structure", res)


def cmd_pcf_energy(args, rep):
    ss, hs = _structure(args)
    _require(args.level >= 0, "--level must be nonnegative")
    u0 = _floats(args.boundary) if args.boundary else list(np.eye(ss.n_boundary)[0])
    _require(len(u0) == ss.n_boundary, f"--boundary needs {ss.n_boundary} values")
    h = pcf.HarmonicFunction(ss, hs, u0)
    mu = pcf.cell_energy_measure(ss, hs, h, args.level)
    rep.table("cells", ["word", "mass"], mu.rows())
    e = h.energy()
    err = abs(mu.total - e)
    rep.verdict("energy_additivity", err <= 1e-10 * max(e, 1.0), "cell_energy_measure", err)
    rep.notes.append(f"E(h,h) = {e!r}")


def cmd_pcf_m2(args, rep):
    ss, hs = _structure(args)
    lo, hi = _range(args.levels)
    _require(0 <= lo <= hi, "--levels must be an increasing range like 3-7")
    h1, h2 = pcf.orthonormal_harmonic_pair(ss, hs)
    rows = []
    for L in range(lo, hi + 1):
        mu = pcf.kusuoka_pair_measure(ss, hs, h1, h2, L)
        theta = pcf.cell_graph_metric(ss, hs, mu, L)
        m2 = pcf.m2_constant(theta.diameters, mu, hs, L)
        rows.append([L, m2.c_star, m2.argmax, m2.zero_mass_cells, m2.overflow])
    rep.table("m2", ["level", "c_star", "argmax", "zero_mass_cells", "overflow"], rows)
    cs = [r[1] for r in rows]
    finite = all(math.isfinite(c) for c in cs)
    growth = max((b / a for a, b in zip(cs, cs[1:])), default=1.0) if finite else math.inf
    rep.verdict("bounded_c_star", finite and growth <= 1.2, "m2_constant", growth)


def cmd_pcf_vicsek(args, rep):
    _require(0 < args.r < 0.5, "--r must lie in (0, 1/2)")
    _require(args.level >= 0, "--level must be nonnegative")
    v = pcf.vicsek_offdiagonal_report(args.r, args.level)
    rep.table(
        "basis",
        ["basis", "energy", "off_diagonal_mass", "relative"],
        [[i, e, m, r] for i, (e, m, r) in enumerate(zip(v.energies, v.off_diagonal_mass, v.relative))],
    )
    rep.verdict("off_diagonal_mass_zero", v.worst <= 1e-12, "vicsek_offdiagonal_report", v.worst)


def cmd_pcf_sgdegen(args, rep):
    _require(args.depth >= 1, "--depth must be positive")
    d = pcf.sg_degeneration_probe(args.dim, args.depth, informational=args.informational)
    rep.table("scaling", ["letter", "error"], sorted(d.phi_scaling_error.items()))
    rep.table(
        "chain",
        ["level", "sum", "closed_form"],
        [[n, s, c] for n, (s, c) in enumerate(zip(d.chain_sums, d.closed_form))],
    )
    rep.table(
        "convergence",
        ["level", "error"],
        [[n + 1, e] for n, e in enumerate(d.convergence_errors)],
    )
    worst_scale = max(d.phi_scaling_error.values())
    worst_ratio = max(abs(r - d.expected_ratio) for r in d.chain_ratios)
    rep.verdict("phi_scaling", worst_scale <= 1e-10, "sg_degeneration_probe", worst_scale)
    rep.verdict("chain_ratio", worst_ratio <= 1e-6, "sg_degeneration_probe", worst_ratio)
    if d.informational:
        rep.notes.append("N = 2 run is informational only")


# ---------------------------------------------------------------------------
# filling


def _filling_inputs(args):
    _require(args.a > 1, "--a must exceed 1")
    _require(args.lam >= 3, "--lambda must be at least 3")
    _require(args.max_level >= 0, "--max-level must be nonnegative")
    if args.points:
        space = normalize_diameter(ingest_points(args.points), 0.5)
        form = None
        if args.graph:
            form = ingest_graph(args.graph, args.measure)
            _require(form.n == space.n, "graph and point set sizes differ")
        elif space.coords is not None and space.coords.shape[1] == 1:
            x = space.coords[:, 0]
            _require(np.all(np.diff(x) > 0), "1-D points must be sorted to build the path form")
            form = fl.interval_form(space)
    else:
        _require(args.grid >= 2, "--grid must be at least 2")
        space = fl.interval_space(args.grid)
        form = fl.interval_form(space)
    nets = build_net_hierarchy(space, args.a, args.max_level)
    g = fl.build_filling(nets, args.lam, strict=args.strict)
    return space, form, nets, g


def _graph_tables(rep, g):
    rep.table(
        "vertices",
        ["vertex", "level", "center", "radius", "parent"],
        [[v, g.level[v], g.center[v], g.radius[v], g.parent[v]] for v in range(g.n_vertices)],
    )
    rep.table("edges", ["u", "v", "kind"], [[i, j, "h"] for i, j in g.h_edges] + [
        [v, g.parent[v], "v"] for v in range(1, g.n_vertices)
    ])


def cmd_filling_build(args, rep):
    _, _, nets, g = _filling_inputs(args)
    _graph_tables(rep, g)
    rep.verdict("nets_valid", nets.check(), "build_net_hierarchy")
    rep.notes.append(f"D_h = {g.D_h}, D_v = {g.D_v}, K_P = {g.K_P!r}")
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "graph.json").write_text(json.dumps(g.to_json(), sort_keys=True) + "\n")
        rep.artifacts.append("graph.json")


def _weight_verdicts(rep, g, w):
    h1 = fl.check_H1(w)
    K0 = fl.check_H2(w)
    h3 = fl.check_H3prime(g, w)
    rep.verdict("H1", h1.passed, "check_H1", h1.eta_plus)
    bound = w.diagnostics.get("K0_bound")
    rep.verdict("H2", bound is None or K0 <= bound, "check_H2", K0)
    rep.verdict("H3prime", h3.passed, "check_H3prime", h3.min_cost)
    return h1, K0, h3


def cmd_filling_weights(args, rep):
    _require(args.beta > 0, "--beta must be positive")
    space, form, nets, g = _filling_inputs(args)
    _require(form is not None, "a graph form is needed: pass --graph or 1-D sorted points")
    gentle = fl.gentle_capacity_function(g, fl.ball_masses(g, form.measure), args.gamma)
    sigma = fl.patch_sigma(fl.local_sigmas(g, form, gentle=gentle, clip=True), gentle, args.beta)
    w = fl.synthesize_weight(g, gentle, sigma, args.beta, strict=args.strict)
    _weight_verdicts(rep, g, w)
    K2 = fl.compatibility_check(g, w, gentle, args.beta)
    rep.verdict("compatibility", K2 <= 1 + 1e-8, "compatibility_check", K2)
    mu = fl.measure_from_weights(g, w, gentle, args.beta)
    rep.verdict("mass_conservation", mu.drift <= 1e-8, "measure_from_weights", mu.drift)
    rep.table(
        "weights",
        ["vertex", "level", "rho", "log_pi", "sigma", "C", "mass"],
        [
            [v, g.level[v], w.rho[v], w.log_pi[v], sigma.values[v], gentle.C[v], mu.masses[v]]
            for v in range(g.n_vertices)
        ],
    )
    rep.table(
        "diagnostics",
        ["key", "value"],
        [[k, json.dumps(_jsonable(v))] for k, v in sorted(w.diagnostics.items())],
    )


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def cmd_filling_check(args, rep):
    _, _, _, g = _filling_inputs(args)
    if args.weights:
        rho = np.full(g.n_vertices, np.nan)
        _, rows = _read_table(args.weights)
        for vid, val in rows:
            rho[int(vid)] = float(val)
        _require(not np.isnan(rho).any(), "weights file must list every vertex")
    else:
        _require(args.rho is not None, "pass --weights or --rho")
        rho = np.full(g.n_vertices, args.rho)
    w = fl.WeightFunction.from_rho(g, rho)
    h1, K0, h3 = _weight_verdicts(rep, g, w)
    rep.table("summary", ["eta_minus", "eta_plus", "K0", "H3_min"], [[h1.eta_minus, h1.eta_plus, K0, h3.min_cost]])


def _read_table(path):
    import csv

    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    header = rows[0]
    try:
        float(header[0])
        return None, rows
    except ValueError:
        return header, rows[1:]


# ---------------------------------------------------------------------------
# diagnostics


def cmd_diag_cap(args, rep):
    form = _load_graph(args)
    A = _vertex_index(form, _labels(args.A))
    B = _vertex_index(form, _labels(args.B))
    res = hk.capacity(form, A, B)
    ids = form.ids or tuple(range(form.n))
    rep.table("potential", ["vertex", "u"], [[str(ids[i]), float(u)] for i, u in enumerate(res.potential)])
    rep.verdict("connected", res.connected, "capacity", res.value)
    rep.notes.append(f"Cap = {res.value!r}")


def cmd_diag_capbeta(args, rep):
    form = _load_graph(args)
    dist = _graph_metric(form, args.metric)
    centers = _vertex_index(form, _labels(args.centers))
    res = hk.cap_beta_check(form, dist, form.measure, args.beta, args.A1, centers, _floats(args.radii))
    rep.table("scales", ["radius", "ratio"], list(zip(res.scales, res.scale_ratio)))
    rep.verdict("no_trend", not res.trend, "cap_beta_check", res.C1)


def cmd_diag_ehi(args, rep):
    _require(0 < args.delta < 1, "--delta must lie in (0, 1)")
    form = _load_graph(args)
    dist = _graph_metric(form, args.metric)
    centers = _vertex_index(form, _labels(args.centers))
    balls = [hk.BallSpec.realize(dist, c, R) for R in _floats(args.radii) for c in centers]
    res = hk.ehi_constant_probe(form, dist, balls, args.delta, seed=args.seed)
    rep.table("balls", ["center", "radius", "ratio"], res.per_ball)
    rep.verdict("ehi_finite", math.isfinite(res.worst), "ehi_constant_probe", res.worst)


def cmd_diag_vd(args, rep):
    if args.graph:
        form = _load_graph(args)
        dist, m = _graph_metric(form, args.metric), form.measure
    else:
        _require(args.points, "pass --points or --graph")
        space = ingest_points(args.points)
        dist, m = space.dist, np.full(space.n, 1.0 / space.n)
    _require(args.C2 >= 1, "--C2 must be at least 1")
    res = hk.vd_rvd_check(dist, m, C2=args.C2)
    rep.table("balls", ["center", "r", "m_r", "m_2r"], res.rows)
    rep.verdict("doubling", math.isfinite(res.C_D), "vd_rvd_check", res.C_D)
    rep.verdict("reverse_doubling", "reverse doubling fails" not in res.flags, "vd_rvd_check", res.alpha)
    rep.verdict("enough_scales", res.octaves >= 4, "vd_rvd_check", res.octaves)


def cmd_diag_rh(args, rep):
    _require(args.p > 1, "--p must exceed 1")
    _require(args.levels >= 3, "--levels must be at least 3 (four dyadic scales)")
    wm = ingest_density(args.density)
    res = hk.reverse_holder_1d(wm, hk.dyadic_intervals(wm.x[0], wm.x[-1], args.levels), args.p)
    rep.table("intervals", ["a", "b", "C_p", "C_sqrt"], [[a, b, cp, cs] for (a, b), cp, cs in res.rows])
    finite = math.isfinite(res.C_p) and math.isfinite(res.C_sqrt)
    rep.verdict("a_infinity", finite, "reverse_holder_check", res.C_sqrt)
    rep.notes.append(f"C_p = {res.C_p!r} (p = {args.p}), C_sqrt = {res.C_sqrt!r}")


def cmd_diag_dh(args, rep):
    space = ingest_points(args.points)
    if args.h == "power":
        H = space.dist**args.power
    else:
        _require(space.coords is not None and space.coords.shape[1] == 2, "defh needs planar coordinates")
        H = hk.defh_matrix(space.coords, t=args.t, gamma=args.gamma)
    D = hk.max_semimetric(H)
    ids = [str(i) for i in space.ids]
    if args.x is not None and args.y is not None:
        i, j = ids.index(args.x), ids.index(args.y)
        rep.table("pair", ["x", "y", "d_h", "h"], [[args.x, args.y, D[i, j], min(H[i, j], H[j, i])]])
    dominated = bool(np.all(D <= np.minimum(H, H.T) + 1e-15))
    rep.verdict("dominated_by_h", dominated, "max_semimetric")
    if args.csv and args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        write_csv(Path(args.out) / "d_h.csv", ["id"] + ids, [[ids[i]] + list(D[i]) for i in range(len(ids))])
        rep.artifacts.append("d_h.csv")


def cmd_diag_g1d(args, rep):
    wm = ingest_density(args.density)
    res = hk.gaussian_1d_check(wm)
    rep.table("scales", ["length", "C"], res.per_scale)
    rep.verdict("admissible", res.admissible, "gaussian_1d_check", res.C)
    rep.notes.append(f"C = {res.C!r}, trend slope = {res.slope!r}, d_int(total) = {res.d_int_total!r}")


# ---------------------------------------------------------------------------
# parser


def _common(p):
    p.add_argument("--config", help="INI file whose keys mirror the flags")
    p.add_argument("--out", help="output directory for report.json and tables")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="print the report JSON")
    p.add_argument("--csv", action="store_true", help="also write every table as CSV")
    p.add_argument("--normalized", action="store_true", help="omit wall time from the report")


def _fractal(p, level=None):
    p.add_argument("--fractal", default="sg", choices=["sg", "vicsek", "interval"])
    p.add_argument("--dim", type=int, default=2, help="N for SG_N")
    p.add_argument("--r", type=float, default=1 / 3, help="Vicsek corner weight")
    if level is not None:
        p.add_argument("--level", type=int, default=level)


def _filling_flags(p):
    p.add_argument("--points", help="coordinates or distance-matrix CSV")
    p.add_argument("--graph", help="edge list for the energy form on the points")
    p.add_argument("--measure", help="vertex-measure CSV for --graph")
    p.add_argument("--grid", type=int, default=1000, help="interval grid size when no --points")
    p.add_argument("--a", type=float, default=40.0)
    p.add_argument("--lambda", dest="lam", type=float, default=32.0)
    p.add_argument("--max-level", type=int, default=3)
    p.add_argument("--strict", action="store_true")


def _graph_flags(p, metric=True):
    p.add_argument("--graph", help="edge list CSV (u, v, conductance)")
    p.add_argument("--measure", help="vertex measure CSV (id, mass)")
    if metric:
        p.add_argument("--metric", default="hop", choices=["hop", "length", "resistance"])


def build_parser():
    parser = argparse.ArgumentParser(prog="cwdlab")
    groups = parser.add_subparsers(dest="group", required=True)

    g = groups.add_parser("pcf").add_subparsers(dest="verb", required=True)
    p = g.add_parser("spectrum")
    _fractal(p)
    p.add_argument("--word", default="0")
    p.set_defaults(func=cmd_pcf_spectrum)
    p = g.add_parser("energy")
    _fractal(p, level=4)
    p.add_argument("--boundary", help="comma-separated boundary values")
    p.set_defaults(func=cmd_pcf_energy)
    p = g.add_parser("m2")
    _fractal(p)
    p.add_argument("--levels", default="3-6")
    p.set_defaults(func=cmd_pcf_m2)
    p = g.add_parser("vicsek")
    p.add_argument("--r", type=float, default=0.25)
    p.add_argument("--level", type=int, default=6)
    p.set_defaults(func=cmd_pcf_vicsek)
    p = g.add_parser("sgdegen")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--informational", action="store_true")
    p.set_defaults(func=cmd_pcf_sgdegen)

    g = groups.add_parser("filling").add_subparsers(dest="verb", required=True)
    p = g.add_parser("build")
    _filling_flags(p)
    p.set_defaults(func=cmd_filling_build)
    p = g.add_parser("weights")
    _filling_flags(p)
    p.add_argument("--beta", type=float, default=2.5)
    p.add_argument("--gamma", type=float, default=2.0)
    p.set_defaults(func=cmd_filling_weights)
    p = g.add_parser("check")
    _filling_flags(p)
    p.add_argument("--weights", help="CSV (vertex, rho)")
    p.add_argument("--rho", type=float)
    p.set_defaults(func=cmd_filling_check)

    g = groups.add_parser("diag").add_subparsers(dest="verb", required=True)
    p = g.add_parser("cap")
    _graph_flags(p, metric=False)
    p.add_argument("--A", required=False, default="", help="comma-separated vertex ids")
    p.add_argument("--B", required=False, default="", help="comma-separated vertex ids")
    p.set_defaults(func=cmd_diag_cap)
    p = g.add_parser("capbeta")
    _graph_flags(p)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--A1", type=float, default=2.0)
    p.add_argument("--centers", default="")
    p.add_argument("--radii", default="")
    p.set_defaults(func=cmd_diag_capbeta)
    p = g.add_parser("ehi")
    _graph_flags(p)
    p.add_argument("--centers", default="")
    p.add_argument("--radii", default="")
    p.add_argument("--delta", type=float, default=0.5)
    p.set_defaults(func=cmd_diag_ehi)
    p = g.add_parser("vd")
    _graph_flags(p)
    p.add_argument("--points")
    p.add_argument("--C2", type=float, default=4.0)
    p.set_defaults(func=cmd_diag_vd)
    p = g.add_parser("rh")
    p.add_argument("--density", required=False)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--levels", type=int, default=6)
    p.set_defaults(func=cmd_diag_rh)
    p = g.add_parser("dh", aliases=["d_h"])
    p.add_argument("--points")
    p.add_argument("--h", default="power", choices=["power", "defh"])
    p.add_argument("--power", type=float, default=2.0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=2.0)
    p.add_argument("--x")
    p.add_argument("--y")
    p.set_defaults(func=cmd_diag_dh)
    p = g.add_parser("g1d")
    p.add_argument("--density", required=False)
    p.set_defaults(func=cmd_diag_g1d)

    for sub in _all_leaf_parsers(parser):
        _common(sub)
    return parser


def _all_leaf_parsers(parser):
    out = []
    for action in parser._subparsers._group_actions:
        for grp in set(action.choices.values()):
            for a in grp._subparsers._group_actions:
                out.extend(dict.fromkeys(a.choices.values()))
    return out


def _leaf(parser, group, verb):
    grp = parser._subparsers._group_actions[0].choices[group]
    return grp._subparsers._group_actions[0].choices[verb]


def _apply_config(parser, argv):
    """Seed leaf-parser defaults from --config so that explicit flags still win."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        if not cp.read(known.config):
            raise IoError(f"cannot read config {known.config}")
    except configparser.Error as exc:
        raise ConfigError(f"bad config file: {exc}") from exc
    head = [a for a in argv if not a.startswith("-")][:2]
    if len(head) < 2:
        return
    group, verb = head
    verb = "dh" if verb == "d_h" else verb
    try:
        leaf = _leaf(parser, group, verb)
    except KeyError:
        return
    values = {}
    for section in ("cwdlab", group, f"{group} {verb}", f"{group}.{verb}"):
        if cp.has_section(section):
            values.update(cp.items(section))
    actions = {a.dest: a for a in leaf._actions}
    for flag in [a for a in actions.values() if a.option_strings]:
        for opt in flag.option_strings:
            actions.setdefault(opt.lstrip("-").replace("-", "_"), flag)
    defaults = {}
    for key, raw in values.items():
        k = key.replace("-", "_")
        if k not in actions or actions[k].dest in RESERVED - {"out", "json", "csv", "normalized"}:
            raise ConfigError(f"unknown config key {key!r} for {group} {verb}")
        act = actions[k]
        try:
            if isinstance(act, argparse._StoreTrueAction):
                val = cp.BOOLEAN_STATES[raw.lower()]
            elif act.type is not None:
                val = act.type(raw)
            else:
                val = raw
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad value {raw!r} for {key}") from exc
        if act.choices is not None and val not in act.choices:
            raise ConfigError(f"{key} must be one of {sorted(act.choices)}")
        defaults[act.dest] = val
    leaf.set_defaults(**defaults)


def run(argv=None):
    """Parse, dispatch, write. Returns (report, exit code)."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    _apply_config(parser, argv)
    args = parser.parse_args(argv)
    verb = "dh" if args.verb == "d_h" else args.verb
    config = {k: v for k, v in sorted(vars(args).items()) if k not in RESERVED}
    config["seed"] = args.seed
    rep = Report(f"{args.group} {verb}", config)
    t0 = time.perf_counter()
    args.func(args, rep)
    rep.wall_time = time.perf_counter() - t0
    if args.out:
        rep.write(args.out, csv_tables=args.csv, normalized=args.normalized)
    return rep, (0 if rep.ok else 1), args


def main(argv=None):
    try:
        rep, code, args = run(argv)
    except CwdlabError as exc:
        print(f"cwdlab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(rep.to_json(args.normalized))
    else:
        for name, v in sorted(rep.verdicts.items()):
            status = "PASS" if v.passed else "FAIL"
            const = "" if v.constant is None else f" ({float(v.constant):.6g})"
            print(f"{status} {name}{const} [{v.source}]")
        for t in sorted(rep.tables):
            print(f"table {t}: {len(rep.tables[t].rows)} rows")
        for n in rep.notes:
            print(n)
    return code


if __name__ == "__main__":
    sys.exit(main())
