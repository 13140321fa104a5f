"""Command line front end: ``autdim <command> [flags]``.

Every command writes ``report.json`` and its tables as CSV into ``--out``;
``--plots`` adds one SVG polyline chart per table.  Exit status is 0 on
success, 1 when a check fails and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from . import dimension, estimates, gallery, reports
from .conformal import registered_chain
from .domains import (Annulus, Ball, DiskMinusDisk, Ellipse, ProductMinusDiagonal, Strip, UnitDisk,
                      UpperHalfPlane, as_point, domain_from_json, domain_to_json, hausdorff_distance)
from .errors import AmbiguousDimError, AutDimError, EscapeError
from .fields import VectorFieldPoly, disk_field, hyperbolic_field, rotation_field
from .flow import DEFAULT_TOL, GroupAction, group_property_residual, infinitesimal_residual, trajectory
from .metric import extremal_search, model_caratheodory

COMMANDS = ("verify-lemmas", "metric", "flow", "hausdorff", "dim-estimate", "example1", "converge")
EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- argument grammar -----------------------------------------------------------------


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"not a complex number: {text!r}") from exc


def parse_point(text) -> np.ndarray:
    """'0.5', '0.3+0.2j' or a comma-separated list of coordinates."""
    if isinstance(text, (list, tuple)):
        return np.array([parse_complex(str(t)) for t in text])
    return np.array([parse_complex(t) for t in str(text).split(",")])


def parse_jlist(text) -> list:
    """'3..8', '3,5,7' or a single index."""
    if isinstance(text, (list, tuple)):
        return [int(j) for j in text]
    text = str(text)
    try:
        if ".." in text:
            lo, hi = text.split("..")
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(j) for j in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad index list {text!r}") from exc
    if not out:
        raise UsageError(f"empty index list {text!r}")
    return out


def _floats(args: str, count: int, name: str) -> list:
    vals = [float(v) for v in args.split(",")] if args else []
    if len(vals) != count:
        raise UsageError(f"{name} takes {count} parameter(s)")
    return vals


def parse_domain(text):
    """Domain names: unitdisk, ball[:n[,radius]], uhp, strip, annulus:r,R, ellipse:a,b,
    q[:j], d[:j] (product minus diagonal), diskminusdisk:c,rho, or a JSON document."""
    if isinstance(text, dict):
        return domain_from_json(text)
    text = str(text).strip()
    if text.startswith("{"):
        return domain_from_json(json.loads(text))
    name, _, rest = text.partition(":")
    name = name.lower()
    try:
        if name in ("unitdisk", "disk"):
            return UnitDisk()
        if name == "ball":
            parts = rest.split(",") if rest else []
            n = int(parts[0]) if parts else 1
            radius = float(parts[1]) if len(parts) > 1 else 1.0
            return Ball(tuple([0j] * n), radius)
        if name in ("uhp", "upperhalfplane"):
            return UpperHalfPlane()
        if name == "strip":
            return Strip()
        if name == "annulus":
            return Annulus(*_floats(rest, 2, "annulus"))
        if name == "ellipse":
            return Ellipse(*_floats(rest, 2, "ellipse"))
        if name == "q":
            return gallery.q_part(int(rest) if rest else gallery.LIMIT)
        if name == "d":
            return gallery.example1(int(rest) if rest else gallery.LIMIT).product
        if name == "diskminusdisk":
            c, rho = rest.rsplit(",", 1)
            return DiskMinusDisk(parse_complex(c), float(rho))
    except (ValueError, AutDimError) as exc:
        raise UsageError(f"bad domain {text!r}: {exc}") from exc
    raise UsageError(f"unknown domain {text!r}")


def parse_field(text: str, dim: int):
    """rotation, hyperbolic, disk:alpha, translation, circle:j; diagonal copies for C^2."""
    name, _, rest = str(text).partition(":")
    name = name.lower()
    if name == "rotation":
        X = rotation_field()
    elif name == "hyperbolic":
        X = hyperbolic_field()
    elif name == "disk":
        X = disk_field(parse_complex(rest or "0.5"))
    elif name == "translation":
        X = gallery.limit_field()
    elif name == "circle":
        X = gallery.circle_field(int(rest) if rest else 3)
    else:
        raise UsageError(f"unknown field {text!r}")
    return X if dim == 1 else VectorFieldPoly.diagonal(X, dim)


# -- parser ----------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--out", default="autdim-out", help="output directory")
    p.add_argument("--plots", action="store_true", help="also write SVG line plots")
    p.add_argument("--density", type=float, default=None, help="boundary sample spacing")
    p.add_argument("--degree", type=int, default=None, help="polynomial degree cap")
    p.add_argument("--tol", type=float, default=None, help="tolerance (integrator or SVD cut)")
    p.add_argument("--config", default=None, help="JSON file whose keys mirror the flags")
    return p


def build_parser(defaults: Optional[dict] = None) -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="autdim", description="Invariant metrics, flows and automorphism dimensions.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    sp = sub.add_parser("verify-lemmas", parents=[common], help="run the estimate battery")
    sp.add_argument("--samples", type=int, default=50, help="random (w, Y) pairs for the length sandwich")

    sp = sub.add_parser("metric", parents=[common], help="Caratheodory distance between two points")
    sp.add_argument("--domain", default="unitdisk")
    sp.add_argument("--from", dest="from_", default="0", metavar="POINT")
    sp.add_argument("--to", default="0.5", metavar="POINT")
    sp.add_argument("--search", action="store_true", help="also run the extremal search")

    sp = sub.add_parser("flow", parents=[common], help="integrate a holomorphic vector field")
    sp.add_argument("--domain", default="unitdisk")
    sp.add_argument("--field", default="rotation")
    sp.add_argument("--from", dest="from_", default="0.5", metavar="POINT")
    sp.add_argument("--tmax", type=float, default=2 * math.pi)
    sp.add_argument("--steps", type=int, default=200)

    sp = sub.add_parser("hausdorff", parents=[common], help="Hausdorff distance of boundaries")
    sp.add_argument("--domain", action="append", default=None, help="give twice to compare two domains")
    sp.add_argument("--j", default=None, help="compare Q_j with Q for these indices")

    sp = sub.add_parser("dim-estimate", parents=[common], help="tangency nullity and semicontinuity tables")
    sp.add_argument("--domain", action="append", default=None)
    sp.add_argument("--family", action="append", choices=sorted(dimension.FAMILIES), default=None)

    sp = sub.add_parser("example1", parents=[common], help="the degenerating family D_j and its limit D")
    sp.add_argument("--j", default="3..8")
    sp.add_argument("--tmax", type=float, default=50.0, help="orbit horizon for the limit domain")

    sp = sub.add_parser("converge", parents=[common], help="convergence of normalized generators")
    sp.add_argument("--j", default="3..10")

    if defaults:
        clean = {k.replace("-", "_"): v for k, v in defaults.items() if k != "command"}
        if "from" in clean:
            clean["from_"] = clean.pop("from")
        for choice in sub.choices.values():
            choice.set_defaults(**clean)
    return parser


# -- commands --------------------------------------------------------------------------


class Run:
    def __init__(self, args):
        self.args = args
        self.out = reports.ensure_dir(args.out)
        self.failed = False
        self.tables = []

    def path(self, name: str) -> str:
        return os.path.join(self.out, name)

    def table(self, name: str, columns, rows, plot=None):
        reports.write_csv(self.path(name + ".csv"), columns, rows)
        self.tables.append(name + ".csv")
        if self.args.plots and plot is not None:
            from . import plotting
            x, series, xlabel, ylabel, logy = plot
            plotting.line_plot(self.path(name + ".svg"), x, series, xlabel, ylabel, title=name, logy=logy)

    def config(self) -> dict:
        skip = {"out", "config", "plots"}
        return {k.rstrip("_"): v for k, v in sorted(vars(self.args).items()) if k not in skip and k != "command"}

    def finish(self, body: dict) -> int:
        body = dict(body)
        body["tables"] = self.tables
        doc = reports.report_document(self.args.command, self.config(), body)
        reports.write_json(self.path("report.json"), doc)
        return EXIT_FAILED if self.failed else EXIT_OK


def cmd_verify_lemmas(run: Run) -> int:
    a = run.args
    lemmas = estimates.run_battery(a.seed)
    sandwich = estimates.battery_sandwich(np.random.default_rng(a.seed + 1), a.samples, a.seed)
    everything = lemmas + [sandwich]
    run.failed = any(r.status == "Failed" for r in everything)
    rows = [(r.lemma_id, r.samples, r.worst_margin, r.status) for r in everything]
    run.table("lemmas", ("lemmaId", "samples", "worstMargin", "status"), rows,
              (list(range(len(rows))), {"worstMargin": [r.worst_margin for r in everything]},
               "report index", "worst margin", True))
    for r in everything:
        print(f"{r.lemma_id:9s} {r.status:12s} worstMargin={reports.fmt(r.worst_margin)} samples={r.samples}")
    return run.finish({"lemmas": lemmas, "sandwich": sandwich})


def cmd_metric(run: Run) -> int:
    a = run.args
    d = parse_domain(a.domain)
    w, z = as_point(parse_point(a.from_), d.dim), as_point(parse_point(a.to), d.dim)
    body = {"domain": domain_to_json(d), "from": w, "to": z}
    exact = None
    if d.dim > 1 or registered_chain(d) is not None:
        try:
            exact = model_caratheodory(d, w, z)
        except AutDimError:
            exact = None
    body["distance"] = exact
    if exact is None or a.search:
        b = extremal_search(d, w, z, degree=a.degree or 3, seed=a.seed, density=a.density)
        body["bounds"] = b
        if b.witness is not None:
            cols, rows = reports.candidate_rows(b.witness)
            run.table("candidate", cols, rows)
            body["normalizer"] = b.witness.normalizer
        if exact is None:
            print(reports.fmt(b.lower), reports.fmt(b.upper))
    if exact is not None:
        print(reports.fmt(exact))
    return run.finish(body)


def cmd_flow(run: Run) -> int:
    a = run.args
    d = parse_domain(a.domain)
    X = parse_field(a.field, d.dim)
    p = as_point(parse_point(a.from_), d.dim)
    tol = a.tol or DEFAULT_TOL
    body = {"domain": domain_to_json(d), "field": X, "from": p, "tmax": a.tmax, "tol": tol}
    try:
        times, pts = trajectory(X, p, a.tmax, a.steps, tol, d)
        body["escaped"] = False
    except EscapeError as exc:
        body["escaped"] = True
        body["exitTime"] = exc.t_exit
        times, pts = np.array([0.0]), p[None, :]
    cols, rows = reports.trajectory_rows(times, pts)
    run.table("trajectory", cols, rows,
              (times, {"|z-z0|": np.linalg.norm(pts - p, axis=1)}, "t", "|g(z,t) - z|", False))
    if not body["escaped"]:
        act = GroupAction.from_field(X, d, tol)
        t1 = min(1.0, a.tmax / 2)
        body["groupResidual"] = group_property_residual(act, p, t1, t1 / 2, d)
        body["infinitesimalResidual"] = infinitesimal_residual(act, p, t1, d)
        body["final"] = pts[-1]
        print("final", " ".join(f"{reports.fmt(c.real)} {reports.fmt(c.imag)}" for c in pts[-1]))
    else:
        print("escaped at t =", reports.fmt(body["exitTime"]))
    if a.plots:
        from . import plotting
        plotting.orbit_plot(run.path("orbit.svg"), pts, title="orbit")
    return run.finish(body)


def cmd_hausdorff(run: Run) -> int:
    a = run.args
    if a.j is not None:
        js = parse_jlist(a.j)
        Q = gallery.q_part(gallery.LIMIT)
        gaps = [hausdorff_distance(gallery.q_part(j), Q, a.density) for j in js]
        rows = [(j, h, 2.0 ** -j) for j, h in zip(js, gaps)]
        run.table("hausdorff", ("j", "hausdorff", "twoPowMinusJ"), rows,
                  (js, {"hausdorff": gaps, "2^-j": [2.0 ** -j for j in js]}, "j", "distance", True))
        for r in rows:
            print(r[0], reports.fmt(r[1]))
        return run.finish({"rows": [dict(zip(("j", "hausdorff", "twoPowMinusJ"), r)) for r in rows]})
    if not a.domain or len(a.domain) != 2:
        raise UsageError("give --domain twice, or --j")
    d1, d2 = (parse_domain(t) for t in a.domain)
    h = hausdorff_distance(d1, d2, a.density)
    print(reports.fmt(h))
    return run.finish({"domains": [domain_to_json(d1), domain_to_json(d2)], "hausdorff": h})


def cmd_dim_estimate(run: Run) -> int:
    a = run.args
    degree = a.degree or 2
    tol = a.tol or dimension.DEFAULT_TOL
    names = a.domain or ["unitdisk", "ellipse:2,1", "annulus:0.3,1"]
    estimates_, rows = [], []
    for name in names:
        d = parse_domain(name)
        try:
            rep = dimension.aut_dim_estimate(d, degree, tol, a.density)
        except AmbiguousDimError as exc:
            run.failed = True
            estimates_.append({"domain": name, "error": str(exc), "spectrum": list(exc.spectrum)})
            print(f"{name}: ambiguous ({exc})")
            continue
        estimates_.append({"domain": name, **rep.to_json()})
        rows.append((name, rep.estimated_dim, rep.singular_values[-1], rep.gap_ratio))
        print(f"{name}: dim >= {rep.estimated_dim} (degree {degree}, gap {reports.fmt(rep.gap_ratio)})")
    run.table("dims", ("domain", "dim", "sigma_min", "gapRatio"), rows)
    tables = []
    for fam in a.family or sorted(dimension.FAMILIES):
        members, limit = dimension.FAMILIES[fam]()
        try:
            t = dimension.semicontinuity_experiment(members, limit, degree, tol, fam, a.density)
        except (AssertionError, AmbiguousDimError) as exc:
            run.failed = True
            tables.append({"name": fam, "error": str(exc)})
            print(f"family {fam}: FAILED ({exc})")
            continue
        tables.append(t)
        rws = t.as_rows()
        run.table(f"family_{fam}", t.columns(), rws,
                  ([r[0] for r in rws], {"hausdorff": [r[1] for r in rws]}, "param", "hausdorff gap", True))
        print(f"family {fam}: dims {[r.dim for r in t.rows]} limit {t.limit_dim} semicontinuity holds")
    return run.finish({"estimates": estimates_, "experiments": tables})


def _orbit_rows(run, name, report):
    if report.trace is not None:
        ts, pts = report.trace
        cols, rows = reports.trajectory_rows(ts, pts)
        run.table(name, cols, rows)


def cmd_example1(run: Run) -> int:
    a = run.args
    js = parse_jlist(a.j)
    Q = gallery.q_part(gallery.LIMIT)
    rows, orbit_reports = [], []
    for j in js:
        fam = gallery.example1(j)
        h = hausdorff_distance(fam.q_part, Q, a.density)
        rep = gallery.orbit_classifier(fam.product, gallery.circle_action(j), gallery.base_point(j),
                                       4 * math.pi, keep_trace=True)
        _orbit_rows(run, f"orbit_j{j}", rep)
        rows.append((str(j), h, rep.classification, rep.min_boundary_dist, rep.recurrence_gap))
        orbit_reports.append({"j": j, "hausdorff": h, **rep.to_json()})
    lim = gallery.example1(gallery.LIMIT)
    rep = gallery.orbit_classifier(lim.product, gallery.translation_action(), gallery.base_point(gallery.LIMIT),
                                   a.tmax, keep_trace=True)
    _orbit_rows(run, "orbit_limit", rep)
    rows.append(("limit", 0.0, rep.classification, rep.min_boundary_dist, rep.recurrence_gap))
    orbit_reports.append({"j": None, "hausdorff": 0.0, **rep.to_json()})
    run.table("example1", ("j", "hausdorff", "classification", "minBoundaryDist", "recurrenceGap"), rows,
              (js, {"hausdorff": [r[1] for r in rows[:-1]], "minBoundaryDist": [r[3] for r in rows[:-1]]},
               "j", "distance", True))
    expected = all(r[2] == "Compact" for r in rows[:-1]) and rows[-1][2] == "Noncompact"
    run.failed = not expected
    for r in rows:
        print(r[0], reports.fmt(r[1]), r[2])
    return run.finish({"orbits": orbit_reports, "matchesClosedForm": expected})


def cmd_converge(run: Run) -> int:
    a = run.args
    js = parse_jlist(a.j)
    rep = dimension.field_convergence_experiment(js)
    rows = rep.as_rows()
    run.table("converge", rep.columns(), rows,
              (js, {"supDeviation": list(rep.sup_deviations)}, "j", "sup_K |X_j - X|", True))
    for j, dev, _ in rows:
        print(j, reports.fmt(dev))
    return run.finish({"convergence": rep, "decreasing": rep.decreasing()})


HANDLERS = {
    "verify-lemmas": cmd_verify_lemmas,
    "metric": cmd_metric,
    "flow": cmd_flow,
    "hausdorff": cmd_hausdorff,
    "dim-estimate": cmd_dim_estimate,
    "example1": cmd_example1,
    "converge": cmd_converge,
}


def _load_config(argv: list) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    with open(known.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise UsageError("the config file must hold a JSON object")
    return cfg


def main(argv: Optional[list] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = _load_config(argv)
    except (OSError, ValueError, UsageError) as exc:
        print(f"autdim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.get("command") and not any(a in COMMANDS for a in argv):
        argv = [cfg["command"]] + argv
    parser = build_parser(cfg)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return HANDLERS[args.command](Run(args))
    except UsageError as exc:
        print(f"autdim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AutDimError as exc:
        print(f"autdim: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
