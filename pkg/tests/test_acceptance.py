"""End-to-end acceptance checks.

Each ``criterion_N`` returns (ok, detail).  Under pytest every criterion prints
one ``[criterion N] PASS/FAIL`` line; running the file as a script prints the
same lines and exits non-zero if any criterion fails.
"""

import math
import os
import sys
import tempfile
import time

import numpy as np
import pytest

from autdim import cli, gallery
from autdim.dimension import aut_dim_estimate, ellipse_family, field_convergence_experiment, semicontinuity_experiment
from autdim.domains import Annulus, Ball, Ellipse, UnitDisk, hausdorff_distance
from autdim.estimates import (MARGIN_FLOOR, ball_sup, ball_volume, battery_sandwich, disk_actions, gram_normalize,
                              run_battery)
from autdim.fields import VectorFieldPoly, hyperbolic_field, rotation_field
from autdim.flow import ComplexTimePoint, GroupAction, cr_residual, group_property_residual, infinitesimal_residual
from autdim.metric import extremal_search, model_caratheodory

FLOW_TOL = 1e-10


def criterion_1():
    D = UnitDisk()
    worst_exact, worst_rel, slowest = 0.0, 0.0, 0.0
    for k in range(1, 10):
        x = k / 10
        exact = 0.5 * math.log((1 + x) / (1 - x))
        worst_exact = max(worst_exact, abs(model_caratheodory(D, 0, x) - exact))
        t0 = time.perf_counter()
        b = extremal_search(D, 0, x, degree=3)
        slowest = max(slowest, time.perf_counter() - t0)
        worst_rel = max(worst_rel, abs(b.lower - exact) / exact)
    ok = worst_exact <= 1e-12 and worst_rel <= 0.01 and slowest < 10
    return ok, f"closed-form error {worst_exact:.2e}, search rel error {worst_rel:.2e}, slowest {slowest:.2f}s"


def criterion_2():
    rep = battery_sandwich(np.random.default_rng(0), samples=50)
    ok = rep.samples == 50 and rep.worst_margin >= MARGIN_FLOOR
    return ok, f"{rep.samples} samples, worst slack {rep.worst_margin:.3e}"


def criterion_3():
    t0 = time.perf_counter()
    reports = run_battery(0)
    elapsed = time.perf_counter() - t0
    statuses = {r.lemma_id: r.status for r in reports}
    m = next(r for r in reports if r.lemma_id == "MDeriv")
    margins_ok = all(r.worst_margin >= MARGIN_FLOOR or r.status == "Inconclusive" for r in reports)
    ok = (margins_ok and "Failed" not in statuses.values() and m.witness["residual"] <= 1e-6
          and elapsed < 300)
    return ok, f"{statuses}, max dm/dt residual {m.witness['residual']:.2e}, {elapsed:.1f}s"


def criterion_4():
    D = UnitDisk()
    Q = gallery.q_part(gallery.LIMIT)
    actions = [(GroupAction.from_field(rotation_field(), D, FLOW_TOL), D, 0.4 + 0.3j),
               (GroupAction.from_field(hyperbolic_field(), D, FLOW_TOL), D, 0.1 - 0.2j),
               (gallery.translation_action(False), Q, -0.5 + 0.1j),
               (gallery.translation_action(), gallery.example1(gallery.LIMIT).product,
                gallery.base_point(gallery.LIMIT))]
    grid = np.linspace(-1, 1, 5)
    gp = max(group_property_residual(a, z, t, s, d) for a, d, z in actions for t in grid for s in grid)
    inf = max(infinitesimal_residual(a, z, t, d) for a, d, z in actions for t in (0.0, 0.5, 1.0))
    tau = 0.3
    cgrid = np.linspace(-0.9 * tau, 0.9 * tau, 4)
    fields = [(rotation_field(), 0.3 + 0.1j), (hyperbolic_field(), 0.2j), (gallery.limit_field(), -0.5 + 0.05j)]
    cr = max(cr_residual(X, z, ComplexTimePoint(complex(t, s), tau)) for X, z in fields for t in cgrid for s in cgrid)
    ok = gp <= 10 * FLOW_TOL and inf <= 1e-6 and cr <= 1e-5
    return ok, f"group law {gp:.2e}, generator {inf:.2e}, Cauchy-Riemann {cr:.2e}"


def criterion_5():
    details, ok = [], True
    for d, expected in ((UnitDisk(), 3), (Ellipse(2, 1), 0), (Annulus(0.3, 1), 1)):
        rep = aut_dim_estimate(d, 2)
        fine = aut_dim_estimate(d, 2, density=d.default_density() / 2)
        good = rep.estimated_dim == fine.estimated_dim == expected and min(rep.gap_ratio, fine.gap_ratio) >= 10
        ok &= good
        details.append(f"{d.variant}={rep.estimated_dim}/{fine.estimated_dim} (gap {rep.gap_ratio:.1e})")
    return ok, ", ".join(details)


def criterion_6():
    t0 = time.perf_counter()
    try:
        table = semicontinuity_experiment(*ellipse_family(), name="ellipse")
    except AssertionError as exc:
        return False, str(exc)
    elapsed = time.perf_counter() - t0
    dims = [r.dim for r in table.rows]
    ok = dims == [0, 0, 0, 0] and table.limit_dim == 3 and table.holds and elapsed < 60
    return ok, f"member dims {dims}, limit {table.limit_dim}, {elapsed:.1f}s"


def criterion_7():
    Q = gallery.q_part(gallery.LIMIT)
    ratios = []
    for j in range(3, 11):
        ratios.append(hausdorff_distance(gallery.q_part(j), Q) / 2.0 ** -j)
    in_band = all(0.5 <= r <= 2 for r in ratios)
    classes = []
    for j in range(3, 9):
        rep = gallery.orbit_classifier(gallery.example1(j).product, gallery.circle_action(j),
                                       gallery.base_point(j), 8 * math.pi)
        classes.append(rep.classification)
    lim = gallery.orbit_classifier(gallery.example1(gallery.LIMIT).product, gallery.translation_action(),
                                   np.array([-0.5, 0.0]), 50.0)
    ok = in_band and all(c == "Compact" for c in classes) and lim.classification == "Noncompact"
    return ok, (f"hausdorff/2^-j in [{min(ratios):.3f}, {max(ratios):.3f}], D_j {set(classes)}, "
                f"D {lim.classification}")


def criterion_8():
    rep = field_convergence_experiment(list(range(3, 11)))
    ok = rep.decreasing() and rep.sup_deviations[-1] < 1e-2
    return ok, f"deviations {rep.sup_deviations[0]:.2e} -> {rep.sup_deviations[-1]:.2e}, decreasing {rep.decreasing()}"


def criterion_9():
    one_dim = [a.field for a in disk_actions()]
    two_dim = [VectorFieldPoly.from_terms(2, [{(0, 0): 1}, {}]),
               VectorFieldPoly.from_terms(2, [{}, {(0, 0): 1}]),
               VectorFieldPoly.from_terms(2, [{(1, 0): 1j}, {(0, 1): -1j}]),
               VectorFieldPoly.from_terms(2, [{(0, 1): 1}, {(1, 0): -1}])]
    worst_defect, worst_sup = 0.0, math.inf
    for fields, center, order in ((one_dim, np.zeros(1), 32), (two_dim, np.zeros(2), 12)):
        basis = gram_normalize(fields, (center, 1.0), order=order)
        worst_defect = max(worst_defect, basis.defect())
        vol = ball_volume(len(center), 1.0)
        for X in basis.fields:
            worst_sup = min(worst_sup, ball_sup(X, center, 1.0) - vol ** -1)
    ok = worst_defect <= 1e-6 and worst_sup >= -1e-6
    return ok, f"Gram defect {worst_defect:.2e}, min sup - Vol^-1 {worst_sup:.3e}"


def _snapshot(root):
    out = {}
    for base, _, files in os.walk(root):
        for name in files:
            path = os.path.join(base, name)
            with open(path, "rb") as fh:
                out[os.path.relpath(path, root)] = fh.read()
    return out


def criterion_10():
    runs = [["verify-lemmas", "--seed", "7"],
            ["example1", "--j", "3..5", "--plots"],
            ["dim-estimate", "--plots"]]
    mismatched = []
    with tempfile.TemporaryDirectory() as tmp:
        for k, args in enumerate(runs):
            snaps = []
            for rep in range(2):
                out = os.path.join(tmp, f"run{k}_{rep}")
                code = cli.main(args + ["--out", out])
                if code != 0:
                    return False, f"{args[0]} exited {code}"
                snaps.append(_snapshot(out))
            if snaps[0] != snaps[1] or "report.json" not in snaps[0]:
                mismatched.append(args[0])
    files = "verify-lemmas, example1, dim-estimate"
    return not mismatched, f"byte-identical reruns of {files}" if not mismatched else f"differ: {mismatched}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def _line(n, ok, detail):
    return f"[criterion {n}] {'PASS' if ok else 'FAIL'} {detail}"


@pytest.mark.parametrize("n", range(1, len(CRITERIA) + 1))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n - 1]()
    with capsys.disabled():
        print("\n" + _line(n, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for n, crit in enumerate(CRITERIA, 1):
        ok, detail = crit()
        failures += not ok
        print(_line(n, ok, detail), flush=True)
    sys.exit(1 if failures else 0)
