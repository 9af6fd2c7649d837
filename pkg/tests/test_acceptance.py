"""Acceptance criteria 1-9, one test each, tolerances pinned as stated.

Every test records a single PASS/FAIL line, printed in the
"acceptance criteria" section at the end of the pytest run.
"""

import math
import subprocess
import sys

import numpy as np

from prl import circles as cc
from prl import flexahedron as fx
from prl import lorentz as lz
from prl import packing as pk
from prl import pipeline as pl
from prl import pogorelov as pg
from prl import verify

A, H, T = 1.55, 0.5, 0.01
SEED = 0


def test_criterion_1_admissibility(criterion):
    m = fx.admissibility_check(A, H).margins
    margins_ok = m["ineq1"] >= 0.05 and m["ineq2"] >= 0.5 and m["ineq3"] >= 0.19
    rng = np.random.default_rng(SEED)
    points = zip(rng.uniform(1.0, 2.0, 200), rng.uniform(0.1, 1.0, 200))
    disagree = []
    for a, h in points:
        adm = fx.admissibility_check(a, h)
        if adm.inequalities != adm.ball_conditions:
            disagree.append((round(float(a), 4), round(float(h), 4)))
    ok = margins_ok and not disagree
    criterion(1, ok, f"margins ({m['ineq1']:.4f}, {m['ineq2']:.4f}, {m['ineq3']:.4f}); "
                     f"{len(disagree)}/200 sampled (a,h) where inequalities and ball checks disagree"
                     + (f", first {disagree[0]}" if disagree else ""))
    assert margins_ok
    assert not disagree, f"inequalities vs ball checks disagree at {disagree}"


def test_criterion_2_infinitesimal_flex(criterion):
    q = fx.build_schonhardt(A, H)
    res = fx.first_order_flex_residual(q)
    dim, mismatch = fx.nullspace_agreement(q)
    ok = res <= 1e-10 and dim >= 1 and mismatch <= 1e-8
    criterion(2, ok, f"residual {res:.2e}, null-space dim {dim}, direction mismatch {mismatch:.2e}")
    assert ok


def test_criterion_3_evenness(criterion):
    even = verify.evenness(A, H, T)
    d1, d2 = verify.diagonal_discrepancy(A, H, T), verify.diagonal_discrepancy(A, H, T / 2)
    ratio = d1 / d2
    ok = even <= 1e-12 and d1 >= 1e-4 and abs(ratio - 2) <= 0.02
    criterion(3, ok, f"edge discrepancy {even:.2e}, diagonal {d1:.3e}, ratio t:t/2 {ratio:.5f}")
    assert ok


def test_criterion_4_pogorelov(criterion):
    inv_phi, phi_inv, _ = verify.pogorelov_round_trips(SEED, n=1000)
    rng = np.random.default_rng(SEED)
    diag = 0.0
    for x in lz.random_de_sitter(rng, 1000):
        a, b = pg.phi(x, x)
        p = lz.klein_project(x)
        diag = max(diag, float(np.max(np.abs(a - p))), float(np.max(np.abs(b - p))))
    families = [np.eye(4), lz.rotation([0, 0, 1], 0.3), lz.boost([1, 0, 0], 0.2)]
    iso = max(pg.verify_isometry_transport(al, seed=SEED).max_residual for al in families)
    tl = pg.verify_timelike_length_transport(seed=SEED, n_pairs=200)
    sl = pg.verify_spacelike_speed_transport(seed=SEED, samples=100)
    ok = (inv_phi <= 1e-12 and phi_inv <= 1e-12 and diag <= 1e-14 and iso <= 1e-8
          and tl.passed and tl.max_residual <= 1e-10 and sl.passed and sl.max_residual <= 1e-10)
    criterion(4, ok, f"round trips {inv_phi:.1e}/{phi_inv:.1e}, diagonal {diag:.1e}, isometry {iso:.1e}, "
                     f"time-like {tl.max_residual:.1e} ({tl.n_samples}), speed {sl.max_residual:.1e} ({sl.n_samples})")
    assert ok


def test_criterion_5_duality(criterion):
    worst = verify.duality_identity(SEED, n=1000)
    x, y = lz.hyperboloid_lift([2, 0, 0]), lz.hyperboloid_lift([-2, 0, 0])
    value = cc.inversive_distance(cc.dual_circle(x), cc.dual_circle(y))
    dist = lz.ds_separation(x, y).value
    ok = worst <= 1e-12 and abs(value - 5 / 3) <= 1e-12 and abs(dist - math.log(3)) <= 1e-12
    criterion(5, ok, f"identity {worst:.1e} over 1000 pairs, worked value {value!r}, arcosh {dist!r}")
    assert ok


def test_criterion_6_certification(criterion):
    rep = pl.run_counterexample(pl.CounterexampleParams(a=A, h=H, t=T))
    pack, curv, mob = rep["packing"], rep["curvature"], rep["mobius"]
    inv_dev = max(r["deviation"] for r in pack["inversive"])
    k_max = max(abs(v) for key in ("P_t", "P_minus_t") for v in curv[key].values())
    faces_ok = all(v["valid"] for key in ("P_t", "P_minus_t") for v in pack["face_verdicts"][key])
    n_faces = sum(len(pack["face_verdicts"][key]) for key in ("P_t", "P_minus_t"))
    ok = (len(pack["inversive"]) == 12 and inv_dev <= 1e-10 and len(curv["P_t"]) == 6 and k_max <= 1e-9
          and faces_ok and n_faces == 16 and mob["verdict"] == "inequivalent" and mob["n_checked"] == 48
          and mob["max_deviation"] >= 1e-4 and pack["top_radius_min_deviation"] >= 1e-4
          and pack["bottom_radius_max_deviation"] <= 1e-12)
    criterion(6, ok, f"I deviation {inv_dev:.1e}, max |k| {k_max:.1e}, faces valid {faces_ok}, "
                     f"Mobius {mob['verdict']} ({mob['n_checked']} relabelings, {mob['max_deviation']:.3f}), "
                     f"top radii {pack['top_radius_min_deviation']:.2e}, bottom {pack['bottom_radius_max_deviation']:.1e}")
    assert ok


def test_criterion_7_hyperideal(criterion):
    rep = pl.hyperideal_report(pl.CounterexampleParams(a=A, h=H, t=T))
    ok = len(rep["edges"]) == 12 and rep["max_edge_deviation"] <= 1e-10 and rep["max_diagonal_deviation"] >= 1e-4
    criterion(7, ok, f"edge deviation {rep['max_edge_deviation']:.1e}, "
                     f"max diagonal deviation {rep['max_diagonal_deviation']:.3e}")
    assert ok


def test_criterion_8_packing(criterion):
    tri_o = pk.octahedron()
    tri_t = pk.tetrahedron()
    gb = [
        pk.gauss_bonnet_residual(tri_o, {e: math.pi / 2 for e in tri_o.edges}),
        pk.gauss_bonnet_residual(tri_t, {e: math.acos(-1 / 3) for e in tri_t.edges}),
    ]
    rep = pl.run_counterexample(pl.CounterexampleParams(a=A, h=H, t=T))
    gb.append(rep["curvature"]["gauss_bonnet_residual"])
    trip = verify.eq1_round_trip()
    limit = verify.euclidean_limit(1e-3)
    ok = max(gb) <= 1e-9 and trip <= 1e-12 and limit <= 1e-4
    criterion(8, ok, f"Gauss-Bonnet {max(gb):.1e}, round trip {trip:.1e}, Euclidean limit {limit:.1e}")
    assert ok


def test_criterion_9_determinism(criterion, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.json"
        cmd = [sys.executable, "-m", "prl.cli", "counterexample", "--a", str(A), "--h", str(H),
               "--t", str(T), "--out", str(path)]
        proc = subprocess.run(cmd, capture_output=True)
        assert proc.returncode == 0, proc.stderr.decode()
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    criterion(9, ok, f"two CLI runs, {len(outs[0])} bytes each, identical: {outs[0] == outs[1]}")
    assert ok
