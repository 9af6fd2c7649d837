"""Seeded property suites for every module (``prl verify``).

Each check returns a :class:`Check` with the measured worst-case value and the
tolerance it is held to.  ``PRL_SEED`` fixes every sampled check.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass

import numpy as np

from prl import circles as cc
from prl import flexahedron as fx
from prl import lorentz as lz
from prl import packing as pk
from prl import pogorelov as pg

DEFAULT_SEED = 0


def seed_from_env(default=DEFAULT_SEED) -> int:
    return int(os.environ.get("PRL_SEED", default))


@dataclass(frozen=True)
class Check:
    module: str
    name: str
    value: float
    tol: float
    passed: bool
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.module:<12} {self.name:<40} {self.value:.3e}  (tol {self.tol:.1e}) {self.note}"

    def to_dict(self) -> dict:
        return asdict(self)


def _le(module, name, value, tol, note=""):
    return Check(module, name, float(value), float(tol), bool(value <= tol), note)


def _ge(module, name, value, tol, note=""):
    return Check(module, name, float(value), float(tol), bool(value >= tol), note)


# -- lorentz ------------------------------------------------------------------

def lorentz_checks(seed) -> list:
    rng = np.random.default_rng(seed)
    x, y, z = rng.normal(size=(3, 200, 4))
    a, b = rng.normal(size=(2, 200, 1))
    lhs = lz.minkowski_inner(a * x + b * y, z)
    rhs = a[:, 0] * lz.minkowski_inner(x, z) + b[:, 0] * lz.minkowski_inner(y, z)
    scale = np.abs(a[:, 0] * lz.minkowski_inner(x, z)) + np.abs(b[:, 0] * lz.minkowski_inner(y, z)) + 1.0
    bilinear = float(np.max(np.abs(lhs - rhs) / scale))
    symmetric = float(np.max(np.abs(lz.minkowski_inner(x, y) - lz.minkowski_inner(y, x))))

    pts = lz.random_exterior_points(rng, 100, 1.01, 5.0)
    lifts = np.array([lz.hyperboloid_lift(p) for p in pts])
    norm_err = float(np.max(np.abs(lz.minkowski_norm2(lifts) - 1.0)))
    upper = bool(np.all(lifts[:, 0] > 0))
    round_trip = float(max(np.max(np.abs(lz.hyperboloid_lift(lz.klein_project(v)) - v)) for v in lifts))

    mismatches = 0
    for _ in range(500):
        p, q = lz.random_exterior_points(rng, 2, 1.01, 4.0)
        sep = lz.ds_separation(lz.hyperboloid_lift(p), lz.hyperboloid_lift(q))
        line_d = lz.line_min_norm2(p, q)
        seg_d = lz.segment_min_norm2(p, q)
        if abs(line_d - 1.0) < 1e-8 or abs(seg_d - 1.0) < 1e-8:
            continue
        timelike = sep.kind is lz.SeparationKind.TIMELIKE
        anti = timelike and sep.sign_flag is lz.SignFlag.ANTI_ALIGNED
        mismatches += (timelike != (line_d < 1.0)) + (anti != (seg_d < 1.0))
    return [
        _le("lorentz", "bilinearity (relative)", bilinear, 1e-14),
        _le("lorentz", "symmetry", symmetric, 1e-14),
        _le("lorentz", "lift lands on de Sitter space", norm_err if upper else np.inf, 1e-12),
        _le("lorentz", "lift o klein_project round trip", round_trip, 1e-12),
        _le("lorentz", "chord test vs classification mismatches", mismatches, 0),
    ]


# -- pogorelov ----------------------------------------------------------------

def random_domain_pairs(rng, n):
    """``n`` Euclidean pairs in the certified image, norms in (1.05, 3)."""
    out = []
    while len(out) < n:
        xi, eta = lz.random_exterior_points(rng, 2, 1.05, 3.0)
        if pg.in_phi_image(xi, eta):
            out.append((xi, eta))
    return out


def random_ds_domain_pairs(rng, n):
    """``n`` de Sitter pairs whose Pogorelov images lie in the certified image."""
    out = []
    while len(out) < n:
        x, y = lz.random_de_sitter(rng, 2, 1.1, 3.0)
        if pg.in_phi_image(*pg.phi(x, y)):
            out.append((x, y))
    return out


def pogorelov_round_trips(seed, n=1000):
    rng = np.random.default_rng(seed)
    e1 = 0.0
    closure = np.inf
    for x, y in random_ds_domain_pairs(rng, n):
        xb, yb = pg.phi_inverse(*pg.phi(x, y))
        e1 = max(e1, float(np.max(np.abs(xb - x))), float(np.max(np.abs(yb - y))))
    e2 = 0.0
    for xi, eta in random_domain_pairs(rng, n):
        x, y = pg.phi_inverse(xi, eta)
        for v in (x, y):
            closure = min(closure, 1e-12 - abs(lz.minkowski_norm2(v) - 1.0), v[0])
        a, b = pg.phi(x, y)
        e2 = max(e2, float(np.max(np.abs(a - xi))), float(np.max(np.abs(b - eta))))
    return e1, e2, closure


def pogorelov_checks(seed) -> list:
    rng = np.random.default_rng(seed)
    inv_phi, phi_inv, closure = pogorelov_round_trips(seed)
    diag = 0.0
    for x in lz.random_de_sitter(rng, 1000):
        a, b = pg.phi(x, x)
        p = lz.klein_project(x)
        diag = max(diag, float(np.max(np.abs(a - p))), float(np.max(np.abs(b - p))))
    iso = [
        pg.verify_isometry_transport(np.eye(4), seed=seed),
        pg.verify_isometry_transport(lz.rotation([0, 0, 1], 0.3), seed=seed),
        pg.verify_isometry_transport(lz.boost([1, 0, 0], 0.2), seed=seed),
    ]
    tl = pg.verify_timelike_length_transport(seed=seed, n_pairs=200)
    sl = pg.verify_spacelike_speed_transport(seed=seed, samples=100)
    return [
        _le("pogorelov", "phi_inverse o phi round trip", inv_phi, 1e-12),
        _le("pogorelov", "phi o phi_inverse round trip", phi_inv, 1e-12),
        _ge("pogorelov", "phi_inverse lands on upper sheet (margin)", closure, 0.0),
        _le("pogorelov", "diagonal restriction equals chart", diag, 1e-14),
        _le("pogorelov", "isometry transport (identity)", iso[0].max_residual, pg.ISOMETRY_FIT_TOL),
        _le("pogorelov", "isometry transport (rotation)", iso[1].max_residual, pg.ISOMETRY_FIT_TOL),
        _le("pogorelov", "isometry transport (boost)", iso[2].max_residual, pg.ISOMETRY_FIT_TOL),
        _le("pogorelov", "time-like length transport", tl.max_residual if tl.passed else np.inf,
            pg.TRANSPORT_TOL, f"{tl.n_samples} pairs"),
        _le("pogorelov", "space-like speed transport", sl.max_residual if sl.passed else np.inf,
            pg.TRANSPORT_TOL, f"{sl.n_samples} geodesic pairs"),
    ]


# -- flexahedron --------------------------------------------------------------

def evenness(a=fx.DEFAULT_A, h=fx.DEFAULT_H, t=fx.DEFAULT_T) -> float:
    q = fx.build_schonhardt(a, h)
    lp, lm = fx.edge_lengths(fx.flexed(q, t)), fx.edge_lengths(fx.flexed(q, -t))
    return max(abs(lp[k] - lm[k]) for k in lp)


def diagonal_discrepancy(a=fx.DEFAULT_A, h=fx.DEFAULT_H, t=fx.DEFAULT_T) -> float:
    q = fx.build_schonhardt(a, h)
    dp, dm = fx.diagonal_lengths(fx.flexed(q, t)), fx.diagonal_lengths(fx.flexed(q, -t))
    return min(abs(dp[k] - dm[k]) for k in dp)


def flexahedron_checks(seed) -> list:
    q = fx.build_schonhardt()
    dim, mismatch = fx.nullspace_agreement(q)
    d1, d2 = diagonal_discrepancy(t=0.01), diagonal_discrepancy(t=0.005)
    rng = np.random.default_rng(seed)
    worst_even = 0.0
    for _ in range(50):
        a, h = rng.uniform(1.45, 1.7), rng.uniform(0.3, 0.6)
        if fx.admissibility_check(a, h).passed:
            for t in (0.05, 0.01, -0.02):
                worst_even = max(worst_even, evenness(a, h, t))
    rot = fx.rotation_about_axis(2 * np.pi / 3)
    qt = fx.flexed(q, 0.01)
    perm = [1, 2, 0, 4, 5, 3]
    sym = float(np.max(np.abs(qt.vertices @ rot.T - qt.vertices[perm])))
    return [
        _le("flexahedron", "first-order flex residual", fx.first_order_flex_residual(q), fx.FLEX_TOL),
        _ge("flexahedron", "rigidity null-space dimension", dim, 1),
        _le("flexahedron", "null space vs face-normal flex", mismatch, fx.NULLSPACE_MATCH_TOL),
        _le("flexahedron", "evenness at t=0.01", evenness(), 1e-12),
        _le("flexahedron", "evenness over admissible (a,h), |t|<=0.05", worst_even, 1e-12),
        _le("flexahedron", "diagonal ratio t vs t/2 (|r/2 - 1|)", abs(d1 / d2 / 2 - 1), 0.01),
        _le("flexahedron", "3-fold symmetry of Q_t", sym, 1e-12),
    ]


# -- circles ------------------------------------------------------------------

def duality_identity(seed, n=1000) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        x, y = lz.random_de_sitter(rng, 2, 1.02, 4.0)
        val = cc.inversive_distance(cc.dual_circle(x), cc.dual_circle(y))
        worst = max(worst, abs(val + lz.minkowski_inner(x, y)))
    return float(worst)


def circles_checks(seed) -> list:
    rng = np.random.default_rng(seed)
    cfg = cc.CircleConfiguration.from_lifts(range(8), lz.random_de_sitter(rng, 8))
    worst = 0.0
    for _ in range(20):
        m = lz.random_lorentz(rng, max_rapidity=0.2)
        if np.all((cfg.lifts @ m.T)[:, 0] > 0):
            worst = max(worst, float(np.max(np.abs(cc.gram_matrix(cfg) - cc.gram_matrix(cfg.transformed(m))))))
    return [
        _le("circles", "duality identity I(C_x, C_y) = -<x,y>", duality_identity(seed), 1e-12),
        _le("circles", "Gram invariance under Lorentz maps", worst, 1e-10),
    ]


# -- packing ------------------------------------------------------------------

def eq1_round_trip() -> float:
    worst = 0.0
    radii = np.round(np.arange(0.1, 1.41, 0.1), 10)
    for ru in radii:
        for rv in radii:
            for l in np.linspace(0.05, 3.0, 25):
                inv = pk.inversive_from_length(l, ru, rv)
                worst = max(worst, abs(pk.edge_length_spherical(ru, rv, inv) - l))
    return worst


def euclidean_limit(s=1e-3) -> float:
    worst = 0.0
    for ru, rv, inv in [(1.0, 1.0, 1.0), (0.5, 1.5, 0.0), (2.0, 1.0, 3.0), (1.0, 1.2, -0.5), (0.3, 0.7, 10.0)]:
        sph = pk.edge_length_spherical(s * ru, s * rv, inv) / s
        euc = pk.edge_length_euclidean(ru, rv, inv)
        worst = max(worst, abs(sph - euc) / euc)
    return worst


def octant_metric():
    tri = pk.octahedron()
    return tri, {e: np.pi / 2 for e in tri.edges}


def tetra_metric():
    tri = pk.tetrahedron()
    return tri, {e: float(np.arccos(-1.0 / 3.0)) for e in tri.edges}


def packing_checks(seed) -> list:
    gb = [pk.gauss_bonnet_residual(*octant_metric()), pk.gauss_bonnet_residual(*tetra_metric())]
    return [
        _le("packing", "Gauss-Bonnet (octant octahedron)", gb[0], 1e-9),
        _le("packing", "Gauss-Bonnet (regular tetrahedron)", gb[1], 1e-9),
        _le("packing", "inversive-distance round trip grid", eq1_round_trip(), 1e-12),
        _le("packing", "Euclidean limit at scale 1e-3 (relative)", euclidean_limit(), 1e-4),
    ]


def pipeline_checks(seed) -> list:
    from prl.pipeline import run_counterexample

    rep = run_counterexample()
    return [Check("pipeline", "counterexample certified at defaults", 0.0 if rep["verdict"] == "pass" else 1.0,
                  0.0, rep["verdict"] == "pass", rep["verdict"])]


SUITES = {
    "lorentz": lorentz_checks,
    "pogorelov": pogorelov_checks,
    "flexahedron": flexahedron_checks,
    "circles": circles_checks,
    "packing": packing_checks,
    "pipeline": pipeline_checks,
}


def run_all(seed=None, modules=None) -> list:
    seed = seed_from_env() if seed is None else seed
    checks = []
    for name, fn in SUITES.items():
        if modules is None or name in modules:
            checks.extend(fn(seed))
    return checks
