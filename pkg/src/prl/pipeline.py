"""Certification of the non-rigidity counterexample.

The run goes, stage by stage:

    twisted octahedron Q -> Q_t, Q_-t (equal edge lengths)
    -> pair corresponding vertices -> inverse Pogorelov map
    -> de Sitter polyhedra P_t, P_-t -> Gram matrices -> dual circles
    -> spherical packings -> curvature -> Möbius comparison

A failing stage stops the run; every later section of the report is then
the string ``"not-evaluated"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from prl import __version__
from prl import flexahedron as fx
from prl.circles import (
    CONVENTIONS, CORRECTED, CircleConfiguration, SphericalCircle, gram_matrix, graph_automorphisms,
    mobius_equivalent,
)
from prl.lorentz import SeparationKind, SignFlag, ds_separation
from prl.packing import (
    Triangulation, discrete_curvature, gauss_bonnet_residual, inversive_in_convention,
    packing_from_circles, rederivation_error, validate_polyhedral,
)
from prl.pogorelov import in_phi_image, phi, phi_inverse

NOT_EVALUATED = "not-evaluated"
PASS = "pass"
FAIL = "fail"
NOT_A_COUNTEREXAMPLE = "not-a-counterexample"

STAGES = (
    "admissibility", "flex", "euclidean", "pogorelov_domain", "lift", "edge_timelike",
    "gram", "circles", "packing", "curvature", "mobius",
)

CURVATURE_TOL = 1e-9


class InvalidParams(ValueError):
    pass


@dataclass(frozen=True)
class CounterexampleParams:
    a: float = fx.DEFAULT_A
    h: float = fx.DEFAULT_H
    t: float = fx.DEFAULT_T
    tol_equal: float = 1e-10
    tol_exact: float = 1e-12
    distinct: float = 1e-4
    convention: str = CORRECTED

    def validate(self):
        for name in ("a", "h"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise InvalidParams(f"{name} must be a finite positive number, got {v!r}")
        if not math.isfinite(self.t):
            raise InvalidParams(f"t must be finite, got {self.t!r}")
        for name in ("tol_equal", "tol_exact", "distinct"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidParams(f"{name} must be a finite positive number, got {v!r}")
        if self.convention not in CONVENTIONS:
            raise InvalidParams(f"convention must be one of {CONVENTIONS}, got {self.convention!r}")
        return self


def octahedron_triangulation() -> Triangulation:
    return Triangulation(6, fx.FACES)


def octahedral_automorphisms() -> list:
    return graph_automorphisms(6, fx.EDGES)


def _f(x) -> float:
    return float(x)


class _Run:
    """Mutable state of one certification run."""

    def __init__(self, params: CounterexampleParams):
        self.p = params
        self.report = {
            "tool": {"name": "prl", "version": __version__},
            "params": asdict(params),
            "stages": [{"name": s, "status": NOT_EVALUATED, "message": ""} for s in STAGES],
            "verdict": NOT_EVALUATED,
            "failed_stage": None,
        }
        for s in STAGES:
            self.report[s] = NOT_EVALUATED
        self.tri = octahedron_triangulation()

    def _stage(self, name):
        return next(s for s in self.report["stages"] if s["name"] == name)

    def run(self, stop_after=None) -> dict:
        for name in STAGES:
            ok, message = getattr(self, f"stage_{name}")()
            st = self._stage(name)
            st["status"] = PASS if ok else FAIL
            st["message"] = message
            if not ok:
                self.report["failed_stage"] = name
                self.report["verdict"] = NOT_A_COUNTEREXAMPLE if name == "mobius" else FAIL
                return self.report
            if name == stop_after:
                return self.report
        self.report["verdict"] = PASS
        return self.report

    # -- stages ----------------------------------------------------------

    def stage_admissibility(self):
        p = self.p
        self.Q = fx.build_schonhardt(p.a, p.h)
        base = fx.admissibility_check(p.a, p.h)
        ok = base.passed
        section = {"Q": base.to_dict()}
        if ok:
            dirs = fx.flex_directions(self.Q)
            self.Qt = fx.flexed(self.Q, p.t, dirs)
            self.Qm = fx.flexed(self.Q, -p.t, dirs)
            for key, poly in (("Q_t", self.Qt), ("Q_minus_t", self.Qm)):
                v = fx.admissibility_check(p.a, p.h, poly=poly)
                section[key] = {"vertex_check": v.vertex_check, "edge_check": v.edge_check,
                                "min_vertex_norm": v.margins["min_vertex_norm"],
                                "max_edge_min_norm2": v.margins["max_edge_min_norm2"]}
                ok = ok and v.ball_conditions
        self.report["admissibility"] = section
        if not base.passed:
            failed = [k for k in ("ineq1", "ineq2", "ineq3", "vertex_check", "edge_check")
                      if not getattr(base, k)]
            return False, "Q not admissible: " + ", ".join(failed)
        if not ok:
            return False, "flexed polyhedra leave the admissible region; decrease |t|"
        return True, f"min inequality margin {min(base.margins[k] for k in ('ineq1', 'ineq2', 'ineq3')):.6g}"

    def stage_flex(self):
        residual = fx.first_order_flex_residual(self.Q)
        dim, mismatch = fx.nullspace_agreement(self.Q)
        dirs = fx.flex_directions(self.Q)
        self.report["flex"] = {
            "residual": residual,
            "nullspace_dimension": dim,
            "nullspace_mismatch": mismatch,
            "directions": {fx.LABELS[3 + k]: dirs[k].tolist() for k in range(3)},
        }
        ok = residual <= fx.FLEX_TOL and dim >= 1 and mismatch <= fx.NULLSPACE_MATCH_TOL
        return ok, f"residual {residual:.3g}, null-space dim {dim}, mismatch {mismatch:.3g}"

    def stage_euclidean(self):
        lt, lm = fx.edge_lengths(self.Qt), fx.edge_lengths(self.Qm)
        dt, dm = fx.diagonal_lengths(self.Qt), fx.diagonal_lengths(self.Qm)
        edges = [{"edge": k, "Q_t": lt[k], "Q_minus_t": lm[k], "deviation": abs(lt[k] - lm[k])}
                 for k in lt]
        diags = [{"diagonal": k, "Q_t": dt[k], "Q_minus_t": dm[k], "deviation": abs(dt[k] - dm[k])}
                 for k in dt]
        max_edge = max(e["deviation"] for e in edges)
        cong = fx.congruence_test(self.Qt, self.Qm)
        self.report["euclidean"] = {
            "edges": edges,
            "max_edge_deviation": max_edge,
            "diagonals": diags,
            "min_diagonal_deviation": min(d["deviation"] for d in diags),
            "labeled_congruent": cong.congruent,
            "congruence_witness": list(cong.witness) if cong.witness else None,
        }
        return max_edge <= self.p.tol_exact, f"max edge-length deviation {max_edge:.3g}"

    def stage_pogorelov_domain(self):
        pairs = []
        ok = True
        for k, label in enumerate(fx.LABELS):
            xi, eta = self.Qt.vertices[k], self.Qm.vertices[k]
            inside = in_phi_image(xi, eta)
            ok = ok and inside
            pairs.append({"vertex": label, "xi_norm2": _f(xi @ xi), "eta_norm2": _f(eta @ eta),
                          "norm2_difference": _f(xi @ xi - eta @ eta), "in_domain": inside})
        self.report["pogorelov_domain"] = {"pairs": pairs, "all_in_domain": ok}
        return ok, "all vertex pairs in the certified image" if ok else "a vertex pair is outside"

    def stage_lift(self):
        pt, pm = [], []
        worst = 0.0
        for k in range(6):
            xi, eta = self.Qt.vertices[k], self.Qm.vertices[k]
            x, y = phi_inverse(xi, eta)
            back = phi(x, y)
            worst = max(worst, float(np.max(np.abs(back[0] - xi))), float(np.max(np.abs(back[1] - eta))))
            pt.append(x)
            pm.append(y)
        self.Pt, self.Pm = np.array(pt), np.array(pm)
        self.report["lift"] = {
            "P_t": {fx.LABELS[k]: self.Pt[k].tolist() for k in range(6)},
            "P_minus_t": {fx.LABELS[k]: self.Pm[k].tolist() for k in range(6)},
            "round_trip_error": worst,
        }
        return worst <= self.p.tol_exact, f"phi round-trip error {worst:.3g}"

    def stage_edge_timelike(self):
        rows = []
        ok = True
        margin = math.inf
        for i, j in fx.EDGES:
            row = {"edge": fx.edge_name(i, j)}
            for key, P in (("P_t", self.Pt), ("P_minus_t", self.Pm)):
                sep = ds_separation(P[i], P[j])
                good = sep.kind is SeparationKind.TIMELIKE and sep.sign_flag is SignFlag.ANTI_ALIGNED
                ok = ok and good
                margin = min(margin, -sep.inner - 1.0)
                row[key] = {"kind": sep.kind.value, "value": sep.value, "inner": sep.inner,
                            "sign_flag": sep.sign_flag.value if sep.sign_flag else None}
            rows.append(row)
        self.report["edge_timelike"] = {"edges": rows, "min_margin": margin}
        return ok, f"min(-<x,y> - 1) over edges {margin:.6g}"

    def stage_gram(self):
        self.Gt, self.Gm = gram_matrix(self.Pt), gram_matrix(self.Pm)
        edge_dev = max(abs(self.Gt[i, j] - self.Gm[i, j]) for i, j in fx.EDGES)
        diag_devs = [abs(self.Gt[i, j] - self.Gm[i, j]) for i, j in fx.DIAGONALS]
        t = abs(self.p.t)
        self.report["gram"] = {
            "labels": list(fx.LABELS),
            "P_t": self.Gt.tolist(),
            "P_minus_t": self.Gm.tolist(),
            "edge_max_deviation": edge_dev,
            "diagonal_deviations": {fx.edge_name(i, j): d for (i, j), d in zip(fx.DIAGONALS, diag_devs)},
            "diagonal_min_deviation": min(diag_devs),
            "diagonal_deviation_per_t": min(diag_devs) / abs(t) if t != 0 else None,
        }
        return edge_dev <= self.p.tol_equal, f"max edge Gram deviation {edge_dev:.3g}"

    def stage_circles(self):
        self.Ct = CircleConfiguration.from_lifts(fx.LABELS, self.Pt)
        self.Cm = CircleConfiguration.from_lifts(fx.LABELS, self.Pm)
        consistency = max(self.Ct.lift_consistency(), self.Cm.lift_consistency())

        def table(cfg):
            return [{"label": lab, "center": c.center.tolist(), "radius": c.radius}
                    for lab, c in zip(cfg.labels, cfg.circles)]

        self.report["circles"] = {"P_t": table(self.Ct), "P_minus_t": table(self.Cm),
                                  "lift_consistency": consistency}
        return consistency <= self.p.tol_equal, f"lift consistency {consistency:.3g}"

    def stage_packing(self):
        self.pack_t, self.met_t = packing_from_circles(self.tri, self.Ct)
        self.pack_m, self.met_m = packing_from_circles(self.tri, self.Cm)
        conv = self.p.convention
        inv_rows = []
        for i, j in fx.EDGES:
            e = (min(i, j), max(i, j))
            a, b = self.pack_t.inversive[e], self.pack_m.inversive[e]
            inv_rows.append({"edge": fx.edge_name(i, j), "P_t": inversive_in_convention(a, conv),
                             "P_minus_t": inversive_in_convention(b, conv), "deviation": abs(a - b)})
        rad_rows = [{"label": lab, "P_t": _f(self.pack_t.radii[k]), "P_minus_t": _f(self.pack_m.radii[k]),
                     "deviation": _f(abs(self.pack_t.radii[k] - self.pack_m.radii[k]))}
                    for k, lab in enumerate(fx.LABELS)]
        vt = validate_polyhedral(self.tri, self.met_t.lengths)
        vm = validate_polyhedral(self.tri, self.met_m.lengths)
        max_inv = max(r["deviation"] for r in inv_rows)
        faces_ok = all(v.valid for v in vt + vm)
        self.report["packing"] = {
            "convention": conv,
            "inversive": inv_rows,
            "max_inversive_deviation": max_inv,
            "radii": rad_rows,
            "bottom_radius_max_deviation": max(r["deviation"] for r in rad_rows[:3]),
            "top_radius_min_deviation": min(r["deviation"] for r in rad_rows[3:]),
            "lengths": {"P_t": [self.met_t.lengths[e] for e in self.tri.edges],
                        "P_minus_t": [self.met_m.lengths[e] for e in self.tri.edges],
                        "edges": [[fx.LABELS[i], fx.LABELS[j]] for i, j in self.tri.edges]},
            "face_verdicts": {"P_t": [v.to_dict() for v in vt], "P_minus_t": [v.to_dict() for v in vm]},
            "rederivation_error": max(rederivation_error(self.tri, self.pack_t, self.met_t),
                                      rederivation_error(self.tri, self.pack_m, self.met_m)),
        }
        ok = max_inv <= self.p.tol_equal and faces_ok
        return ok, f"max inversive deviation {max_inv:.3g}; faces valid: {faces_ok}"

    def stage_curvature(self):
        kt = discrete_curvature(self.tri, self.met_t.lengths)
        km = discrete_curvature(self.tri, self.met_m.lengths)
        gb = max(gauss_bonnet_residual(self.tri, self.met_t.lengths),
                 gauss_bonnet_residual(self.tri, self.met_m.lengths))
        worst = float(max(np.max(np.abs(kt)), np.max(np.abs(km))))
        self.report["curvature"] = {
            "P_t": dict(zip(fx.LABELS, kt.tolist())),
            "P_minus_t": dict(zip(fx.LABELS, km.tolist())),
            "max_abs": worst,
            "gauss_bonnet_residual": gb,
        }
        ok = worst <= CURVATURE_TOL and gb <= CURVATURE_TOL
        return ok, f"max |k| {worst:.3g}, Gauss-Bonnet residual {gb:.3g}"

    def stage_mobius(self):
        autos = octahedral_automorphisms()
        v = mobius_equivalent(self.Ct, self.Cm, autos, tol=self.p.tol_equal)
        section = v.to_dict(fx.LABELS)
        section["n_automorphisms"] = len(autos)
        section["distinct_threshold"] = self.p.distinct
        self.report["mobius"] = section
        ok = (not v.equivalent) and v.max_deviation >= self.p.distinct
        return ok, f"{v.verdict}; best relabeling deviation {v.max_deviation:.3g}"


def run_counterexample(params: CounterexampleParams | None = None) -> dict:
    """Run every stage and return the report as a JSON-ready dict."""
    params = (params or CounterexampleParams()).validate()
    return _Run(params).run()


def report_json(report: dict) -> str:
    """Canonical serialization: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def hyperideal_report(params: CounterexampleParams | None = None) -> dict:
    """Hyperideal edge lengths ``arcosh(-<x_i, x_j>)`` of ``P_t`` and ``P_-t``.

    Also reports the three diagonals, which differ between the two polyhedra.
    """
    params = (params or CounterexampleParams()).validate()
    run = _Run(params)
    base = run.run(stop_after="edge_timelike")
    if base["failed_stage"] is not None:
        return {"params": asdict(params), "verdict": FAIL, "failed_stage": base["failed_stage"],
                "stages": base["stages"], "edges": NOT_EVALUATED, "diagonals": NOT_EVALUATED}

    def length(P, i, j):
        return float(np.arccosh(-(-P[i, 0] * P[j, 0] + P[i, 1:] @ P[j, 1:])))

    def rows(pairs, key):
        out = []
        for i, j in pairs:
            a, b = length(run.Pt, i, j), length(run.Pm, i, j)
            out.append({key: fx.edge_name(i, j), "P_t": a, "P_minus_t": b, "deviation": abs(a - b)})
        return out

    edges = rows(fx.EDGES, "edge")
    diags = rows(fx.DIAGONALS, "diagonal")
    max_edge = max(r["deviation"] for r in edges)
    max_diag = max(r["deviation"] for r in diags)
    ok = max_edge <= params.tol_equal and max_diag >= params.distinct
    return {
        "tool": {"name": "prl", "version": __version__},
        "params": asdict(params),
        "edges": edges,
        "diagonals": diags,
        "max_edge_deviation": max_edge,
        "max_diagonal_deviation": max_diag,
        "verdict": PASS if ok else (NOT_A_COUNTEREXAMPLE if max_edge <= params.tol_equal else FAIL),
        "failed_stage": None,
    }


SWEEP_COLUMNS = (
    "a", "h", "t", "verdict", "failed_stage", "euclidean_max_edge_deviation",
    "euclidean_min_diagonal_deviation", "gram_edge_max_deviation", "gram_diagonal_min_deviation",
    "max_inversive_deviation", "max_abs_curvature", "mobius_deviation",
)


def _pick(report, section, key):
    sec = report.get(section)
    return sec.get(key) if isinstance(sec, dict) else None


def sweep(a_values, h_values, t_values, **kwargs) -> list:
    """One summary row per grid point, in ``a``-major order; rows never abort the sweep."""
    rows = []
    for a in a_values:
        for h in h_values:
            for t in t_values:
                row = dict.fromkeys(SWEEP_COLUMNS)
                row.update(a=float(a), h=float(h), t=float(t))
                try:
                    rep = run_counterexample(CounterexampleParams(a=float(a), h=float(h), t=float(t), **kwargs))
                except (InvalidParams, ValueError) as exc:
                    row.update(verdict="invalid", failed_stage=str(exc))
                    rows.append(row)
                    continue
                row.update(
                    verdict=rep["verdict"],
                    failed_stage=rep["failed_stage"],
                    euclidean_max_edge_deviation=_pick(rep, "euclidean", "max_edge_deviation"),
                    euclidean_min_diagonal_deviation=_pick(rep, "euclidean", "min_diagonal_deviation"),
                    gram_edge_max_deviation=_pick(rep, "gram", "edge_max_deviation"),
                    gram_diagonal_min_deviation=_pick(rep, "gram", "diagonal_min_deviation"),
                    max_inversive_deviation=_pick(rep, "packing", "max_inversive_deviation"),
                    max_abs_curvature=_pick(rep, "curvature", "max_abs"),
                    mobius_deviation=_pick(rep, "mobius", "max_deviation"),
                )
                rows.append(row)
    return rows


def configurations_from_report(report: dict) -> dict:
    """Rebuild the two circle configurations stored in a report's ``circles`` section."""
    sec = report.get("circles")
    if not isinstance(sec, dict):
        return {}
    out = {}
    for key in ("P_t", "P_minus_t"):
        rows = sec.get(key, [])
        out[key] = CircleConfiguration.from_circles(
            [r["label"] for r in rows],
            [SphericalCircle(np.array(r["center"]) / np.linalg.norm(r["center"]), r["radius"]) for r in rows],
        )
    return out
