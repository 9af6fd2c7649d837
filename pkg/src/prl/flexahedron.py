"""Schönhardt's twisted octahedron and its infinitesimal flex.

The bottom triangle ``ABC`` sits at height ``-h`` and the top triangle
``A0 B0 C0`` is its image under a quarter-turn screw motion about the
vertical axis, at height ``+h``.  Moving the three top vertices along the
unit normals of their bottom-anchored faces is a first-order isometric
deformation; ``Q_t`` and ``Q_{-t}`` then have identical edge lengths but
different diagonals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from prl.errors import DegenerateFace
from prl.lorentz import EPS_BALL, EPS_MODEL, segment_min_norm2

LABELS = ("A", "B", "C", "A0", "B0", "C0")
_IDX = {name: i for i, name in enumerate(LABELS)}

EDGES = tuple(
    (_IDX[p], _IDX[q])
    for p, q in [
        ("A", "B"), ("B", "C"), ("C", "A"),
        ("A0", "B0"), ("B0", "C0"), ("C0", "A0"),
        ("A", "B0"), ("A", "C0"), ("B", "A0"), ("B", "C0"), ("C", "A0"), ("C", "B0"),
    ]
)
FACES = tuple(
    tuple(_IDX[v] for v in face)
    for face in [
        ("A", "B", "C"), ("A0", "B0", "C0"), ("A", "B", "C0"), ("A0", "B", "C"),
        ("A", "B0", "C"), ("A0", "B0", "C"), ("A", "B0", "C0"), ("A0", "B", "C0"),
    ]
)
DIAGONALS = ((0, 3), (1, 4), (2, 5))

# top vertex -> the face it shares with two bottom vertices
FLEX_FACES = {3: (3, 1, 2), 4: (0, 4, 2), 5: (0, 1, 5)}

BOTTOM_AZIMUTHS = np.radians([90.0, 210.0, 330.0])
TWIST = np.pi / 2

DEFAULT_A = 1.55
DEFAULT_H = 0.5
DEFAULT_T = 0.01

FLEX_TOL = 1e-10
NULLSPACE_MATCH_TOL = 1e-8


def edge_name(i, j) -> str:
    return LABELS[i] + LABELS[j]


@dataclass(frozen=True)
class LabeledPolyhedron:
    """Six labeled vertices with the fixed octahedral combinatorics of ``EDGES``/``FACES``."""

    vertices: np.ndarray
    a: float = float("nan")
    h: float = float("nan")
    labels: tuple = LABELS
    edges: tuple = EDGES
    faces: tuple = FACES
    diagonals: tuple = DIAGONALS

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.shape != (6, 3) or not np.all(np.isfinite(v)):
            raise ValueError("a labeled octahedron needs 6 finite points in R^3")
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    def __getitem__(self, label: str) -> np.ndarray:
        return self.vertices[_IDX[label]]

    def with_vertices(self, vertices) -> "LabeledPolyhedron":
        return LabeledPolyhedron(vertices, self.a, self.h)


def build_schonhardt(a=DEFAULT_A, h=DEFAULT_H) -> LabeledPolyhedron:
    if not (a > 0 and h > 0 and np.isfinite(a) and np.isfinite(h)):
        raise ValueError(f"need finite a > 0 and h > 0, got a={a!r}, h={h!r}")
    radius = a / np.sqrt(3.0)
    bottom = [(radius * np.cos(t), radius * np.sin(t), -h) for t in BOTTOM_AZIMUTHS]
    top = [(radius * np.cos(t + TWIST), radius * np.sin(t + TWIST), h) for t in BOTTOM_AZIMUTHS]
    return LabeledPolyhedron(np.array(bottom + top), float(a), float(h))


def rotation_about_axis(angle) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class Admissibility:
    """Printed inequalities and direct ball checks for a twisted octahedron.

    ``margins`` holds the signed slack of each inequality (positive = holds).
    """

    ineq1: bool
    ineq2: bool
    ineq3: bool
    vertex_check: bool
    edge_check: bool
    margins: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all((self.ineq1, self.ineq2, self.ineq3, self.vertex_check, self.edge_check))

    @property
    def inequalities(self) -> bool:
        return self.ineq1 and self.ineq2 and self.ineq3

    @property
    def ball_conditions(self) -> bool:
        return self.vertex_check and self.edge_check

    def to_dict(self) -> dict:
        return {
            "ineq1": self.ineq1, "ineq2": self.ineq2, "ineq3": self.ineq3,
            "vertex_check": self.vertex_check, "edge_check": self.edge_check,
            "passed": self.passed, "margins": dict(self.margins),
        }


def ball_conditions(poly: LabeledPolyhedron, eps_ball=EPS_BALL):
    """Vertices strictly outside, and every edge meeting the open unit ball.

    Returns ``(vertex_ok, edge_ok, min_vertex_norm, max_edge_min_norm2)``.
    """
    v = poly.vertices
    norms = np.linalg.norm(v, axis=1)
    edge_min = [segment_min_norm2(v[i], v[j]) for i, j in poly.edges]
    return (
        bool(np.all(norms > 1.0 + eps_ball)),
        bool(max(edge_min) < 1.0 - eps_ball),
        float(norms.min()),
        float(max(edge_min)),
    )


def admissibility_check(a, h, eps_ball=EPS_BALL, poly=None) -> Admissibility:
    """Evaluate the three printed inequalities and the direct vertex/edge checks.

    Each inequality must hold with slack above ``EPS_MODEL``.  If ``poly`` is
    given (e.g. a flexed octahedron) the ball checks run on its vertices; the
    inequalities always refer to ``(a, h)``.
    """
    m1 = h * h + a * a / 3.0 - 1.0
    m2 = 1.0 - (h * h + a * a / 12.0)
    m3 = 1.0 - a * a / 3.0
    if poly is None:
        poly = build_schonhardt(a, h)
    vok, eok, vmin, emax = ball_conditions(poly, eps_ball)
    return Admissibility(
        ineq1=m1 > EPS_MODEL, ineq2=m2 > EPS_MODEL, ineq3=m3 > EPS_MODEL,
        vertex_check=vok, edge_check=eok,
        margins={"ineq1": m1, "ineq2": m2, "ineq3": m3,
                 "min_vertex_norm": vmin, "max_edge_min_norm2": emax},
    )


def _centroid(poly) -> np.ndarray:
    return poly.vertices.mean(axis=0)


def flex_directions(poly: LabeledPolyhedron) -> np.ndarray:
    """Unit outward normals for ``A0, B0, C0``, shape (3, 3).

    Each top vertex moves orthogonally to the face it shares with two bottom
    vertices; the sign points away from the polyhedron's centroid.
    """
    v = poly.vertices
    center = _centroid(poly)
    out = []
    for top in (3, 4, 5):
        p, q, r = (v[k] for k in FLEX_FACES[top])
        n = np.cross(q - p, r - p)
        nn = np.linalg.norm(n)
        if nn <= 1e-12 * max(1.0, np.linalg.norm(q - p) * np.linalg.norm(r - p)):
            raise DegenerateFace(f"face {''.join(LABELS[k] for k in FLEX_FACES[top])} is collinear")
        n = n / nn
        if n @ (center - (p + q + r) / 3.0) > 0:
            n = -n
        out.append(n)
    return np.array(out)


def flex_velocities(poly: LabeledPolyhedron) -> np.ndarray:
    """Velocity of every vertex under the flex: zero on the bottom triangle."""
    return np.vstack([np.zeros((3, 3)), flex_directions(poly)])


def flexed(poly: LabeledPolyhedron, t, directions=None) -> LabeledPolyhedron:
    if directions is None:
        directions = flex_directions(poly)
    v = np.array(poly.vertices)
    v[3:] += t * np.asarray(directions)
    return poly.with_vertices(v)


def edge_lengths(poly: LabeledPolyhedron) -> dict:
    v = poly.vertices
    return {edge_name(i, j): float(np.linalg.norm(v[i] - v[j])) for i, j in poly.edges}


def diagonal_lengths(poly: LabeledPolyhedron) -> dict:
    v = poly.vertices
    return {edge_name(i, j): float(np.linalg.norm(v[i] - v[j])) for i, j in poly.diagonals}


def first_order_flex_residual(poly: LabeledPolyhedron) -> float:
    v = poly.vertices
    vel = flex_velocities(poly)
    return float(max(abs((v[i] - v[j]) @ (vel[i] - vel[j])) for i, j in poly.edges))


def rigidity_matrix(poly: LabeledPolyhedron, free=(3, 4, 5)) -> np.ndarray:
    """Rows ``(p_i - p_j)`` per edge, restricted to the coordinates of ``free`` vertices."""
    v = poly.vertices
    col = {k: 3 * n for n, k in enumerate(free)}
    m = np.zeros((len(poly.edges), 3 * len(free)))
    for row, (i, j) in enumerate(poly.edges):
        d = v[i] - v[j]
        if i in col:
            m[row, col[i]:col[i] + 3] = d
        if j in col:
            m[row, col[j]:col[j] + 3] = -d
    return m


def flex_nullspace(poly: LabeledPolyhedron, rel_tol=1e-10) -> np.ndarray:
    """Basis (rows) of first-order flexes with the bottom triangle pinned."""
    m = rigidity_matrix(poly)
    _, s, vt = np.linalg.svd(m)
    cutoff = rel_tol * s[0]
    rank = int(np.sum(s > cutoff))
    return vt[rank:]


def nullspace_agreement(poly: LabeledPolyhedron) -> tuple[int, float]:
    """Null-space dimension and distance of the face-normal flex from it.

    The distance is ``|f - P f|`` for the unit face-normal flex vector ``f``
    and ``P`` the orthogonal projector onto the null space; it equals the
    up-to-sign mismatch of unit vectors when the null space is a line.
    """
    basis = flex_nullspace(poly)
    f = flex_directions(poly).ravel()
    f = f / np.linalg.norm(f)
    if len(basis) == 0:
        return 0, float(np.linalg.norm(f))
    proj = basis.T @ (basis @ f)
    return len(basis), float(np.linalg.norm(f - proj))


def distance_matrix(poly: LabeledPolyhedron) -> np.ndarray:
    v = poly.vertices
    return np.linalg.norm(v[:, None, :] - v[None, :, :], axis=-1)


@dataclass(frozen=True)
class Congruence:
    congruent: bool
    max_deviation: float
    witness: tuple | None

    def __bool__(self) -> bool:
        return self.congruent


def congruence_test(p: LabeledPolyhedron, q: LabeledPolyhedron, tol=1e-9) -> Congruence:
    """Labeled congruence: all 36 pairwise distances agree within ``tol``."""
    diff = np.abs(distance_matrix(p) - distance_matrix(q))
    i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
    dev = float(diff[i, j])
    witness = None if dev <= tol else (LABELS[min(i, j)], LABELS[max(i, j)])
    return Congruence(dev <= tol, dev, witness)
