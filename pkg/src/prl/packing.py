"""Polyhedral metrics and inversive-distance packings on closed triangulated surfaces."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

from prl.circles import CORRECTED, PAPER_VERBATIM, CircleConfiguration, inversive_distance
from prl.errors import DegenerateTriangle, Infeasible, InvalidTriangulation
from prl.lorentz import EPS_MODEL

SPHERICAL = "spherical"
EUCLIDEAN = "euclidean"

CONSISTENCY_TOL = 1e-10


def edge_key(i, j) -> tuple:
    i, j = int(i), int(j)
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Triangulation:
    """Combinatorics of a closed triangulated surface with vertices ``0..n-1``.

    Construction validates the surface: every edge lies on exactly two faces
    and the link of every vertex is a single cycle.
    """

    n: int
    faces: tuple
    edges: tuple = field(init=False)
    edge_faces: dict = field(init=False, repr=False)

    def __post_init__(self):
        faces = tuple(tuple(int(v) for v in f) for f in self.faces)
        object.__setattr__(self, "faces", faces)
        seen = set()
        for k, f in enumerate(faces):
            if len(f) != 3 or len(set(f)) != 3:
                raise InvalidTriangulation(f"face {k} {list(f)} is not a triangle on 3 distinct vertices")
            if any(v < 0 or v >= self.n for v in f):
                raise InvalidTriangulation(f"face {k} {list(f)} references a vertex outside 0..{self.n - 1}")
            key = frozenset(f)
            if key in seen:
                raise InvalidTriangulation(f"face {k} {list(f)} is duplicated")
            seen.add(key)
        edge_faces = defaultdict(list)
        for k, (a, b, c) in enumerate(faces):
            for e in ((a, b), (b, c), (c, a)):
                edge_faces[edge_key(*e)].append(k)
        for e, fs in sorted(edge_faces.items()):
            if len(fs) != 2:
                raise InvalidTriangulation(
                    f"edge {list(e)} lies on {len(fs)} faces {fs}; a closed surface needs exactly 2"
                )
        object.__setattr__(self, "edges", tuple(sorted(edge_faces)))
        object.__setattr__(self, "edge_faces", dict(edge_faces))
        for v in range(self.n):
            self._check_link(v)

    def _check_link(self, v):
        link = [tuple(u for u in f if u != v) for f in self.faces if v in f]
        if not link:
            raise InvalidTriangulation(f"vertex {v} lies on no face")
        adj = defaultdict(list)
        for a, b in link:
            adj[a].append(b)
            adj[b].append(a)
        if any(len(nb) != 2 for nb in adj.values()):
            raise InvalidTriangulation(f"link of vertex {v} is not a cycle")
        start = link[0][0]
        prev, cur, steps = None, start, 0
        while True:
            nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
            prev, cur = cur, nxt
            steps += 1
            if cur == start:
                break
        if steps != len(adj):
            raise InvalidTriangulation(f"vertex {v} is non-manifold: its link has several cycles")

    @property
    def euler_characteristic(self) -> int:
        return self.n - len(self.edges) + len(self.faces)

    def star(self, v) -> list:
        return [k for k, f in enumerate(self.faces) if v in f]


@dataclass
class PackingData:
    """Per-edge inversive distances (default convention) and per-vertex radii."""

    inversive: dict
    radii: np.ndarray

    def __post_init__(self):
        self.radii = np.asarray(self.radii, dtype=float)
        self.inversive = {edge_key(*e): float(v) for e, v in self.inversive.items()}

    def validate(self, tri: Triangulation, geometry=SPHERICAL):
        if len(self.radii) != tri.n:
            raise Infeasible(f"{len(self.radii)} radii for {tri.n} vertices")
        for v, r in enumerate(self.radii):
            upper = np.pi / 2 if geometry == SPHERICAL else np.inf
            if not 0.0 < r < upper:
                raise Infeasible(f"radius of vertex {v} is {r!r}, outside (0, {upper:g})")
        missing = set(tri.edges) - set(self.inversive)
        if missing:
            raise Infeasible(f"no inversive distance for edge {list(min(missing))}")
        extra = set(self.inversive) - set(tri.edges)
        if extra:
            raise Infeasible(f"inversive distance given for non-edge {list(min(extra))}")
        for e, val in self.inversive.items():
            if not val >= -1.0:
                raise Infeasible(f"inversive distance {val!r} on edge {list(e)} is below -1")


@dataclass
class PolyhedralMetric:
    lengths: dict
    geometry: str = SPHERICAL

    def __post_init__(self):
        self.lengths = {edge_key(*e): float(v) for e, v in self.lengths.items()}


def edge_length_spherical(r_u, r_v, inv) -> float:
    """Spherical distance of two circle centers with given radii and inversive distance.

    Raises :class:`Infeasible` when ``cos r_u cos r_v - I sin r_u sin r_v``
    falls outside ``(-1, 1]``.  The value 1 (identical circles) gives length 0.
    """
    arg = np.cos(r_u) * np.cos(r_v) - inv * np.sin(r_u) * np.sin(r_v)
    if not -1.0 + EPS_MODEL < arg <= 1.0 + EPS_MODEL:
        raise Infeasible(
            f"cos l = {arg:.17g} for r = ({r_u!r}, {r_v!r}), I = {inv!r}: no spherical realization"
        )
    return float(np.arccos(min(arg, 1.0)))


def edge_length_euclidean(r_u, r_v, inv) -> float:
    return float(np.sqrt(max(0.0, r_u * r_u + r_v * r_v + 2.0 * r_u * r_v * inv)))


def inversive_from_length(length, r_u, r_v) -> float:
    return float((np.cos(r_u) * np.cos(r_v) - np.cos(length)) / (np.sin(r_u) * np.sin(r_v)))


@dataclass(frozen=True)
class FaceVerdict:
    index: int
    face: tuple
    triangle_margins: tuple
    perimeter_margin: float | None
    valid: bool

    def to_dict(self) -> dict:
        return {"index": self.index, "face": list(self.face),
                "triangle_margins": list(self.triangle_margins),
                "perimeter_margin": self.perimeter_margin, "valid": self.valid}


def face_lengths(tri: Triangulation, lengths: dict, k: int) -> tuple:
    """Side lengths of face ``k``, side ``i`` opposite its ``i``-th vertex."""
    a, b, c = tri.faces[k]
    return lengths[edge_key(b, c)], lengths[edge_key(c, a)], lengths[edge_key(a, b)]


def validate_polyhedral(tri: Triangulation, lengths: dict, spherical=True) -> list:
    """Per-face triangle inequalities and, for spherical metrics, the perimeter bound."""
    verdicts = []
    for k, face in enumerate(tri.faces):
        l1, l2, l3 = face_lengths(tri, lengths, k)
        margins = (l2 + l3 - l1, l3 + l1 - l2, l1 + l2 - l3)
        per = 2.0 * np.pi - (l1 + l2 + l3) if spherical else None
        ok = all(m > 0 for m in margins) and (per is None or per > 0)
        verdicts.append(FaceVerdict(k, face, tuple(float(m) for m in margins),
                                    None if per is None else float(per), bool(ok)))
    return verdicts


def triangle_angles_spherical(l1, l2, l3) -> tuple:
    """Angles of a spherical triangle, each opposite the side of the same index."""
    sides = (l1, l2, l3)
    out = []
    for i in range(3):
        li, lj, lk = sides[i], sides[(i + 1) % 3], sides[(i + 2) % 3]
        den = np.sin(lj) * np.sin(lk)
        if den <= EPS_MODEL:
            raise DegenerateTriangle(f"sides {sides!r}: sin product {den:.3g} too small")
        c = (np.cos(li) - np.cos(lj) * np.cos(lk)) / den
        out.append(float(np.arccos(np.clip(c, -1.0, 1.0))))
    return tuple(out)


def triangle_angles_euclidean(l1, l2, l3) -> tuple:
    sides = (l1, l2, l3)
    out = []
    for i in range(3):
        li, lj, lk = sides[i], sides[(i + 1) % 3], sides[(i + 2) % 3]
        den = 2.0 * lj * lk
        if den <= EPS_MODEL:
            raise DegenerateTriangle(f"sides {sides!r} are degenerate")
        out.append(float(np.arccos(np.clip((lj * lj + lk * lk - li * li) / den, -1.0, 1.0))))
    return tuple(out)


def face_angles(tri: Triangulation, lengths: dict, spherical=True) -> list:
    """Angle at each corner, ``angles[k][i]`` at the ``i``-th vertex of face ``k``."""
    bad = [v for v in validate_polyhedral(tri, lengths, spherical) if not v.valid]
    if bad:
        raise Infeasible(f"face {bad[0].index} {list(bad[0].face)} violates the polyhedral conditions")
    angle_fn = triangle_angles_spherical if spherical else triangle_angles_euclidean
    return [angle_fn(*face_lengths(tri, lengths, k)) for k in range(len(tri.faces))]


def discrete_curvature(tri: Triangulation, lengths: dict, spherical=True) -> np.ndarray:
    """``2 pi`` minus the cone angle at every vertex."""
    total = np.zeros(tri.n)
    for face, angles in zip(tri.faces, face_angles(tri, lengths, spherical)):
        for v, theta in zip(face, angles):
            total[v] += theta
    return 2.0 * np.pi - total


def gauss_bonnet_residual(tri: Triangulation, lengths: dict) -> float:
    """``|sum k + sum (angle sum - pi) - 2 pi chi|`` for a spherical metric."""
    angles = face_angles(tri, lengths, True)
    k = discrete_curvature(tri, lengths, True)
    area = sum(sum(a) - np.pi for a in angles)
    return float(abs(k.sum() + area - 2.0 * np.pi * tri.euler_characteristic))


def metric_from_packing(tri: Triangulation, packing: PackingData, geometry=SPHERICAL) -> PolyhedralMetric:
    packing.validate(tri, geometry)
    length_fn = edge_length_spherical if geometry == SPHERICAL else edge_length_euclidean
    lengths = {}
    for e in tri.edges:
        u, v = e
        try:
            lengths[e] = length_fn(packing.radii[u], packing.radii[v], packing.inversive[e])
        except Infeasible as exc:
            raise Infeasible(f"edge {list(e)}: {exc}") from None
    return PolyhedralMetric(lengths, geometry)


def packing_from_circles(tri: Triangulation, config: CircleConfiguration):
    """Radii, inversive distances and center distances of a circle per vertex.

    Returns ``(PackingData, PolyhedralMetric)``; the inversive distances use the
    default convention.  Raises :class:`Infeasible` if re-deriving an edge
    length from ``(r, I)`` misses the center distance by more than 1e-10.
    """
    if len(config) != tri.n:
        raise ValueError(f"{len(config)} circles for {tri.n} vertices")
    radii = np.array([c.radius for c in config.circles])
    if not np.all(radii < np.pi / 2):
        raise Infeasible("circle radii must be below pi/2")
    inv, lengths = {}, {}
    for u, v in tri.edges:
        cu, cv = config.circles[u], config.circles[v]
        inv[(u, v)] = inversive_distance(cu, cv, CORRECTED)
        lengths[(u, v)] = float(np.arccos(np.clip(cu.center @ cv.center, -1.0, 1.0)))
    packing = PackingData(inv, radii)
    metric = PolyhedralMetric(lengths, SPHERICAL)
    err = rederivation_error(tri, packing, metric)
    if err > CONSISTENCY_TOL:
        raise Infeasible(f"edge lengths re-derived from (r, I) deviate by {err:.3g}")
    return packing, metric


def rederivation_error(tri: Triangulation, packing: PackingData, metric: PolyhedralMetric) -> float:
    worst = 0.0
    for u, v in tri.edges:
        l = edge_length_spherical(packing.radii[u], packing.radii[v], packing.inversive[(u, v)])
        worst = max(worst, abs(l - metric.lengths[(u, v)]))
    return float(worst)


def inversive_in_convention(value, convention=CORRECTED) -> float:
    if convention == CORRECTED:
        return float(value)
    if convention == PAPER_VERBATIM:
        return -float(value)
    raise ValueError(f"unknown convention {convention!r}")


# -- JSON input ---------------------------------------------------------------

def load_packing_document(doc: dict):
    """Parse ``{"faces", "inversive", "radii", "geometry"}`` into model objects.

    Returns ``(Triangulation, PackingData, geometry)``.  Malformed input raises
    :class:`InvalidTriangulation` (combinatorics) or ``ValueError`` with a
    message naming the offending simplex.
    """
    for key in ("faces", "inversive", "radii"):
        if key not in doc:
            raise ValueError(f"missing field {key!r}")
    geometry = doc.get("geometry", SPHERICAL)
    if geometry not in (SPHERICAL, EUCLIDEAN):
        raise ValueError(f"unsupported geometry {geometry!r}")
    radii = [float(r) for r in doc["radii"]]
    tri = Triangulation(len(radii), tuple(tuple(f) for f in doc["faces"]))
    entries = doc["inversive"]
    keys = [edge_key(*item["edge"]) for item in entries]
    dup = [e for e, c in Counter(keys).items() if c > 1]
    if dup:
        raise ValueError(f"edge {list(dup[0])} listed more than once in 'inversive'")
    inv = {edge_key(*item["edge"]): float(item["value"]) for item in entries}
    return tri, PackingData(inv, np.array(radii)), geometry


def evaluate_packing_document(doc: dict) -> dict:
    """Metric, face verdicts, curvature and Gauss-Bonnet residual of a packing document."""
    tri, packing, geometry = load_packing_document(doc)
    spherical = geometry == SPHERICAL
    metric = metric_from_packing(tri, packing, geometry)
    verdicts = validate_polyhedral(tri, metric.lengths, spherical)
    result = {
        "geometry": geometry,
        "vertices": tri.n,
        "edges": len(tri.edges),
        "faces": len(tri.faces),
        "euler_characteristic": tri.euler_characteristic,
        "lengths": [{"edge": list(e), "length": metric.lengths[e]} for e in tri.edges],
        "face_verdicts": [v.to_dict() for v in verdicts],
        "valid": all(v.valid for v in verdicts),
        "curvature": None,
        "gauss_bonnet_residual": None,
    }
    if result["valid"]:
        result["curvature"] = discrete_curvature(tri, metric.lengths, spherical).tolist()
        if spherical:
            result["gauss_bonnet_residual"] = gauss_bonnet_residual(tri, metric.lengths)
    return result


def octahedron() -> Triangulation:
    """Octahedron on ``+-e_i`` with vertex order ``(+x, -x, +y, -y, +z, -z)``."""
    faces = [(0, 2, 4), (2, 1, 4), (1, 3, 4), (3, 0, 4), (2, 0, 5), (1, 2, 5), (3, 1, 5), (0, 3, 5)]
    return Triangulation(6, tuple(faces))


def tetrahedron() -> Triangulation:
    return Triangulation(4, ((0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)))
