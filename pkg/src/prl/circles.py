"""Circles on the unit sphere as points of de Sitter space.

A Klein-exterior point ``A`` is the pole of a plane cutting the sphere in a
circle with center ``A/|A|`` and angular radius ``arccos(1/|A|)``.  Its
canonical lift is ``(cos r, c) / sin r``, so Minkowski products of lifts are
inversive distances of circles (up to sign), and the Gram matrix of a labeled
configuration is a complete invariant under the Möbius group once the lifts
span R^4_1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from prl.errors import RankDeficient
from prl.lorentz import minkowski_inner

CORRECTED = "corrected"
PAPER_VERBATIM = "paper-verbatim"
CONVENTIONS = (CORRECTED, PAPER_VERBATIM)

MOBIUS_TOL = 1e-10


@dataclass(frozen=True)
class SphericalCircle:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.array(self.center, dtype=float)
        if c.shape != (3,) or abs(np.linalg.norm(c) - 1.0) > 1e-12:
            raise ValueError(f"center must be a unit 3-vector, got {self.center!r}")
        if not 0.0 < self.radius < np.pi:
            raise ValueError(f"radius must lie in (0, pi), got {self.radius!r}")
        c.flags.writeable = False
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    def points(self, n=64) -> np.ndarray:
        """``n`` evenly spaced points on the circle."""
        c = self.center
        helper = np.eye(3)[int(np.argmin(np.abs(c)))]
        e1 = np.cross(c, helper)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(c, e1)
        s = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        return (np.cos(self.radius) * c
                + np.sin(self.radius) * (np.outer(np.cos(s), e1) + np.outer(np.sin(s), e2)))


def dual_circle(x) -> SphericalCircle:
    """Ideal boundary of the hyperbolic plane dual to a de Sitter point."""
    x = np.asarray(x, dtype=float)
    spatial = x[1:]
    # tan r = sqrt(|A|^2 - 1) = 1 / x0 for a unit lift
    return SphericalCircle(spatial / np.linalg.norm(spatial), float(np.arctan2(1.0, x[0])))


def circle_lift(circle: SphericalCircle) -> np.ndarray:
    """Canonical de Sitter point of a circle with radius below pi/2."""
    if not circle.radius < np.pi / 2:
        raise ValueError("only circles of radius < pi/2 have an upper-sheet lift")
    return np.concatenate(([np.cos(circle.radius)], circle.center)) / np.sin(circle.radius)


def inversive_distance(c1: SphericalCircle, c2: SphericalCircle, convention=CORRECTED) -> float:
    """Inversive distance of two spherical circles.

    With the default convention tangent circles give 1, orthogonal circles 0,
    identical circles -1 and disjoint circles values above 1.
    ``"paper-verbatim"`` returns the negation.
    """
    cos_l = float(np.clip(c1.center @ c2.center, -1.0, 1.0))
    value = ((np.cos(c1.radius) * np.cos(c2.radius) - cos_l)
             / (np.sin(c1.radius) * np.sin(c2.radius)))
    if convention == CORRECTED:
        return float(value)
    if convention == PAPER_VERBATIM:
        return float(-value)
    raise ValueError(f"unknown convention {convention!r}")


def inversive_distance_via_gram(x, y) -> float:
    return float(-minkowski_inner(x, y))


@dataclass(frozen=True)
class CircleConfiguration:
    """Labeled circles together with their canonical lifts (one row per label)."""

    labels: tuple
    circles: tuple
    lifts: np.ndarray

    @classmethod
    def from_lifts(cls, labels, lifts) -> "CircleConfiguration":
        lifts = np.array(lifts, dtype=float).reshape(-1, 4)
        lifts.flags.writeable = False
        return cls(tuple(labels), tuple(dual_circle(x) for x in lifts), lifts)

    @classmethod
    def from_circles(cls, labels, circles) -> "CircleConfiguration":
        circles = tuple(circles)
        lifts = np.array([circle_lift(c) for c in circles]).reshape(-1, 4)
        lifts.flags.writeable = False
        return cls(tuple(labels), circles, lifts)

    def __len__(self) -> int:
        return len(self.labels)

    def transformed(self, m) -> "CircleConfiguration":
        """Image under a linear map of R^4_1 (expected to preserve form and upper sheet)."""
        return CircleConfiguration.from_lifts(self.labels, self.lifts @ np.asarray(m, float).T)

    def lift_consistency(self) -> float:
        """Max coordinate gap between each lift and the lift of its dual circle."""
        if not len(self):
            return 0.0
        again = np.array([circle_lift(c) for c in self.circles])
        return float(np.max(np.abs(again - self.lifts)))


def gram_matrix(config) -> np.ndarray:
    """Symmetric matrix of Minkowski products of the lifts."""
    lifts = config.lifts if isinstance(config, CircleConfiguration) else np.asarray(config, float)
    g = -np.outer(lifts[:, 0], lifts[:, 0]) + lifts[:, 1:] @ lifts[:, 1:].T
    return 0.5 * (g + g.T)


@dataclass(frozen=True)
class MobiusVerdict:
    equivalent: bool
    permutation: tuple
    max_deviation: float
    witness_entry: tuple | None
    n_checked: int

    @property
    def verdict(self) -> str:
        return "equivalent" if self.equivalent else "inequivalent"

    def to_dict(self, labels=None) -> dict:
        entry = self.witness_entry
        if entry is not None and labels is not None:
            entry = [labels[entry[0]], labels[entry[1]]]
        perm = list(self.permutation)
        if labels is not None:
            perm = [labels[k] for k in perm]
        return {"verdict": self.verdict, "permutation": perm,
                "max_deviation": self.max_deviation,
                "witness_entry": list(entry) if entry is not None else None,
                "n_checked": self.n_checked}


def _check_rank(config: CircleConfiguration, name: str):
    rank = int(np.linalg.matrix_rank(config.lifts)) if len(config) else 0
    if rank < 4:
        raise RankDeficient(f"{name}: lifts span rank {rank} < 4; Gram comparison is inconclusive")


def mobius_equivalent(cfg1, cfg2, autos=None, tol=MOBIUS_TOL) -> MobiusVerdict:
    """Decide Möbius equivalence up to the relabelings in ``autos``.

    ``autos`` is a list of index permutations ``sigma`` (``sigma[i]`` is the
    label of ``cfg2`` matched with label ``i`` of ``cfg1``); the identity is
    always included.  The verdict carries the best permutation, its maximal
    Gram deviation and the entry attaining it.
    """
    n = len(cfg1)
    if len(cfg2) != n:
        raise ValueError("configurations have different sizes")
    _check_rank(cfg1, "first configuration")
    _check_rank(cfg2, "second configuration")
    identity = tuple(range(n))
    perms = [identity] + [tuple(p) for p in (autos or []) if tuple(p) != identity]
    g1, g2 = gram_matrix(cfg1), gram_matrix(cfg2)
    best = None
    for sigma in perms:
        s = np.asarray(sigma)
        diff = np.abs(g1 - g2[np.ix_(s, s)])
        k = int(np.argmax(diff))
        dev = float(diff.flat[k])
        if best is None or dev < best[1]:
            i, j = divmod(k, n)
            best = (sigma, dev, (min(i, j), max(i, j)))
    sigma, dev, entry = best
    ok = dev <= tol
    return MobiusVerdict(ok, sigma, dev, None if ok else entry, len(perms))


def graph_automorphisms(n, edges) -> list:
    """All vertex permutations of ``range(n)`` preserving the edge set (brute force)."""
    edge_set = {frozenset(e) for e in edges}
    found = []
    for perm in itertools.permutations(range(n)):
        if all(frozenset((perm[i], perm[j])) in edge_set for i, j in edges):
            found.append(perm)
    return found
