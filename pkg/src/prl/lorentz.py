"""Minkowski space R^4_1 with signature (-,+,+,+).

Vectors are plain ``numpy`` arrays whose last axis has length 4, ordered
``(x0, x1, x2, x3)``.  Hyperbolic space is the upper sheet of
``<x,x> = -1`` and upper de Sitter space is ``{<x,x> = 1, x0 > 0}``;
both are identified with regions of R^3 through the Klein chart
``x -> (x1, x2, x3) / x0``.  Points of de Sitter space map to the
exterior of the closed unit ball, hyperbolic points to its interior.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from prl.errors import NotOnHyperboloid, PointInsideBall

EPS_MODEL = 1e-12
EPS_BALL = 1e-10

SIGNATURE = np.diag([-1.0, 1.0, 1.0, 1.0])


def minkowski_inner(x, y):
    """Return ``-x0*y0 + x1*y1 + x2*y2 + x3*y3`` over the last axis."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return -x[..., 0] * y[..., 0] + np.sum(x[..., 1:] * y[..., 1:], axis=-1)


def minkowski_norm2(x):
    return minkowski_inner(x, x)


def is_de_sitter(x, tol=EPS_MODEL) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(abs(minkowski_norm2(x) - 1.0) <= tol and x[0] > 0)


def is_hyperbolic(x, tol=EPS_MODEL) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(abs(minkowski_norm2(x) + 1.0) <= tol and x[0] > 0)


def de_sitter_point(x, tol=EPS_MODEL) -> np.ndarray:
    """Validate ``x`` as a point of upper de Sitter space and return it as an array."""
    v = np.array(x, dtype=float)
    if v.shape != (4,) or not np.all(np.isfinite(v)):
        raise NotOnHyperboloid(f"expected 4 finite coordinates, got {x!r}")
    if not is_de_sitter(v, tol):
        raise NotOnHyperboloid(
            f"<x,x> = {minkowski_norm2(v):.17g}, x0 = {v[0]:.17g}; "
            "not on the upper de Sitter sheet"
        )
    return v


def hyperbolic_point(x, tol=EPS_MODEL) -> np.ndarray:
    v = np.array(x, dtype=float)
    if v.shape != (4,) or not np.all(np.isfinite(v)):
        raise NotOnHyperboloid(f"expected 4 finite coordinates, got {x!r}")
    if not is_hyperbolic(v, tol):
        raise NotOnHyperboloid(
            f"<x,x> = {minkowski_norm2(v):.17g}, x0 = {v[0]:.17g}; "
            "not on the upper hyperboloid sheet"
        )
    return v


def hyperboloid_lift(point, eps_ball=EPS_BALL) -> np.ndarray:
    """Canonical de Sitter point over a Klein-chart point outside the unit ball.

    Parameters
    ----------
    point : array_like, shape (3,)
        Euclidean point ``A`` with ``|A| > 1 + eps_ball``.

    Returns
    -------
    ndarray, shape (4,)
        ``(1, A) / sqrt(|A|^2 - 1)``, the unique point of upper de Sitter
        space whose Klein image is ``A``.

    Raises
    ------
    PointInsideBall
        If ``A`` is not strictly outside the closed ball.
    """
    a = np.asarray(point, dtype=float)
    n = float(np.linalg.norm(a))
    if not n > 1.0 + eps_ball:
        raise PointInsideBall(f"|A| = {n:.17g} is not > 1 + {eps_ball:g}")
    return np.concatenate(([1.0], a)) / np.sqrt(n * n - 1.0)


def hyperbolic_lift(point) -> np.ndarray:
    """Inverse of :func:`klein_project_hyperbolic` for a point of the open unit ball."""
    a = np.asarray(point, dtype=float)
    n2 = float(a @ a)
    if not n2 < 1.0:
        raise ValueError(f"|A|^2 = {n2:.17g} is not inside the unit ball")
    return np.concatenate(([1.0], a)) / np.sqrt(1.0 - n2)


def klein_project(x) -> np.ndarray:
    """Klein chart of upper de Sitter space; the image lies outside the unit ball."""
    x = np.asarray(x, dtype=float)
    return x[..., 1:] / x[..., :1]


def klein_project_hyperbolic(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[..., 1:] / x[..., :1]


class SeparationKind(str, Enum):
    TIMELIKE = "time-like"
    SPACELIKE = "space-like"
    COINCIDENT = "coincident"
    DEGENERATE_TANGENT = "degenerate-tangent"


class SignFlag(str, Enum):
    ALIGNED = "aligned"
    ANTI_ALIGNED = "anti-aligned"


@dataclass(frozen=True)
class DsSeparation:
    """Classified separation of two de Sitter points.

    For space-like pairs ``value`` is the magnitude of the purely imaginary
    distance (in ``[0, pi]``).  For time-like pairs it is ``arcosh|<x,y>|``
    and ``sign_flag`` records the sign of ``<x,y>``.
    """

    kind: SeparationKind
    value: float
    sign_flag: SignFlag | None = None
    inner: float = float("nan")


def ds_separation(x, y, eps_model=EPS_MODEL) -> DsSeparation:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    q = float(minkowski_inner(x, y))
    if np.max(np.abs(x - y)) <= eps_model:
        return DsSeparation(SeparationKind.COINCIDENT, 0.0, None, q)
    if abs(abs(q) - 1.0) <= eps_model:
        flag = SignFlag.ALIGNED if q > 0 else SignFlag.ANTI_ALIGNED
        return DsSeparation(SeparationKind.DEGENERATE_TANGENT, 0.0, flag, q)
    if abs(q) < 1.0:
        return DsSeparation(SeparationKind.SPACELIKE, float(np.arccos(q)), None, q)
    if q > 1.0:
        return DsSeparation(SeparationKind.TIMELIKE, float(np.arccosh(q)), SignFlag.ALIGNED, q)
    return DsSeparation(SeparationKind.TIMELIKE, float(np.arccosh(-q)), SignFlag.ANTI_ALIGNED, q)


def segment_min_norm2(p, q) -> float:
    """Minimum of ``|p + s (q - p)|^2`` over ``s`` in [0, 1], in closed form."""
    p = np.asarray(p, dtype=float)
    d = np.asarray(q, dtype=float) - p
    dd = float(d @ d)
    if dd == 0.0:
        return float(p @ p)
    s = min(1.0, max(0.0, -float(p @ d) / dd))
    m = p + s * d
    return float(m @ m)


def line_min_norm2(p, q) -> float:
    """Minimum of ``|p + s (q - p)|^2`` over all real ``s``."""
    p = np.asarray(p, dtype=float)
    d = np.asarray(q, dtype=float) - p
    dd = float(d @ d)
    if dd == 0.0:
        return float(p @ p)
    m = p - (float(p @ d) / dd) * d
    return float(m @ m)


# -- Lorentz transformations ------------------------------------------------

def rotation(axis, angle) -> np.ndarray:
    """Spatial rotation of R^4_1 about a 3D ``axis`` (Rodrigues formula)."""
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    r3 = np.eye(3) + np.sin(angle) * kx + (1.0 - np.cos(angle)) * (kx @ kx)
    m = np.eye(4)
    m[1:, 1:] = r3
    return m


def boost(direction, rapidity) -> np.ndarray:
    """Pure boost with the given rapidity along a spatial ``direction``."""
    n = np.asarray(direction, dtype=float)
    n = n / np.linalg.norm(n)
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    m = np.eye(4)
    m[0, 0] = ch
    m[0, 1:] = sh * n
    m[1:, 0] = sh * n
    m[1:, 1:] += (ch - 1.0) * np.outer(n, n)
    return m


def is_lorentz(m, tol=1e-10) -> bool:
    m = np.asarray(m, dtype=float)
    return bool(m.shape == (4, 4) and np.max(np.abs(m.T @ SIGNATURE @ m - SIGNATURE)) <= tol)


def is_time_orientation_preserving(m, tol=1e-10) -> bool:
    return is_lorentz(m, tol) and float(m[0, 0]) > 0


def random_rotation3(rng) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_lorentz(rng, max_rapidity=0.3) -> np.ndarray:
    """Random orthochronous, proper Lorentz map: a boost composed with a rotation."""
    rot = np.eye(4)
    rot[1:, 1:] = random_rotation3(rng)
    b = boost(rng.normal(size=3), rng.uniform(0.0, max_rapidity))
    return b @ rot


def random_exterior_points(rng, n, rmin=1.1, rmax=3.0) -> np.ndarray:
    """``n`` Klein-chart points with norms uniform in ``[rmin, rmax]``."""
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return d * rng.uniform(rmin, rmax, size=(n, 1))


def random_de_sitter(rng, n, rmin=1.1, rmax=3.0) -> np.ndarray:
    pts = random_exterior_points(rng, n, rmin, rmax)
    return np.array([hyperboloid_lift(p) for p in pts])
