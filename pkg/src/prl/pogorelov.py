"""The de Sitter Pogorelov map and checks of its transport properties.

``phi(x, y) = 2 (x_vec, y_vec) / (x0 + y0)`` sends a pair of upper de Sitter
points to a pair of Euclidean points.  The identity behind everything here is

    |xi - xi'|^2 - |eta - eta'|^2 = -8 (<x,x'> - <y,y'>) / ((x0+y0)(x0'+y0'))

for ``(xi, eta) = phi(x, y)`` and ``(xi', eta') = phi(x', y')``: equal
Minkowski products on the de Sitter side are exactly equal Euclidean
distances on the other.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from prl import lorentz
from prl.errors import DomainViolation, InsufficientSamples, NormalizationFailure, OutOfDomain
from prl.lorentz import minkowski_inner, minkowski_norm2

logger = logging.getLogger(__name__)

ISOMETRY_FIT_TOL = 1e-8
TRANSPORT_TOL = 1e-10
SPEED_SAMPLE_TIMES = (0.0, 0.25, 0.5, 0.75, 1.0)


def phi(x, y) -> tuple[np.ndarray, np.ndarray]:
    """Pogorelov map of a pair of upper de Sitter points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    s = x[0] + y[0]
    return 2.0 * x[1:] / s, 2.0 * y[1:] / s


def g_function(a, b) -> float:
    """``-(a^2 - b^2)^2 + 8 (a^2 + b^2 - 2)``; positive on the certified domain."""
    a2, b2 = a * a, b * b
    return -(a2 - b2) ** 2 + 8.0 * (a2 + b2 - 2.0)


def in_phi_image(xi, eta) -> bool:
    """Membership in ``{|xi| > 1, |eta| > 1, -4 < |xi|^2 - |eta|^2 < 4}``.

    That set lies inside the image of :func:`phi`; on it ``g(|xi|, |eta|)``
    is positive, which is asserted.
    """
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    a2, b2 = float(xi @ xi), float(eta @ eta)
    inside = a2 > 1.0 and b2 > 1.0 and -4.0 < a2 - b2 < 4.0
    if inside:
        assert g_function(np.sqrt(a2), np.sqrt(b2)) > 0.0
    return inside


def _normalize_spacelike(v) -> np.ndarray:
    n2 = float(minkowski_norm2(v))
    if not n2 > 0.0 or not v[0] > 0.0:
        raise NormalizationFailure(
            f"pre-normalized vector {v!r} has <v,v> = {n2:.17g}; cannot reach the upper de Sitter sheet"
        )
    return v / np.sqrt(n2)


def phi_inverse(xi, eta) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`phi` on the certified domain.

    The first point is the positive rescaling of ``(4 - |eta|^2 + |xi|^2, 4 xi)``
    onto ``<v,v> = 1``, the second that of ``(4 - |xi|^2 + |eta|^2, 4 eta)``.
    Both share the scale ``1 / sqrt(g(|xi|, |eta|))``.
    """
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if not in_phi_image(xi, eta):
        raise OutOfDomain(
            f"|xi|^2 = {xi @ xi:.17g}, |eta|^2 = {eta @ eta:.17g} outside the certified image"
        )
    d = float(xi @ xi - eta @ eta)
    x = _normalize_spacelike(np.concatenate(([4.0 + d], 4.0 * xi)))
    y = _normalize_spacelike(np.concatenate(([4.0 - d], 4.0 * eta)))
    return x, y


@dataclass
class TransportReport:
    """Outcome of one sampled transport check."""

    name: str
    n_samples: int
    n_discarded: int
    max_residual: float
    tol: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def fit_isometry(src, dst):
    """Least-squares orthogonal alignment ``dst ~ R @ src + t`` (reflections allowed).

    Returns ``(R, t, max_residual)``.
    """
    src = np.asarray(src, dtype=float)
    dst = np.asarray(dst, dtype=float)
    cs, cd = src.mean(axis=0), dst.mean(axis=0)
    h = (src - cs).T @ (dst - cd)
    u, _, vt = np.linalg.svd(h)
    r = vt.T @ u.T
    t = cd - r @ cs
    res = np.linalg.norm(src @ r.T + t - dst, axis=1)
    return r, t, float(res.max())


def verify_isometry_transport(alpha, samples=200, seed=0) -> TransportReport:
    """Check that ``phi(x, alpha x)`` has second component a Euclidean isometry of the first."""
    alpha = np.asarray(alpha, dtype=float)
    if not lorentz.is_time_orientation_preserving(alpha):
        raise ValueError("alpha must preserve the Minkowski form and have positive (0,0) entry")
    rng = np.random.default_rng(seed)
    ys, yps = [], []
    discarded = 0
    for x in lorentz.random_de_sitter(rng, samples):
        ax = alpha @ x
        if not (ax[0] > 0 and in_phi_image(lorentz.klein_project(x), lorentz.klein_project(ax))):
            discarded += 1
            continue
        y, yp = phi(x, ax)
        ys.append(y)
        yps.append(yp)
    if len(ys) < 4:
        raise InsufficientSamples(f"only {len(ys)} admissible samples")
    r, t, res = fit_isometry(ys, yps)
    return TransportReport(
        name="isometry-transport",
        n_samples=len(ys),
        n_discarded=discarded,
        max_residual=res,
        tol=ISOMETRY_FIT_TOL,
        passed=res <= ISOMETRY_FIT_TOL,
        details={"beta_linear": r.tolist(), "beta_translation": t.tolist(),
                 "beta_det": float(np.linalg.det(r))},
    )


def random_timelike_segment(rng) -> tuple[np.ndarray, np.ndarray]:
    """Pair of canonical lifts whose Klein chord crosses the open unit ball."""
    while True:
        a = lorentz.random_exterior_points(rng, 1, 1.1, 3.0)[0]
        b = -a / np.linalg.norm(a) * rng.uniform(1.1, 3.0) + rng.normal(scale=0.3, size=3)
        if np.linalg.norm(b) > 1.1 and lorentz.segment_min_norm2(a, b) < 0.9:
            return lorentz.hyperboloid_lift(a), lorentz.hyperboloid_lift(b)


def _phi_pair_or_raise(x, xp):
    if not xp[0] > 0:
        raise DomainViolation("image point left the upper sheet")
    xi, eta = phi(x, xp)
    if not in_phi_image(xi, eta):
        raise DomainViolation("pair outside the certified image")
    return xi, eta


def verify_timelike_length_transport(segments=None, seed=0, n_pairs=200) -> TransportReport:
    """Equal-length time-like segments map to equal-length Euclidean segments.

    Each pair is ``([x, y], [Lx, Ly])`` with ``L`` a seeded random orthochronous
    Lorentz map, so both segments have the same de Sitter length.  Pairs whose
    images leave the certified domain are discarded and counted; sampling
    continues until ``n_pairs`` pairs have been checked.
    """
    rng = np.random.default_rng(seed)
    if segments is None:
        base = [(lorentz.hyperboloid_lift([2.0, 0, 0]), lorentz.hyperboloid_lift([-2.0, 0, 0]))]
        base += [random_timelike_segment(rng) for _ in range(19)]
    else:
        base = [(np.asarray(x, float), np.asarray(y, float)) for x, y in segments]
    for x, y in base:
        if lorentz.ds_separation(x, y).kind is not lorentz.SeparationKind.TIMELIKE:
            raise ValueError("base segment is not time-like")
    worst = 0.0
    used = discarded = 0
    for k in range(10 * n_pairs):
        if used == n_pairs:
            break
        x, y = base[k % len(base)]
        m = lorentz.random_lorentz(rng)
        xp, yp = m @ x, m @ y
        try:
            p1x, p2x = _phi_pair_or_raise(x, xp)
            p1y, p2y = _phi_pair_or_raise(y, yp)
        except DomainViolation as exc:
            logger.debug("discarding sample %d: %s", k, exc)
            discarded += 1
            continue
        dev = abs(np.linalg.norm(p1x - p1y) - np.linalg.norm(p2x - p2y))
        worst = max(worst, float(dev))
        used += 1
    return TransportReport(
        name="timelike-length-transport",
        n_samples=used,
        n_discarded=discarded,
        max_residual=worst,
        tol=TRANSPORT_TOL,
        passed=used == n_pairs and worst <= TRANSPORT_TOL,
    )


def _unit_spacelike_orthogonal(rng, u):
    while True:
        v = rng.normal(size=4)
        w = v - minkowski_inner(v, u) * u
        n2 = minkowski_norm2(w)
        if n2 > 0.1:
            return w / np.sqrt(n2)


def spacelike_geodesic(u, w, speed):
    """``s -> cos(speed s) u + sin(speed s) w`` for orthonormal space-like ``u, w``."""
    return lambda s: np.cos(speed * s) * u + np.sin(speed * s) * w


def random_spacelike_geodesic(rng, speed):
    while True:
        u = lorentz.random_de_sitter(rng, 1, 1.2, 2.5)[0]
        w = _unit_spacelike_orthogonal(rng, u)
        g = spacelike_geodesic(u, w, speed)
        if all(g(s)[0] > 0 for s in np.linspace(0.0, 1.0, 33)):
            return g


def _line_deviation(pts) -> float:
    pts = np.asarray(pts)
    d = pts[-1] - pts[0]
    n = np.linalg.norm(d)
    if n == 0.0:
        return float(np.max(np.linalg.norm(pts - pts[0], axis=1)))
    d = d / n
    rel = pts - pts[0]
    perp = rel - np.outer(rel @ d, d)
    return float(np.max(np.linalg.norm(perp, axis=1)))


def speed_transport_residuals(g1, g2, times=SPEED_SAMPLE_TIMES):
    """Collinearity and equal-speed residuals of ``phi(g1(s), g2(s))``.

    Raises :class:`DomainViolation` if a sample leaves the certified domain.
    """
    pairs = [_phi_pair_or_raise(g1(s), g2(s)) for s in times]
    xi = np.array([p[0] for p in pairs])
    eta = np.array([p[1] for p in pairs])
    collinear = max(_line_deviation(xi), _line_deviation(eta))
    dxi = np.linalg.norm(xi[:, None, :] - xi[None, :, :], axis=-1)
    deta = np.linalg.norm(eta[:, None, :] - eta[None, :, :], axis=-1)
    return collinear, float(np.max(np.abs(dxi - deta)))


def verify_spacelike_speed_transport(seed=0, samples=100, related=False) -> TransportReport:
    """Space-like geodesics at equal speed map to straight segments at equal speed.

    With ``related=True`` the second geodesic is a Lorentz image of the first.
    """
    rng = np.random.default_rng(seed)
    worst_line = worst_speed = 0.0
    used = discarded = 0
    for k in range(10 * samples):
        if used == samples:
            break
        speed = rng.uniform(0.05, 0.5)
        g1 = random_spacelike_geodesic(rng, speed)
        if related:
            m = lorentz.random_lorentz(rng)
            g2 = lambda s, m=m, g1=g1: m @ g1(s)
        else:
            g2 = random_spacelike_geodesic(rng, speed)
        try:
            line, sp = speed_transport_residuals(g1, g2)
        except DomainViolation as exc:
            logger.debug("discarding geodesic pair %d: %s", k, exc)
            discarded += 1
            continue
        worst_line = max(worst_line, line)
        worst_speed = max(worst_speed, sp)
        used += 1
    worst = max(worst_line, worst_speed)
    return TransportReport(
        name="spacelike-speed-transport",
        n_samples=used,
        n_discarded=discarded,
        max_residual=worst,
        tol=TRANSPORT_TOL,
        passed=used == samples and worst <= TRANSPORT_TOL,
        details={"max_line_deviation": worst_line, "max_speed_deviation": worst_speed},
    )
