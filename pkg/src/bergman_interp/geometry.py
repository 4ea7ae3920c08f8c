"""Geometry of the unit disk and the unit ball of C^n.

Points are complex numpy arrays whose last axis holds the ``n`` coordinates,
so a batch of disk points has shape ``(N, 1)``. A bare Python scalar is read
as a single disk point.

The invariant distance used throughout is the Kobayashi distance of the ball,
``beta(z, w) = artanh |phi_z(w)|`` where ``phi_z`` is the involutive Moebius
automorphism exchanging 0 and ``z``. Its hyperbolic tangent, the pseudo-distance
``|phi_z(w)|``, is what ball membership and lattice construction compare.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

#: Points with Euclidean norm at or above ``1 - BOUNDARY_TOL`` count as boundary points.
BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class DomainSpec:
    """The unit ball of C^n (the disk when ``n == 1``)."""

    n: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"complex dimension must be a positive integer, got {self.n!r}")

    @classmethod
    def disk(cls) -> "DomainSpec":
        return cls(1)

    @classmethod
    def ball(cls, n: int) -> "DomainSpec":
        return cls(n)

    @property
    def name(self) -> str:
        return "disk" if self.n == 1 else "ball"

    @property
    def lebesgue_volume(self) -> float:
        """Lebesgue volume ``pi^n / n!`` of the unit ball."""
        return math.pi**self.n / math.factorial(self.n)

    @property
    def kernel_norm(self) -> float:
        """Constant ``c_n = n! / pi^n`` in ``K(z, w) = c_n (1 - <z, w>)^-(n+1)``."""
        return math.factorial(self.n) / math.pi**self.n

    def to_dict(self) -> dict:
        if self.n == 1:
            return {"domain": "disk", "n": 1}
        return {"domain": "ball", "n": self.n}

    @classmethod
    def from_dict(cls, data: dict) -> "DomainSpec":
        kind = data.get("domain", "ball")
        if kind == "disk":
            if data.get("n", 1) != 1:
                raise ValueError("the disk has complex dimension 1")
            return cls(1)
        if kind != "ball":
            raise ValueError(f"unknown domain {kind!r}")
        return cls(int(data["n"]))


def as_point(z) -> np.ndarray:
    """Return ``z`` as a complex array with a trailing coordinate axis."""
    a = np.asarray(z, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1)
    return a


def disk_points(values) -> np.ndarray:
    """Wrap complex numbers as disk points, shape ``(..., 1)``."""
    return np.asarray(values, dtype=complex)[..., None]


def inner(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Hermitian inner product ``<z, w> = sum z_i conj(w_i)`` over the last axis."""
    return np.sum(z * np.conj(w), axis=-1)


def norm_sq(z: np.ndarray) -> np.ndarray:
    return np.sum(z.real**2 + z.imag**2, axis=-1)


def check_interior(z) -> np.ndarray:
    z = as_point(z)
    r = np.sqrt(norm_sq(z))
    if np.any(~np.isfinite(r)) or np.any(r >= 1.0 - BOUNDARY_TOL):
        raise DomainError(
            f"point(s) on or outside the boundary (max norm {float(np.max(r)):.17g})"
        )
    return z


def boundary_distance(z) -> np.ndarray | float:
    """Euclidean distance ``1 - |z|`` from ``z`` to the unit sphere."""
    z = check_interior(z)
    d = 1.0 - np.sqrt(norm_sq(z))
    return float(d) if np.ndim(d) == 0 else d


def mobius(a, z) -> np.ndarray:
    """Evaluate the involutive automorphism ``phi_a`` at ``z``.

    ``phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>)`` with ``P_a`` the
    orthogonal projection onto ``C a``, ``Q_a = I - P_a`` and
    ``s_a = sqrt(1 - |a|^2)``. On the disk this is ``(a - z) / (1 - conj(a) z)``.
    ``a`` and ``z`` broadcast against each other.
    """
    a = check_interior(a)
    z = check_interior(z)
    aa = norm_sq(a)
    za = inner(z, a)
    safe = np.where(aa > 0.0, aa, 1.0)
    pz = np.where((aa > 0.0)[..., None], (za / safe)[..., None] * a, 0.0)
    s = np.sqrt(1.0 - aa)[..., None]
    return (a - pz - s * (z - pz)) / (1.0 - za)[..., None]


def _wedge_sq(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    # |z|^2 |w|^2 - |<z, w>|^2 as a sum of squares, so no cancellation
    n = z.shape[-1]
    total = np.zeros(np.broadcast_shapes(z.shape[:-1], w.shape[:-1]))
    for i in range(n):
        for j in range(i + 1, n):
            t = z[..., i] * w[..., j] - z[..., j] * w[..., i]
            total = total + t.real**2 + t.imag**2
    return total


def pseudo_distance(z, w) -> np.ndarray | float:
    """Moebius-invariant pseudo-distance ``|phi_z(w)|`` (broadcasting)."""
    z = check_interior(z)
    w = check_interior(w)
    diff = w - z
    num = norm_sq(diff) - _wedge_sq(z, diff)
    den = np.abs(1.0 - inner(w, z)) ** 2
    rho = np.sqrt(np.clip(num, 0.0, None) / den)
    rho = np.minimum(rho, 1.0 - 1e-16)
    return float(rho) if np.ndim(rho) == 0 else rho


def pseudo_distance_matrix(zs, ws) -> np.ndarray:
    """All pairwise pseudo-distances between two point batches, shape ``(N, M)``."""
    zs = np.atleast_2d(check_interior(zs))
    ws = np.atleast_2d(check_interior(ws))
    return pseudo_distance(zs[:, None, :], ws[None, :, :])


def kobayashi_distance(z, w) -> np.ndarray | float:
    """Kobayashi distance ``artanh |phi_z(w)|``."""
    d = np.arctanh(pseudo_distance(z, w))
    return float(d) if np.ndim(d) == 0 else d


@dataclass(frozen=True)
class KobayashiBall:
    """``B(center, radius) = {w : tanh beta(center, w) < radius}``."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", check_interior(self.center))
        if not 0.0 < self.radius < 1.0:
            raise DomainError(f"Kobayashi ball radius must lie in (0, 1), got {self.radius}")

    @property
    def n(self) -> int:
        return self.center.shape[-1]

    def contains(self, w) -> np.ndarray | bool:
        inside = np.asarray(pseudo_distance(self.center, w)) < self.radius
        return bool(inside) if inside.ndim == 0 else inside

    def euclidean_center(self) -> np.ndarray:
        """Center of the ellipsoid ``phi_c({|u| < r})``."""
        c2 = norm_sq(self.center)
        r2 = self.radius**2
        return (1.0 - r2) / (1.0 - r2 * c2) * self.center

    def semi_axes(self) -> tuple[float, float]:
        """Semi-axes along ``center`` and along complex directions orthogonal to it."""
        c2 = float(norm_sq(self.center))
        r = self.radius
        along = r * (1.0 - c2) / (1.0 - r * r * c2)
        across = r * math.sqrt((1.0 - c2) / (1.0 - r * r * c2))
        return along, across


def ball_membership(ball: KobayashiBall, w) -> np.ndarray | bool:
    return ball.contains(w)


def ball_volume(ball: KobayashiBall) -> float:
    """Exact Lebesgue volume of a Kobayashi ball.

    The ball is an ellipsoid with one complex semi-axis ``along`` (two real
    axes) and ``n - 1`` complex semi-axes ``across``.
    """
    n = ball.n
    along, across = ball.semi_axes()
    return math.pi**n / math.factorial(n) * along**2 * across ** (2 * (n - 1))


def ball_volume_monte_carlo(
    ball: KobayashiBall, samples: int = 1_000_000, seed: int = 0
) -> tuple[float, float]:
    """Hit-or-miss estimate of the ball volume; returns ``(value, standard_error)``.

    Samples uniformly from the Euclidean ball circumscribing the Kobayashi ball
    and tests membership directly, so it shares nothing with :func:`ball_volume`
    beyond the bounding radius.
    """
    n = ball.n
    rng = np.random.default_rng(seed)
    c = ball.euclidean_center()
    _, across = ball.semi_axes()
    rad = across * (1.0 + 1e-9)
    g = rng.standard_normal((samples, 2 * n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    g *= rad * rng.random(samples)[:, None] ** (1.0 / (2 * n))
    pts = c + g[:, :n] + 1j * g[:, n:]
    ok = norm_sq(pts) < (1.0 - BOUNDARY_TOL) ** 2
    hits = np.zeros(samples, dtype=bool)
    hits[ok] = np.asarray(pseudo_distance(ball.center, pts[ok])) < ball.radius
    bounding = math.pi**n / math.factorial(n) * rad ** (2 * n)
    frac = hits.mean()
    return bounding * frac, bounding * math.sqrt(frac * (1.0 - frac) / samples)


def count_points(z, r: float, points) -> int | np.ndarray:
    """Number of ``points`` inside ``B(z, r)``; vectorised over a batch of ``z``."""
    if not 0.0 < r < 1.0:
        raise DomainError(f"radius must lie in (0, 1), got {r}")
    z = check_interior(z)
    pts = np.asarray(points, dtype=complex)
    if pts.size == 0:
        return 0 if z.ndim == 1 else np.zeros(z.shape[:-1], dtype=int)
    pts = pts.reshape(-1, z.shape[-1])
    zz = np.atleast_2d(z)
    counts = (pseudo_distance_matrix(zz, pts) < r).sum(axis=1)
    return int(counts[0]) if z.ndim == 1 else counts.reshape(z.shape[:-1])


def euclidean_reach(z, t: float) -> np.ndarray | float:
    """Upper bound on ``|w - z|`` over ``w`` with ``|phi_z(w)| < t``.

    Used to prefilter candidates with a Euclidean spatial index.
    """
    rz = np.sqrt(norm_sq(as_point(z)))
    return t * (1.0 - rz**2) / (1.0 - t * rz)


def bounding_spheres(zs: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Euclidean centers and radii of spheres enclosing ``B(z, artanh t)`` for a batch.

    The ball is an ellipsoid centered at ``(1 - t^2) z / (1 - t^2 |z|^2)``; its
    largest semi-axis is the radial one for the disk and a complex-tangential
    one otherwise.
    """
    c2 = norm_sq(zs)
    t2 = t * t
    centers = ((1.0 - t2) / (1.0 - t2 * c2))[:, None] * zs
    if zs.shape[-1] == 1:
        radii = t * (1.0 - c2) / (1.0 - t2 * c2)
    else:
        radii = t * np.sqrt((1.0 - c2) / (1.0 - t2 * c2))
    return centers, radii


def sphere_directions(n: int, count: int, seed: int = 0) -> np.ndarray:
    """``count`` deterministic unit vectors in C^n (equispaced angles on the disk)."""
    if n == 1:
        theta = 2.0 * np.pi * np.arange(count) / count
        return np.exp(1j * theta)[:, None]
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, 2 * n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g[:, :n] + 1j * g[:, n:]


def volume_comparability(r: float, deltas, n: int = 1, directions: int = 1) -> dict:
    """Ratios ``nu(B(z, r)) / delta(z)^(n+1)`` along rays with the given boundary distances."""
    deltas = np.asarray(deltas, dtype=float)
    dirs = sphere_directions(n, directions)
    ratios = []
    for u in dirs:
        for d in deltas:
            z = (1.0 - d) * u
            ratios.append(ball_volume(KobayashiBall(z, r)) / d ** (n + 1))
    ratios = np.array(ratios)
    lo, hi = float(ratios.min()), float(ratios.max())
    return {"r": r, "min": lo, "max": hi, "spread": hi / lo, "ratios": ratios}


def boundary_distance_bracket(r: float, deltas, n: int = 1, samples: int = 64) -> dict:
    """Range of ``delta(w) / delta(z)`` over ``w`` sampled in ``B(z, r)``.

    The samples ``phi_z(u)`` cover a polar grid of ``|u| < r`` including its rim,
    where the extremes occur.
    """
    dirs = sphere_directions(n, samples, seed=1)
    out = []
    for d in np.asarray(deltas, dtype=float):
        z = np.zeros(n, dtype=complex)
        z[0] = 1.0 - d
        u = np.concatenate([s * dirs for s in (0.25 * r, 0.5 * r, 0.75 * r, r * (1 - 1e-12))])
        w = mobius(z, u)
        out.append(np.asarray(boundary_distance(w)) / d)
    ratios = np.concatenate(out)
    return {
        "r": r,
        "min": float(ratios.min()),
        "max": float(ratios.max()),
        "reference": ((1 - r) / (1 + r), (1 + r) / (1 - r)),
    }


class PointIndex:
    """Spatial index answering Kobayashi-ball queries over a fixed point set.

    A k-d tree on real coordinates returns Euclidean candidates inside
    :func:`bounding_spheres`; the exact pseudo-distance then filters them.
    """

    def __init__(self, points, chunk: int = 20_000):
        from scipy.spatial import cKDTree

        pts = np.asarray(points, dtype=complex)
        if pts.ndim == 1:
            pts = pts[:, None]
        self.points = pts
        self.chunk = chunk
        self._tree = cKDTree(np.concatenate([pts.real, pts.imag], axis=1)) if len(pts) else None

    def __len__(self) -> int:
        return len(self.points)

    def _pairs(self, zs: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
        centers, radii = bounding_spheres(zs, t)
        reach = radii * (1.0 + 1e-9) + 1e-15
        cand = self._tree.query_ball_point(np.concatenate([centers.real, centers.imag], axis=1),
                                           reach)
        lens = np.fromiter((len(c) for c in cand), dtype=int, count=len(cand))
        flat = np.fromiter(itertools.chain.from_iterable(cand), dtype=int, count=int(lens.sum()))
        rep = np.repeat(np.arange(len(zs)), lens)
        keep = np.asarray(pseudo_distance(zs[rep], self.points[flat])) < t
        return rep[keep], flat[keep]

    def pairs(self, zs, t: float) -> tuple[np.ndarray, np.ndarray]:
        """All ``(i, k)`` with ``|phi_{z_i}(points_k)| < t``, sorted by ``i`` then ``k``."""
        zs = np.atleast_2d(check_interior(zs))
        if self._tree is None or len(zs) == 0:
            return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
        reps, flats = [], []
        for s in range(0, len(zs), self.chunk):
            rep, flat = self._pairs(zs[s : s + self.chunk], t)
            reps.append(rep + s)
            flats.append(flat)
        rep = np.concatenate(reps)
        flat = np.concatenate(flats)
        order = np.lexsort((flat, rep))
        return rep[order], flat[order]

    def query(self, zs, t: float) -> list[np.ndarray]:
        """Indices of points ``w`` with ``|phi_z(w)| < t`` for each ``z`` in the batch."""
        zs = np.atleast_2d(check_interior(zs))
        rep, flat = self.pairs(zs, t)
        bounds = np.searchsorted(rep, np.arange(len(zs) + 1))
        return [flat[bounds[i] : bounds[i + 1]] for i in range(len(zs))]

    def count(self, zs, t: float) -> np.ndarray:
        zs = np.atleast_2d(check_interior(zs))
        rep, _ = self.pairs(zs, t)
        return np.bincount(rep, minlength=len(zs))

    def weighted_sum(self, zs, t: float, weights) -> np.ndarray:
        """``sum(weights[k])`` over points within ``t`` of each ``z``."""
        zs = np.atleast_2d(check_interior(zs))
        rep, flat = self.pairs(zs, t)
        return np.bincount(rep, weights=np.asarray(weights, dtype=float)[flat], minlength=len(zs))
