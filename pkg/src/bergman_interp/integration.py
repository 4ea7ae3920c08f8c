"""Weighted Bergman norms, atomic Carleson measures and local integral bounds."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .exceptions import DomainError
from .geometry import (
    KobayashiBall,
    PointIndex,
    ball_volume,
    boundary_distance,
    check_interior,
    mobius,
    sphere_directions,
)
from .kernel import jacobian


@dataclass(frozen=True)
class SpaceParams:
    """Exponents ``(p, beta)`` and dimension ``n`` of ``A^p_beta``."""

    p: float
    beta: float
    n: int = 1

    def __post_init__(self):
        if not self.p > 0:
            raise DomainError(f"p must be positive, got {self.p}")
        if not self.beta > -1:
            raise DomainError(f"beta must exceed -1, got {self.beta}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")

    @property
    def q(self) -> float:
        """Conjugate exponent; ``q = 1`` when ``p = 1`` by convention."""
        if self.p == 1:
            return 1.0
        if self.p < 1:
            raise DomainError("conjugate exponent is undefined for p < 1")
        return self.p / (self.p - 1.0)

    @property
    def gamma(self) -> float:
        """``n + 1 + beta``, the exponent of ``delta(a_k)`` in the sampling measure."""
        return self.n + 1 + self.beta

    @property
    def value_weight(self) -> float:
        """Weight exponent ``(n + 1 + beta) / p`` of the target sequence space."""
        return self.gamma / self.p

    def to_dict(self) -> dict:
        return {"p": self.p, "beta": self.beta, "n": self.n}


@dataclass
class AtomicMeasure:
    """``sum_k mass_k * (point mass at a_k)``."""

    points: np.ndarray
    masses: np.ndarray = field(default=None)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        if pts.ndim == 1:
            pts = pts[:, None]
        if len(pts):
            check_interior(pts)
        self.points = pts
        m = np.ones(len(pts)) if self.masses is None else np.asarray(self.masses, dtype=float)
        if m.shape != (len(pts),):
            raise ValueError("one mass per atom required")
        if np.any(m <= 0) or not np.all(np.isfinite(m)):
            raise ValueError("masses must be positive and finite")
        self.masses = m

    @property
    def n(self) -> int:
        return self.points.shape[-1]

    def scaled(self, factor: float) -> "AtomicMeasure":
        return AtomicMeasure(self.points.copy(), self.masses * factor)

    def ball_mass(self, zs, r: float, index: PointIndex | None = None) -> np.ndarray:
        """``mu(B(z, r))`` for each ``z`` in the batch."""
        index = index or PointIndex(self.points)
        return index.weighted_sum(zs, r, self.masses)


def weighted_norm(f, sp: SpaceParams, quad=None, return_error: bool = False):
    """``(int |f|^p (1 - |z|)^beta dnu)^(1/p)``.

    ``f`` maps point batches ``(N, n)`` to values ``(N,)``; a ``foci``
    attribute (base points of kernel terms) steers the quadrature. With
    ``return_error`` the result is ``(norm, error_estimate)``.
    """
    foci = getattr(f, "foci", None)
    if foci is not None and len(foci):
        foci = np.atleast_2d(foci)
        foci = foci[:, 0] if sp.n == 1 else foci
    else:
        foci = None

    def integrand(z):
        return np.abs(f(z)) ** sp.p

    kw = dict(n=sp.n, alpha=sp.beta, foci=foci)
    if return_error:
        val, err = quadrature.integrate_with_error(integrand, quad, **kw)
        val = float(np.real(val))
        norm = max(val, 0.0) ** (1.0 / sp.p)
        # first-order propagation through the 1/p power
        nerr = err / (sp.p * val) * norm if val > 0 else err ** (1.0 / sp.p)
        return norm, float(nerr)
    val = float(np.real(quadrature.integrate(integrand, quad, **kw)))
    return max(val, 0.0) ** (1.0 / sp.p)


def kobayashi_ball_integral(func, center, r: float, quad=None) -> complex:
    """``int_{B(center, r)} func dnu`` via ``w = phi_center(u)``, ``|u| < r``."""
    c = check_interior(center)
    n = c.shape[-1]

    def pulled(u):
        return func(mobius(c, u)) * np.abs(jacobian(c, u)) ** 2

    return quadrature.integrate(pulled, quad, n=n, radius=r)


def probe_grid(n: int = 1, levels: int = 12, directions: int = 64) -> np.ndarray:
    """The origin plus probes with ``delta = 2^-j``, ``j = 1..levels``, along fixed directions."""
    dirs = sphere_directions(n, directions)
    rings = [np.zeros((1, n), dtype=complex)]
    for j in range(1, levels + 1):
        rings.append((1.0 - 2.0**-j) * dirs)
    return np.concatenate(rings)


def carleson_test(mu: AtomicMeasure, beta: float, r: float, grid=None,
                  cap: float = math.inf) -> tuple[bool, float]:
    """Largest ``mu(B(z, r)) / delta(z)^(beta + n + 1)`` over a probe grid.

    The grid defaults to the atoms together with :func:`probe_grid`. Returns
    ``(constant <= cap, constant)``.
    """
    if not 0.0 < r < 1.0:
        raise DomainError(f"radius must lie in (0, 1), got {r}")
    n = mu.n if len(mu.points) else (np.atleast_2d(grid).shape[-1] if grid is not None else 1)
    if len(mu.points) == 0:
        return True, 0.0
    if grid is None:
        grid = np.concatenate([mu.points, probe_grid(n)])
    grid = np.atleast_2d(check_interior(grid))
    masses = mu.ball_mass(grid, r)
    d = np.atleast_1d(boundary_distance(grid))
    const = float(np.max(masses / d ** (beta + n + 1)))
    return const <= cap, const


def _ball_samples(a, radius: float, n: int, count: int = 32) -> np.ndarray:
    dirs = sphere_directions(n, count, seed=3)
    u = np.concatenate(
        [np.zeros((1, n), dtype=complex)]
        + [t * radius * dirs for t in (0.25, 0.5, 0.75, 1.0 - 1e-9)]
    )
    return mobius(a, u)


def complex_gradient(f, z, step: float | None = None) -> np.ndarray:
    """``(df/dz_1, ..., df/dz_n)`` at one point by fourth-order central differences.

    For analytic ``f`` the complex partial equals the derivative along the real
    coordinate axis. The default step is ``1e-3 * delta(z)``.
    """
    z = check_interior(z)
    n = z.shape[-1]
    h = 1e-3 * boundary_distance(z) if step is None else step
    if h < 1e-10:
        warnings.warn(f"finite-difference step {h:.1e} widened to 1e-10", RuntimeWarning,
                      stacklevel=2)
        h = 1e-10
    grad = np.empty(n, dtype=complex)
    for k in range(n):
        e = np.zeros(n, dtype=complex)
        e[k] = h
        pts = np.stack([z + 2 * e, z + e, z - e, z - 2 * e])
        v = f(pts)
        grad[k] = (-v[0] + 8 * v[1] - 8 * v[2] + v[3]) / (12 * h)
    return grad


def gradient_bound_check(f, a, R: float, r: float, p: float, quad=None,
                         samples: int = 32) -> float:
    """``sup_{z in B(a, R)} |grad f(z)|`` divided by ``(int_{B(a, r)} |f|^p dnu)^(1/p)``.

    The supremum runs over a polar sample of ``B(a, R)``.
    """
    if not 0.0 < R < r < 1.0:
        raise DomainError(f"need 0 < R < r < 1, got R={R}, r={r}")
    a = check_interior(a)
    n = a.shape[-1]
    zs = _ball_samples(a, R, n, samples)
    sup = max(float(np.linalg.norm(complex_gradient(f, z))) for z in zs)
    local = float(np.real(kobayashi_ball_integral(lambda w: np.abs(f(w)) ** p, a, r, quad)))
    if local <= 0:
        raise ValueError("f vanishes on the ball; the ratio is undefined")
    return sup / local ** (1.0 / p)


def submean_constant(chi, w, r: float, quad=None, samples: int = 32) -> float:
    """Smallest ``C`` with ``chi(z) <= C / nu(B(w, r)) * int_{B(w, R)} chi dnu`` on a
    sample of ``z`` in ``B(w, r)``, where ``R = (1 + r) / 2``."""
    w = check_interior(w)
    n = w.shape[-1]
    R = 0.5 * (1.0 + r)
    zs = _ball_samples(w, r, n, samples)
    top = float(np.max(np.real(chi(zs))))
    local = float(np.real(kobayashi_ball_integral(chi, w, R, quad)))
    return top * ball_volume(KobayashiBall(w, r)) / local
