"""Bergman kernel of the unit ball, its fractional powers, and checks of the
standard kernel estimates.

With Lebesgue measure ``nu`` the kernel is

    K(z, w) = c_n (1 - <z, w>)^-(n+1),   c_n = n! / pi^n,

analytic in ``z`` and conjugate-analytic in ``w``. Fractional powers use the
principal branch of ``log(1 - <z, w>)``, well defined because
``Re(1 - <z, w>) > 0`` for interior points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .exceptions import DomainError
from .geometry import (
    DomainSpec,
    boundary_distance,
    check_interior,
    inner,
    mobius,
    norm_sq,
    sphere_directions,
)


def _c(n: int) -> float:
    return DomainSpec(n).kernel_norm


def log_kernel(z, w) -> np.ndarray:
    """Principal ``log K(z, w)`` (broadcasting)."""
    z = check_interior(z)
    w = check_interior(w)
    n = z.shape[-1]
    return math.log(_c(n)) - (n + 1) * np.log(1.0 - inner(z, w))


def kernel(z, w) -> np.ndarray | complex:
    """``K(z, w) = c_n (1 - <z, w>)^-(n+1)``."""
    z = check_interior(z)
    w = check_interior(w)
    n = z.shape[-1]
    k = _c(n) / (1.0 - inner(z, w)) ** (n + 1)
    return complex(k) if np.ndim(k) == 0 else k


def kernel_power_values(z, a, s) -> np.ndarray | complex:
    """``K(z, a)^s`` on the principal branch; ``s`` may broadcast."""
    k = np.exp(np.asarray(s) * log_kernel(z, a))
    return complex(k) if np.ndim(k) == 0 else k


def kernel_matrix(zs, ws, s: float = 1.0) -> np.ndarray:
    """``[K(z_i, w_j)^s]`` for two point batches."""
    zs = np.atleast_2d(check_interior(zs))
    ws = np.atleast_2d(check_interior(ws))
    return kernel_power_values(zs[:, None, :], ws[None, :, :], s)


def log_abs_kernel_matrix(zs, ws) -> np.ndarray:
    """``log |K(z_i, w_j)|``, finite even where ``|K|`` overflows."""
    zs = np.atleast_2d(check_interior(zs))
    ws = np.atleast_2d(check_interior(ws))
    return log_kernel(zs[:, None, :], ws[None, :, :]).real


@dataclass(frozen=True)
class KernelPower:
    """The analytic function ``z -> K(z, base_point)^exponent``."""

    base_point: np.ndarray
    exponent: float

    def __post_init__(self):
        object.__setattr__(self, "base_point", check_interior(self.base_point))
        if not self.exponent > 0:
            raise DomainError(f"kernel power exponent must be positive, got {self.exponent}")

    @property
    def foci(self) -> np.ndarray:
        return self.base_point[None, :]

    def __call__(self, z):
        return kernel_power_values(z, self.base_point, self.exponent)


def kernel_power(kp: KernelPower, z):
    return kp(z)


def reproduce(f, z, quad=None) -> complex:
    """``int K(z, w) f(w) dnu(w)``, which equals ``f(z)`` for square-integrable analytic ``f``."""
    z = check_interior(z)
    n = z.shape[-1]
    foci = _foci(f, z)

    def integrand(w):
        return kernel_power_values(z, w, 1.0) * f(w)

    return complex(quadrature.integrate(integrand, quad, n=n, foci=foci))


def _foci(f, *points):
    fs = [np.atleast_2d(p) for p in points]
    extra = getattr(f, "foci", None)
    if extra is not None and len(extra):
        fs.append(np.atleast_2d(extra))
    allf = np.concatenate(fs, axis=0)
    return allf[:, 0] if allf.shape[1] == 1 else allf


def jacobian(a, z) -> np.ndarray | complex:
    """Complex Jacobian determinant of ``phi_a`` at ``z``:
    ``(-1)^n (1 - |a|^2)^((n+1)/2) / (1 - <z, a>)^(n+1)``."""
    a = check_interior(a)
    z = check_interior(z)
    n = a.shape[-1]
    j = (-1) ** n * (1.0 - norm_sq(a)) ** ((n + 1) / 2) / (1.0 - inner(z, a)) ** (n + 1)
    return complex(j) if np.ndim(j) == 0 else j


def check_transformation_identity(a, z, w) -> np.ndarray | float:
    """Relative residual of ``K(z, w) = J(z) conj(J(w)) K(phi_a(z), phi_a(w))``."""
    lhs = kernel(z, w)
    rhs = jacobian(a, z) * np.conj(jacobian(a, w)) * kernel(mobius(a, z), mobius(a, w))
    res = np.abs(lhs - rhs) / np.abs(lhs)
    return float(res) if np.ndim(res) == 0 else res


def jacobian_kernel_ratio_residual(a, z) -> np.ndarray | float:
    """Relative residual of ``|J(z)|^2 = K(z, z) / K(phi_a(z), phi_a(z))``."""
    lhs = np.abs(jacobian(a, z)) ** 2
    pz = mobius(a, z)
    rhs = (kernel(z, z) / kernel(pz, pz)).real
    res = np.abs(lhs - rhs) / lhs
    return float(res) if np.ndim(res) == 0 else res


def check_change_of_variables(f, a, quad=None) -> float:
    """Relative difference between ``int f dnu`` and ``int (f o phi_a) |J|^2 dnu``.

    The two integrals are computed with independent node sets: the second
    is graded toward ``a``, where the Jacobian concentrates.
    """
    a = check_interior(a)
    n = a.shape[-1]
    lhs = quadrature.integrate(f, quad, n=n)

    def pulled(z):
        return f(mobius(a, z)) * np.abs(jacobian(a, z)) ** 2

    rhs = quadrature.integrate(pulled, quad, n=n, foci=_foci(None, a))
    return float(abs(lhs - rhs) / abs(lhs))


def forelli_rudin_integral(z, p: float, alpha: float, quad=None) -> float:
    """``int |K(z, w)|^p (1 - |w|)^alpha dnu(w)``.

    Raises :class:`DomainError` outside ``p > n/(n+1)``,
    ``-1 < alpha < (n+1)(p-1)``, the range where the integral grows like
    ``delta(z)^(alpha + n + 1 - (n+1) p)``.
    """
    z = check_interior(z)
    n = z.shape[-1]
    if not p > n / (n + 1):
        raise DomainError(f"need p > n/(n+1) = {n / (n + 1):.4g}, got p = {p}")
    if not -1.0 < alpha < (n + 1) * (p - 1):
        raise DomainError(
            f"need -1 < alpha < (n+1)(p-1) = {(n + 1) * (p - 1):.4g}, got alpha = {alpha}"
        )

    def integrand(w):
        return np.exp(p * log_kernel(z, w).real)

    return float(quadrature.integrate(integrand, quad, n=n, alpha=alpha, foci=_foci(None, z)))


@dataclass
class SlopeReport:
    p: float
    alpha: float
    n: int
    expected: float
    slope: float
    deltas: np.ndarray
    values: np.ndarray

    @property
    def envelope(self) -> tuple[float, float]:
        """Range of ``I(delta) / delta^expected``; bounded above means the upper estimate holds."""
        r = self.values / self.deltas**self.expected
        return float(r.min()), float(r.max())

    def to_dict(self) -> dict:
        lo, hi = self.envelope
        return {
            "p": self.p,
            "alpha": self.alpha,
            "n": self.n,
            "expected_slope": self.expected,
            "measured_slope": self.slope,
            "envelope_min": lo,
            "envelope_max": hi,
        }


def forelli_rudin_slope(p: float, alpha: float, n: int = 1, deltas=None, quad=None) -> SlopeReport:
    """Least-squares slope of ``log I`` against ``log delta`` along a ray.

    ``deltas`` defaults to 25 geometrically spaced values in ``[1e-3, 0.5]``.
    """
    if deltas is None:
        deltas = np.geomspace(1e-3, 0.5, 25)
    deltas = np.asarray(deltas, dtype=float)
    e = np.zeros(n, dtype=complex)
    e[0] = 1.0
    vals = np.array([forelli_rudin_integral((1.0 - d) * e, p, alpha, quad) for d in deltas])
    slope = float(np.polyfit(np.log(deltas), np.log(vals), 1)[0])
    return SlopeReport(p, alpha, n, alpha + n + 1 - (n + 1) * p, slope, deltas, vals)


def check_diagonal_estimates(samples, r: float = 0.3, near_boundary: float = 0.05,
                             probes: int = 64) -> dict:
    """Brackets for ``K(z, z) delta(z)^(n+1)`` over ``samples`` and for
    ``|K(z, w)| delta(z)^(n+1)`` with ``w`` in ``B(z, r)`` for samples with
    ``delta(z) < near_boundary``.
    """
    zs = np.atleast_2d(check_interior(samples))
    if zs.shape[0] == 0:
        raise ValueError("need at least one sample point")
    n = zs.shape[-1]
    d = np.atleast_1d(boundary_distance(zs))
    diag = kernel(zs, zs).real * d ** (n + 1)
    report = {
        "n": n,
        "r": r,
        "diagonal_min": float(diag.min()),
        "diagonal_max": float(diag.max()),
    }
    near = zs[d < near_boundary]
    if len(near):
        dirs = sphere_directions(n, probes, seed=2)
        u = np.concatenate([t * dirs for t in (0.0, 0.3 * r, 0.6 * r, 0.9 * r, r * (1 - 1e-9))])
        vals = []
        for z in near:
            w = mobius(z, u)
            vals.append(np.abs(kernel(z, w)) * boundary_distance(z) ** (n + 1))
        vals = np.concatenate(vals)
        report["offdiagonal_min"] = float(vals.min())
        report["offdiagonal_max"] = float(vals.max())
        report["offdiagonal_spread"] = float(vals.max() / vals.min())
    return report
