"""Interpolation in weighted Bergman spaces by approximate extension and
Neumann iteration.

For nodes ``a_k`` and targets ``v_k`` the approximate extension is a
finite kernel-power sum

    E(v)(z) = sum_k v_k delta(a_k)^sigma K(z, a_k)^(sigma/(n+1)),

with ``sigma = n + 1 + beta + m`` when ``p = 1`` and ``sigma = n + 1 + beta``
when ``p > 1``. If the restriction ``T`` followed by ``E`` is within
distance ``C < 1`` of the identity on the target space, the iteration
``f <- f + E(v - T f)`` converges to an exact interpolant.

Two conventions are supported. The *raw* one uses ``delta = 1 - |a|`` and
the Bergman kernel as displayed above. The *normalized* one uses
``1 - |a|^2`` and ``(1 - <z, a>)^-(n+1)``, for which ``T E`` has unit
diagonal; its off-diagonal part is then bounded by the exclude-diagonal
:func:`~bergman_interp.sequences.k_sum`. The Neumann solver uses the
normalized convention. Both produce combinations of the same functions
``K(., a_k)^s``, so only the coefficients differ.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConvergenceError, DomainError, HypothesisError, SingularGramError
from .geometry import DomainSpec, check_interior, mobius, norm_sq, pseudo_distance_matrix
from .integration import SpaceParams, weighted_norm
from .kernel import kernel_power_values, log_kernel
from .sequences import PointSequence, WeightedValueSequence, k_sum, sequence_norm

SCHEMES = ("p1", "general_p")


# -- interpolants -----------------------------------------------------------


@dataclass
class Interpolant:
    """``z -> sum_k c_k K(z, a_k)^(s_k) + offset(z)``.

    ``coefficients`` has shape ``(K,)``, ``base_points`` ``(K, n)`` and
    ``exponents`` ``(K,)``. ``offset`` is an optional callable on point
    batches.
    """

    coefficients: np.ndarray
    base_points: np.ndarray
    exponents: np.ndarray
    offset: object = None

    def __post_init__(self):
        self.coefficients = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        pts = np.asarray(self.base_points, dtype=complex)
        if pts.ndim == 1:
            pts = pts[:, None]
        self.base_points = pts
        self.exponents = np.broadcast_to(
            np.asarray(self.exponents, dtype=float), self.coefficients.shape
        ).copy()
        if len(pts) != len(self.coefficients):
            raise ValueError("one base point per coefficient required")
        if len(pts):
            check_interior(pts)

    @classmethod
    def zero(cls, n: int = 1) -> "Interpolant":
        return cls(np.zeros(0), np.zeros((0, n)), np.zeros(0))

    @property
    def n(self) -> int:
        return self.base_points.shape[1]

    @property
    def terms(self) -> list[tuple[complex, np.ndarray, float]]:
        return list(zip(self.coefficients, self.base_points, self.exponents))

    @property
    def foci(self) -> np.ndarray:
        return self.base_points

    def __len__(self) -> int:
        return len(self.coefficients)

    def __call__(self, z, chunk: int = 4096):
        z = check_interior(z)
        single = z.ndim == 1
        zs = np.atleast_2d(z)
        out = np.zeros(len(zs), dtype=complex)
        if len(self):
            n = self.n
            logc = math.log(DomainSpec(n).kernel_norm)
            for s in range(0, len(zs), chunk):
                zz = zs[s : s + chunk]
                logk = logc - (n + 1) * np.log(1.0 - zz @ self.base_points.conj().T)
                out[s : s + chunk] = np.exp(logk * self.exponents) @ self.coefficients
        if self.offset is not None:
            out = out + np.asarray(self.offset(zs), dtype=complex)
        return complex(out[0]) if single else out

    def __add__(self, other: "Interpolant") -> "Interpolant":
        if not isinstance(other, Interpolant):
            return NotImplemented
        offset = _add_offsets(self.offset, other.offset)
        return Interpolant(
            np.concatenate([self.coefficients, other.coefficients]),
            np.concatenate([self.base_points, other.base_points]),
            np.concatenate([self.exponents, other.exponents]),
            offset,
        ).consolidate()

    def __mul__(self, scalar) -> "Interpolant":
        scalar = complex(scalar)
        off = None if self.offset is None else (lambda z, g=self.offset: scalar * g(z))
        return Interpolant(self.coefficients * scalar, self.base_points.copy(),
                           self.exponents.copy(), off)

    __rmul__ = __mul__

    def __neg__(self) -> "Interpolant":
        return self * -1.0

    def __sub__(self, other: "Interpolant") -> "Interpolant":
        return self + (-other)

    def consolidate(self) -> "Interpolant":
        """Merge terms sharing a base point and exponent; drop zero coefficients."""
        if len(self) == 0:
            return self
        key = np.concatenate(
            [self.base_points.real, self.base_points.imag, self.exponents[:, None]], axis=1
        )
        uniq, inv = np.unique(key, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        coef = np.zeros(len(uniq), dtype=complex)
        np.add.at(coef, inv, self.coefficients)
        first = np.zeros(len(uniq), dtype=int)
        first[inv[::-1]] = np.arange(len(inv))[::-1]
        order = np.sort(first)
        slot = inv[order]
        keep = coef[slot] != 0
        return Interpolant(coef[slot][keep], self.base_points[order][keep],
                           self.exponents[order][keep], self.offset)


def _add_offsets(f, g):
    if f is None:
        return g
    if g is None:
        return f
    return lambda z: f(z) + g(z)


# -- problems ---------------------------------------------------------------


@dataclass
class InterpolationProblem:
    """Nodes, targets and the space in which the interpolant is sought.

    ``scheme`` is ``"p1"`` (requires ``p = 1``; uses the extra exponent
    ``m > 0``) or ``"general_p"`` (requires ``p > 1``).
    """

    seq: PointSequence
    targets: WeightedValueSequence
    space: SpaceParams
    scheme: str = "p1"
    m: float = 1.0

    def __post_init__(self):
        if not isinstance(self.seq, PointSequence):
            self.seq = PointSequence(self.seq)
        if not isinstance(self.targets, WeightedValueSequence):
            self.targets = WeightedValueSequence(self.targets, self.space.value_weight)
        if len(self.targets) != len(self.seq):
            raise ValueError(f"{len(self.seq)} nodes but {len(self.targets)} targets")
        if len(self.seq) and self.seq.n != self.space.n:
            raise ValueError(f"nodes live in C^{self.seq.n} but the space has n = {self.space.n}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.scheme == "p1":
            if self.space.p != 1:
                raise DomainError(f"the p1 scheme needs p = 1, got p = {self.space.p}")
            if not self.m > 0:
                raise DomainError(
                    f"m must be positive for the p = 1 extension to stay integrable, got m = {self.m}"
                )
        elif not self.space.p > 1:
            raise DomainError(f"the general_p scheme needs p > 1, got p = {self.space.p}")
        if not np.all(np.isfinite(self.targets.values)):
            raise ValueError("targets must be finite")

    @classmethod
    def create(cls, points, values, space: SpaceParams, m: float = 1.0) -> "InterpolationProblem":
        """Problem with the scheme chosen from ``space.p``."""
        seq = points if isinstance(points, PointSequence) else PointSequence(points)
        scheme = "p1" if space.p == 1 else "general_p"
        return cls(seq, WeightedValueSequence(values, space.value_weight), space, scheme, m)

    def with_targets(self, values) -> "InterpolationProblem":
        return InterpolationProblem(
            self.seq, WeightedValueSequence(values, self.space.value_weight), self.space,
            self.scheme, self.m,
        )

    @property
    def sigma(self) -> float:
        """Power of the boundary distance in the extension coefficients."""
        if self.scheme == "p1":
            return self.space.gamma + self.m
        return self.space.gamma

    @property
    def exponent(self) -> float:
        """Kernel power ``s = sigma / (n + 1)`` of the dictionary functions."""
        return self.sigma / (self.space.n + 1)

    def target_norm(self, normalized: bool = False) -> float:
        return sequence_norm(self.targets, _deltas(self.seq, normalized), self.space.p)


def _deltas(seq: PointSequence, normalized: bool) -> np.ndarray:
    if normalized:
        return 1.0 - norm_sq(seq.points) if len(seq) else np.zeros(0)
    return seq.deltas


def _extension_weights(prob: InterpolationProblem, normalized: bool) -> np.ndarray:
    d = _deltas(prob.seq, normalized)
    w = d**prob.sigma
    if normalized:
        w = w * DomainSpec(prob.space.n).kernel_norm ** -prob.exponent
    return w


def restrict(f, seq: PointSequence) -> WeightedValueSequence:
    """``{f(a_k)}`` tagged with the weight exponent of ``f``'s space when known.

    The canonical weight ``(n + 1 + beta)/p`` is attached by callers that know
    the space; here it defaults to ``0``.
    """
    if len(seq) == 0:
        return WeightedValueSequence(np.zeros(0), 0.0)
    return WeightedValueSequence(np.atleast_1d(f(seq.points)), 0.0)


def restrict_to(f, prob: InterpolationProblem) -> WeightedValueSequence:
    """``T f`` with the weight exponent ``(n + 1 + beta)/p`` of ``prob``'s space."""
    vals = restrict(f, prob.seq).values
    return WeightedValueSequence(vals, prob.space.value_weight)


def _extend(prob: InterpolationProblem, normalized: bool, values=None) -> Interpolant:
    v = prob.targets.values if values is None else np.asarray(values, dtype=complex)
    coef = v * _extension_weights(prob, normalized)
    return Interpolant(coef, prob.seq.points.copy(), prob.exponent).consolidate()


def extend_p1(prob: InterpolationProblem, normalized: bool = False) -> Interpolant:
    """Approximate extension ``sum_k v_k delta_k^(n+1+beta+m) K(z, a_k)^((n+1+beta+m)/(n+1))``."""
    if prob.scheme != "p1":
        raise DomainError("extend_p1 needs a problem with scheme 'p1'")
    return _extend(prob, normalized)


def extend_pgen(prob: InterpolationProblem, normalized: bool = False) -> Interpolant:
    """Approximate extension ``sum_k v_k delta_k^(n+1+beta) K(z, a_k)^((n+1+beta)/(n+1))``."""
    if prob.scheme != "general_p":
        raise DomainError("extend_pgen needs a problem with scheme 'general_p'")
    return _extend(prob, normalized)


def extend(prob: InterpolationProblem, normalized: bool = False) -> Interpolant:
    return extend_p1(prob, normalized) if prob.scheme == "p1" else extend_pgen(prob, normalized)


# -- contraction bounds -----------------------------------------------------


@dataclass
class ContractionBound:
    """Bound on ``||T E - I||`` for the residual iteration.

    For ``p = 1`` ``value`` is the exclude-diagonal sum
    ``K({a_k}, m, n+1+beta)``, which is the exact weighted ``l^1`` norm of the
    off-diagonal part. For ``p > 1`` it is the Schur-test product
    ``R^(1/q) Col^(1/p)`` of the row sum ``R = K({a_k}, g/p, g/q)`` and column
    sum ``Col = K({a_k}, g/q, g/p)`` (``g = n + 1 + beta``); both orderings are
    kept in ``k_sums``.
    """

    value: float
    k_sums: dict
    normalized: bool
    raw_value: float

    def to_dict(self) -> dict:
        return {
            "bound": self.value,
            "k_sums": dict(self.k_sums),
            "normalized": self.normalized,
            "raw_convention_bound": self.raw_value,
        }


def _bound_from(seq: PointSequence, prob: InterpolationProblem, normalized: bool):
    sp = prob.space
    g = sp.gamma
    if prob.scheme == "p1":
        c = k_sum(seq, prob.m, g, include_diagonal=False, normalized=normalized)
        return c, {"m,gamma": c}
    row = k_sum(seq, g / sp.p, g / sp.q, include_diagonal=False, normalized=normalized)
    col = k_sum(seq, g / sp.q, g / sp.p, include_diagonal=False, normalized=normalized)
    return row ** (1.0 / sp.q) * col ** (1.0 / sp.p), {"gamma/p,gamma/q": row,
                                                       "gamma/q,gamma/p": col}


def contraction_bound(prob: InterpolationProblem) -> ContractionBound:
    """Bound ``C`` with ``||T E v - v|| <= C ||v||`` in the normalized convention,
    plus the same expression under the raw convention for reference."""
    c, sums = _bound_from(prob.seq, prob, True)
    raw, _ = _bound_from(prob.seq, prob, False)
    return ContractionBound(c, sums, True, raw)


# -- Neumann iteration ------------------------------------------------------


@dataclass
class NeumannTrace:
    """Per-iteration record of the residual ``v - T f_i``.

    ``residual_norms`` are measured in ``l^p`` with weights
    ``(1 - |a_k|^2)^((n+1+beta)/p)``, the norm in which ``bound`` holds.
    ``tag`` is ``"proven-contraction"`` when ``bound < 1`` and
    ``"empirical-contraction"`` when only the measured spectral radius is.
    """

    residual_norms: list = field(default_factory=list)
    node_residuals: list = field(default_factory=list)
    bound: float = math.nan
    raw_bound: float = math.nan
    k_sums: dict = field(default_factory=dict)
    spectral_radius: float = math.nan
    converged: bool = False
    tag: str = "proven-contraction"
    diagnosis: str = ""

    @property
    def iterations(self) -> int:
        return max(len(self.residual_norms) - 1, 0)

    @property
    def ratios(self) -> np.ndarray:
        r = np.asarray(self.residual_norms, dtype=float)
        if len(r) < 2:
            return np.zeros(0)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = r[1:] / r[:-1]
        return q[np.isfinite(q) & (r[:-1] > 0)]

    @property
    def measured_contraction(self) -> float:
        q = self.ratios
        return float(q.max()) if len(q) else 0.0

    def to_dict(self) -> dict:
        return {
            "residual_norms": [float(x) for x in self.residual_norms],
            "node_residuals": [float(x) for x in self.node_residuals],
            "bound": self.bound,
            "raw_convention_bound": self.raw_bound,
            "k_sums": dict(self.k_sums),
            "spectral_radius": self.spectral_radius,
            "measured_contraction": self.measured_contraction,
            "iterations": self.iterations,
            "converged": self.converged,
            "tag": self.tag,
            "diagnosis": self.diagnosis,
        }


def gram_matrix(seq: PointSequence, s: float) -> np.ndarray:
    """``G_kj = K(a_k, a_j)^s``, so ``G c`` lists the node values of ``sum_j c_j K(., a_j)^s``."""
    pts = seq.points
    n = seq.n
    logk = math.log(DomainSpec(n).kernel_norm) - (n + 1) * np.log(1.0 - pts @ pts.conj().T)
    return np.exp(s * logk)


def _residual_map(prob: InterpolationProblem) -> np.ndarray:
    g = gram_matrix(prob.seq, prob.exponent)
    return g * _extension_weights(prob, True)[None, :] - np.eye(len(prob.seq))


def solve_neumann(prob: InterpolationProblem, tol: float = 1e-10, max_iter: int = 200,
                  dense_limit: int = 4000) -> tuple[Interpolant, NeumannTrace]:
    """Iterate ``f <- f + E(v - T f)`` from ``f = 0``.

    Stops when both the weighted residual norm and the largest node residual
    are at most ``tol``. On failure ``trace.converged`` is ``False`` and the
    best iterate is returned together with a diagnosis; callers that need an
    exception use :func:`solve_or_raise`.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = prob.space.n
    N = len(prob.seq)
    if N == 0:
        return Interpolant.zero(n), NeumannTrace(converged=True)
    sp = prob.space
    cb = contraction_bound(prob)
    trace = NeumannTrace(bound=cb.value, raw_bound=cb.raw_value, k_sums=cb.k_sums)
    w_ext = _extension_weights(prob, True)
    dn = _deltas(prob.seq, True)
    weights = dn ** sp.value_weight
    v = prob.targets.values
    dense = N <= dense_limit
    gram = gram_matrix(prob.seq, prob.exponent) if dense else None
    if dense:
        a = gram * w_ext[None, :] - np.eye(N)
        trace.spectral_radius = float(np.max(np.abs(np.linalg.eigvals(a))))
    if cb.value >= 1:
        if trace.spectral_radius < 1:
            trace.tag = "empirical-contraction"
            warnings.warn(
                f"contraction bound {cb.value:.3g} >= 1; proceeding because the measured "
                f"spectral radius is {trace.spectral_radius:.3g}",
                RuntimeWarning, stacklevel=2,
            )
        else:
            trace.tag = "no-contraction"

    def wnorm(r):
        return float(np.sum((weights * np.abs(r)) ** sp.p) ** (1.0 / sp.p))

    coef = np.zeros(N, dtype=complex)
    basis = Interpolant(np.ones(N), prob.seq.points, prob.exponent)

    def node_values(c):
        if dense:
            return gram @ c
        return Interpolant(c, basis.base_points, basis.exponents)(prob.seq.points)

    r = v.copy()
    best = (math.inf, coef.copy())
    for it in range(max_iter + 1):
        rn, rmax = wnorm(r), float(np.max(np.abs(r)))
        trace.residual_norms.append(rn)
        trace.node_residuals.append(rmax)
        if rmax < best[0]:
            best = (rmax, coef.copy())
        if rn <= tol and rmax <= tol:
            trace.converged = True
            break
        if not np.isfinite(rn):
            break
        if it == max_iter:
            break
        coef = coef + r * w_ext
        r = v - node_values(coef)
    final = coef if trace.converged else best[1]
    f = Interpolant(final, prob.seq.points.copy(), prob.exponent).consolidate()
    if not trace.converged:
        trace.diagnosis = (
            f"no convergence in {max_iter} iterations: best node residual {best[0]:.3e}, "
            f"measured ||TE - I|| = {trace.measured_contraction:.3g}, "
            f"contraction bound {cb.value:.3g}"
        )
    return f, trace


def solve_or_raise(prob: InterpolationProblem, tol: float = 1e-10,
                   max_iter: int = 200) -> tuple[Interpolant, NeumannTrace]:
    f, trace = solve_neumann(prob, tol, max_iter)
    if not trace.converged:
        err = ConvergenceError(trace.diagnosis)
        err.best, err.trace = f, trace
        raise err
    return f, trace


# -- direct solve -----------------------------------------------------------


@dataclass
class OracleReport:
    condition: float
    approximate: bool
    max_node_residual: float

    def to_dict(self) -> dict:
        return {"condition": self.condition, "approximate": self.approximate,
                "max_node_residual": self.max_node_residual}


def oracle_solve(prob: InterpolationProblem, regularize: bool = False, max_condition: float = 1e14,
                 return_report: bool = False):
    """Solve ``sum_j c_j K(a_k, a_j)^s = v_k`` directly with the scheme's kernel power ``s``.

    A Gram matrix whose condition number exceeds ``max_condition`` raises
    :class:`SingularGramError`, unless ``regularize`` is set; then a
    least-squares solve is used and the report is flagged approximate.
    """
    N = len(prob.seq)
    n = prob.space.n
    if N == 0:
        f = Interpolant.zero(n)
        return (f, OracleReport(1.0, False, 0.0)) if return_report else f
    g = gram_matrix(prob.seq, prob.exponent)
    if N > 1:
        d = pseudo_distance_matrix(prob.seq.points, prob.seq.points)
        np.fill_diagonal(d, 1.0)
        coincident = bool(np.any(d == 0.0))
    else:
        coincident = False
    cond = math.inf if coincident else float(np.linalg.cond(g))
    v = prob.targets.values
    approximate = False
    if not cond <= max_condition:
        if not regularize:
            raise SingularGramError(cond)
        coef = np.linalg.lstsq(g, v, rcond=1.0 / max_condition)[0]
        approximate = True
    else:
        coef = np.linalg.solve(g, v)
    f = Interpolant(coef, prob.seq.points.copy(), prob.exponent)
    if return_report:
        res = float(np.max(np.abs(g @ coef - v)))
        return f, OracleReport(cond, approximate, res)
    return f


# -- norm estimates ---------------------------------------------------------


def _random_combination(seq: PointSequence, s: float, rng, extra: int = 3) -> Interpolant:
    n = seq.n
    k = len(seq) + extra
    # base points near the nodes plus a few anywhere
    pts = [seq.points[rng.integers(len(seq), size=len(seq))]]
    u = rng.normal(size=(extra, n)) + 1j * rng.normal(size=(extra, n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    pts.append(u * rng.uniform(0, 0.9, size=(extra, 1)))
    base = np.concatenate(pts)
    jitter = 0.05 * (rng.normal(size=base.shape) + 1j * rng.normal(size=base.shape))
    moved = mobius(base, jitter)
    coef = rng.normal(size=k) + 1j * rng.normal(size=k)
    coef *= (1.0 - norm_sq(moved)) ** (s * (n + 1))
    return Interpolant(coef, moved, s)


def restriction_norm_estimate(seq: PointSequence, sp: SpaceParams, trials: int = 20,
                              seed: int = 0, quad=None) -> float:
    """Largest observed ``||{f(a_k)}||_{(n+1+beta)/p} / ||f||_{p,beta}`` over random
    kernel combinations ``f``."""
    rng = np.random.default_rng(seed)
    s = 2.0 * sp.gamma / ((sp.n + 1) * sp.p)
    best = 0.0
    for _ in range(trials):
        f = _random_combination(seq, s, rng)
        num = sequence_norm(WeightedValueSequence(f(seq.points), sp.value_weight),
                            seq.deltas, sp.p)
        den = weighted_norm(f, sp, quad)
        best = max(best, num / den)
    return best


def interpolation_constant_estimate(prob: InterpolationProblem, trials: int = 10,
                                    seed: int = 0, quad=None) -> float:
    """Largest observed ``||f||_{p,beta} / ||v||`` for oracle interpolants of random targets."""
    rng = np.random.default_rng(seed)
    best = 0.0
    N = len(prob.seq)
    for _ in range(trials):
        v = rng.normal(size=N) + 1j * rng.normal(size=N)
        sub = prob.with_targets(v)
        f = oracle_solve(sub, regularize=True)
        best = max(best, weighted_norm(f, prob.space, quad) / sub.target_norm())
    return best


# -- automorphism transport -------------------------------------------------


@dataclass
class Transported:
    """``z -> K(u(z), a)^power * f(phi_a(z))`` with ``u`` the identity or ``phi_a``."""

    f: object
    a: np.ndarray
    power: float
    moved_weight: bool

    @property
    def n(self) -> int:
        return self.a.shape[-1]

    @property
    def foci(self) -> np.ndarray:
        inner_foci = getattr(self.f, "foci", None)
        pts = [self.a[None, :]]
        if inner_foci is not None and len(inner_foci):
            pts.append(np.atleast_2d(mobius(self.a, np.atleast_2d(inner_foci))))
        return np.concatenate(pts)

    def __call__(self, z):
        z = check_interior(z)
        single = z.ndim == 1
        zs = np.atleast_2d(z)
        pz = mobius(self.a, zs)
        at = pz if self.moved_weight else zs
        out = np.exp(self.power * log_kernel(at, self.a)) * np.asarray(self.f(pz))
        return complex(out[0]) if single else out


def transport_power(sp: SpaceParams) -> float:
    """``2 (n + 1 + beta) / ((n + 1) p)``."""
    return 2.0 * sp.gamma / ((sp.n + 1) * sp.p)


def transport_forward(f, a_param, sp: SpaceParams) -> Transported:
    """``T f(z) = K(z, a)^e f(phi_a(z))`` with ``e`` from :func:`transport_power`."""
    return Transported(f, check_interior(a_param), transport_power(sp), False)


def transport_inverse(f, a_param, sp: SpaceParams) -> Transported:
    """``S f(z) = K(phi_a(z), a)^-e f(phi_a(z))``, the inverse of :func:`transport_forward`."""
    return Transported(f, check_interior(a_param), -transport_power(sp), True)


@dataclass
class TransportedProblem:
    """The problem on the original nodes with targets multiplied by
    ``K(a_k, a)^e``, and the nodes ``phi_a(a_k)`` where ``S F`` interpolates ``v``."""

    problem: InterpolationProblem
    a_param: np.ndarray
    moved_nodes: PointSequence
    original_targets: np.ndarray

    def pull_back(self, F) -> Transported:
        """``G = S F``; satisfies ``G(phi_a(a_k)) = v_k`` whenever ``F(a_k)`` hits the modified targets."""
        return transport_inverse(F, self.a_param, self.problem.space)


def transport(prob: InterpolationProblem, a_param) -> TransportedProblem:
    """Move ``prob`` by the automorphism ``phi_a``, ``a = a_param``."""
    a = check_interior(a_param)
    if a.shape[-1] != prob.space.n:
        raise ValueError("a_param has the wrong dimension")
    e = transport_power(prob.space)
    factor = np.exp(e * log_kernel(prob.seq.points, a)) if len(prob.seq) else np.zeros(0)
    modified = prob.with_targets(factor * prob.targets.values)
    moved = PointSequence(mobius(a, prob.seq.points)) if len(prob.seq) else prob.seq
    return TransportedProblem(modified, a, moved, prob.targets.values.copy())


# -- adding one node --------------------------------------------------------


def augment_point(g, f, b, v0: complex, nodes: PointSequence | None = None,
                  tol: float = 1e-10):
    """``F = g + (v0 - g(b)) / f(b) * f``.

    ``f`` must vanish at the existing ``nodes`` (checked to ``tol`` when they
    are given) and not at ``b``. If both ``g`` and ``f`` are
    :class:`Interpolant` instances the result is one too.
    """
    b = check_interior(b)
    fb = complex(f(b))
    if not abs(fb) > tol:
        raise HypothesisError("f(b) != 0", f"|f(b)| = {abs(fb):.3e} <= {tol:g}")
    if nodes is not None and len(nodes):
        worst = float(np.max(np.abs(f(nodes.points))))
        if worst > tol:
            raise HypothesisError("f(a_k) = 0 for all k", f"max |f(a_k)| = {worst:.3e}")
    c = (v0 - complex(g(b))) / fb
    if isinstance(g, Interpolant) and isinstance(f, Interpolant):
        return g + c * f
    return lambda z: g(z) + c * f(z)


def vanishing_function(prob: InterpolationProblem, b, regularize: bool = False) -> Interpolant:
    """Interpolant equal to ``0`` at the nodes of ``prob`` and ``1`` at ``b``, built with
    :func:`oracle_solve` on the enlarged node set."""
    b = np.atleast_2d(check_interior(b))
    seq = PointSequence(np.concatenate([prob.seq.points, b]))
    vals = np.zeros(len(seq), dtype=complex)
    vals[-1] = 1.0
    sub = InterpolationProblem(seq, WeightedValueSequence(vals, prob.space.value_weight),
                               prob.space, prob.scheme, prob.m)
    return oracle_solve(sub, regularize=regularize)


# -- truncation for separated sequences -------------------------------------


def large_beta_threshold(sp: SpaceParams) -> tuple[float, str]:
    """Lower bound on ``beta`` and the inequality's name."""
    n = sp.n
    if sp.p == 1:
        return n - 1.0, "beta > n - 1"
    return (max(n * (2 * sp.p - 1) - 1, n * (2 * sp.q - 1) - 1),
            "beta > max{n(2p-1)-1, n(2q-1)-1}")


def check_large_beta_range(sp: SpaceParams) -> None:
    bound, name = large_beta_threshold(sp)
    if not sp.beta > bound:
        raise HypothesisError(name, f"beta = {sp.beta:g}, bound = {bound:g}")


@dataclass
class TruncationReport:
    """``N`` is 1-based: the tail ``a_N, a_(N+1), ...`` has both k-sums below 1."""

    N: int
    tail_k_sums: dict
    tail_sums: list
    contraction_bound: float

    def to_dict(self) -> dict:
        return {"N": self.N, "tail_k_sums": dict(self.tail_k_sums),
                "tail_sums": [float(x) for x in self.tail_sums],
                "contraction_bound": self.contraction_bound}


def _tail_k_sums(tail: PointSequence, sp: SpaceParams, m: float) -> dict:
    g = sp.gamma
    if sp.p == 1:
        pairs = {"m,gamma": (m, g), "gamma,m": (g, m)}
    else:
        pairs = {"gamma/p,gamma/q": (g / sp.p, g / sp.q), "gamma/q,gamma/p": (g / sp.q, g / sp.p)}
    return {k: k_sum(tail, *pq, include_diagonal=False, normalized=True) for k, pq in pairs.items()}


def truncate_to_contracting_tail(seq: PointSequence, sp: SpaceParams, m: float = 1.0) -> TruncationReport:
    """Smallest ``N`` such that the tail from the ``N``-th node on contracts.

    The sequence must be sorted by decreasing boundary distance. For
    ``p = 1`` the test is ``K(m, n+1+beta) < 1``; for ``p > 1`` both
    ``K(g/p, g/q)`` and ``K(g/q, g/p)`` must be below 1. Tails only lose
    terms as ``N`` grows, so the search is a bisection. Also reported are the
    tail sums ``sum_{j >= N} delta_j^((n+1+beta)/(2p))``.
    """
    check_large_beta_range(sp)
    if len(seq) and not seq.is_sorted_by_delta():
        raise ValueError("sequence must be sorted by decreasing delta (see PointSequence.sorted_by_delta)")
    L = len(seq)

    def ok(N):
        sums = _tail_k_sums(seq.subset(np.arange(N - 1, L)), sp, m)
        if sp.p == 1:
            return sums["m,gamma"] < 1, sums
        return all(v < 1 for v in sums.values()), sums

    lo, hi = 1, max(L, 1)
    good, sums = ok(lo) if L else (True, {})
    if not good:
        while lo < hi:
            mid = (lo + hi) // 2
            if ok(mid)[0]:
                hi = mid
            else:
                lo = mid + 1
        sums = ok(lo)[1]
    N = lo
    pw = sp.gamma / (2 * sp.p)
    tails = np.cumsum((seq.deltas**pw)[::-1])[::-1].tolist() if L else []
    tail = seq.subset(np.arange(N - 1, L))
    problem = InterpolationProblem.create(tail, np.zeros(len(tail)), sp, m)
    bound = contraction_bound(problem).value if len(tail) else 0.0
    return TruncationReport(N, sums, tails, bound)


def solve_separated(prob: InterpolationProblem, tol: float = 1e-10, max_iter: int = 200):
    """Interpolate on a finite separated sequence by truncation, Neumann iteration on
    the tail and one-node augmentation for each head node.

    Returns ``(f, report)`` where ``report`` holds the truncation report and the
    Neumann trace.
    """
    seq, order = prob.seq.sorted_by_delta()
    sp = prob.space
    vals = prob.targets.values[order]
    trunc = truncate_to_contracting_tail(seq, sp, prob.m)
    head = np.arange(trunc.N - 1)
    tail = np.arange(trunc.N - 1, len(seq))
    tail_prob = InterpolationProblem(seq.subset(tail),
                                     WeightedValueSequence(vals[tail], sp.value_weight),
                                     sp, prob.scheme, prob.m)
    f, trace = solve_or_raise(tail_prob, tol, max_iter)
    current = tail_prob
    for k in head[::-1]:
        b = seq.points[k]
        vf = vanishing_function(current, b)
        f = augment_point(f, vf, b, vals[k], None, tol)
        pts = np.concatenate([current.seq.points, b[None, :]])
        current = InterpolationProblem(
            PointSequence(pts),
            WeightedValueSequence(np.append(current.targets.values, vals[k]), sp.value_weight),
            sp, prob.scheme, prob.m,
        )
    return f, {"truncation": trunc, "trace": trace}
