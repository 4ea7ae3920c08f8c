"""Point sequences in the ball: weighted sequence norms, separation, lattices,
the Borel partition subordinate to a lattice, and the kernel double sums

    K({a_k}, p, q) = sup_k sum_j delta(a_k)^p delta(a_j)^q |K(a_k, a_j)|^((p+q)/(n+1))

that control the approximate-extension scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError
from .geometry import (
    DomainSpec,
    PointIndex,
    boundary_distance,
    check_interior,
    norm_sq,
    pseudo_distance,
    pseudo_distance_matrix,
    sphere_directions,
)
from .integration import AtomicMeasure, SpaceParams, carleson_test, probe_grid


@dataclass
class PointSequence:
    """Finite ordered sequence of interior points with cached boundary distances."""

    points: np.ndarray
    deltas: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise ValueError("points must have shape (N, n)")
        if len(pts):
            check_interior(pts)
        self.points = pts
        self.deltas = np.atleast_1d(boundary_distance(pts)) if len(pts) else np.zeros(0)

    @classmethod
    def disk(cls, values) -> "PointSequence":
        return cls(np.asarray(values, dtype=complex).reshape(-1, 1))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def subset(self, idx) -> "PointSequence":
        pts = self.points[idx]
        return PointSequence(pts.reshape(-1, self.n))

    def sorted_by_delta(self) -> tuple["PointSequence", np.ndarray]:
        """Copy ordered by decreasing ``delta`` (stable), with the permutation used."""
        order = np.argsort(-self.deltas, kind="stable")
        return self.subset(order), order

    def is_sorted_by_delta(self) -> bool:
        return bool(np.all(np.diff(self.deltas) <= 0))


@dataclass
class WeightedValueSequence:
    """Target values ``v_k`` measured in ``l^p_w``: ``sum (delta_k^w |v_k|)^p``."""

    values: np.ndarray
    weight_exponent: float

    def __post_init__(self):
        self.values = np.atleast_1d(np.asarray(self.values, dtype=complex))

    def __len__(self) -> int:
        return len(self.values)

    def norm(self, deltas, p: float) -> float:
        return sequence_norm(self, deltas, p)


def sequence_norm(v: WeightedValueSequence, deltas, p: float) -> float:
    """``(sum_k (delta_k^w |v_k|)^p)^(1/p)`` with ``w = v.weight_exponent``."""
    deltas = np.asarray(deltas, dtype=float)
    if deltas.shape != v.values.shape:
        raise ValueError(f"{len(v.values)} values but {deltas.size} boundary distances")
    if len(deltas) == 0:
        return 0.0
    terms = deltas**v.weight_exponent * np.abs(v.values)
    return float(np.sum(terms**p) ** (1.0 / p))


def separation_margin(seq: PointSequence) -> float:
    """Smallest Kobayashi distance between two members (``inf`` below two points)."""
    if len(seq) < 2:
        return math.inf
    best = 1.0
    for s in range(0, len(seq), 1024):
        d = pseudo_distance_matrix(seq.points[s : s + 1024], seq.points)
        rows = np.arange(d.shape[0])
        d[rows, s + rows] = np.inf
        best = min(best, float(d.min()))
    return float(np.arctanh(best))


# -- lattices ---------------------------------------------------------------


@dataclass
class Lattice:
    """An ``r``-lattice truncated to ``delta >= delta_min``.

    ``report`` holds the verification counts: covering and ``r/3``
    disjointness violations and the largest ``N(z, R)`` seen on the
    certification grid.
    """

    seq: PointSequence
    r: float
    delta_min: float
    report: dict = field(default_factory=dict)

    @property
    def R(self) -> float:
        return 0.5 * (1.0 + self.r)

    @property
    def separation(self) -> float:
        """Pseudo-distance ``tanh(2 artanh(r/3))`` below which ``r/3``-balls could meet."""
        return math.tanh(2.0 * math.atanh(self.r / 3.0))


def _disk_rings(delta_min: float, spacing: float, offset: float = 0.0) -> np.ndarray:
    t_max = math.atanh(1.0 - delta_min)
    ts = np.arange(offset * spacing, t_max, spacing)
    if ts.size == 0 or ts[-1] < t_max - 1e-12:
        ts = np.append(ts, t_max)
    pts = []
    for i, t in enumerate(ts):
        if t == 0.0:
            pts.append(np.zeros(1, dtype=complex))
            continue
        m = max(1, math.ceil(math.pi * math.sinh(2.0 * t) / spacing))
        shift = 0.5 * ((i + (1 if offset else 0)) % 2)
        theta = 2.0 * np.pi * (np.arange(m) + shift) / m
        pts.append(math.tanh(t) * np.exp(1j * theta))
    return np.concatenate(pts)[:, None]


def _ball_shells(n: int, delta_min: float, spacing: float, offset: float = 0.0) -> np.ndarray:
    t_max = math.atanh(1.0 - delta_min)
    ts = np.arange(offset * spacing, t_max, spacing)
    if ts.size == 0 or ts[-1] < t_max - 1e-12:
        ts = np.append(ts, t_max)
    sphere = 2.0 * math.pi**n / math.factorial(n - 1)
    pts = []
    for i, t in enumerate(ts):
        rho = math.tanh(t)
        if rho == 0.0:
            pts.append(np.zeros((1, n), dtype=complex))
            continue
        # one Reeb direction of length rho/(1-rho^2), 2n-2 of length rho/sqrt(1-rho^2)
        area = sphere * (rho / (1 - rho**2)) * (rho / math.sqrt(1 - rho**2)) ** (2 * n - 2)
        m = max(1, math.ceil(area / spacing ** (2 * n - 1)))
        pts.append(rho * sphere_directions(n, m, seed=1000 * i + int(offset * 7)))
    return np.concatenate(pts)


def lattice_grid(n: int, delta_min: float, spacing: float, offset: float = 0.0) -> np.ndarray:
    """Hyperbolically uniform grid of ``{delta >= delta_min}``, ordered by decreasing ``delta``
    then angle, with about ``spacing^-2n`` points per unit invariant volume."""
    if n == 1:
        return _disk_rings(delta_min, spacing, offset)
    return _ball_shells(n, delta_min, spacing, offset)


def _greedy_separated(cands: np.ndarray, t: float, block: int = 2048) -> np.ndarray:
    n = cands.shape[1]
    accepted = np.zeros((0, n), dtype=complex)
    index = None
    for s in range(0, len(cands), block):
        chunk = cands[s : s + block]
        if index is not None:
            chunk = chunk[index.count(chunk, t) == 0]
        local: list[np.ndarray] = []
        for c in chunk:
            if local:
                d = pseudo_distance_matrix(c[None, :], np.array(local))
                if d.min() < t:
                    continue
            local.append(c)
        if local:
            accepted = np.concatenate([accepted, np.array(local)])
            index = PointIndex(accepted)
    return accepted


def default_spacing(n: int, r: float) -> float:
    """Candidate grid step: ``0.05`` on the disk; on the ball half the slack
    ``artanh(r) - 2 artanh(r/3)`` left between separation and covering."""
    if n == 1:
        return 0.05
    return 0.5 * (math.atanh(r) - 2.0 * math.atanh(r / 3.0))


def generate_lattice(domain: DomainSpec, r: float, delta_min: float = 1e-3,
                     spacing: float | None = None, verify: bool = True) -> Lattice:
    """Greedy ``r``-lattice of ``{delta >= delta_min}``.

    Candidates from :func:`lattice_grid` are scanned in order and kept when
    their Kobayashi distance to every kept center is at least
    ``2 artanh(r/3)``; the result is maximal, so the ``r/3``-balls are disjoint
    and every candidate lies within pseudo-distance ``tanh(2 artanh(r/3)) < r``
    of a center. Verification runs on a second, staggered grid and raises
    ``ValueError`` if coverage cannot be certified at this ``spacing``.
    """
    if not 0.0 < r < 1.0:
        raise DomainError(f"lattice radius must lie in (0, 1), got {r}")
    if not 0.0 < delta_min < 1.0:
        raise DomainError(f"delta_min must lie in (0, 1), got {delta_min}")
    spacing = default_spacing(domain.n, r) if spacing is None else spacing
    cands = lattice_grid(domain.n, delta_min, spacing)
    lat = Lattice(PointSequence(np.zeros((0, domain.n), dtype=complex)), r, delta_min)
    centers = _greedy_separated(cands, lat.separation)
    lat.seq = PointSequence(centers)
    lat.report = {"centers": len(centers), "candidates": len(cands), "spacing": spacing}
    if verify:
        lat.report.update(verify_lattice(lat, spacing))
        if lat.report["covering_violations"]:
            raise ValueError(
                f"coverage not certified: {lat.report['covering_violations']} grid points "
                f"uncovered; retry with spacing <= {spacing / 2:g}"
            )
    return lat


def verify_lattice(lat: Lattice, spacing: float | None = None, grid=None) -> dict:
    """Check covering, ``r/3`` disjointness and bounded multiplicity on a grid."""
    spacing = default_spacing(lat.seq.n, lat.r) if spacing is None else spacing
    if grid is None:
        grid = lattice_grid(lat.seq.n, lat.delta_min, spacing, offset=0.5)
    index = PointIndex(lat.seq.points)
    cover = index.count(grid, lat.r)
    inner_count = index.count(grid, lat.r / 3.0)
    rep, flat = index.pairs(lat.seq.points, lat.separation)
    close_pairs = int(np.sum(rep < flat))
    mult = index.count(np.concatenate([grid, lat.seq.points]), lat.R)
    return {
        "grid_points": len(grid),
        "covering_violations": int(np.sum(cover == 0)),
        "disjointness_violations": int(np.sum(inner_count > 1)) + close_pairs,
        "multiplicity_bound": int(mult.max()) if len(mult) else 0,
        "R": lat.R,
    }


# -- Borel partition --------------------------------------------------------


@dataclass
class BorelPartition:
    """Disjoint sets ``D_k`` with ``B(a_k, r/3) <= D_k <= B(a_k, r)`` covering the lattice region.

    ``E_k = B(a_k, r) - union_{j != k} B(a_j, r/3)`` and ``D_k = E_k - union_{i<k} D_i``,
    so a point belongs to ``D_k`` for the first ``k`` (lattice order) with ``z in E_k``.
    """

    lattice: Lattice
    _index: PointIndex = field(init=False, repr=False)

    def __post_init__(self):
        self._index = PointIndex(self.lattice.seq.points)

    def classify(self, zs) -> np.ndarray:
        """Index ``k`` of the set ``D_k`` containing each point; ``-1`` if none."""
        zs = np.atleast_2d(check_interior(zs))
        r = self.lattice.r
        rep, flat = self._index.pairs(zs, r)
        irep, iflat = self._index.pairs(zs, r / 3.0)
        owner = np.full(len(zs), -1)
        owner[irep] = iflat
        out = np.full(len(zs), -1)
        # first r-ball center; pairs are sorted by (point, center)
        if len(rep):
            starts = np.searchsorted(rep, np.arange(len(zs)))
            has = np.bincount(rep, minlength=len(zs)) > 0
            out[has] = flat[starts[has]]
        out[owner >= 0] = owner[owner >= 0]
        return out

    def verify(self, zs) -> dict:
        """Recompute ``D_k`` membership from the set definitions and count violations of
        ``B(a_k, r/3) <= D_k <= B(a_k, r)``, disjointness and covering."""
        zs = np.atleast_2d(check_interior(zs))
        r = self.lattice.r
        rep, flat = self._index.pairs(zs, r)
        irep, iflat = self._index.pairs(zs, r / 3.0)
        n_inner = np.bincount(irep, minlength=len(zs))
        inner_of = np.full(len(zs), -1)
        inner_of[irep] = iflat
        # z in E_k  iff  z in B(a_k, r) and no other r/3-ball contains z
        in_e = (n_inner[rep] == 0) | ((n_inner[rep] == 1) & (inner_of[rep] == flat))
        # z in D_k iff z in E_k and z in no earlier D_i; walk each point's sorted centers
        pos = np.flatnonzero(in_e)
        _, first = np.unique(rep[pos], return_index=True)
        in_d = np.zeros(len(rep), dtype=bool)
        in_d[pos[first]] = True
        memberships = np.bincount(rep[in_d], minlength=len(zs))
        assigned = np.full(len(zs), -1)
        assigned[rep[in_d]] = flat[in_d]
        classified = self.classify(zs)
        inner_violations = int(np.sum((inner_of >= 0) & (assigned != inner_of)))
        # recheck D_k <= B(a_k, r) with a direct distance evaluation
        has = assigned >= 0
        centers = self.lattice.seq.points[assigned[has]]
        outer_violations = int(np.sum(pseudo_distance(zs[has], centers) >= r))
        return {
            "points": len(zs),
            "unassigned": int(np.sum(memberships == 0)),
            "multiply_assigned": int(np.sum(memberships > 1)),
            "inner_ball_violations": inner_violations,
            "outer_ball_violations": outer_violations,
            "classifier_mismatches": int(np.sum(classified != assigned)),
        }


def borel_partition(lat: Lattice) -> BorelPartition:
    return BorelPartition(lat)


# -- kernel double sums -----------------------------------------------------


def _log_delta(points: np.ndarray, normalized: bool) -> np.ndarray:
    if normalized:
        return np.log1p(-norm_sq(points))
    return np.log(1.0 - np.sqrt(norm_sq(points)))


def _log_abs_kernel(zs: np.ndarray, ws: np.ndarray, normalized: bool) -> np.ndarray:
    n = zs.shape[-1]
    x = 1.0 - zs @ ws.conj().T
    la = -0.5 * (n + 1) * np.log(x.real**2 + x.imag**2)
    if not normalized:
        la = la + math.log(DomainSpec(n).kernel_norm)
    return la


def _pair_row_sums(zs: np.ndarray, ws: np.ndarray, pairs, normalized: bool = False,
                   diagonal_offset: int | None = None, block: int = 2048) -> np.ndarray:
    """Row sums ``sum_j delta(z_i)^p delta(w_j)^q |K(z_i, w_j)|^((p+q)/(n+1))`` for each
    exponent pair, shape ``(len(pairs), len(zs))``. With ``diagonal_offset`` set,
    the entry ``(i, i + diagonal_offset)`` is left out."""
    n = zs.shape[-1]
    lw = _log_delta(ws, normalized)
    out = np.zeros((len(pairs), len(zs)))
    for s in range(0, len(zs), block):
        z = zs[s : s + block]
        lz = _log_delta(z, normalized)
        lk = _log_abs_kernel(z, ws, normalized) / (n + 1)
        rows = np.arange(len(z))
        for i, (pe, qe) in enumerate(pairs):
            m = np.exp(pe * lz[:, None] + qe * lw[None, :] + (pe + qe) * lk)
            if diagonal_offset is not None:
                m[rows, s + rows + diagonal_offset] = 0.0
            out[i, s : s + len(z)] = m.sum(axis=1)
    return out


def k_matrix(seq: PointSequence, p_exp: float, q_exp: float, normalized: bool = False,
             rows=None) -> np.ndarray:
    """``M_kj = delta_k^p delta_j^q |K(a_k, a_j)|^((p+q)/(n+1))``.

    With ``normalized`` the boundary distance is replaced by ``1 - |a|^2`` and
    the kernel by ``(1 - <z, w>)^-(n+1)``; then ``M_kk = 1`` for every
    exponent pair, which is the setting where the approximate extension
    reproduces its own diagonal exactly.
    """
    pts = seq.points
    sub = pts if rows is None else pts[rows]
    n = seq.n
    ld = _log_delta(pts, normalized)
    lk = ld if rows is None else ld[rows]
    logm = (p_exp * lk[:, None] + q_exp * ld[None, :]
            + (p_exp + q_exp) / (n + 1) * _log_abs_kernel(sub, pts, normalized))
    return np.exp(logm)


def k_row_sums(seq: PointSequence, p_exp: float, q_exp: float, include_diagonal: bool = True,
               normalized: bool = False) -> np.ndarray:
    """``sum_j M_kj`` for every ``k`` (the quantity whose supremum is :func:`k_sum`)."""
    if len(seq) == 0:
        return np.zeros(0)
    off = None if include_diagonal else 0
    return _pair_row_sums(seq.points, seq.points, [(p_exp, q_exp)], normalized, off)[0]


def k_sum(seq: PointSequence, p_exp: float, q_exp: float, include_diagonal: bool = True,
          normalized: bool = False) -> float:
    """``K({a_k}, p, q)``; ``0`` for the empty sequence."""
    if len(seq) == 0:
        return 0.0
    return float(k_row_sums(seq, p_exp, q_exp, include_diagonal, normalized).max())


def kernel_sum_sup(seq: PointSequence, p_exp: float, q_exp: float, grid) -> float:
    """``sup_z sum_j delta(z)^p delta(a_j)^q |K(z, a_j)|^((p+q)/(n+1))`` over grid points."""
    if len(seq) == 0:
        return 0.0
    grid = np.atleast_2d(check_interior(grid))
    return float(_pair_row_sums(grid, seq.points, [(p_exp, q_exp)])[0].max())


@dataclass
class SeparationReport:
    """Side-by-side quantities that are finite together exactly when the
    sequence is a finite union of separated sequences."""

    multiplicity: int
    r: float
    k_sums: dict
    kernel_sums: dict
    carleson: dict

    def to_dict(self) -> dict:
        fmt = lambda d: {f"{k[0]:g},{k[1]:g}" if isinstance(k, tuple) else f"{k:g}": v
                         for k, v in d.items()}
        return {
            "multiplicity": self.multiplicity,
            "r": self.r,
            "k_sums": fmt(self.k_sums),
            "kernel_sums": fmt(self.kernel_sums),
            "carleson": fmt(self.carleson),
        }


def default_exponent_pairs(sp: SpaceParams) -> list[tuple[float, float]]:
    n = sp.n
    pairs = []
    for q in (n + 0.5, n + 1.0, n + 2.0):
        for p in (0.5, 1.0, q):
            pairs.append((p, q))
    pairs.append((1.0, sp.gamma))
    if sp.p > 1:
        pairs.append((sp.gamma / sp.p, sp.gamma / sp.q))
        pairs.append((sp.gamma / sp.q, sp.gamma / sp.p))
    return list(dict.fromkeys(pairs))


def separation_diagnostics(seq: PointSequence, sp: SpaceParams, r: float, grid=None,
                   pairs=None) -> SeparationReport:
    """Counting, double-sum, kernel-sum and Carleson diagnostics for ``seq``.

    ``grid`` (default: the sequence plus :func:`probe_grid`) supplies the
    points over which suprema in ``z`` are taken. Keys of the ``k_sums`` and
    ``kernel_sums`` maps are exponent pairs ``(p, q)``; Carleson constants are
    keyed by ``q`` and test ``sum delta(a_k)^q`` against ``delta^q``.
    """
    if not 0.0 < r < 1.0:
        raise DomainError(f"radius must lie in (0, 1), got {r}")
    n = seq.n
    pairs = pairs or default_exponent_pairs(sp)
    qs = sorted({q for _, q in pairs})
    if len(seq) == 0:
        zero = {pq: 0.0 for pq in pairs}
        return SeparationReport(0, r, zero, dict(zero), {q: 0.0 for q in qs})
    # the kernel-sum supremum over the sequence itself is the K-sum, so the
    # default grid only needs the extra probes
    extra = probe_grid(n) if grid is None else np.atleast_2d(check_interior(grid))
    on_seq = _pair_row_sums(seq.points, seq.points, pairs).max(axis=1)
    on_extra = _pair_row_sums(extra, seq.points, pairs).max(axis=1)
    ks = {pq: float(v) for pq, v in zip(pairs, on_seq)}
    sup = np.maximum(on_seq, on_extra) if grid is None else on_extra
    vs = {pq: float(v) for pq, v in zip(pairs, sup)}
    full = np.concatenate([seq.points, extra]) if grid is None else extra
    index = PointIndex(seq.points)
    mult = int(index.count(full, r).max())
    carl = {}
    for q in qs:
        mu = AtomicMeasure(seq.points, seq.deltas**q)
        carl[q] = carleson_test(mu, q - n - 1, r, grid=full)[1]
    return SeparationReport(mult, r, ks, vs, carl)


# -- radially decaying sequences --------------------------------------------


def radial_sequence(D: float, count: int, n: int = 1, spread: bool = True) -> PointSequence:
    """Points with ``delta(a_k) = 2^-k / D``, ``k = 1..count``.

    With ``spread`` the points turn by the golden angle so that they do not
    all sit on one ray.
    """
    if D < 1:
        raise ValueError("need D >= 1 so that all points are interior")
    k = np.arange(1, count + 1)
    rad = 1.0 - 2.0**-k / D
    theta = k * math.pi * (3.0 - math.sqrt(5.0)) if spread else np.zeros(count)
    pts = np.zeros((count, n), dtype=complex)
    pts[:, 0] = rad * np.exp(1j * theta)
    return PointSequence(pts)


def decay_bound(m: float, beta: float, n: int, D: float) -> float:
    """``C^((m + n + beta + 1)/(n+1)) / D`` with ``C = c_n`` the constant in
    ``K(z, z) <= C delta(z)^-(n+1)``."""
    c = DomainSpec(n).kernel_norm
    return c ** ((m + n + beta + 1) / (n + 1)) / D
