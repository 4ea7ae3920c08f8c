import math

import numpy as np
import pytest

from bergman_interp.exceptions import DomainError
from bergman_interp.geometry import DomainSpec, pseudo_distance_matrix
from bergman_interp.integration import SpaceParams
from bergman_interp.kernel import kernel
from bergman_interp.sequences import (
    PointSequence,
    WeightedValueSequence,
    borel_partition,
    decay_bound,
    generate_lattice,
    k_matrix,
    k_row_sums,
    k_sum,
    kernel_sum_sup,
    separation_diagnostics,
    lattice_grid,
    radial_sequence,
    separation_margin,
    sequence_norm,
    verify_lattice,
)

from conftest import random_ball


@pytest.fixture(scope="module")
def small_lattice():
    return generate_lattice(DomainSpec.disk(), 0.5, delta_min=0.05)


class TestPointSequence:
    def test_deltas_and_sorting(self):
        seq = PointSequence.disk([0.9, 0.0, 0.5j])
        assert np.allclose(seq.deltas, [0.1, 1.0, 0.5])
        assert not seq.is_sorted_by_delta()
        s, order = seq.sorted_by_delta()
        assert order.tolist() == [1, 2, 0]
        assert s.is_sorted_by_delta()

    def test_rejects_exterior(self):
        with pytest.raises(DomainError):
            PointSequence.disk([0.2, 1.0])

    def test_empty(self):
        seq = PointSequence(np.zeros((0, 2)))
        assert len(seq) == 0 and seq.n == 2


class TestSequenceNorm:
    def test_example(self):
        v = WeightedValueSequence([1.0, 1.0], 2.0)
        assert sequence_norm(v, [0.5, 0.5], 1.0) == pytest.approx(0.5)

    def test_hand_sum(self):
        v = WeightedValueSequence([1 + 1j, -2.0, 0.5j], 1.5)
        d = np.array([0.9, 0.2, 0.05])
        want = sum((dk**1.5 * abs(vk)) ** 3 for dk, vk in zip(d, v.values)) ** (1 / 3)
        assert v.norm(d, 3.0) == pytest.approx(want, rel=1e-14)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            sequence_norm(WeightedValueSequence([1.0], 1.0), [0.5, 0.5], 1.0)

    def test_empty(self):
        assert sequence_norm(WeightedValueSequence([], 1.0), [], 2.0) == 0.0


class TestSeparation:
    def test_examples(self):
        assert separation_margin(PointSequence.disk([0, 0.5])) == pytest.approx(math.atanh(0.5))
        assert separation_margin(PointSequence.disk([0.3, 0.3])) == 0.0
        assert separation_margin(PointSequence.disk([0.3])) == math.inf

    def test_radial_sequence(self):
        seq = radial_sequence(1.0, 12, spread=False)
        # points on a ray: the closest pair is the last consecutive one, and the
        # distance decreases toward artanh(1/3) as delta halves
        x = 1 - 2.0 ** -np.arange(1, 13)
        want = min(math.atanh((b - a) / (1 - a * b)) for a, b in zip(x[:-1], x[1:]))
        assert separation_margin(seq) == pytest.approx(want, rel=1e-9)
        assert want > math.atanh(1 / 3)


class TestKSum:
    @pytest.mark.parametrize("p,q", [(1.0, 2.0), (0.5, 1.5), (2.0, 3.0)])
    def test_single_point(self, p, q):
        seq = PointSequence.disk([0.0])
        assert k_sum(seq, p, q) == pytest.approx((1 / math.pi) ** ((p + q) / 2))
        assert k_sum(seq, p, q, include_diagonal=False) == 0.0

    def test_two_point_brute_force(self):
        a = np.array([0.0, 0.9])
        p, q = 1.0, 3.0
        d = 1 - np.abs(a)
        m = np.array([[d[i] ** p * d[j] ** q * abs(kernel(a[i:i + 1], a[j:j + 1])) ** ((p + q) / 2)
                       for j in range(2)] for i in range(2)])
        seq = PointSequence.disk(a)
        assert np.allclose(k_matrix(seq, p, q), m, rtol=1e-13)
        assert np.allclose(k_row_sums(seq, p, q), m.sum(axis=1), rtol=1e-13)
        assert k_sum(seq, p, q) == pytest.approx(m.sum(axis=1).max())

    def test_empty(self):
        assert k_sum(PointSequence(np.zeros((0, 1))), 1.0, 2.0) == 0.0

    def test_transpose(self, rng):
        seq = PointSequence(random_ball(rng, 30, 2))
        assert np.allclose(k_matrix(seq, 1.0, 2.5), k_matrix(seq, 2.5, 1.0).T, rtol=1e-12)

    def test_normalized_diagonal_is_one(self, rng):
        seq = PointSequence(random_ball(rng, 20, 2, 0.999))
        assert np.allclose(np.diag(k_matrix(seq, 0.7, 2.1, normalized=True)), 1.0)

    def test_row_subset(self, rng):
        seq = PointSequence(random_ball(rng, 20))
        assert np.allclose(k_matrix(seq, 1, 2, rows=[3, 5]), k_matrix(seq, 1, 2)[[3, 5]])

    def test_monotone_under_subsequences(self, rng):
        seq = PointSequence(random_ball(rng, 200, max_radius=0.99))
        full = k_sum(seq, 1.0, 2.0)
        for size in (10, 50, 150):
            assert k_sum(seq.subset(np.arange(size)), 1.0, 2.0) <= full + 1e-15

    def test_kernel_sum_includes_sequence(self, rng):
        seq = PointSequence(random_ball(rng, 50))
        assert kernel_sum_sup(seq, 1.0, 2.0, seq.points) == pytest.approx(k_sum(seq, 1.0, 2.0))


class TestLattice:
    def test_coarse_lattice(self):
        lat = generate_lattice(DomainSpec.disk(), 0.99, delta_min=0.5)
        assert 1 <= len(lat.seq) <= 10
        assert lat.report["covering_violations"] == 0

    def test_properties(self, small_lattice):
        lat = small_lattice
        rep = verify_lattice(lat)
        assert rep["covering_violations"] == 0
        assert rep["disjointness_violations"] == 0
        assert rep["multiplicity_bound"] < 50
        assert separation_margin(lat.seq) >= 2 * math.atanh(lat.r / 3) - 1e-12
        assert np.all(lat.seq.deltas >= lat.delta_min - 1e-12)

    def test_deterministic(self, small_lattice):
        again = generate_lattice(DomainSpec.disk(), 0.5, delta_min=0.05)
        assert np.array_equal(again.seq.points, small_lattice.seq.points)

    def test_ball_lattice(self):
        lat = generate_lattice(DomainSpec.ball(2), 0.6, delta_min=0.3)
        assert lat.report["covering_violations"] == 0
        assert lat.report["disjointness_violations"] == 0

    def test_grid_respects_truncation(self):
        g = lattice_grid(1, 0.1, 0.05)
        assert np.all(1 - np.abs(g[:, 0]) >= 0.1 - 1e-12)

    def test_bad_radius(self):
        with pytest.raises(DomainError):
            generate_lattice(DomainSpec.disk(), 1.2)


class TestBorelPartition:
    def test_membership(self, small_lattice, rng):
        part = borel_partition(small_lattice)
        centers = small_lattice.seq.points
        # every center lies in its own set
        assert part.classify(centers).tolist() == list(range(len(centers)))
        zs = random_ball(rng, 3000, max_radius=0.94)
        k = part.classify(zs)
        assert np.all(k >= 0)
        d = pseudo_distance_matrix(zs, centers)
        assert np.all(d[np.arange(len(zs)), k] < small_lattice.r)
        inner = d < small_lattice.r / 3
        rows = np.flatnonzero(inner.any(axis=1))
        assert np.array_equal(k[rows], inner[rows].argmax(axis=1))

    def test_verify(self, small_lattice, rng):
        rep = borel_partition(small_lattice).verify(random_ball(rng, 3000, max_radius=0.94))
        assert rep["unassigned"] == 0
        assert rep["multiply_assigned"] == 0
        assert rep["inner_ball_violations"] == 0
        assert rep["outer_ball_violations"] == 0
        assert rep["classifier_mismatches"] == 0


class TestSeparationDiagnostics:
    def test_single_point(self):
        rep = separation_diagnostics(PointSequence.disk([0.0]), SpaceParams(1.0, 1.0), 0.5)
        assert rep.multiplicity == 1
        assert rep.k_sums[(1.0, 2.0)] == pytest.approx(1 / math.pi ** 1.5)
        assert set(rep.to_dict()) == {"multiplicity", "r", "k_sums", "kernel_sums", "carleson"}

    def test_duplicated_cluster_moves_together(self, small_lattice):
        sp = SpaceParams(2.0, 1.0)
        seq = small_lattice.seq
        base = separation_diagnostics(seq, sp, 0.5)
        dup = separation_diagnostics(PointSequence(np.concatenate([seq.points] * 3)), sp, 0.5)
        assert dup.multiplicity == 3 * base.multiplicity
        for key in base.k_sums:
            assert dup.k_sums[key] == pytest.approx(3 * base.k_sums[key], rel=1e-10)
        for key in base.carleson:
            assert dup.carleson[key] == pytest.approx(3 * base.carleson[key], rel=1e-10)

    def test_empty(self):
        rep = separation_diagnostics(PointSequence(np.zeros((0, 1))), SpaceParams(1.0, 0.0), 0.5)
        assert rep.multiplicity == 0
        assert all(v == 0.0 for v in rep.k_sums.values())


class TestRadialDecay:
    def test_sequence(self):
        seq = radial_sequence(4.0, 5, n=2)
        assert np.allclose(seq.deltas, 2.0 ** -np.arange(1, 6) / 4)
        with pytest.raises(ValueError):
            radial_sequence(0.5, 3)

    def test_bound_formula(self):
        assert decay_bound(1.0, 3.0, 1, 2.0) == pytest.approx(math.pi**-3 / 2)
        # K-sum with the diagonal dominates nothing beyond the bound's order
        seq = radial_sequence(8.0, 20)
        assert k_sum(seq, 1.0, 5.0, include_diagonal=False) <= decay_bound(1.0, 3.0, 1, 8.0) * 20
