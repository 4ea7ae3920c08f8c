import math

import numpy as np
import pytest

from bergman_interp.quadrature import (
    GaussRule,
    QMCRule,
    integrate,
    integrate_with_error,
    radial_jacobi,
    rule_from_config,
    rule_to_config,
)


def ones(w):
    return np.ones(len(w))


@pytest.mark.parametrize("beta", [0.0, 1.0, 2.5])
def test_boundary_weight_integral(beta):
    want = 2 * math.pi / ((beta + 1) * (beta + 2))
    assert integrate(ones, alpha=beta) == pytest.approx(want, rel=1e-12)


def test_radial_jacobi_moments():
    r, w = radial_jacobi(10, 0.5, 1.0)
    # int_0^1 r (1 - r)^0.5 dr = B(2, 1.5)
    assert np.sum(w) == pytest.approx(4 / 15, rel=1e-12)
    assert np.all((r > 0) & (r < 1))


def test_disk_moments_and_radius():
    f = lambda w: np.abs(w[:, 0]) ** 2
    assert integrate(f) == pytest.approx(math.pi / 2, rel=1e-12)
    assert integrate(ones, radius=0.5) == pytest.approx(math.pi / 4, rel=1e-12)


def test_graded_rule_handles_peak():
    a = 0.999
    f = lambda w: 1 / np.abs(1 - a * w[:, 0]) ** 4
    # int |1 - a w|^-4 = pi / (1 - a^2)^2
    got = integrate(f, foci=np.array([a]))
    assert got == pytest.approx(math.pi / (1 - a * a) ** 2, rel=1e-8)


def test_ball_rules():
    assert integrate(ones, n=2) == pytest.approx(math.pi**2 / 2, rel=1e-12)
    f = lambda w: np.abs(w[:, 0] * w[:, 1]) ** 2
    # monomial moment pi^n a! / (n + |a|)! = pi^2 / 24
    assert integrate(f, n=2) == pytest.approx(math.pi**2 / 24, rel=1e-10)
    assert integrate(ones, n=3) == pytest.approx(math.pi**3 / 6, rel=1e-3)


def test_qmc_rule():
    rule = QMCRule(samples=1 << 16, seed=3)
    assert integrate(ones, rule, n=1) == pytest.approx(math.pi)
    assert integrate(ones, rule, n=1, alpha=1.0) == pytest.approx(math.pi / 3, rel=1e-2)


def test_config_round_trip():
    for rule in (GaussRule(nodes_radial=64, nodes_angular=128, panel_nodes=10),
                 QMCRule(samples=1024, seed=7)):
        assert rule_from_config(rule_to_config(rule)) == rule
    with pytest.raises(ValueError):
        rule_from_config({"rule": "simpson"})


def test_error_estimate():
    val, err = integrate_with_error(ones, alpha=1.0)
    assert val == pytest.approx(math.pi / 3)
    assert err < 1e-12


def test_rejects_bad_weight():
    with pytest.raises(ValueError):
        integrate(ones, alpha=-1.0)
