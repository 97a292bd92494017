import math

import numpy as np
import pytest

from plurigreen.config import RunConfig, SearchBudget
from plurigreen.geometry import Ball, SublevelDcg, unit_bidisk, unit_disk
from plurigreen.metrics import (
    EUCLIDEAN,
    HermitianMetric,
    azukawa,
    bergman_constants,
    derivative_bound_check,
    disk_bergman_density,
    royden,
    sigma_estimates,
    suita_check,
)


def test_azukawa_ball_is_log_norm(cfg):
    B = Ball((0, 0), 1.0)
    for v in ((1, 0), (0.3, 0.4j), (2, -1)):
        a = azukawa(B, (0, 0), v, cfg)
        assert a.lo <= math.log(np.linalg.norm(v)) + 1e-12 <= a.hi + 2e-12
        assert a.hi - a.lo < 1e-9


def test_azukawa_homogeneous(cfg):
    P = unit_bidisk()
    a = azukawa(P, (0.1, 0), (1, 0.5), cfg)
    b = azukawa(P, (0.1, 0), (3j, 1.5j), cfg)
    assert b.hi == pytest.approx(a.hi + math.log(3), abs=1e-9)


def test_azukawa_polydisk_is_max_norm(cfg):
    # A(0, v) = log max |v_j| on the bidisk
    a = azukawa(unit_bidisk(), (0, 0), (0.3, 0.7), cfg)
    assert a.lo == pytest.approx(math.log(0.7), abs=1e-9)


def test_azukawa_sublevel_bracketed(cfg):
    S = SublevelDcg.default()
    a = azukawa(S, (0, 0), (1, 0), RunConfig(budget=SearchBudget(disk_search=False, azukawa_radii=4)))
    assert a.lo <= a.hi


def test_royden_dominates_azukawa_on_ball(quick_cfg):
    B = Ball((0, 0), 1.0)
    r = royden(B, (0.3, 0), (0, 1), quick_cfg)
    a = azukawa(B, (0.3, 0), (0, 1), quick_cfg)
    assert r.hi >= a.hi - 0.02


def test_bergman_closed_forms():
    b = bergman_constants("ball", 2)
    assert b.sigma_i == b.sigma_s == -math.log(math.sqrt(3))
    p = bergman_constants("polydisk", 2)
    assert p.sigma_s == -math.log(math.sqrt(2))
    assert p.sigma_i_stated == -math.log(2)
    assert p.sigma_i == pytest.approx(p.sigma_i_stated)
    # the two descriptions of the polydisk infimum differ once m > 2
    p3 = bergman_constants("polydisk", 3)
    assert p3.sigma_i != pytest.approx(p3.sigma_i_stated)
    # Bergman distance of the disk: sqrt 2 atanh r
    assert bergman_constants("polydisk", 1).distance_from_origin(0.5) == pytest.approx(math.sqrt(2) * math.atanh(0.5))
    with pytest.raises(ValueError):
        bergman_constants("hartogs", 2)


def test_bergman_metric_norms():
    H = HermitianMetric("bergman_ball", 2)
    assert H.norm((0, 0), (1, 0)) == pytest.approx(math.sqrt(3))
    assert H.density((0, 0)) == pytest.approx(9.0)
    with pytest.raises(ValueError):
        HermitianMetric("bergman_ball")


def test_sigma_on_bergman_ball(cfg):
    est = sigma_estimates(Ball((0, 0), 1.0), (0, 0), HermitianMetric("bergman_ball", 2), cfg)
    assert est.sigma_i[0] == pytest.approx(-math.log(math.sqrt(3)), abs=1e-9)
    assert est.sigma_s[1] == pytest.approx(-math.log(math.sqrt(3)), abs=1e-9)


def test_sigma_on_bergman_bidisk(cfg):
    est = sigma_estimates(unit_bidisk(), (0, 0), HermitianMetric("bergman_polydisk", 2), cfg)
    assert abs(est.sigma_s[1] + math.log(math.sqrt(2))) < 0.01
    # the diagonal is only approximated by the direction grid
    assert abs(est.sigma_i[0] + math.log(2)) < 0.1


def test_disk_bergman_density_oracle():
    # K(w, w) = 1 / (pi (1 - |w|^2)^2)
    assert disk_bergman_density((0.5,)) == pytest.approx(1 / (math.pi * 0.75**2))


@pytest.mark.parametrize("w", [0.0, 0.3, 0.6])
def test_suita_near_equality_on_disk(w, cfg):
    r = suita_check((w,), cfg=cfg)
    assert r.holds and abs(r.gap) <= 0.05


def test_suita_scaled_metric(cfg):
    # scaling H by 4 moves both sides by -log 2
    r = suita_check((0.0,), HermitianMetric("euclidean", scale=4.0), cfg)
    r0 = suita_check((0.0,), cfg=cfg)
    assert r.lhs == pytest.approx(r0.lhs - math.log(2), abs=1e-9)
    assert r.rhs == pytest.approx(r0.rhs - math.log(2), abs=1e-9)


def test_derivative_bound(cfg):
    rep = derivative_bound_check(Ball((0, 0), 1.0), (0, 0), EUCLIDEAN, trials=8, cfg=cfg)
    assert rep.max_violation <= 1e-9
