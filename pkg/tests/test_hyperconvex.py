import math

import numpy as np
import pytest

from plurigreen.bounds import green_interval, psh_lower_bound, validate_competitor
from plurigreen.config import RunConfig
from plurigreen.geometry import Ball, SublevelDcg, unit_bidisk, unit_disk
from plurigreen.hyperconvex import (
    GluingError,
    classify_pole,
    continuity_scan,
    exhaustion_check,
    glue_competitor,
    pole_radii,
    quadratic_spsh,
    ratio_test,
)
from plurigreen.intervals import BoundInterval


def test_pole_radii_fit_inside():
    r = pole_radii(Ball((0, 0), 1.0), (0.95, 0))
    assert r[0] < 0.05 and np.all(np.diff(r) < 0)


@pytest.mark.parametrize("domain", [Ball((0, 0), 1.0), unit_bidisk()], ids=["ball", "bidisk"])
def test_strict_pole_on_convex_models(domain, cfg):
    fit = classify_pole(domain, (0.2, 0.1), cfg)
    assert fit.classification == "Strict"
    assert fit.c1 <= fit.c2


def test_ball_pole_constant_near_zero(cfg):
    # g(z, 0) - log||z|| = 0 exactly on the unit ball
    fit = classify_pole(Ball((0, 0), 1.0), (0, 0), cfg)
    assert abs(fit.c1) <= 0.02 and abs(fit.c2) <= 0.02


def test_sublevel_dcg_pole_is_strict(cfg):
    assert classify_pole(SublevelDcg.default(), (0.5, 0), cfg).classification == "Strict"


def test_product_model_is_logarithmic_only():
    # D x C: g((z1, z2), w) = log|m_{w1}(z1)| vanishes to -inf along z1 = w1
    w = np.array([0.2 + 0j, 0.0])

    def bounds(z, w_):
        v = math.log(abs((z[0] - w_[0]) / (1 - np.conj(w_[0]) * z[0]))) if z[0] != w_[0] else -math.inf
        return BoundInterval(v, v)

    fit = classify_pole(unit_bidisk(), w, bounds=bounds)
    assert fit.classification == "LogarithmicOnly"
    assert fit.c1 == -math.inf and math.isfinite(fit.c2)


def test_no_pole_when_upper_envelope_diverges():
    fit = classify_pole(Ball((0, 0), 1.0), (0, 0), bounds=lambda z, w: BoundInterval(-math.inf, 0.0))
    assert fit.classification == "NoPole"


def test_pole_fit_json_encodes_infinities():
    fit = classify_pole(Ball((0, 0), 1.0), (0, 0), bounds=lambda z, w: BoundInterval(-math.inf, 0.0))
    assert fit.to_json()["c1"] == "-inf"


@pytest.fixture(scope="module")
def glued_ball():
    B = Ball((0, 0), 1.0)
    u = quadratic_spsh(B)
    return B, glue_competitor(B, u, (0.1, 0.05), w0=(0, 0), cfg=RunConfig())


def test_glued_seams_match(glued_ball):
    _, v = glued_ball
    assert v.seam_jumps(1000) <= 1e-9


def test_glued_sign_conditions(glued_ball):
    _, v = glued_ball
    sc = v.sign_conditions()
    assert sc["inner_above_on_dU"] > 0 and sc["inner_below_on_dB"] < 0


def test_glued_negative_and_admissible(glued_ball):
    B, v = glued_ball
    Z = B.sample(np.random.default_rng(3), 2000)
    assert np.all(v(Z) < 0)
    validate_competitor(B, v.field)


def test_glued_has_logarithmic_pole(glued_ball):
    _, v = glued_ball
    w = np.array(v.w)
    offsets = []
    for t in (1e-3, 1e-5, 1e-7):
        vals = v(np.array([w + t * np.array([1, 0]), w + t * np.array([0, 1j])]))
        offsets.append(vals - math.log(t))
    # v - log t settles to a finite constant as t -> 0
    offsets = np.array(offsets)
    assert np.all(np.isfinite(offsets))
    assert np.ptp(offsets) < 0.01


def test_glued_improves_no_competitor_baseline(glued_ball):
    B, v = glued_ball
    z = np.array([0.5, 0.0])
    base = psh_lower_bound(B, z, v.w, shipped=False)
    got = psh_lower_bound(B, z, v.w, extra=[v.field], shipped=False)
    assert base.lo == -math.inf and math.isfinite(got.lo)
    # and it never exceeds the true value
    assert got.lo <= B.green(z[None, :], np.array(v.w))[0] + 1e-12


def test_glue_rejects_far_pole():
    B = Ball((0, 0), 1.0)
    with pytest.raises(GluingError):
        glue_competitor(B, quadratic_spsh(B), (0.6, 0), w0=(0, 0))


def test_glue_needs_quadratic_field():
    from plurigreen.geometry import ScalarField

    B = Ball((0, 0), 1.0)
    with pytest.raises(GluingError):
        glue_competitor(B, ScalarField("f", lambda P: -np.ones(len(P))), (0, 0))


def test_ratio_test_on_ball(cfg):
    res = ratio_test(Ball((0, 0), 1.0), (0, 0), 0.3, cfg)
    assert res.delta > 0 and res.deviation <= cfg.eps
    deltas = [d for d, _ in res.table]
    devs = [e for _, e in res.table]
    # deviation shrinks with delta
    assert devs[-1] <= devs[0]
    assert res.delta in deltas


def test_ratio_is_one_at_zero_offset(cfg):
    res = ratio_test(unit_disk(), (0.2,), 0.3, cfg, deltas=[0.0])
    assert res.table[0][1] == pytest.approx(0.0, abs=1e-12)


def test_ratio_monotone_in_excluded_radius(cfg):
    near = ratio_test(Ball((0, 0), 1.0), (0, 0), 0.3, cfg)
    far = ratio_test(Ball((0, 0), 1.0), (0, 0), 0.5, cfg, deltas=[d for d, _ in near.table])
    assert far.delta >= near.delta


def test_exhaustion_ball(cfg):
    rep = exhaustion_check(Ball((0, 0), 1.0), (0, 0), [-1.0], cfg, rays=12)
    lvl = rep.levels[0]
    # {g < -1} is the ball of radius e^-1
    assert lvl.margin_hi == pytest.approx(1 - math.exp(-1), abs=1e-6)
    assert lvl.margin_lo == pytest.approx(1 - math.exp(-1), abs=1e-6)
    assert rep.all_positive and rep.b_violations == 0


def test_exhaustion_bidisk(cfg):
    rep = exhaustion_check(unit_bidisk(), (0, 0), [-0.5], cfg, rays=12)
    assert rep.levels[0].margin_hi == pytest.approx(1 - math.exp(-0.5), abs=1e-6)
    assert rep.all_positive


def test_exhaustion_rejects_nonnegative_level(cfg):
    with pytest.raises(ValueError):
        exhaustion_check(Ball((0, 0), 1.0), (0, 0), [0.0], cfg)


def test_continuity_converges_on_ball(cfg):
    B = Ball((0, 0), 1.0)
    path = [((0.5 + 0.25 * 2.0**-k, 0), (0.0, 0.1 * 2.0**-k)) for k in range(1, 8)]
    rep = continuity_scan(B, path, ((0.5, 0), (0, 0)), cfg)
    assert rep.verdict == "CONVERGES"


def test_continuity_constant_path(cfg):
    B = Ball((0, 0), 1.0)
    p = ((0.3, 0.1), (0, 0))
    rep = continuity_scan(B, [p] * 4, p, cfg)
    assert rep.verdict == "CONVERGES" and rep.gap <= 0


def test_continuity_witness_on_sublevel_dcg(cfg):
    S = SublevelDcg.default()
    path = [((0.5, c / 2), (0, 0)) for c in S.carr]
    rep = continuity_scan(S, path, ((0.5, 0), (0, 0)), cfg)
    assert rep.verdict == "DISCONTINUITY WITNESS"
    assert rep.gap > 0
    assert rep.to_json()["verdict"] == rep.verdict
