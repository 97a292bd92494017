import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plurigreen.bounds import (
    caratheodory_bound,
    caratheodory_family,
    chain_bounds,
    closed_form_green,
    competitors,
    green_interval,
    inscribed_ball_bound,
    lelong_jensen_residual,
    psh_lower_bound,
    pushforward_upper_bound,
    slice_bounds,
    validate_competitor,
)
from plurigreen.config import RunConfig, SearchBudget
from plurigreen.fields import ScalarField
from plurigreen.geometry import Ball, HartogsPgvlu, PlanarComplement, SliceMap, SublevelDcg, unit_bidisk, unit_disk

NO_DISKS = RunConfig(budget=SearchBudget(disk_search=False))
small = st.floats(-0.5, 0.5)


def test_ball_interval_exact(cfg):
    iv = green_interval(Ball((0, 0), 1.0), (0.5, 0), (0, 0), cfg)
    assert iv.lo == pytest.approx(math.log(0.5)) and iv.width < 1e-12


def test_pole_interval(cfg):
    iv = green_interval(Ball((0, 0), 1.0), (0.2, 0), (0.2, 0), cfg)
    assert iv.lo == iv.hi == -math.inf


@settings(max_examples=40, deadline=None)
@given(small, small, small, small)
def test_caratheodory_below_closed_form(a, b, c, d):
    for D in (Ball((0, 0), 1.0), unit_bidisk()):
        z, w = np.array([a, 1j * b]), np.array([c, d])
        if np.allclose(z, w):
            continue
        lo = caratheodory_bound(D, z, w, NO_DISKS).lo
        assert lo <= closed_form_green(D, z, w) + 1e-9


@settings(max_examples=40, deadline=None)
@given(small, small, small, small)
def test_monotone_under_inclusion(a, b, c, d):
    # Ball(0, 1/2) inside Ball(0, 1): the smaller domain has the larger Green function
    z, w = np.array([a, b]) / 2, np.array([c, d]) / 2
    if np.allclose(z, w):
        return
    assert closed_form_green(Ball((0, 0), 0.5), z, w) >= closed_form_green(Ball((0, 0), 1.0), z, w) - 1e-12


def test_family_validation_rejects_bad_member():
    fam = caratheodory_family(Ball((0, 0), 1.0), (0.3, 0), (0, 0))
    fam.validate()
    from plurigreen.bounds import CandidateMap, CandidateMapFamily

    bad = CandidateMapFamily(fam.domain, fam.w, (CandidateMap("twice", lambda P: 2 * P[:, 0]),))
    with pytest.raises(ValueError):
        bad.validate()


def test_planar_complement_has_no_caratheodory_candidates(cfg):
    M = PlanarComplement(((0j, 0.1),), 10.0)
    iv = caratheodory_bound(M, (1.0,), (2.0,), cfg)
    assert iv.lo == -math.inf and iv.lo_witness == "no candidates"


def test_competitors_are_negative_psh():
    for D, w in ((Ball((0, 0), 1.0), (0.1, 0)), (SublevelDcg.default(), (0, 0)), (HartogsPgvlu.default(), (0, 0.3))):
        for f in competitors(D, w):
            validate_competitor(D, f)
    with pytest.raises(ValueError):
        validate_competitor(Ball((0, 0), 1.0), ScalarField("positive", lambda P: np.ones(len(P))))
    with pytest.raises(ValueError):
        validate_competitor(Ball((0, 0), 1.0), ScalarField("not psh", lambda P: -np.ones(len(P)), psh=False))


def test_sublevel_lower_bound_is_u():
    S = SublevelDcg.default()
    lo = psh_lower_bound(S, (0.5, 0), (0, 0))
    assert lo.lo == pytest.approx(-1.5 * math.log(2), abs=1e-12)
    assert lo.lo_witness == "sublevel-u"


def test_sublevel_exact_value_at_discontinuity_points(cfg):
    # slice bound log(||z_j||/8) is matched by the circumscribed ball, so g is known exactly
    S = SublevelDcg.default()
    for c in S.carr[-3:]:
        iv = green_interval(S, (0.5, c / 2), (0, 0), cfg, disks=False)
        exact = math.log(math.sqrt(1 + c * c) / 16)
        assert iv.lo == pytest.approx(exact, abs=1e-8) and iv.hi == pytest.approx(exact, abs=1e-8)


def test_pushforward_bound_requires_points_on_slice():
    S = SublevelDcg.default()
    sl = S.slices()[0]
    with pytest.raises(ValueError):
        pushforward_upper_bound(sl, (0.5, 0.9), (0, 0))


def test_inscribed_ball_bound():
    iv = inscribed_ball_bound(Ball((0, 0), 1.0), (0.25, 0), (0.5, 0))
    assert iv.hi == pytest.approx(math.log(0.25 / 0.5))


def test_chain_on_bidisk(quick_cfg):
    rng = np.random.default_rng(4)
    D = unit_bidisk()
    for z, w in zip(D.sample(rng, 5), D.sample(rng, 5)):
        b = chain_bounds(D, z, w, quick_cfg)
        assert b["caratheodory"].lo <= b["green"].lo + 1e-9
        assert b["green"].hi <= b["kobayashi"].hi + 1e-9


def test_hartogs_interval_is_consistent():
    H = HartogsPgvlu.default()
    iv = green_interval(H, (0.1, 0.5), (0, 0.3), NO_DISKS, disks=False)
    assert iv.lo <= iv.hi and math.isfinite(iv.lo)


def _disk_fields():
    return [
        ScalarField("re z", lambda P: np.real(P[:, 0]), levi=lambda P: np.zeros((len(P), 1, 1), complex)),
        ScalarField("|z|^2", lambda P: np.abs(P[:, 0]) ** 2),
        ScalarField("|z|^4", lambda P: np.abs(P[:, 0]) ** 4),
    ]


@pytest.mark.parametrize("w", [0.0, 0.5, 0.3j])
def test_lelong_jensen_disk(w):
    for u in _disk_fields():
        assert lelong_jensen_residual(unit_disk(), u, (w,)) < 1e-6


def test_lelong_jensen_ball():
    B = Ball((0, 0), 1.0)
    fields = [
        ScalarField("|z|^2", lambda P: np.sum(np.abs(P) ** 2, axis=1)),
        ScalarField("|z1|^2", lambda P: np.abs(P[:, 0]) ** 2),
        ScalarField("|z1|^4", lambda P: np.abs(P[:, 0]) ** 4),
    ]
    for u in fields:
        assert lelong_jensen_residual(B, u, (0, 0), radial=64, angular=256) < 1e-4
