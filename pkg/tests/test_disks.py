import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plurigreen.config import SearchBudget
from plurigreen.disks import (
    AnalyticDisk,
    certify_containment,
    evaluate_disk,
    kobayashi_bound,
    poletsky_functional,
    royden_bound,
    truncated_mobius_disk,
    upper_bound_green,
)
from plurigreen.geometry import Ball, SublevelDcg, unit_bidisk

FAST = SearchBudget(restarts=4, simplex_evals=200)


def test_constraint_is_enforced():
    with pytest.raises(ValueError):
        AnalyticDisk(np.array([[0, 0], [1, 0]]), 1.0, (0.5,), (0.4, 0))
    f = AnalyticDisk(np.array([[0, 0], [1, 0]]), 1.0, (0.5,), (0.5, 0))
    assert np.allclose(evaluate_disk(f, 0.5), [0.5, 0])
    with pytest.raises(ValueError):
        evaluate_disk(f, 1.5)


def test_functional_of_linear_disk():
    f = AnalyticDisk(np.array([[0, 0], [1, 0]]), 1.0, (0.5,), (0.5, 0))
    assert poletsky_functional(f, (0.5, 0)).value == pytest.approx(math.log(0.5))


def test_undeclared_preimage_lowers_value():
    # f(zeta) = (zeta^2, 0) hits w = (1/4, 0) at +-1/2; only one is declared
    f = AnalyticDisk(np.array([[0, 0], [0, 0], [1, 0]]), 1.0, (0.5,), (0.25, 0))
    v = poletsky_functional(f, (0.25, 0))
    assert v.value == pytest.approx(2 * math.log(0.5), abs=1e-9)
    assert len(v.undeclared) == 1


def test_containment_certificate_sound():
    B = Ball((0, 0), 1.0)
    inside = AnalyticDisk(np.array([[0, 0], [0.9, 0]]))
    outside = AnalyticDisk(np.array([[0, 0], [1.1, 0]]))
    cert = certify_containment(B, inside)
    assert cert is not None and cert.method == "boundary-only"
    assert certify_containment(B, outside) is None


def test_truncated_mobius_seed_hits_target():
    f = truncated_mobius_disk(np.array([0.3, 0.1]), np.array([0.0, 0.0]), 0.4, 6)
    assert np.allclose(f.evaluate(0.4), [0, 0], atol=1e-12)
    assert np.allclose(f.evaluate(0.0), [0.3, 0.1])


def test_ball_upper_bound_close_to_closed_form():
    B = Ball((0, 0), 1.0)
    iv = upper_bound_green(B, (0.5, 0), (0, 0), FAST, seed=1)
    assert math.log(0.5) - 1e-9 <= iv.hi <= math.log(0.5) + 0.01


pt = st.tuples(st.floats(-0.6, 0.6), st.floats(-0.6, 0.6))


@settings(max_examples=5, deadline=None)
@given(pt, pt)
def test_disk_bounds_never_below_closed_form(a, b):
    # soundness: any certified disk gives a value >= g (exact on the ball)
    B = Ball((0, 0), 1.0)
    z, w = np.array([complex(*a), 0.1]), np.array([complex(*b), -0.1j])
    if np.linalg.norm(z - w) < 1e-3:
        return
    g = B.green(z.reshape(1, -1), w)[0]
    k = kobayashi_bound(B, z, w, SearchBudget(restarts=2, simplex_evals=100), seed=0, stop_at=g + 0.05)
    assert k.hi >= g - 1e-9


def test_kobayashi_exact_on_bidisk():
    P = unit_bidisk()
    z, w = np.array([0.4, -0.3j]), np.array([0.1, 0.2])
    g = P.green(z.reshape(1, -1), w)[0]
    # stop as soon as the exact value is reached, as green_interval does
    k = kobayashi_bound(P, z, w, FAST, seed=0, stop_at=g + 1e-9)
    assert k.hi == pytest.approx(P.green(z.reshape(1, -1), w)[0], abs=1e-9)


def test_kobayashi_symmetric_on_bidisk():
    P = unit_bidisk()
    z, w = np.array([0.4, -0.3j]), np.array([0.1, 0.2])
    g = P.green(z.reshape(1, -1), w)[0]
    a = kobayashi_bound(P, z, w, FAST, seed=0, stop_at=g + 1e-9).hi
    b = kobayashi_bound(P, w, z, FAST, seed=0, stop_at=g + 1e-9).hi
    assert a == pytest.approx(b, abs=1e-9)


def test_sublevel_exact_slice_value():
    S = SublevelDcg.default()
    c = S.carr[-1]
    iv = upper_bound_green(S, (0.5, c / 2), (0, 0), FAST, seed=0, stop_at=-2.7)
    assert iv.hi == pytest.approx(math.log(math.sqrt(1 + c * c) / 16), abs=1e-6)


def test_royden_on_scaled_ball():
    # R(0, v) = log(||v|| / 2) on the ball of radius 2
    B = Ball((0, 0), 2.0)
    iv = royden_bound(B, (0, 0), (1, 0), FAST, seed=0)
    assert -math.log(2) - 1e-9 <= iv.hi <= -math.log(2) + 0.01
    # homogeneity in v
    iv3 = royden_bound(B, (0, 0), (3, 0), FAST, seed=0)
    assert iv3.hi == pytest.approx(iv.hi + math.log(3), abs=1e-9)


def test_same_seed_same_result():
    B = Ball((0, 0), 1.0)
    budget = SearchBudget(restarts=2, simplex_evals=100)
    a = upper_bound_green(B, (0.3, 0.2), (0.1, 0), budget, seed=3)
    b = upper_bound_green(B, (0.3, 0.2), (0.1, 0), budget, seed=3)
    assert a == b
