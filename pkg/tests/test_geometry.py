import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plurigreen.geometry import (
    Ball,
    BallAutomorphism,
    Composition,
    Direction,
    HartogsMap,
    HartogsPgvlu,
    MobiusMap,
    PlanarComplement,
    Polydisk,
    ProductMap,
    Pushforward,
    SublevelDcg,
    apply_map,
    as_point,
    fibonacci_directions,
    sphere_points,
    unit_ball_automorphism,
    unit_bidisk,
    unit_disk,
)

coord = st.complex_numbers(max_magnitude=0.69, allow_nan=False, allow_infinity=False)


def test_ball_margin_examples():
    B = Ball((0, 0), 1.0)
    assert B.margin((0.5, 0)) == pytest.approx(0.5)
    assert B.margin((1.0, 0)) == 0.0
    assert B.margin((0.8, 0.8)) < 0


def test_as_point_rejects_bad_input():
    with pytest.raises(ValueError):
        as_point([1, 2, 3])
    with pytest.raises(ValueError):
        as_point([np.nan, 0])
    with pytest.raises(ValueError):
        as_point([0.1], dim=2)


def test_direction_nonzero():
    with pytest.raises(ValueError):
        Direction((0, 0), (0, 0))
    d = Direction((0, 0), (1, 1j))
    assert d.v[1] == 1j


def test_margin_is_minimum_slack():
    # a point inside one defining inequality but outside another is outside
    P = unit_bidisk()
    assert P.margin((0.5, 1.2)) < 0
    assert P.margin((0.5, 0.9)) == pytest.approx(0.1)


@settings(max_examples=60, deadline=None)
@given(coord, coord, coord, coord)
def test_ball_automorphism_is_involution(a1, a2, z1, z2):
    a = np.array([a1, a2]) / 1.5
    z = np.array([[z1, z2]]) / 1.5
    back = unit_ball_automorphism(a, unit_ball_automorphism(a, z))
    assert np.allclose(back, z, atol=1e-10)
    assert np.allclose(unit_ball_automorphism(a, a.reshape(1, -1)), 0, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(coord, coord, coord, coord)
def test_ball_green_matches_pseudohyperbolic_oracle(z1, z2, w1, w2):
    # independent formula: 1 - |phi_w(z)|^2 = (1-|w|^2)(1-|z|^2)/|1-<z,w>|^2
    z = np.array([z1, z2]) / 1.5
    w = np.array([w1, w2]) / 1.5
    B = Ball((0, 0), 1.0)
    if np.allclose(z, w):
        return
    g = B.green(z.reshape(1, -1), w)[0]
    zw = np.sum(z * np.conj(w))
    rho2 = 1 - (1 - np.sum(abs(w) ** 2)) * (1 - np.sum(abs(z) ** 2)) / abs(1 - zw) ** 2
    # compare squared distances: the oracle loses digits to cancellation near the pole
    assert math.exp(2 * g) == pytest.approx(rho2, abs=1e-12)


def test_scaled_ball_green():
    B = Ball((1, 1j), 2.0)
    assert B.green(np.array([[2, 1j]]), np.array([1, 1j]))[0] == pytest.approx(math.log(0.5))


def test_polydisk_green_oracle():
    P = unit_bidisk()
    z, w = np.array([0.3, -0.4j]), np.array([0.1j, 0.2])
    m = [abs((z[j] - w[j]) / (1 - np.conj(w[j]) * z[j])) for j in range(2)]
    assert P.green(z.reshape(1, -1), w)[0] == pytest.approx(math.log(max(m)), abs=1e-12)


def test_inradius_and_circumradius():
    B = Ball((0, 0), 1.0)
    assert B.inradius((0.5, 0)) == pytest.approx(0.5)
    assert B.circumradius((0.5, 0)) == pytest.approx(1.5)
    S = SublevelDcg.default()
    rho = S.inradius((0, 0))
    assert rho > 0
    # the certified inscribed ball really lies inside (sampled)
    assert np.all(S.margins(sphere_points((0, 0), 0.999 * rho, 2, 200)) > 0)


def test_sublevel_dcg_constraints():
    S = SublevelDcg.default()
    res = S.constraint_residuals()
    assert all(abs(v) < 1e-12 for v in res.values() if isinstance(v, float))
    # u is -inf on the lines z2 = c_j z1
    c = S.carr[3]
    assert S.u(np.array([[0.3, 0.3 * c]]))[0] == -math.inf
    # u(1/2, 0) = -1.5 log 2 exactly
    assert S.u(np.array([[0.5, 0]]))[0] == pytest.approx(-1.5 * math.log(2), abs=1e-12)


def test_sublevel_dcg_rejects_bad_weights():
    S = SublevelDcg.default()
    with pytest.raises(ValueError):
        SublevelDcg(S.c, tuple(2 * k for k in S.k))


def test_hartogs_instance_valid():
    H = HartogsPgvlu.default()
    assert H.constraint_one() < 0
    assert H.constraint_two_violations(100) == 0
    assert H.margin((0.1, 0.5)) > 0
    assert H.margin((0.1, 50)) < 0


def test_planar_complement():
    M = PlanarComplement(((0j, 0.1),), 10.0)
    assert M.margin((0.5,)) > 0
    assert M.margin((0.05,)) < 0
    assert not M.psh_defined


def test_maps_spot_check_and_inverse():
    D = unit_bidisk()
    F = ProductMap(D, (0.3, -0.2j), (1, 0))
    P = D.sample(np.random.default_rng(0), 20)
    assert np.allclose(F.inverse(F(P)), P, atol=1e-12)
    M = MobiusMap(D, 0, 0.5)
    C = Composition((F, M))
    assert np.allclose(C.inverse(C(P)), P, atol=1e-12)
    B = Ball((0, 0), 1.0)
    A = BallAutomorphism(B, (0.2, 0.1j))
    assert np.allclose(A(A(P * 0.5)), P * 0.5, atol=1e-12)


def test_apply_map_refuses_outside_points():
    D = unit_bidisk()
    M = MobiusMap(D, 0, 0.5)
    with pytest.raises(ValueError):
        apply_map(M, (1.5, 0))


def test_pushforward_membership():
    H = HartogsPgvlu.default()
    img = Pushforward(H, HartogsMap(H))
    z = np.array([0.1, 0.5])
    q = HartogsMap(H)(z.reshape(1, -1))[0]
    assert img.margin(q) > 0


def test_sphere_points_on_sphere_and_axes():
    pts = sphere_points((0.1, 0), 0.2, 2, 48)
    assert np.allclose(np.linalg.norm(pts - np.array([0.1, 0]), axis=1), 0.2)
    # exact coordinate axes are included
    assert np.any(pts[:, 1] == 0) and np.any(pts[:, 0] == 0.1)


def test_fibonacci_directions_unit_and_poles():
    d = fibonacci_directions(16)
    assert np.allclose(np.linalg.norm(d, axis=1), 1)
    assert np.any(np.isclose(abs(d[:, 0]), 1)) and np.any(np.isclose(abs(d[:, 1]), 1))


def test_to_dict_roundtrip_via_io():
    from plurigreen.io import domain_from_dict

    for D in (Ball((0.1, 0), 2.0), unit_bidisk(), SublevelDcg.default(), unit_disk()):
        E = domain_from_dict(D.to_dict())
        assert E.to_dict() == D.to_dict()
