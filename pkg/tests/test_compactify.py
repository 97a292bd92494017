import math

import numpy as np
import pytest

from plurigreen.compactify import (
    UnsupportedDomain,
    boundary_trace,
    c_V,
    clusters,
    disk_c_V_oracle,
    distance_matrix,
    epsilon_net,
    green_on_grid,
    invariance_test,
    norming_form,
    partition_edit_distance,
    phi_martin,
    phi_V,
    poisson_profile,
    radial_sequence,
)
from plurigreen.geometry import Ball, IdentityMap, MobiusMap, ProductMap, unit_bidisk, unit_disk


@pytest.fixture(scope="module")
def disk():
    return unit_disk()


@pytest.fixture(scope="module")
def V(disk):
    return norming_form(disk, 128)


@pytest.fixture(scope="module")
def V2():
    return norming_form(unit_bidisk(), 64, record=False)


def test_disk_mass(V):
    assert V.mass == pytest.approx(math.pi, abs=1e-6)
    assert np.all(V.weights > 0)


def test_bidisk_mass(V2):
    assert V2.mass == pytest.approx(math.pi**2, abs=1e-4)
    assert V2.dim == 2


def test_unsupported_domains():
    with pytest.raises(UnsupportedDomain):
        norming_form(Ball((0, 0), 1.0))
    with pytest.raises(UnsupportedDomain):
        norming_form(Ball((0j,), 2.0))


def test_norming_property_two(V):
    # g(., 0) = log|z|: sup over |z| <= 1/2 is -log 2 and ||g||_V = pi/2
    C0 = math.log(2) / (math.pi / 2)
    g = green_on_grid(V, (0,))
    assert V.l1(g) == pytest.approx(math.pi / 2, abs=1e-3)
    assert 0 < V.constants["C_F"] <= C0 + 1e-3


def test_tail_fractions_decay(V):
    eps = V.constants["eps_j"]
    assert all(b <= a + 1e-12 for a, b in zip(eps, eps[1:]))
    assert eps[-1] < 0.05


@pytest.mark.parametrize("w", [0.0, 0.3, 0.5j, -0.8, 0.95 + 0.1j])
def test_c_V_disk_oracle(disk, w):
    assert c_V(disk, (w,)) == pytest.approx(disk_c_V_oracle(w), abs=1e-3)


def test_c_V_rotation_symmetry(disk):
    vals = [c_V(disk, (0.6 * np.exp(1j * a),)) for a in np.linspace(0, 2 * np.pi, 7)]
    assert np.ptp(vals) < 1e-9


def test_c_V_bidisk_origin(V2):
    # -log max(|z1|, |z2|) against the distribution of the maximum: pi^2 / 4
    b = unit_bidisk()
    assert c_V(b, (0, 0)) == pytest.approx(math.pi**2 / 4, abs=1e-3)
    assert abs(c_V(b, (0.3, -0.2j)) - c_V(b, (0.3, -0.2j), per_panel=48)) < 1e-3
    # the coarse product grid does not resolve the kink of the max; it only agrees to ~1%
    assert V2.l1(green_on_grid(V2, (0, 0))) == pytest.approx(math.pi**2 / 4, abs=0.02)


def test_phi_unit_norm(disk, V, V2):
    for w in (0.0, 0.4 - 0.3j, 0.99):
        assert phi_V(disk, (w,), V).norm == pytest.approx(1.0, abs=1e-6)
    assert phi_V(unit_bidisk(), (0.2, 0.5j), V2).norm == pytest.approx(1.0, abs=1e-6)


def test_phi_injective_on_samples(disk, V):
    rng = np.random.default_rng(0)
    ws = 0.8 * np.sqrt(rng.random(12)) * np.exp(2j * np.pi * rng.random(12))
    D = distance_matrix([phi_V(disk, (w,), V) for w in ws])
    off = D[~np.eye(len(ws), dtype=bool)]
    assert np.min(off) > 0.1 * np.min(np.abs(ws[:, None] - ws[None, :])[~np.eye(len(ws), dtype=bool)])
    assert np.min(off) > 0


def test_phi_rotation_equivariant(disk, V):
    # rotating w by one angular step permutes the nodes
    step = 2 * np.pi / V.angular
    a = phi_V(disk, (0.5,), V).values.reshape(V.radial, V.angular)
    b = phi_V(disk, (0.5 * np.exp(1j * 3 * step),), V).values.reshape(V.radial, V.angular)
    assert np.max(np.abs(np.roll(a, 3, axis=1) - b)) < 1e-9


def test_phi_origin_values(disk, V):
    f = phi_V(disk, (0,), V)
    z = np.abs(V.nodes[:, 0])
    assert np.max(np.abs(f.values - np.log(z) / V.l1(np.log(z)))) < 1e-12
    assert V.l1(np.log(z)) == pytest.approx(math.pi / 2, abs=1e-3)


@pytest.mark.parametrize("theta", [0.0, math.pi / 2, math.pi, 1.0])
def test_radial_limit_is_poisson(disk, V, theta):
    rep = boundary_trace(disk, radial_sequence(theta, 10), V, theta)
    assert rep.cauchy and rep.successive[-1] <= 0.05
    assert rep.tail_to_profile <= 0.05
    assert poisson_profile(V, theta).norm == pytest.approx(1.0, abs=1e-9)


def test_limits_separated(disk, V):
    D = distance_matrix([phi_V(disk, radial_sequence(t, 10)[-1], V) for t in (0, math.pi / 2, math.pi)])
    assert np.min(D[~np.eye(3, dtype=bool)]) >= 0.5


def test_constant_sequence_has_zero_distance(disk, V):
    rep = boundary_trace(disk, [(0.3,)] * 4, V)
    assert max(rep.successive) == 0.0


def test_three_clusters(disk, V):
    pts = [p for t in (0, math.pi / 2, math.pi) for p in radial_sequence(t, 10, start=5)]
    labels = clusters(distance_matrix([phi_V(disk, p, V) for p in pts]), 0.5)
    assert labels == [0] * 6 + [1] * 6 + [2] * 6


def test_partition_edit_distance():
    assert partition_edit_distance([0, 0, 1, 1], [1, 1, 0, 0]) == 0
    assert partition_edit_distance([0, 0, 1, 1], [0, 1, 1, 1]) == 1
    assert partition_edit_distance([], []) == 0
    with pytest.raises(ValueError):
        partition_edit_distance([0], [0, 0])


def test_epsilon_net_covers():
    x = np.array([0.0, 0.1, 0.2, 1.0, 1.05, 3.0])
    D = np.abs(x[:, None] - x[None, :])
    net = epsilon_net(D, 0.25)
    assert np.all(np.min(D[:, net], axis=1) <= 0.25)
    assert net == [0, 3, 5]


@pytest.fixture(scope="module")
def boundary_points():
    return [p for t in (0, math.pi / 2, math.pi) for p in radial_sequence(t, 9, start=6)]


def test_invariance_identity(disk, V, boundary_points):
    assert invariance_test(disk, IdentityMap(disk), boundary_points, V).max_edit == 0


def test_invariance_mobius(disk, V, boundary_points):
    rep = invariance_test(disk, MobiusMap(disk, 0, -0.5), boundary_points, V)
    assert rep.max_edit == 0
    assert set(rep.to_json()["edit_distance"]) == {"0.5", "0.2", "0.1"}


def test_invariance_bidisk_swap(V2):
    b = unit_bidisk()
    pts = [np.array([0.9 * np.exp(1j * t), 0.2]) for t in (0.0, 0.05, 2.0, 2.05)]
    rep = invariance_test(b, ProductMap(b, (0, 0), (1, 0)), pts, V2)
    assert rep.max_edit == 0


def test_martin_mode_normalized(disk, V):
    f = phi_martin(disk, (0.5,), V)
    assert f.norm == pytest.approx(1.0, abs=1e-9)
    # both normalizations give the same unit vector
    assert f.distance(phi_V(disk, (0.5,), V)) < 1e-9
