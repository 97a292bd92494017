"""Normalized Green embeddings w -> g(., w)/||g(., w)||_V on the disk and bidisk.

All grid functions of one volume form live on the same quadrature nodes,
so L1 distances between embeddings are weighted vector norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import squareform

from .geometry import Ball, Domain, HoloMap, Polydisk, as_point

EPS_SCHEDULE = (0.5, 0.2, 0.1)


class UnsupportedDomain(ValueError):
    pass


def _kind(domain: Domain) -> str:
    if isinstance(domain, Ball) and domain.dim == 1 and domain.radius == 1.0 and domain.center == (0j,):
        return "disk"
    if isinstance(domain, Polydisk) and domain.dim == 2 and domain.radii == (1.0, 1.0) and domain.center == (0j, 0j):
        return "bidisk"
    raise UnsupportedDomain("compactification is implemented for the unit disk and the unit bidisk")


def _disk_grid(radial: int, angular: int):
    """Polar nodes with r = s(2 - s) on Gauss-Legendre s (clustered at the circle) and a trapezoid angle grid."""
    x, wx = np.polynomial.legendre.leggauss(radial)
    s, ws = 0.5 * (x + 1), 0.5 * wx
    r = s * (2 - s)
    wr = ws * 2 * (1 - s) * r  # dr = 2(1 - s) ds, area element r dr dtheta
    # half-step offset keeps nodes off the rays through the lattice angles k pi/2
    th = 2 * np.pi * (np.arange(angular) + 0.5) / angular
    nodes = (r[:, None] * np.exp(1j * th)[None, :]).reshape(-1)
    weights = (wr[:, None] * np.full(angular, 2 * np.pi / angular)[None, :]).reshape(-1)
    return nodes, weights


@dataclass(frozen=True, eq=False)
class VolumeForm:
    """Constant-weight volume form with a tensor-product quadrature grid."""

    kind: str
    resolution: int
    nodes: np.ndarray
    weights: np.ndarray
    radial: int
    angular: int
    constants: dict = field(default_factory=dict)

    @property
    def mass(self) -> float:
        return float(np.sum(self.weights))

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(self.weights * values))

    def l1(self, values: np.ndarray) -> float:
        return float(np.sum(self.weights * np.abs(values)))


def norming_form(domain: Domain, resolution: int = 128, record: bool = True) -> VolumeForm:
    """Constant weight 1 on the disk (resolution x 2 resolution nodes) or the bidisk.

    On the bidisk each factor uses resolution/4 radial and resolution/2
    angular nodes, so the product grid stays desk sized.
    """
    kind = _kind(domain)
    if resolution < 4:
        raise ValueError("resolution must be at least 4")
    if kind == "disk":
        radial, angular = resolution, 2 * resolution
        z, wts = _disk_grid(radial, angular)
        nodes, weights = z[:, None], wts
    else:
        radial, angular = max(4, resolution // 4), max(8, resolution // 2)
        z, wts = _disk_grid(radial, angular)
        Z1, Z2 = np.meshgrid(z, z, indexing="ij")
        W1, W2 = np.meshgrid(wts, wts, indexing="ij")
        nodes = np.stack([Z1.reshape(-1), Z2.reshape(-1)], axis=1)
        weights = (W1 * W2).reshape(-1)
    if not np.all(weights > 0):
        raise ArithmeticError("non-positive quadrature weight")
    V = VolumeForm(kind, resolution, nodes, weights, radial, angular)
    if record and kind == "disk":
        V.constants.update(norming_constants(V))
    return V


def green_on_grid(V: VolumeForm, w) -> np.ndarray:
    w = as_point(w, V.dim)
    if V.kind == "disk":
        return Ball((0j,), 1.0).green(V.nodes, w)
    return Polydisk((0j, 0j), (1.0, 1.0)).green(V.nodes, w)


# --------------------------------------------------------------------------
# c_V with pole refinement
# --------------------------------------------------------------------------


def _graded_radial(per_panel: int = 24, depth: int = 48):
    """Composite Gauss-Legendre on [0, 1] with panels 1 - 2^-k accumulating at 1; r = s^2 on the first panel."""
    x, wx = np.polynomial.legendre.leggauss(per_panel)
    edges = np.concatenate([[0.0], 1 - 2.0 ** -np.arange(1, depth + 1), [1.0]])
    rs, ws = [], []
    for k, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        t = 0.5 * (b - a) * (x + 1) + a
        wt = 0.5 * (b - a) * wx
        if k == 0:
            # r = t^2 / b on [0, b]: removes the log singularity of the integrand at 0
            rs.append(t**2 / b)
            ws.append(wt * 2 * t / b)
        else:
            rs.append(t)
            ws.append(wt)
    return np.concatenate(rs), np.concatenate(ws)


def _angular_kernel(a: float, r: np.ndarray) -> np.ndarray:
    """(1/2pi) int |(phi_a^-1)'(r e^it)|^2 dt = (1 - a^2)^2 (1 + a^2 r^2) / (1 - a^2 r^2)^3 for |a| = a."""
    a2 = a * a
    return (1 - a2) ** 2 * (1 + a2 * r * r) / (1 - a2 * r * r) ** 3


def _radial_mass(a: float, t: np.ndarray) -> np.ndarray:
    """int_0^t K(r) r dr = (1 - a^2)^2 t^2 / (2 (1 - a^2 t^2)^2)."""
    a2 = a * a
    return (1 - a2) ** 2 * t * t / (2 * (1 - a2 * t * t) ** 2)


def c_V(domain: Domain, w, V: Optional[VolumeForm] = None, per_panel: int = 24) -> float:
    """||g(., w)||_V for the constant weight, computed in the Moebius-pulled-back variables.

    Substituting z = phi_w^-1(zeta) puts the pole at 0, where the radial
    panels remove the log singularity, and the Jacobian integrates in
    closed form over angles. On the bidisk |g| = -log max(r1, r2), so the
    double radial integral collapses onto the distribution of the maximum.
    """
    kind = _kind(domain)
    w = as_point(w, 1 if kind == "disk" else 2)
    t, wt = _graded_radial(per_panel)
    L = -np.log(t)
    if kind == "disk":
        k = _angular_kernel(abs(w[0]), t) * t
        return float(2 * np.pi * np.sum(wt * L * k))
    a1, a2 = abs(w[0]), abs(w[1])
    dens = _angular_kernel(a1, t) * t * _radial_mass(a2, t) + _radial_mass(a1, t) * _angular_kernel(a2, t) * t
    return float((2 * np.pi) ** 2 * np.sum(wt * L * dens))


def disk_c_V_oracle(w: complex) -> float:
    """(pi/2)(1 - |w|^2): the Green potential of the area measure, radial and vanishing on the circle."""
    return 0.5 * math.pi * (1 - abs(complex(w)) ** 2)


# --------------------------------------------------------------------------
# embeddings
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GridFunction:
    values: np.ndarray
    form: VolumeForm
    label: str = ""

    @property
    def norm(self) -> float:
        return self.form.l1(self.values)

    def distance(self, other: "GridFunction") -> float:
        if other.form is not self.form and other.values.shape != self.values.shape:
            raise ValueError("grid functions live on different grids")
        return self.form.l1(self.values - other.values)


def phi_V(domain: Domain, w, V: VolumeForm) -> GridFunction:
    """g(., w) divided by its L1 norm on the shared grid (norm 1 to rounding)."""
    _kind(domain)
    g = green_on_grid(V, w)
    if not np.all(np.isfinite(g)):
        # a node sits on the pole; its weight is tiny and the log singularity integrable
        g = np.where(np.isfinite(g), g, np.nan)
        g = np.where(np.isnan(g), np.nanmin(g), g)
    return GridFunction(g / V.l1(g), V, f"phi({np.round(as_point(w), 6).tolist()})")


def phi_martin(domain: Domain, w, V: VolumeForm, z0=None) -> GridFunction:
    """Comparison mode: g(., w)/|g(z0, w)|, renormalized on the grid for comparison."""
    kind = _kind(domain)
    z0 = np.zeros(V.dim) if z0 is None else as_point(z0, V.dim)
    ref = Ball((0j,), 1.0) if kind == "disk" else Polydisk((0j, 0j), (1.0, 1.0))
    g = green_on_grid(V, w)
    scale = abs(float(ref.green(z0.reshape(1, -1), as_point(w, V.dim))[0]))
    vals = g / scale
    return GridFunction(vals / V.l1(vals), V, "martin")


def poisson_profile(V: VolumeForm, theta: float) -> GridFunction:
    """-P(z, theta)/pi, the expected normalized limit of g(., w) as w -> e^{i theta}, grid normalized."""
    if V.kind != "disk":
        raise UnsupportedDomain("Poisson profiles are implemented for the disk")
    z = V.nodes[:, 0]
    P = (1 - np.abs(z) ** 2) / np.abs(np.exp(1j * theta) - z) ** 2
    return GridFunction(-P / V.l1(P), V, f"poisson({theta:.6g})")


def norming_constants(V: VolumeForm, family: int = 16) -> dict:
    """Empirical C(F) for F = {|z| <= 1/2} and tail fractions eps_j over Green functions of the disk.

    C(F) = min over the family of (-sup_F u)/||u||_V; eps_j = max of
    ||u||_{L1(|z| > 1 - 2^-j)} / ||u||_V.
    """
    ws = 0.9 * np.exp(2j * np.pi * np.arange(family) / family) * np.linspace(0.0, 1.0, family)
    circle = 0.5 * np.exp(2j * np.pi * np.arange(256) / 256)
    disk = Ball((0j,), 1.0)
    CF = math.inf
    eps = np.zeros(8)
    absz = np.abs(V.nodes[:, 0])
    for w in ws:
        g = green_on_grid(V, w)
        norm = V.l1(g)
        # sup over |z| <= 1/2 of a subharmonic function sits on the circle |z| = 1/2 unless w is inside
        sup = float(np.max(disk.green(circle[:, None], np.array([w])))) if abs(w) < 0.5 else -math.inf
        if abs(w) >= 0.5:
            sup = float(np.max(disk.green(np.concatenate([circle, 0.5 * circle])[:, None], np.array([w]))))
        CF = min(CF, -sup / norm)
        for j in range(1, 9):
            eps[j - 1] = max(eps[j - 1], V.l1(np.where(absz > 1 - 2.0**-j, g, 0.0)) / norm)
    return {"C_F": float(CF), "eps_j": [float(e) for e in eps]}


# --------------------------------------------------------------------------
# clustering
# --------------------------------------------------------------------------


def distance_matrix(funcs: Sequence[GridFunction]) -> np.ndarray:
    X = np.array([f.values for f in funcs])
    wts = funcs[0].form.weights if funcs else np.zeros(0)
    n = len(funcs)
    D = np.zeros((n, n))
    for i in range(n):
        D[i] = np.sum(wts[None, :] * np.abs(X - X[i][None, :]), axis=1)
    return 0.5 * (D + D.T)


def clusters(D: np.ndarray, eps: float) -> list[int]:
    """Single-linkage clusters at scale eps, labelled by first appearance."""
    n = D.shape[0]
    if n == 0:
        return []
    if n == 1:
        return [0]
    Z = linkage(squareform(D, checks=False), method="single")
    raw = fcluster(Z, t=eps, criterion="distance")
    relabel: dict = {}
    return [relabel.setdefault(int(c), len(relabel)) for c in raw]


def partition_edit_distance(a: Sequence[int], b: Sequence[int]) -> int:
    """Fewest elements to move so that partition a becomes partition b."""
    if len(a) != len(b):
        raise ValueError("partitions of different sets")
    if not len(a):
        return 0
    ka, kb = max(a) + 1, max(b) + 1
    M = np.zeros((ka, kb), dtype=int)
    for i, j in zip(a, b):
        M[i, j] += 1
    r, c = linear_sum_assignment(-M)
    return int(len(a) - M[r, c].sum())


def epsilon_net(D: np.ndarray, eps: float) -> list[int]:
    """Greedy eps-net indices."""
    centers: list[int] = []
    for i in range(D.shape[0]):
        if not centers or np.min(D[i, centers]) > eps:
            centers.append(i)
    return centers


@dataclass(frozen=True)
class TraceReport:
    successive: tuple
    distances: np.ndarray
    tail_to_profile: Optional[float]
    cauchy: bool

    def to_json(self) -> dict:
        return {
            "successive": list(self.successive),
            "tail_to_profile": self.tail_to_profile,
            "cauchy": self.cauchy,
        }


def boundary_trace(
    domain: Domain,
    points: Sequence,
    V: VolumeForm,
    limit_angle: Optional[float] = None,
    tol: float = 0.05,
) -> TraceReport:
    """Pairwise distances of the embeddings along a sequence, and the tail distance to the Poisson profile."""
    funcs = [phi_V(domain, w, V) for w in points]
    D = distance_matrix(funcs)
    succ = tuple(float(D[i, i + 1]) for i in range(len(funcs) - 1))
    prof = None
    if limit_angle is not None and V.kind == "disk" and funcs:
        prof = funcs[-1].distance(poisson_profile(V, limit_angle))
    cauchy = len(succ) == 0 or succ[-1] <= tol
    return TraceReport(succ, D, prof, cauchy)


def radial_sequence(theta: float, depth: int, dim: int = 1, start: int = 1) -> list:
    """w_j = (1 - 2^-j) e^{i theta}, j = start..depth (repeated in both coordinates on the bidisk)."""
    out = []
    for j in range(start, depth + 1):
        p = (1 - 2.0**-j) * np.exp(1j * theta)
        out.append(np.full(dim, p))
    return out


@dataclass(frozen=True)
class InvarianceReport:
    partitions: dict
    mapped_partitions: dict
    edit_distance: dict

    @property
    def max_edit(self) -> int:
        return max(self.edit_distance.values()) if self.edit_distance else 0

    def to_json(self) -> dict:
        return {
            "partitions": {str(k): v for k, v in self.partitions.items()},
            "mapped_partitions": {str(k): v for k, v in self.mapped_partitions.items()},
            "edit_distance": {str(k): v for k, v in self.edit_distance.items()},
        }


def invariance_test(
    domain: Domain,
    automorphism: HoloMap,
    points: Sequence,
    V: VolumeForm,
    V2: Optional[VolumeForm] = None,
    schedule: Sequence[float] = EPS_SCHEDULE,
) -> InvarianceReport:
    """Compare eps-cluster partitions of {phi_V(w_k)} and {phi_V'(F(w_k))}."""
    V2 = V2 or V
    pts = [as_point(p, V.dim) for p in points]
    mapped = automorphism(np.array(pts))
    A = distance_matrix([phi_V(domain, p, V) for p in pts])
    B = distance_matrix([phi_V(domain, q, V2) for q in mapped])
    pa, pb, ed = {}, {}, {}
    for eps in schedule:
        pa[eps] = clusters(A, eps)
        pb[eps] = clusters(B, eps)
        ed[eps] = partition_edit_distance(pa[eps], pb[eps])
    return InvarianceReport(pa, pb, ed)
