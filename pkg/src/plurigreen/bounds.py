"""Lower bounds, closed forms and the combined Green interval.

Lower bounds only ever come from functions that are plurisubharmonic by
construction: log-moduli of holomorphic maps into the unit disk, maxima of
such, the explicit competitors attached to the model domains, and glued
competitors built from these pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .config import RunConfig, SearchBudget
from .disks import kobayashi_bound, linear_radius, slice_green_bound, upper_bound_green
from .fields import ScalarField, safe_log
from .geometry import (
    Ball,
    Domain,
    HartogsPgvlu,
    PlanarComplement,
    Polydisk,
    Pushforward,
    SliceMap,
    SublevelDcg,
    as_point,
    disk_mobius,
    fibonacci_directions,
    hermitian_dot,
    unit_ball_automorphism,
    unit_bidisk,
)
from .intervals import BoundInterval, SoundnessError, hi_only, lo_only, pole_interval

VALIDATION_SAMPLES = 256
ZERO_TOL = 1e-12


def _resolve(domain: Domain, z, w):
    z = as_point(z, domain.dim)
    w = as_point(w, domain.dim)
    while isinstance(domain, Pushforward):
        z = domain.map.inverse(z.reshape(1, -1))[0]
        w = domain.map.inverse(w.reshape(1, -1))[0]
        domain = domain.source
    return domain, z, w


def _require_inside(domain: Domain, *pts):
    for p in pts:
        if domain.margin(p) <= 0:
            raise ValueError("points must lie in the domain")


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------


def closed_form_green(domain: Domain, z, w) -> Optional[float]:
    """Exact g(z, w) on balls (any pole, via an automorphism) and polydisks; None otherwise."""
    if isinstance(domain, (Ball, Polydisk)):
        z = as_point(z, domain.dim)
        w = as_point(w, domain.dim)
        return float(domain.green(z.reshape(1, -1), w)[0])
    return None


def green_field(domain: Domain, w) -> Optional[ScalarField]:
    if not isinstance(domain, (Ball, Polydisk)):
        return None
    w = as_point(w, domain.dim)
    return ScalarField(name=f"{domain.kind}-green", func=lambda P: domain.green(P, w), pole=tuple(w))


# --------------------------------------------------------------------------
# Caratheodory families
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CandidateMap:
    name: str
    func: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CandidateMapFamily:
    """Holomorphic maps of a domain into the unit disk vanishing at w."""

    domain: Domain
    w: tuple
    members: tuple

    def validate(self, seed: int = 0, count: int = VALIDATION_SAMPLES) -> float:
        """Largest |f| over a validation sample; raises if some member fails."""
        if not self.members:
            return 0.0
        rng = np.random.default_rng(seed)
        pts = self.domain.sample(rng, count)
        w = np.array(self.w).reshape(1, -1)
        worst = 0.0
        for m in self.members:
            vals = np.abs(m.func(pts))
            if not np.all(vals < 1):
                raise ValueError(f"family member {m.name} leaves the unit disk")
            if abs(m.func(w)[0]) > ZERO_TOL:
                raise ValueError(f"family member {m.name} does not vanish at w")
            worst = max(worst, float(np.max(vals)))
        return worst


def _ball_members(ball: Ball, w, z, directions: int) -> list[CandidateMap]:
    A = (w - ball.c) / ball.radius
    last: list = [None, None]

    def phi(P):
        # all members share the automorphism; reuse it for repeated calls on one array
        if last[0] is not P:
            last[0], last[1] = P, unit_ball_automorphism(A, ball.normalize(P))
        return last[1]

    dirs = [phi(z.reshape(1, -1))[0]]
    if ball.dim == 1:
        dirs = [np.array([1.0 + 0j])]
    else:
        dirs += list(fibonacci_directions(directions))
    out = []
    for k, a in enumerate(dirs):
        na = np.linalg.norm(a)
        if not na > 0:
            continue
        a = a / na
        out.append(CandidateMap(f"ball-automorphism.linear[{k}]", lambda P, a=a: hermitian_dot(phi(P), a)))
    return out


def caratheodory_family(domain: Domain, z, w, directions: int = 16) -> CandidateMapFamily:
    z = as_point(z, domain.dim)
    w = as_point(w, domain.dim)
    members: list[CandidateMap] = []
    if isinstance(domain, Ball):
        members = _ball_members(domain, w, z, directions)
    elif isinstance(domain, Polydisk):
        for j in range(domain.dim):
            members.append(
                CandidateMap(f"coordinate-moebius[{j}]", lambda P, j=j: domain.coordinate_mobius(P, w)[:, j])
            )
    elif isinstance(domain, HartogsPgvlu):
        Fw = domain.F(w.reshape(1, -1))[0]
        members = [
            CandidateMap("F.coordinate-moebius[0]", lambda P: disk_mobius(Fw[0], domain.F(P)[:, 0])),
            CandidateMap("F.coordinate-moebius[1]", lambda P: disk_mobius(Fw[1], domain.F(P)[:, 1])),
        ]
    elif isinstance(domain, SublevelDcg):
        outer = Ball(center=(0j, 0j), radius=domain.outer_radius)
        members = [
            CandidateMap(f"circumscribed-{m.name}", m.func) for m in _ball_members(outer, w, z, directions)
        ]
    elif isinstance(domain, PlanarComplement):
        members = []
    return CandidateMapFamily(domain, tuple(w), tuple(members))


def caratheodory_bound(domain: Domain, z, w, cfg: Optional[RunConfig] = None, family: Optional[CandidateMapFamily] = None) -> BoundInterval:
    """max log|f(z)| over the candidate family: a lower bound for c and hence g."""
    cfg = cfg or RunConfig()
    domain, z, w = _resolve(domain, z, w)
    _require_inside(domain, z, w)
    if np.array_equal(z, w):
        return pole_interval()
    fam = family or caratheodory_family(domain, z, w, directions=min(cfg.budget.directions, 8))
    if not fam.members:
        return lo_only(-math.inf, "no candidates")
    fam.validate(seed=cfg.seed)
    best, name = -math.inf, "no candidates"
    for m in fam.members:
        val = float(safe_log(np.abs(m.func(z.reshape(1, -1))))[0])
        if val > best:
            best, name = val, m.name
    return lo_only(best, name)


# --------------------------------------------------------------------------
# PSH competitors
# --------------------------------------------------------------------------


def circumscribed_competitor(domain: Domain, w) -> ScalarField:
    w = as_point(w, domain.dim)
    R = domain.circumradius(w)
    return ScalarField(
        name=f"circumscribed-ball(R={R:.6g})",
        func=lambda P: safe_log(np.linalg.norm(P - w, axis=-1) / R),
        pole=tuple(w),
    )


def competitors(domain: Domain, w) -> list[ScalarField]:
    """Negative PSH functions with a logarithmic pole at w shipped for ``domain``."""
    w = as_point(w, domain.dim)
    out = [circumscribed_competitor(domain, w)]
    gf = green_field(domain, w)
    if gf is not None:
        out.append(gf)
    if isinstance(domain, SublevelDcg) and np.allclose(w, 0, atol=0):
        out.append(ScalarField(name="sublevel-u", func=domain.u, pole=(0j, 0j)))
    if isinstance(domain, HartogsPgvlu):
        if w[0] == 0:
            out.append(domain.h_field(w))
        bid = unit_bidisk()
        Fw = domain.F(w.reshape(1, -1))[0]
        out.append(ScalarField(name="bidisk-green-through-F", func=lambda P: bid.green(domain.F(P), Fw), pole=tuple(w)))
    return out


def validate_competitor(domain: Domain, field: ScalarField, seed: int = 0, count: int = VALIDATION_SAMPLES) -> None:
    if not field.psh:
        raise ValueError(f"competitor {field.name} is not PSH by construction")
    rng = np.random.default_rng(seed)
    vals = field(domain.sample(rng, count))
    if np.any(vals >= 0):
        raise ValueError(f"competitor {field.name} is not negative on the validation sample")


def psh_lower_bound(
    domain: Domain, z, w, extra: Sequence[ScalarField] = (), seed: int = 0, shipped: bool = True
) -> BoundInterval:
    """max of the shipped (unless shipped=False) and any extra competitors at z."""
    domain, z, w = _resolve(domain, z, w)
    _require_inside(domain, z, w)
    if np.array_equal(z, w):
        return pole_interval()
    best, name = -math.inf, "no competitor"
    for f in (list(competitors(domain, w)) if shipped else []) + list(extra):
        if f.pole is not None and not np.allclose(np.array(f.pole), w, atol=1e-12):
            continue
        validate_competitor(domain, f, seed)
        val = f.at(z)
        if val > best:
            best, name = val, f.name
    tag = "closed_form" if name.endswith("-green") else "certified_lo"
    return lo_only(best, name, tag=tag)


# --------------------------------------------------------------------------
# pushforward (slice) upper bounds
# --------------------------------------------------------------------------


_RADIUS_CACHE: dict = {}


def _cached_linear_radius(domain: Domain, w, u, budget: SearchBudget) -> float:
    # annulus scans revisit the same direction at many radii; directions that agree
    # to 1e-12 share the bisection result, shrunk slightly to absorb the difference;
    # the radius is computed from the rounded key so it never depends on call order
    wr, ur = np.round(w, 12), np.round(u, 12)
    key = (id(domain), wr.tobytes(), ur.tobytes(), budget)
    hit = _RADIUS_CACHE.get(key)
    if hit is not None and hit[0] is domain:
        return hit[1]
    if len(_RADIUS_CACHE) > 4096:
        _RADIUS_CACHE.clear()
    R = linear_radius(domain, wr, ur, budget) * (1 - 1e-9)
    _RADIUS_CACHE[key] = (domain, R)
    return R


def slice_through(domain: Domain, z, w, budget: SearchBudget = SearchBudget()) -> Optional[SliceMap]:
    """A one-dimensional disk in the complex line through w and z."""
    z = as_point(z, domain.dim)
    w = as_point(w, domain.dim)
    d = z - w
    u = d / np.linalg.norm(d)
    if isinstance(domain, Ball):
        t0 = hermitian_dot(domain.c - w, u)
        dist2 = float(np.linalg.norm(domain.c - w) ** 2 - abs(t0) ** 2)
        rad = math.sqrt(max(domain.radius**2 - dist2, 0.0)) * (1 - 1e-12)
        base = w + t0 * u
        return SliceMap(target=domain, base=tuple(base), direction=tuple(u), radius=rad, check=False)
    R = _cached_linear_radius(domain, w, u, budget)
    if R <= np.linalg.norm(d):
        return None
    return SliceMap(target=domain, base=tuple(w), direction=tuple(u), radius=R, check=False)


def pushforward_upper_bound(slice_map: SliceMap, z, w) -> BoundInterval:
    """g_M(z, w) <= g of the slice disk at the preimages (holomorphic maps decrease g)."""
    if not isinstance(slice_map, SliceMap):
        raise TypeError("expected a SliceMap")
    for p in (z, w):
        slice_map.parameter(p)
    val = slice_green_bound(slice_map, z, w)
    if val is None:
        raise ValueError("points are not inside the slice disk")
    if val == -math.inf:
        return pole_interval()
    return hi_only(val, f"slice{slice_map.to_dict()['direction']}")


def slice_bounds(domain: Domain, z, w, budget: SearchBudget) -> BoundInterval:
    best = hi_only(math.inf, "none")
    labelled = [(s, "exact slice") for s in domain.exact_slices(w)]
    s = slice_through(domain, z, w, budget)
    if s is not None:
        labelled.append((s, "linear slice"))
    for s, label in labelled:
        val = slice_green_bound(s, z, w)
        if val is not None and val < best.hi:
            best = hi_only(val, f"{label} along {np.round(np.array(s.direction), 6).tolist()}")
    return best


def inscribed_ball_bound(domain: Domain, z, w) -> BoundInterval:
    """B(w, rho) in M gives g_M(z, w) <= log(||z - w|| / rho) for z in that ball."""
    rho = domain.inradius(w)
    dist = float(np.linalg.norm(as_point(z, domain.dim) - as_point(w, domain.dim)))
    if rho <= 0 or dist >= rho:
        return hi_only(math.inf, "none")
    return hi_only(math.log(dist / rho), f"inscribed-ball(rho={rho:.6g})")


# --------------------------------------------------------------------------
# combined interval
# --------------------------------------------------------------------------


def green_interval(
    domain: Domain,
    z,
    w,
    cfg: Optional[RunConfig] = None,
    extra: Sequence[ScalarField] = (),
    disks: bool = True,
) -> BoundInterval:
    """Certified enclosure of g(z, w); raises SoundnessError if the bounds cross."""
    cfg = cfg or RunConfig()
    budget = cfg.budget
    domain, z, w = _resolve(domain, z, w)
    _require_inside(domain, z, w)
    if np.array_equal(z, w):
        return pole_interval()
    out = caratheodory_bound(domain, z, w, cfg).merge(psh_lower_bound(domain, z, w, extra, cfg.seed))
    if budget.use_closed_form:
        cf = closed_form_green(domain, z, w)
        if cf is not None:
            out = out.merge(BoundInterval(-math.inf, cf, "none", "closed form", True, "certified_lo", "closed_form"))
            if out.width <= 0:
                return out.checked()
    out = out.merge(inscribed_ball_bound(domain, z, w))
    out = out.merge(slice_bounds(domain, z, w, budget))
    out = out.checked()
    if disks:
        stop = out.lo + budget.target_width
        if out.hi > stop:
            out = out.merge(kobayashi_bound(domain, z, w, budget, cfg.seed, stop)).checked()
        if out.hi > stop:
            out = out.merge(upper_bound_green(domain, z, w, budget, cfg.seed, stop)).checked()
    return out


def chain_bounds(domain: Domain, z, w, cfg: Optional[RunConfig] = None) -> dict:
    """Caratheodory lo, Green interval and Kobayashi hi for one pair."""
    cfg = cfg or RunConfig()
    c = caratheodory_bound(domain, z, w, cfg)
    g = green_interval(domain, z, w, cfg)
    k = kobayashi_bound(domain, z, w, cfg.budget, cfg.seed, g.lo + cfg.budget.target_width)
    # k bounds g from above, so it belongs to the Green interval as well
    g = g.merge(k).checked()
    return {"caratheodory": c, "green": g, "kobayashi": k}


# --------------------------------------------------------------------------
# Lelong-Jensen
# --------------------------------------------------------------------------


def _gauss_legendre01(n: int):
    x, wts = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1), 0.5 * wts


def lelong_jensen_residual(domain: Domain, u: ScalarField, w, radial: int = 128, angular: int = 256) -> float:
    """|u(w) - boundary mean against mu_w - interior Green-weighted Laplacian term|.

    Unit disk, any pole: the Moebius map sending 0 to w pulls g(., w) back to
    log|xi| and mu_w back to the uniform measure on the circle. Unit ball in
    C^2, pole 0: the interior density is (dd^c u) ^ (dd^c log||z||^2)
    against log||z||. Radii use the substitution rho = s^2.
    """
    w = as_point(w, domain.dim)
    if not isinstance(domain, Ball) or domain.radius != 1.0 or np.any(domain.c != 0):
        raise ValueError("Lelong-Jensen residuals are implemented for the unit disk and unit ball")
    s, ws = _gauss_legendre01(radial)
    th = 2 * np.pi * np.arange(angular) / angular
    if domain.dim == 1:
        a = complex(w[0])
        xi = (s[:, None] ** 2) * np.exp(1j * th)[None, :]
        zeta = (xi + a) / (1 + np.conj(a) * xi)
        jac = np.abs((1 - abs(a) ** 2) / (1 + np.conj(a) * xi) ** 2) ** 2
        lap = 4 * np.real(u.complex_hessian(zeta.reshape(-1, 1))[:, 0, 0]).reshape(zeta.shape)
        # dA = rho drho dtheta = 2 s^3 ds dtheta ; log rho = 2 log s
        integrand = 2 * np.log(s)[:, None] * lap * jac * (2 * s**3)[:, None]
        interior = float(np.sum(ws[:, None] * integrand) * (2 * np.pi / angular)) / (2 * np.pi)
        bd = np.exp(1j * th)
        bd = (bd + a) / (1 + np.conj(a) * bd)
        boundary = float(np.mean(u(bd.reshape(-1, 1))))
        return abs(u.at(w) - boundary - interior)
    if domain.dim != 2 or np.any(w != 0):
        raise ValueError("the ball version is implemented for the pole at the origin")
    s, ws = _gauss_legendre01(max(8, radial // 2))
    t, wt = _gauss_legendre01(max(8, radial // 8))
    na = max(8, angular // 16)
    ang = 2 * np.pi * np.arange(na) / na
    S, T, A1, A2 = np.meshgrid(s, t, ang, ang, indexing="ij")
    r = S**2
    P = np.stack([r * np.sqrt(T) * np.exp(1j * A1), r * np.sqrt(1 - T) * np.exp(1j * A2)], axis=-1).reshape(-1, 2)
    U = u.complex_hessian(P)
    nr2 = np.sum(np.abs(P) ** 2, axis=1)
    G = np.eye(2)[None, :, :] / nr2[:, None, None] - np.conj(P)[:, :, None] * P[:, None, :] / nr2[:, None, None] ** 2
    mixed = np.real(U[:, 0, 0] * G[:, 1, 1] + U[:, 1, 1] * G[:, 0, 0] - 2 * np.real(U[:, 0, 1] * G[:, 1, 0]))
    dens = (np.log(r).reshape(-1) * 8 * mixed).reshape(S.shape)
    # dV = r^3 dr (1/2) dt dtheta1 dtheta2, dr = 2 s ds
    weight = (ws * 2 * s * s**6)[:, None, None, None] * wt[None, :, None, None] * 0.5 * (2 * np.pi / na) ** 2
    interior = float(np.sum(dens * weight)) / (4 * np.pi**2)
    Tb, B1, B2 = np.meshgrid(t, ang, ang, indexing="ij")
    Pb = np.stack([np.sqrt(Tb) * np.exp(1j * B1), np.sqrt(1 - Tb) * np.exp(1j * B2)], axis=-1).reshape(-1, 2)
    boundary = float(np.sum(u(Pb).reshape(Tb.shape) * wt[:, None, None]) / na**2)
    return abs(u.at(w) - boundary - interior)
