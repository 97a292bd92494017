"""Strict-pole classification, the gluing competitor, the ratio test and
exhaustion/continuity diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .bounds import closed_form_green, green_interval
from .config import RunConfig
from .fields import ScalarField, safe_log
from .geometry import Ball, Domain, Polydisk, as_point, sphere_points, unit_ball_automorphism
from .intervals import BoundInterval

SPREAD_BOUND = 0.5
TAIL = 4

BoundsFn = Callable[[np.ndarray, np.ndarray], BoundInterval]


def _fast_cfg(cfg: RunConfig) -> RunConfig:
    return cfg


def _default_bounds(domain: Domain, cfg: RunConfig, disks: bool = False) -> BoundsFn:
    def fn(z, w):
        return green_interval(domain, z, w, cfg, disks=disks)

    return fn


# --------------------------------------------------------------------------
# pole classification
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PoleFit:
    w: tuple
    radii: tuple
    lo_min: tuple
    lo_max: tuple
    hi_min: tuple
    hi_max: tuple
    classification: str
    c1: float
    c2: float
    spread_bound: float = SPREAD_BOUND

    def to_json(self) -> dict:
        def enc(xs):
            return [x if math.isfinite(x) else ("inf" if x > 0 else "-inf") for x in xs]

        return {
            "w": [[p.real, p.imag] for p in self.w],
            "radii": list(self.radii),
            "lo_min": enc(self.lo_min),
            "lo_max": enc(self.lo_max),
            "hi_min": enc(self.hi_min),
            "hi_max": enc(self.hi_max),
            "classification": self.classification,
            "c1": enc([self.c1])[0],
            "c2": enc([self.c2])[0],
        }


def pole_radii(domain: Domain, w, count: int = 7) -> np.ndarray:
    """t_k = 10^(-1-k/2), scaled down when the first annulus is not inside the domain."""
    t = 10.0 ** (-1.0 - np.arange(count) / 2.0)
    rho = domain.inradius(w)
    if rho > 0 and t[0] >= rho:
        t = t * (0.5 * rho / t[0])
    return t


def _spread(x: np.ndarray) -> float:
    if not np.all(np.isfinite(x)):
        return math.inf
    return float(np.max(x) - np.min(x))


def classify_pole(
    domain: Domain,
    w,
    cfg: Optional[RunConfig] = None,
    bounds: Optional[BoundsFn] = None,
    points_per_annulus: int = 48,
    spread_bound: float = SPREAD_BOUND,
) -> PoleFit:
    """Two-sided envelopes of g - log t on annuli ||z - w|| = t_k and their classification.

    Strict: both the lower envelope of g_lo - log t and the upper envelope
    of g_hi - log t are finite with spread <= spread_bound over the last
    annuli. LogarithmicOnly: the upper envelope is bounded but the lower one
    diverges. NoPole: no finite upper envelope.
    """
    cfg = cfg or RunConfig()
    w = as_point(w, domain.dim)
    bounds = bounds or _default_bounds(domain, cfg)
    radii = pole_radii(domain, w, cfg.budget.annuli)
    count = points_per_annulus if domain.dim == 2 else max(8, points_per_annulus // 3)
    lo_min, lo_max, hi_min, hi_max = [], [], [], []
    for t in radii:
        pts = sphere_points(w, t, domain.dim, count)
        ivs = [bounds(p, w) for p in pts]
        lo = np.array([iv.lo for iv in ivs]) - math.log(t)
        hi = np.array([iv.hi for iv in ivs]) - math.log(t)
        lo_min.append(float(np.min(lo)))
        lo_max.append(float(np.max(lo)))
        hi_min.append(float(np.min(hi)))
        hi_max.append(float(np.max(hi)))
    k = min(TAIL, len(radii))
    lo_t, hi_t = np.array(lo_min[-k:]), np.array(hi_max[-k:])
    upper_ok = _spread(hi_t) <= spread_bound
    lower_ok = _spread(lo_t) <= spread_bound
    if upper_ok and lower_ok:
        label = "Strict"
    elif upper_ok and (not np.all(np.isfinite(lo_t)) or lo_t[-1] < lo_t[0] - spread_bound):
        label = "LogarithmicOnly"
    elif not np.all(np.isfinite(hi_t)) or hi_t[-1] > hi_t[0] + spread_bound:
        label = "NoPole"
    else:
        label = "Inconclusive"
    c1 = float(np.min(lo_t)) if np.all(np.isfinite(lo_t)) else -math.inf
    c2 = float(np.max(hi_t)) if np.all(np.isfinite(hi_t)) else math.inf
    return PoleFit(
        tuple(complex(x) for x in w),
        tuple(float(t) for t in radii),
        tuple(lo_min),
        tuple(lo_max),
        tuple(hi_min),
        tuple(hi_max),
        label,
        c1,
        c2,
        spread_bound,
    )


def pole_constant(domain: Domain, w, cfg: Optional[RunConfig] = None, bounds: Optional[BoundsFn] = None) -> float:
    """Certified-side estimate of inf (g - log||z - w||) near w: the fitted c1."""
    return classify_pole(domain, w, cfg, bounds).c1


# --------------------------------------------------------------------------
# gluing
# --------------------------------------------------------------------------


def quadratic_spsh(domain: Domain, center=None) -> ScalarField:
    """u = ||z - c||^2 / R^2 - 1: bounded, negative and strictly PSH on the domain (R = circumradius)."""
    c = as_point(np.zeros(domain.dim) if center is None else center, domain.dim)
    R = domain.circumradius(c)
    return ScalarField(
        name="quadratic-spsh",
        func=lambda P: np.sum(np.abs(P - c) ** 2, axis=1) / R**2 - 1.0,
        meta={"center": tuple(c), "radius": R},
    )


class GluingError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class GluedCompetitor:
    """v_w = g_B(., w) + h/d on U, max{g_B + h/d, u/d} on B \\ U, u/d outside B.

    B = B(w0, r), U = B(w0, s), h(z) = h0 + Re<z - w0, beta> pluriharmonic,
    a = u(w0) - h(w0) < 0, and d with d log(s/r) > a/4. Valid for poles w
    in W = B(w0, omega).
    """

    w: tuple
    w0: tuple
    r: float
    s: float
    d: float
    a: float
    h0: float
    beta: tuple
    omega: float
    u: ScalarField

    def _gB(self, P):
        w0, w = np.array(self.w0), np.array(self.w)
        A = (w - w0) / self.r
        img = unit_ball_automorphism(A, (P - w0) / self.r)
        return safe_log(np.linalg.norm(img, axis=1))

    def h(self, P) -> np.ndarray:
        return self.h0 + np.real(np.sum((P - np.array(self.w0)) * np.conj(np.array(self.beta)), axis=1))

    def inner(self, P):
        return self._gB(P) + self.h(P) / self.d

    def outer(self, P):
        return self.u.func(P) / self.d

    def __call__(self, points) -> np.ndarray:
        P = np.atleast_2d(np.asarray(points, dtype=complex))
        dist = np.linalg.norm(P - np.array(self.w0), axis=1)
        out = self.outer(P)
        inB = dist < self.r
        if np.any(inB):
            Q = P[inB]
            inner = self.inner(Q)
            mid = np.maximum(inner, self.outer(Q))
            inU = dist[inB] < self.s
            out[inB] = np.where(inU, inner, mid)
        return out

    @property
    def field(self) -> ScalarField:
        return ScalarField(
            name=f"glued(w0={np.round(np.array(self.w0), 6).tolist()}, d={self.d:.4g})",
            func=self.__call__,
            pole=self.w,
            psh=True,
            meta={"pieces": ["ball-green", "affine-pluriharmonic", "max", "quadratic-spsh"]},
        )

    def seam_jumps(self, count: int = 1000, seed: int = 0) -> float:
        """Largest jump between adjacent piece formulas on sampled seams dU and dB."""
        rng = np.random.default_rng(seed)
        n = len(self.w0)
        X = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        w0 = np.array(self.w0)
        PU = w0 + self.s * X
        PB = w0 + self.r * X * (1 - 1e-15)
        inner_U = self.inner(PU)
        mid_U = np.maximum(inner_U, self.outer(PU))
        mid_B = np.maximum(self.inner(PB), self.outer(PB))
        return float(max(np.max(np.abs(mid_U - inner_U)), np.max(np.abs(mid_B - self.outer(PB)))))

    def sign_conditions(self, count: int = 512, seed: int = 0) -> dict:
        rng = np.random.default_rng(seed)
        n = len(self.w0)
        X = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        w0 = np.array(self.w0)
        PU, PB = w0 + self.s * X, w0 + self.r * X
        return {
            "inner_above_on_dU": float(np.min(self.inner(PU) - self.outer(PU))),
            "inner_below_on_dB": float(np.max(self.inner(PB) - self.outer(PB))),
        }


def _ball_green_lower_on_sphere(s: float, r: float, omega: float) -> float:
    """min of g_B(z, w) over ||z - w0|| = s, ||w - w0|| <= omega (pseudo-hyperbolic triangle inequality)."""
    x, y = s / r, omega / r
    if y >= x:
        return -math.inf
    return math.log((x - y) / (1 - x * y))


def glue_competitor(
    domain: Domain,
    u: ScalarField,
    w,
    w0=None,
    cfg: Optional[RunConfig] = None,
    directions: int = 64,
) -> GluedCompetitor:
    """Build the glued competitor v_w for the pole w from a quadratic strictly PSH u.

    The pluriharmonic h is searched among real parts of affine holomorphic
    functions: the gradient-matched choice first, then 64 perturbed
    gradients; the sign conditions u - h > 0 on dB and u - h < a/2 on U are
    checked analytically for the quadratic u.
    """
    cfg = cfg or RunConfig()
    w = as_point(w, domain.dim)
    w0 = w if w0 is None else as_point(w0, domain.dim)
    if "center" not in u.meta or "radius" not in u.meta:
        raise GluingError("glue_competitor needs a quadratic strictly PSH field (see quadratic_spsh)")
    c = np.array(u.meta["center"])
    R = float(u.meta["radius"])
    rho = domain.inradius(w0)
    if rho <= 0:
        raise GluingError("no coordinate ball around w0 inside the domain")
    r = 0.99 * rho
    q = w0 - c
    u_w0 = float(np.sum(np.abs(q) ** 2)) / R**2 - 1.0
    a = -(r**2) / (2 * R**2)
    s = 0.45 * r
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 11]))
    base_beta = 2 * q / R**2
    candidates = [base_beta]
    for _ in range(directions):
        e = rng.normal(size=domain.dim) + 1j * rng.normal(size=domain.dim)
        candidates.append(base_beta + 0.1 * r / R**2 * e / np.linalg.norm(e))
    for beta in candidates:
        # u - h = ||z - w0||^2/R^2 + Re<z - w0, 2q/R^2 - beta> + a
        delta = float(np.linalg.norm(beta - base_beta))
        near_B = r**2 / R**2 - delta * r + a
        on_U = s**2 / R**2 + delta * s + a
        if near_B <= 0 or on_U >= a / 2:
            continue
        h0 = u_w0 - a
        d = 0.9 * a / (4 * math.log(s / r))
        # W: d * g_B(z, w) > a/2 > u - h on dU for w in W
        lo, hi = 0.0, s
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if d * _ball_green_lower_on_sphere(s, r, mid) > max(a / 2, on_U):
                lo = mid
            else:
                hi = mid
        omega = lo
        if np.linalg.norm(w - w0) >= omega:
            continue
        return GluedCompetitor(tuple(w), tuple(w0), r, s, d, a, h0, tuple(beta), omega, u)
    raise GluingError("no admissible (B, h, d) found for this pole")


# --------------------------------------------------------------------------
# ratio test
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RatioResult:
    delta: float
    deviation: float
    table: tuple
    eps: float
    excluded_radius: float


def _ratio_pool(domain: Domain, w0, rng, count: int = 400) -> np.ndarray:
    pts = domain.sample(rng, count)
    # boundary layer: push samples towards the boundary along rays from w0
    layer = []
    for k in range(1, 7):
        f = 1 - 10.0 ** (-k)
        for p in pts[:20]:
            d = p - w0
            t_lo, t_hi = 0.0, domain.circumradius(w0) / max(np.linalg.norm(d), 1e-12)
            for _ in range(50):
                m = 0.5 * (t_lo + t_hi)
                if domain.margin(w0 + m * d) > 0:
                    t_lo = m
                else:
                    t_hi = m
            layer.append(w0 + f * t_lo * d)
    return np.vstack([pts, np.array(layer)])


def ratio_test(
    domain: Domain,
    w0,
    excluded_radius: float,
    cfg: Optional[RunConfig] = None,
    eps: Optional[float] = None,
    deltas: Optional[Sequence[float]] = None,
    pool: Optional[np.ndarray] = None,
    w_count: int = 16,
) -> RatioResult:
    """Largest sampled delta with max |g(z, w0)/g(z, w) - 1| <= eps for ||w - w0|| = delta, ||z - w0|| >= X."""
    cfg = cfg or RunConfig()
    eps = cfg.eps if eps is None else eps
    w0 = as_point(w0, domain.dim)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 13]))
    if pool is None:
        pool = _ratio_pool(domain, w0, rng)
    Z = pool[np.linalg.norm(pool - w0, axis=1) >= excluded_radius]
    if deltas is None:
        rho = domain.inradius(w0)
        deltas = [min(0.5 * rho, 0.5 * excluded_radius) * 2.0 ** (-k) for k in range(16)]
    exact = closed_form_green(domain, Z[0], w0) is not None if len(Z) else True

    def g(Zs, w):
        if exact:
            return domain.green(Zs, w)
        ivs = [green_interval(domain, z, w, cfg, disks=False) for z in Zs]
        return np.array([iv.mid for iv in ivs])

    table = []
    best_delta, best_dev = 0.0, math.inf
    base = g(Z, w0) if len(Z) else np.zeros(0)
    for delta in deltas:
        W = sphere_points(w0, delta, domain.dim, w_count)
        dev = 0.0
        for w in W:
            gw = g(Z, w)
            ok = np.isfinite(gw) & (gw < 0)
            dev = max(dev, float(np.max(np.abs(base[ok] / gw[ok] - 1))) if np.any(ok) else 0.0)
        table.append((float(delta), dev))
        if dev <= eps and delta > best_delta:
            best_delta, best_dev = float(delta), dev
    return RatioResult(best_delta, best_dev, tuple(table), eps, excluded_radius)


# --------------------------------------------------------------------------
# exhaustion and continuity
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExhaustionLevel:
    level: float
    margin_hi: float
    margin_lo: float


@dataclass(frozen=True)
class ExhaustionReport:
    levels: tuple
    b: float
    b_violations: int
    b_min_slack: float

    @property
    def all_positive(self) -> bool:
        return all(l.margin_hi > 0 and l.margin_lo > 0 for l in self.levels)


def _exit_radius(pred, w, d, tmax: float, iters: int = 40) -> float:
    lo, hi = 0.0, tmax
    if pred(w + hi * d):
        return hi
    for _ in range(iters):
        m = 0.5 * (lo + hi)
        if pred(w + m * d):
            lo = m
        else:
            hi = m
    return lo


def exhaustion_check(
    domain: Domain,
    w,
    levels: Sequence[float],
    cfg: Optional[RunConfig] = None,
    rays: int = 24,
    bounds: Optional[BoundsFn] = None,
) -> ExhaustionReport:
    """Boundary clearance of the sublevel sets {g_hi < a} and {g_lo < a}, searched along rays from w.

    Also runs the recipe g >= b u outside a small ball: b = min(g_lo on the
    sphere) / max(u on the sphere), and counts samples with g_lo < b u.
    """
    cfg = cfg or RunConfig()
    w = as_point(w, domain.dim)
    bounds = bounds or _default_bounds(domain, cfg)
    dirs = sphere_points(np.zeros(domain.dim), 1.0, domain.dim, rays)
    out = []
    for a in levels:
        if not a < 0:
            raise ValueError("levels must be negative")
        m_hi, m_lo = math.inf, math.inf
        for d in dirs:
            tmax = _exit_radius(lambda p: domain.margin(p) > 0, w, d, domain.circumradius(w))
            t_hi = _exit_radius(lambda p: domain.margin(p) > 0 and bounds(p, w).hi < a, w, d, tmax)
            t_lo = _exit_radius(lambda p: domain.margin(p) > 0 and bounds(p, w).lo < a, w, d, tmax)
            m_hi = min(m_hi, domain.margin(w + t_hi * d))
            m_lo = min(m_lo, domain.margin(w + t_lo * d))
        out.append(ExhaustionLevel(float(a), float(m_hi), float(m_lo)))
    b, viol, slack = _b_recipe(domain, w, cfg, bounds)
    return ExhaustionReport(tuple(out), b, viol, slack)


def _b_recipe(domain: Domain, w, cfg: RunConfig, bounds: BoundsFn, count: int = 200):
    u = domain.exhaustion()
    if u is None:
        return math.nan, 0, math.nan
    r = 0.5 * domain.inradius(w)
    S = sphere_points(w, r, domain.dim, 48)
    alpha = float(np.max(u(S)))
    g_min = min(bounds(p, w).lo for p in S)
    if not (alpha < 0 and math.isfinite(g_min)):
        return math.nan, 0, math.nan
    b = g_min / alpha
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 17]))
    Z = domain.sample(rng, count)
    Z = Z[np.linalg.norm(Z - w, axis=1) >= r]
    slack = np.array([bounds(z, w).lo - b * u.at(z) for z in Z])
    return float(b), int(np.sum(slack < -1e-9)), float(np.min(slack)) if slack.size else math.inf


@dataclass(frozen=True)
class ContinuityReport:
    verdict: str
    intervals: tuple
    limit: BoundInterval
    gap: float
    widths: float

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "gap": self.gap,
            "widths": self.widths,
            "limit": self.limit.to_json(),
            "path": [iv.to_json() for iv in self.intervals],
        }


WITNESS_FRACTION = 0.5
ANALYTIC_GAP = math.log(2) / 2


def continuity_scan(
    domain: Domain,
    path: Sequence[tuple],
    limit: tuple,
    cfg: Optional[RunConfig] = None,
    bounds: Optional[BoundsFn] = None,
    tail: int = 3,
    tol: float = 0.05,
) -> ContinuityReport:
    """Compare intervals along (z_j, w_j) -> (z0, w0) with the interval at the limit.

    DISCONTINUITY WITNESS: lo(z0, w0) exceeds every tail hi_j by gap > 0 and
    the tail widths plus the limit width are below half of log(2)/2.
    CONVERGES: every tail interval meets the limit interval widened by tol.
    """
    cfg = cfg or RunConfig()
    bounds = bounds or (lambda z, w: green_interval(domain, z, w, cfg))
    ivs = tuple(bounds(as_point(z, domain.dim), as_point(w, domain.dim)) for z, w in path)
    lim = bounds(as_point(limit[0], domain.dim), as_point(limit[1], domain.dim))
    k = min(tail, len(ivs))
    tail_ivs = ivs[-k:] if k else ()
    if not tail_ivs:
        return ContinuityReport("CONVERGES", ivs, lim, 0.0, 0.0)
    top = max(iv.hi for iv in tail_ivs)
    gap = lim.lo - top
    widths = max(iv.width for iv in tail_ivs) + lim.width
    if gap > 0 and widths < WITNESS_FRACTION * ANALYTIC_GAP:
        verdict = "DISCONTINUITY WITNESS"
    elif all(iv.hi >= lim.lo - tol and iv.lo <= lim.hi + tol for iv in tail_ivs):
        verdict = "CONVERGES"
    else:
        verdict = "INCONCLUSIVE"
    return ContinuityReport(verdict, ivs, lim, float(gap), float(widths))
