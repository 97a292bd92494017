"""Azukawa and Royden functions, directional capacities and Bergman constants."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bounds import closed_form_green, green_interval
from .config import RunConfig
from .disks import certify_containment, royden_bound, AnalyticDisk
from .geometry import Ball, Domain, Polydisk, as_point, fibonacci_directions, hermitian_dot


@dataclass(frozen=True)
class HermitianMetric:
    """||v||_H at w for the Euclidean metric or the Bergman metric of the unit ball / polydisk.

    ``scale`` multiplies the quadratic form H (so norms scale by sqrt(scale)).
    """

    tag: str = "euclidean"
    m: Optional[int] = None
    scale: float = 1.0

    def __post_init__(self):
        if self.tag not in ("euclidean", "bergman_ball", "bergman_polydisk"):
            raise ValueError(f"unknown metric {self.tag!r}")
        if self.tag != "euclidean" and (self.m is None or self.m < 1):
            raise ValueError("Bergman metrics need the dimension m")
        if not self.scale > 0:
            raise ValueError("metric scale must be positive")

    def norm(self, w, v) -> float:
        w = as_point(w)
        v = as_point(v, w.size)
        if self.tag != "euclidean" and w.size != self.m:
            raise ValueError("metric dimension does not match the point")
        e2 = float(np.real(hermitian_dot(v, v)))
        if self.tag == "euclidean":
            q = e2
        elif self.tag == "bergman_ball":
            s = 1.0 - float(np.real(hermitian_dot(w, w)))
            if s <= 0:
                raise ValueError("point outside the unit ball")
            q = (self.m + 1) * (e2 / s + abs(hermitian_dot(v, w)) ** 2 / s**2)
        else:
            s = 1.0 - np.abs(w) ** 2
            if np.any(s <= 0):
                raise ValueError("point outside the unit polydisk")
            q = 2.0 * float(np.sum(np.abs(v) ** 2 / s**2))
        return math.sqrt(self.scale * q)

    def density(self, w) -> float:
        """Volume density H(w) = det of the form (n = 1: the form itself)."""
        w = as_point(w)
        n = w.size
        E = np.eye(n, dtype=complex)
        G = np.array([[self._form(w, E[i], E[j]) for j in range(n)] for i in range(n)])
        return float(np.real(np.linalg.det(G)))

    def _form(self, w, a, b) -> complex:
        # polarization of the quadratic form
        q = lambda x: self.norm(w, x) ** 2 if np.linalg.norm(x) > 0 else 0.0
        return 0.25 * (q(a + b) - q(a - b) + 1j * q(a + 1j * b) - 1j * q(a - 1j * b))


EUCLIDEAN = HermitianMetric()


@dataclass(frozen=True)
class AzukawaEstimate:
    lo: float
    hi: float
    intercept: float
    radii: tuple
    per_radius_lo: tuple
    per_radius_hi: tuple
    provenance: str = "estimate"

    @property
    def width(self) -> float:
        return self.hi - self.lo


def _probe_radii(domain: Domain, w, v, K: int) -> np.ndarray:
    rho = domain.inradius(w)
    t0 = 0.25 * rho if rho > 0 else 0.1
    for _ in range(60):
        pts = w + t0 * np.exp(2j * np.pi * np.arange(8) / 8)[:, None] * v[None, :]
        if np.all(domain.margins(pts) > 0):
            break
        t0 *= 0.5
    else:
        raise ValueError("no probe radius keeps the points inside the domain")
    return t0 * 2.0 ** (-np.arange(K))


def azukawa(
    domain: Domain,
    w,
    v,
    cfg: Optional[RunConfig] = None,
    second_order=None,
    tail: int = 4,
) -> AzukawaEstimate:
    """Enclosure estimate of A(w, v) = limsup g(f(zeta), w) - log|zeta| along f(zeta) = w + zeta v (+ zeta^2 q).

    v is normalized first and log||v|| added back, so A(w, alpha v) = A(w, v) + log|alpha| exactly.
    """
    cfg = cfg or RunConfig()
    w = as_point(w, domain.dim)
    v = as_point(v, domain.dim)
    nv = float(np.linalg.norm(v))
    if not nv > 0:
        raise ValueError("direction must be non-zero")
    vh = v / nv
    q = None if second_order is None else as_point(second_order, domain.dim) / nv
    K = cfg.budget.azukawa_radii
    radii = _probe_radii(domain, w, vh + (0 if q is None else q), K)
    ang = np.exp(2j * np.pi * np.arange(cfg.budget.angles) / cfg.budget.angles)
    lo_rows, hi_rows = [], []
    exact = cfg.budget.use_closed_form and closed_form_green(domain, w + radii[-1] * vh, w) is not None
    for t in radii:
        zeta = t * ang
        pts = w[None, :] + zeta[:, None] * vh[None, :]
        if q is not None:
            pts = pts + (zeta**2)[:, None] * q[None, :]
        if exact:
            vals = domain.green(pts, w)
            lo, hi = vals, vals
        else:
            ivs = [green_interval(domain, p, w, cfg) for p in pts]
            lo = np.array([iv.lo for iv in ivs])
            hi = np.array([iv.hi for iv in ivs])
        lo_rows.append(float(np.max(lo)) - math.log(t))
        hi_rows.append(float(np.max(hi)) - math.log(t))
    tail = min(tail, K)
    lo_t, hi_t = np.array(lo_rows[-tail:]), np.array(hi_rows[-tail:])
    logs = np.log(radii[-tail:])
    if np.all(np.isfinite(hi_t)) and tail > 1:
        # fitted tail value at the smallest probe radius
        slope, icpt = np.polyfit(logs, hi_t, 1)
        intercept = float(icpt + slope * logs[-1])
    else:
        intercept = float(hi_t[-1])
    shift = math.log(nv)
    return AzukawaEstimate(
        lo=float(np.min(lo_t)) + shift,
        hi=float(np.max(hi_t)) + shift,
        intercept=intercept + shift,
        radii=tuple(float(t) for t in radii),
        per_radius_lo=tuple(x + shift for x in lo_rows),
        per_radius_hi=tuple(x + shift for x in hi_rows),
        provenance="closed_form" if exact else "estimate",
    )


def royden(domain: Domain, w, v, cfg: Optional[RunConfig] = None):
    cfg = cfg or RunConfig()
    return royden_bound(domain, w, v, cfg.budget, cfg.seed)


@dataclass(frozen=True)
class DirectionalSample:
    w: tuple
    v: tuple
    A_lo: float
    A_hi: float
    R_hi: float
    norm_H: float

    @property
    def sigma_lo(self) -> float:
        return self.A_lo - math.log(self.norm_H)

    @property
    def sigma_hi(self) -> float:
        return self.A_hi - math.log(self.norm_H)


def h_unit_directions(w, H: HermitianMetric, count: int, dim: int) -> np.ndarray:
    if dim == 1:
        dirs = np.array([[1.0 + 0j]])
    else:
        dirs = fibonacci_directions(count)
    return np.array([d / H.norm(w, d) for d in dirs])


@dataclass(frozen=True)
class SigmaEstimate:
    sigma_i: tuple
    sigma_s: tuple
    directions: int
    samples: tuple = field(default=(), repr=False)
    caveat: str = "inf/sup over a finite direction grid"


def sigma_estimates(domain: Domain, w, H: HermitianMetric = EUCLIDEAN, cfg: Optional[RunConfig] = None, with_royden: bool = False) -> SigmaEstimate:
    """sigma_i and sigma_s intervals from Azukawa estimates over H-unit directions."""
    cfg = cfg or RunConfig()
    w = as_point(w, domain.dim)
    dirs = h_unit_directions(w, H, cfg.budget.directions, domain.dim)
    samples = []
    for v in dirs:
        a = azukawa(domain, w, v, cfg)
        r = royden(domain, w, v, cfg).hi if with_royden else math.nan
        samples.append(DirectionalSample(tuple(w), tuple(v), a.lo, a.hi, r, H.norm(w, v)))
    lo = np.array([s.sigma_lo for s in samples])
    hi = np.array([s.sigma_hi for s in samples])
    return SigmaEstimate(
        sigma_i=(float(np.min(lo)), float(np.min(hi))),
        sigma_s=(float(np.max(lo)), float(np.max(hi))),
        directions=len(dirs),
        samples=tuple(samples),
    )


def samples_to_csv(samples: Sequence[DirectionalSample]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["w", "v", "A_lo", "A_hi", "R_hi", "norm_H", "sigma_lo", "sigma_hi"])
    for s in samples:
        wr.writerow([_fmt_c(s.w), _fmt_c(s.v), repr(s.A_lo), repr(s.A_hi), repr(s.R_hi), repr(s.norm_H), repr(s.sigma_lo), repr(s.sigma_hi)])
    return buf.getvalue()


def _fmt_c(p) -> str:
    return ";".join(f"{complex(x).real!r}{complex(x).imag:+.17g}i" for x in p)


# --------------------------------------------------------------------------
# Bergman constants
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BergmanConstants:
    domain: str
    m: int
    coefficient: float
    norm_factor: float
    sigma_i: float
    sigma_s: float
    sigma_i_stated: float

    def distance_from_origin(self, r: float) -> float:
        """Bergman distance d_B(0, z) for ||z||_E = r (ball), or |z| along one axis (polydisk)."""
        if not 0 <= r < 1:
            raise ValueError("radius must lie in [0, 1)")
        return self.norm_factor * math.atanh(r)


def bergman_constants(domain: str | Domain, m: int) -> BergmanConstants:
    """Closed-form Bergman data of the unit ball or polydisk in C^m.

    Ball: B(0, v) = (m+1)||v||^2 and sigma_i = sigma_s = -log sqrt(m+1).
    Polydisk: ||v||_B^2 = 2 sum |v_j|^2 at 0, so sigma_s = -log sqrt 2
    (attained on coordinate axes) and sigma_i = -log sqrt(2m) (attained on
    the diagonal); the latter equals -log m only for m = 2, which is kept as
    ``sigma_i_stated``.
    """
    kind = domain.kind if isinstance(domain, Domain) else str(domain)
    if m < 1:
        raise ValueError("dimension must be positive")
    if kind == "ball":
        c = float(m + 1)
        s = -math.log(math.sqrt(m + 1))
        return BergmanConstants("ball", m, c, math.sqrt(c), s, s, s)
    if kind == "polydisk":
        return BergmanConstants(
            "polydisk", m, 2.0, math.sqrt(2.0), -math.log(math.sqrt(2.0 * m)), -math.log(math.sqrt(2.0)), -math.log(m)
        )
    raise ValueError(f"no Bergman constants for {kind!r}")


# --------------------------------------------------------------------------
# Suita and derivative checks
# --------------------------------------------------------------------------


def disk_bergman_density(w) -> float:
    """Bergman kernel density of the unit disk on the diagonal."""
    a = abs(complex(as_point(w, 1)[0]))
    if a >= 1:
        raise ValueError("point outside the unit disk")
    return 1.0 / (math.pi * (1 - a * a) ** 2)


@dataclass(frozen=True)
class SuitaReport:
    lhs: float
    rhs: float
    holds: bool
    gap: float


def suita_check(w, H: HermitianMetric = EUCLIDEAN, cfg: Optional[RunConfig] = None, tol: float = 0.05) -> SuitaReport:
    """sigma_s(w) <= log sqrt(pi B(w) / H(w)) on the unit disk."""
    cfg = cfg or RunConfig()
    disk = Ball(center=(0j,), radius=1.0)
    w = as_point(w, 1)
    est = sigma_estimates(disk, w, H, cfg)
    lhs = est.sigma_s[1]
    alpha = disk_bergman_density(w) / H.density(w)
    rhs = math.log(math.sqrt(math.pi * alpha))
    return SuitaReport(lhs, rhs, lhs <= rhs + tol, lhs - rhs)


@dataclass(frozen=True)
class DerivativeReport:
    bound: float
    max_norm: float
    max_violation: float
    trials: int


def derivative_bound_check(domain: Domain, w, H: HermitianMetric = EUCLIDEAN, trials: int = 32, cfg: Optional[RunConfig] = None, degree: int = 4) -> DerivativeReport:
    """max over random certified disks f (f(0) = w) of ||f'(0)||_H - exp(-sigma_i,lo(w))."""
    cfg = cfg or RunConfig()
    w = as_point(w, domain.dim)
    est = sigma_estimates(domain, w, H, cfg)
    bound = math.exp(-est.sigma_i[0])
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 7]))
    best = 0.0
    for _ in range(trials):
        C = rng.normal(size=(degree, domain.dim)) + 1j * rng.normal(size=(degree, domain.dim))
        C /= np.arange(1, degree + 1)[:, None] ** 2
        lo, hi = 0.0, domain.circumradius(w) / max(np.linalg.norm(C[0]), 1e-12)
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            f = AnalyticDisk(np.vstack([w, mid * C]), 1.0, (), None, "royden", tuple(C[0]))
            if certify_containment(domain, f, cfg.budget) is not None:
                lo = mid
            else:
                hi = mid
        if lo > 0:
            best = max(best, H.norm(w, lo * C[0]))
    return DerivativeReport(bound, best, best - bound, trials)
