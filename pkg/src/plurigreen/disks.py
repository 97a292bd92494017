"""Polynomial analytic disks, containment certificates and the Poletsky functional.

Three kinds of disks are used:

``poletsky``  f(0) = z and f(zeta_j) = w for the declared hits; the
              functional sum log(|zeta_j| / r) bounds g(z, w) from above.
``swapped``   f(0) = w and f(a) = z. Precomposing with the disk
              automorphism exchanging 0 and a gives a disk through z
              hitting w at a, so log(|a| / r) bounds both the Kobayashi
              function and g(z, w).
``royden``    f(0) = w and f'(0) = lam * v; -log(lam * r) bounds R(w, v).

Coefficient arrays are stored low order first with shape ``(d + 1, n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import numpy.polynomial.polynomial as npoly
from scipy.optimize import minimize

from .config import SearchBudget
from .geometry import Domain, Pushforward, as_point
from .intervals import BoundInterval, hi_only, pole_interval

MODES = ("poletsky", "swapped", "royden")
CONSTRAINT_TOL = 1e-12
ROOT_TOL = 1e-9


def _horner(A: np.ndarray, zeta) -> np.ndarray:
    z = np.asarray(zeta, dtype=complex)
    scalar = z.ndim == 0
    z = z.reshape(-1)
    out = np.zeros((z.size, A.shape[1]), dtype=complex)
    for a in A[::-1]:
        out = out * z[:, None] + a[None, :]
    return out[0] if scalar else out


@dataclass(frozen=True, eq=False)
class AnalyticDisk:
    """A polynomial map of the closed disk |zeta| <= radius into C^n."""

    coeffs: np.ndarray
    radius: float = 1.0
    hits: tuple = ()
    target: Optional[tuple] = None
    mode: str = "poletsky"
    jet: Optional[tuple] = None

    def __post_init__(self):
        A = np.array(self.coeffs, dtype=complex)
        if A.ndim == 1:
            A = A.reshape(-1, 1)
        object.__setattr__(self, "coeffs", A)
        if self.mode not in MODES:
            raise ValueError(f"unknown disk mode {self.mode!r}")
        if not 0 < self.radius <= 1.0 + 1e-15:
            raise ValueError("nominal radius must lie in (0, 1]")
        hits = tuple(complex(h) for h in self.hits)
        object.__setattr__(self, "hits", hits)
        if hits:
            if self.target is None:
                raise ValueError("hits need a target point")
            if any(not 0 < abs(h) < self.radius for h in hits):
                raise ValueError("hits must lie in the punctured open disk of the nominal radius")
            t = as_point(self.target, self.dim)
            object.__setattr__(self, "target", tuple(complex(x) for x in t))
            scale = 1.0 + float(np.sum(np.abs(A)))
            err = max(float(np.linalg.norm(self.evaluate(h) - t)) for h in hits)
            if err > CONSTRAINT_TOL * scale:
                raise ValueError(f"interpolation constraint violated by {err:.3e}")

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def center(self) -> np.ndarray:
        return self.coeffs[0].copy()

    def with_radius(self, r: float) -> "AnalyticDisk":
        return AnalyticDisk(self.coeffs, r, self.hits, self.target, self.mode, self.jet)

    def evaluate(self, zeta) -> np.ndarray:
        """Horner evaluation; a scalar gives shape (n,), an array (N, n)."""
        return _horner(self.coeffs, zeta)

    def derivative(self, zeta) -> np.ndarray:
        if self.degree == 0:
            return _horner(np.zeros((1, self.dim), complex), zeta)
        k = np.arange(1, self.degree + 1)[:, None]
        return _horner(self.coeffs[1:] * k, zeta)

    def lipschitz(self, r: Optional[float] = None) -> float:
        """Bound for sup |f'| on |zeta| <= r."""
        r = self.radius if r is None else r
        if self.degree == 0:
            return 0.0
        k = np.arange(1, self.degree + 1)
        per = np.sum(k[:, None] * np.abs(self.coeffs[1:]) * r ** (k[:, None] - 1), axis=0)
        return float(np.linalg.norm(per))

    def describe(self) -> str:
        return f"{self.mode}-disk(deg={self.degree}, r={self.radius:.6g}, hits={len(self.hits)})"


def evaluate_disk(f: AnalyticDisk, zeta) -> np.ndarray:
    zeta = complex(zeta)
    if abs(zeta) > f.radius * (1 + 1e-12):
        raise ValueError(f"|zeta| = {abs(zeta):.6g} exceeds the disk radius {f.radius:.6g}")
    return f.evaluate(zeta)


@dataclass(frozen=True)
class ContainmentCertificate:
    samples: int
    slack: float
    method: str
    radius: float
    lipschitz: float

    def __post_init__(self):
        if not self.slack > 0:
            raise ValueError("a containment certificate needs positive slack")
        if self.method not in ("boundary-only", "full-disk grid", "exact slice", "analytic"):
            raise ValueError(f"unknown certificate method {self.method!r}")


def _boundary_check(domain: Domain, f: AnalyticDisk, m: int, L: float):
    r = f.radius
    zeta = r * np.exp(2j * np.pi * np.arange(m) / m)
    P = f.evaluate(zeta)
    nominal = float(np.min(domain.margins(P)))
    h = L * math.pi * r / m
    certified = float(np.min(domain.margin_lower_bounds(P, h)))
    return nominal, certified


def _grid_check(domain: Domain, f: AnalyticDisk, nr: int, na: int, L: float):
    r = f.radius
    rho = r * np.arange(nr + 1) / nr
    th = 2 * np.pi * np.arange(na) / na
    zeta = (rho[:, None] * np.exp(1j * th)[None, :]).ravel()
    P = f.evaluate(zeta)
    nominal = float(np.min(domain.margins(P)))
    h = L * (r / (2 * nr) + math.pi * r / na)
    certified = float(np.min(domain.margin_lower_bounds(P, h)))
    return nominal, certified


def certify_containment(domain: Domain, f: AnalyticDisk, budget: SearchBudget = SearchBudget()) -> Optional[ContainmentCertificate]:
    """Certificate that the closed disk image lies in ``domain``, or None.

    With PSH defining functions the maximum principle reduces the check to
    the boundary circle; arcs between samples are covered by a Lipschitz
    bound for f and the domain's certified margin over small balls.
    """
    L = f.lipschitz()
    if domain.psh_defined:
        m = budget.boundary_samples
        while True:
            nominal, cert = _boundary_check(domain, f, m, L)
            if cert > 0:
                return ContainmentCertificate(m, cert, "boundary-only", f.radius, L)
            if nominal <= 0 or m >= budget.max_boundary_samples:
                return None
            m *= 2
    nr, na = budget.grid_radii, budget.grid_angles
    while True:
        nominal, cert = _grid_check(domain, f, nr, na, L)
        if cert > 0:
            return ContainmentCertificate(nr * na, cert, "full-disk grid", f.radius, L)
        if nominal <= 0 or nr * na >= 2**20:
            return None
        nr, na = 2 * nr, 2 * na


def shrink_to_certified(domain: Domain, f: AnalyticDisk, budget: SearchBudget, iters: int = 40):
    """Largest nominal radius (by bisection) at which containment certifies."""
    cert = certify_containment(domain, f, budget)
    if cert is not None:
        return f, cert
    lo = max((abs(h) for h in f.hits), default=0.0)
    lo = lo * (1 + 1e-9) if lo > 0 else 1e-6
    hi = f.radius
    if lo >= hi:
        return None, None
    g = f.with_radius(lo)
    best = certify_containment(domain, g, budget)
    if best is None:
        return None, None
    best_f = g
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        g = f.with_radius(mid)
        c = certify_containment(domain, g, budget)
        if c is not None:
            lo, best_f, best = mid, g, c
        else:
            hi = mid
        if hi - lo < 1e-7:
            break
    return best_f, best


@dataclass(frozen=True)
class DiskValue:
    value: float
    certified: bool
    undeclared: tuple = ()
    note: str = ""

    def __float__(self):
        return self.value


def poletsky_functional(f: AnalyticDisk, w, tol: float = ROOT_TOL) -> DiskValue:
    """sum log(|zeta_j| / r) over all preimages of w in the closed disk.

    Declared hits are always counted. Undeclared preimages are located by
    companion-matrix roots of one coordinate of f - w and kept when every
    coordinate vanishes there; each one lowers the value, which stays a
    valid upper bound.
    """
    w = as_point(w, f.dim)
    if np.allclose(f.center, w, rtol=0, atol=0):
        raise ValueError("f(0) equals w")
    r = f.radius
    declared = list(f.hits)
    total = float(sum(math.log(abs(h) / r) for h in declared))
    D = f.coeffs.copy()
    D[0] = D[0] - w
    scale = 1.0 + float(np.sum(np.abs(f.coeffs)))
    norms = np.max(np.abs(D), axis=0)
    live = [i for i in range(f.dim) if norms[i] > 1e-14 * scale]
    if not live:
        return DiskValue(total, False, (), "disk is constant")
    pivot = max(live, key=lambda i: (np.max(np.nonzero(np.abs(D[:, i]) > 1e-14 * scale)[0]), norms[i]))
    c = np.trim_zeros(D[:, pivot], "b")
    if c.size <= 1:
        return DiskValue(total, True, ())
    roots = npoly.polyroots(c)
    extra = []
    ambiguous = False
    for rt in roots:
        if abs(rt) > r * (1 + 1e-9):
            continue
        if any(abs(rt - h) < 1e-6 for h in declared + extra):
            continue
        res = float(np.linalg.norm(f.evaluate(rt) - w))
        if res <= tol * scale:
            if abs(rt) < 1e-12:
                ambiguous = True
                continue
            if abs(rt) >= r * (1 - 1e-12):
                # a preimage on the boundary contributes log 1 = 0
                continue
            extra.append(complex(rt))
        elif res <= 1e3 * tol * scale:
            ambiguous = True
    total += float(sum(math.log(abs(h) / r) for h in extra))
    return DiskValue(total, not ambiguous, tuple(extra), "inconclusive root localization" if ambiguous else "")


def disk_value(f: AnalyticDisk, tol: float = ROOT_TOL) -> DiskValue:
    """Upper bound contributed by a disk, according to its mode."""
    if f.mode == "poletsky":
        return poletsky_functional(f, f.target, tol)
    if f.mode == "swapped":
        return DiskValue(math.log(abs(f.hits[0]) / f.radius), True)
    v = np.asarray(f.jet, dtype=complex)
    lam = float(np.linalg.norm(f.coeffs[1])) / float(np.linalg.norm(v))
    return DiskValue(-math.log(lam * f.radius), True)


# --------------------------------------------------------------------------
# parameterizations
# --------------------------------------------------------------------------


def _unit_factor(hits) -> np.ndarray:
    """Coefficients of prod (1 - zeta / zeta_j)."""
    c = np.array([1.0 + 0j])
    for h in hits:
        c = npoly.polymul(c, np.array([1.0, -1.0 / h]))
    return c


def poletsky_coeffs(z, w, hits, p: np.ndarray, degree: int) -> np.ndarray:
    """w + (z - w) prod(1 - zeta/zeta_j) + zeta prod(zeta - zeta_j) p(zeta)."""
    n = len(z)
    A = np.zeros((degree + 1, n), dtype=complex)
    base = _unit_factor(hits)
    A[: base.size] += base[:, None] * (z - w)[None, :]
    A[0] += w
    if p.size:
        q = npoly.polymul(np.array([0.0, 1.0]), npoly.polyfromroots(list(hits)) if hits else np.array([1.0]))
        for i in range(n):
            t = npoly.polymul(q, p[:, i])
            A[: t.size, i] += t[: degree + 1]
    return A


def swapped_coeffs(z, w, a: complex, p: np.ndarray, degree: int) -> np.ndarray:
    """w + zeta (z - w) / a + zeta (zeta - a) p(zeta)."""
    n = len(z)
    A = np.zeros((degree + 1, n), dtype=complex)
    A[0] = w
    A[1] = (z - w) / a
    if p.size:
        q = np.array([0.0, -a, 1.0])
        for i in range(n):
            t = npoly.polymul(q, p[:, i])
            A[: t.size, i] += t[: degree + 1]
    return A


def royden_coeffs(w, v, lam: float, p: np.ndarray, degree: int) -> np.ndarray:
    """w + lam v zeta + zeta^2 p(zeta)."""
    n = len(w)
    A = np.zeros((degree + 1, n), dtype=complex)
    A[0] = w
    A[1] = lam * v
    if p.size:
        A[2 : 2 + p.shape[0]] += p
    return A


def make_poletsky_disk(z, w, hits, p, degree) -> AnalyticDisk:
    z, w = as_point(z), as_point(w)
    A = poletsky_coeffs(z, w, tuple(hits), np.asarray(p, dtype=complex).reshape(-1, z.size), degree)
    return AnalyticDisk(A, 1.0, tuple(hits), tuple(w), "poletsky")


def make_swapped_disk(z, w, a, p, degree) -> AnalyticDisk:
    z, w = as_point(z), as_point(w)
    A = swapped_coeffs(z, w, complex(a), np.asarray(p, dtype=complex).reshape(-1, z.size), degree)
    return AnalyticDisk(A, 1.0, (complex(a),), tuple(z), "swapped")


def make_royden_disk(w, v, lam, p, degree) -> AnalyticDisk:
    w, v = as_point(w), as_point(v)
    A = royden_coeffs(w, v, float(lam), np.asarray(p, dtype=complex).reshape(-1, w.size), degree)
    return AnalyticDisk(A, 1.0, (), None, "royden", tuple(v))


# --------------------------------------------------------------------------
# seeds
# --------------------------------------------------------------------------


def linear_radius(domain: Domain, w, u, budget: SearchBudget, rmax: Optional[float] = None) -> float:
    """Largest R (bisection) such that zeta -> w + zeta R u certifiably maps the closed disk into the domain."""
    w = as_point(w, domain.dim)
    u = as_point(u, domain.dim)
    u = u / np.linalg.norm(u)
    hi = domain.circumradius(w) if rmax is None else rmax
    lo = 0.0

    def ok(R):
        f = AnalyticDisk(np.stack([w, R * u]), 1.0, (), None, "royden", tuple(u))
        return certify_containment(domain, f, budget) is not None

    if domain.margin(w) <= 0:
        return 0.0
    if ok(hi):
        return hi
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9 * max(hi, 1e-12):
            break
    return lo


def truncated_mobius_disk(z, w, b: float, degree: int) -> AnalyticDisk:
    """f - w = (z - w)(1 - zeta/b) sum_{k<d} (b zeta)^k: a polynomial truncation of a slice Moebius disk."""
    z, w = as_point(z), as_point(w)
    geo = b ** np.arange(degree)
    base = npoly.polymul(np.array([1.0, -1.0 / b]), geo)
    A = base[:, None] * (z - w)[None, :]
    A = A.astype(complex)
    A[0] += w
    return AnalyticDisk(A, 1.0, (complex(b),), tuple(w), "poletsky")


# --------------------------------------------------------------------------
# search
# --------------------------------------------------------------------------


@dataclass
class DiskSearchResult:
    """Best bound found so far.

    For "exact slice" and "analytic" certificates the value comes from a
    non-polynomial disk described by ``witness``; ``disk`` then holds the
    linear disk used to seed further search.
    """

    value: float = math.inf
    disk: Optional[AnalyticDisk] = None
    certificate: Optional[ContainmentCertificate] = None
    certified: bool = True
    evaluations: int = 0
    restarts_used: int = 0
    witness: str = "none"
    history: list = field(default_factory=list)

    def offer(self, f: Optional[AnalyticDisk], cert, value: DiskValue, witness: Optional[str] = None) -> bool:
        if f is None or cert is None:
            return False
        self.history.append(value.value)
        if value.value < self.value:
            self.value, self.disk, self.certificate, self.certified = value.value, f, cert, value.certified
            self.witness = witness or f.describe()
            return True
        return False


class _Problem:
    """Real-vector objective for simplex descent over one disk family."""

    PENALTY = 50.0

    def __init__(self, domain: Domain, mode: str, z, w, v, hits: int, degree: int, samples: int = 64):
        self.domain, self.mode = domain, mode
        self.z, self.w, self.v = z, w, v
        self.n = domain.dim
        self.k = hits
        self.degree = degree
        if mode == "poletsky":
            self.np_ = degree - 1 - hits
        elif mode == "swapped":
            self.np_ = degree - 1
        else:
            self.np_ = degree - 1
        nodes = np.exp(2j * np.pi * np.arange(samples) / samples)
        if not domain.psh_defined:
            rho = np.linspace(0, 1, 9)[1:-1]
            inner = (rho[:, None] * np.exp(2j * np.pi * np.arange(16) / 16)[None, :]).ravel()
            nodes = np.concatenate([nodes, inner, [0]])
        self.V = nodes[:, None] ** np.arange(degree + 1)[None, :]
        self.floor = 1e-4
        self.evals = 0

    @property
    def size(self) -> int:
        head = 2 * self.k if self.mode == "poletsky" else (2 if self.mode == "swapped" else 1)
        return head + 2 * self.n * self.np_

    def split(self, x):
        x = np.asarray(x, dtype=float)
        if self.mode == "poletsky":
            head = x[: 2 * self.k]
            hits = tuple(complex(head[2 * j], head[2 * j + 1]) for j in range(self.k))
            rest = x[2 * self.k :]
        elif self.mode == "swapped":
            hits = (complex(x[0], x[1]),)
            rest = x[2:]
        else:
            hits = (float(x[0]),)
            rest = x[1:]
        p = (rest[0::2] + 1j * rest[1::2]).reshape(self.np_, self.n) if self.np_ > 0 else np.zeros((0, self.n), complex)
        return hits, p

    def pack(self, hits, p) -> np.ndarray:
        if self.mode == "royden":
            head = [float(hits[0])]
        else:
            head = []
            for h in hits:
                head += [h.real, h.imag]
        p = np.asarray(p, dtype=complex).reshape(-1)
        body = np.empty(2 * p.size)
        body[0::2], body[1::2] = p.real, p.imag
        return np.concatenate([np.array(head, dtype=float), body])

    def coeffs(self, hits, p):
        if self.mode == "poletsky":
            return poletsky_coeffs(self.z, self.w, hits, p, self.degree)
        if self.mode == "swapped":
            return swapped_coeffs(self.z, self.w, hits[0], p, self.degree)
        return royden_coeffs(self.w, self.v, math.exp(hits[0]), p, self.degree)

    def head_value(self, hits) -> float:
        if self.mode == "royden":
            return -hits[0]
        return float(sum(math.log(abs(h)) for h in hits))

    def __call__(self, x) -> float:
        self.evals += 1
        hits, p = self.split(x)
        if self.mode != "royden":
            for h in hits:
                if not 1e-9 < abs(h) < 0.999:
                    return 1e6 + abs(h)
            if self.k == 2 and abs(hits[0] - hits[1]) < 1e-6:
                return 1e6
        elif hits[0] > 20:
            return 1e6
        A = self.coeffs(hits, p)
        P = self.V @ A
        m = self.domain.margins(P)
        viol = np.maximum(0.0, self.floor - m)
        if not np.all(np.isfinite(viol)):
            return 1e5
        return self.head_value(hits) + self.PENALTY * float(np.max(viol)) + float(np.mean(viol))

    def disk(self, x) -> Optional[AnalyticDisk]:
        hits, p = self.split(x)
        try:
            if self.mode == "poletsky":
                return AnalyticDisk(self.coeffs(hits, p), 1.0, hits, tuple(self.w), "poletsky")
            if self.mode == "swapped":
                return AnalyticDisk(self.coeffs(hits, p), 1.0, hits, tuple(self.z), "swapped")
            return AnalyticDisk(self.coeffs(hits, p), 1.0, (), None, "royden", tuple(self.v))
        except ValueError:
            return None

    def project(self, f: AnalyticDisk, hits) -> np.ndarray:
        """Least-squares p making the family member closest to f on the unit circle."""
        if self.np_ == 0:
            return np.zeros((0, self.n), complex)
        zero = np.zeros((0, self.n), complex)
        A0 = self.coeffs(hits, zero)
        R = self.V @ (np.pad(f.coeffs, ((0, self.degree - f.degree), (0, 0))) - A0)
        basis = []
        for j in range(self.np_):
            e = np.zeros((self.np_, 1), complex)
            e[j, 0] = 1.0
            if self.mode == "poletsky":
                q = npoly.polymul(np.array([0.0, 1.0]), npoly.polyfromroots(list(hits)) if hits else np.array([1.0]))
                t = npoly.polymul(q, e[:, 0])
            elif self.mode == "swapped":
                t = npoly.polymul(np.array([0.0, -hits[0], 1.0]), e[:, 0])
            else:
                t = np.concatenate([[0, 0], e[:, 0]])
            t = np.pad(t, (0, self.degree + 1 - t.size))[: self.degree + 1]
            basis.append(self.V @ t)
        B = np.stack(basis, axis=1)
        sol, *_ = np.linalg.lstsq(B, R, rcond=None)
        return sol


def _finish(problem: _Problem, x, budget: SearchBudget, result: DiskSearchResult) -> bool:
    f = problem.disk(x)
    if f is None:
        return False
    g, cert = shrink_to_certified(problem.domain, f, budget)
    if g is None:
        return False
    return result.offer(g, cert, disk_value(g))


def _simplex(problem: _Problem, x0: np.ndarray, budget: SearchBudget, rng, spread: float) -> np.ndarray:
    dim = x0.size
    steps = np.full(dim, spread)
    if rng is not None:
        steps = steps * (0.5 + rng.random(dim))
    simplex = np.vstack([x0] + [x0 + steps[i] * np.eye(dim)[i] for i in range(dim)])
    res = minimize(
        problem,
        x0,
        method="Nelder-Mead",
        options={"maxfev": budget.simplex_evals, "initial_simplex": simplex, "xatol": 1e-10, "fatol": 1e-12, "adaptive": True},
    )
    return res.x if res.fun <= problem(x0) else x0


def _rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed) % 2**63, restart]))


def _resolve(domain: Domain, *points):
    """Pull pushforward queries back to the source domain."""
    out = []
    for p in points:
        out.append(None if p is None else as_point(p, domain.dim))
    while isinstance(domain, Pushforward):
        out = [None if p is None else domain.map.inverse(p.reshape(1, -1))[0] for p in out]
        domain = domain.source
    return domain, out


SLICE_SAFETY = 1e-9


def slice_green_bound(slice_map, z, w) -> Optional[float]:
    """g_M(z, w) <= g_{D(0,R)}(zeta_z, zeta_w) when both points lie on the slice, else None."""
    try:
        a = slice_map.parameter(z)
        b = slice_map.parameter(w)
    except ValueError:
        return None
    R = slice_map.radius * (1 - SLICE_SAFETY)
    if max(abs(a), abs(b)) >= R:
        return None
    if a == b:
        return -math.inf
    return math.log(abs(R * (a - b) / (R * R - np.conj(b) * a)))


def seed_explicit(domain: Domain, z, w, result: DiskSearchResult) -> None:
    for val, desc in domain.explicit_disks(z, w):
        if val < result.value:
            a = math.exp(val)
            f = AnalyticDisk(np.stack([w, (z - w) / a]), 1.0, (complex(a),), tuple(z), "swapped")
            cert = ContainmentCertificate(0, 1e-12, "analytic", 1.0, 0.0)
            result.offer(f, cert, DiskValue(val, True, (), desc), desc)


def seed_exact_slices(domain: Domain, z, w, result: DiskSearchResult) -> None:
    for s in domain.exact_slices(w):
        val = slice_green_bound(s, z, w)
        if val is None or not val < result.value:
            continue
        a = s.parameter(z) - s.parameter(w)
        R = s.radius * (1 - SLICE_SAFETY)
        # linear swapped disk zeta -> w + zeta * (R - |b|) e inside the slice; the Moebius value is sharper
        e = np.array(s.direction)
        rad = R - abs(s.parameter(w))
        hit = a / rad
        if abs(hit) >= 1:
            continue
        f = AnalyticDisk(np.stack([w, rad * e]), 1.0, (complex(hit),), tuple(z), "swapped")
        cert = ContainmentCertificate(0, s.radius * SLICE_SAFETY, "exact slice", 1.0, float(rad))
        witness = f"exact slice along {np.round(e, 6).tolist()} (Moebius value in the slice disk)"
        result.offer(f, cert, DiskValue(val, True, (), "exact slice"), witness)


def seed_offset_lines(domain: Domain, z, w, budget: SearchBudget, result: DiskSearchResult, evals: int = 60) -> None:
    """Linear disks in the complex line through w and z, centered anywhere on that line.

    A disk b + xi R u (|xi| <= 1) containing w and z gives g(z, w) <= log of the
    pseudo-hyperbolic distance of their parameters; the center b = w + s u is
    optimized by a short simplex run.
    """
    d = z - w
    L = float(np.linalg.norm(d))
    u = d / L
    cache = {}

    def radius(s: complex) -> float:
        key = (round(s.real, 12), round(s.imag, 12))
        if key not in cache:
            b = w + s * u
            cache[key] = linear_radius(domain, b, u, budget) if domain.margin(b) > 0 else 0.0
        return cache[key]

    def value(s: complex) -> float:
        R = radius(s)
        p, q = -s / R if R > 0 else 1.0, (L - s) / R if R > 0 else 1.0
        if R <= 0 or abs(p) >= 1 or abs(q) >= 1:
            return math.inf
        return math.log(abs(p - q) / abs(1 - np.conj(q) * p))

    def obj(x):
        v = value(complex(x[0], x[1]))
        return v if math.isfinite(v) else 1e6

    starts = [0.0, 0.5 * L]
    best_s, best_v = None, math.inf
    for s0 in starts:
        res = minimize(obj, np.array([s0, 0.0]), method="Nelder-Mead",
                       options={"maxfev": evals, "initial_simplex": np.array([[s0, 0], [s0 + 0.1 * L, 0], [s0, 0.1 * L]])})
        for cand in (complex(res.x[0], res.x[1]), complex(s0)):
            v = value(cand)
            if v < best_v:
                best_s, best_v = cand, v
    if best_s is None:
        return
    R = radius(best_s)
    f = AnalyticDisk(np.stack([w + best_s * u, R * u]), 1.0, (), None, "royden", tuple(u))
    cert = certify_containment(domain, f, budget)
    if cert is not None:
        result.offer(f, cert, DiskValue(best_v, True, (), "offset linear disk"), f"offset linear disk (center shift {best_s:.6g}, R={R:.6g})")


def seed_swapped(domain: Domain, z, w, budget: SearchBudget, result: DiskSearchResult) -> None:
    d = z - w
    R = linear_radius(domain, w, d, budget)
    a = float(np.linalg.norm(d)) / R if R > 0 else math.inf
    if a < 1:
        f = AnalyticDisk(np.stack([w, d / a]), 1.0, (complex(a),), tuple(z), "swapped")
        cert = certify_containment(domain, f, budget)
        if cert is not None:
            result.offer(f, cert, disk_value(f))


def search_disks(domain: Domain, z, w, mode: str, budget: SearchBudget, seed: int, stop_at: float = -math.inf, v=None) -> DiskSearchResult:
    """Seeded multi-start simplex search; returns the best certified disk."""
    result = DiskSearchResult()
    n = domain.dim
    if mode in ("poletsky", "swapped"):
        seed_explicit(domain, z, w, result)
        seed_exact_slices(domain, z, w, result)
        if result.value > stop_at:
            seed_swapped(domain, z, w, budget, result)
        if result.value > stop_at:
            seed_offset_lines(domain, z, w, budget, result)
    if mode == "royden":
        vhat = v / np.linalg.norm(v)
        R = linear_radius(domain, w, vhat, budget)
        if R > 0:
            f = AnalyticDisk(np.stack([w, R * vhat]), 1.0, (), None, "royden", tuple(vhat))
            cert = certify_containment(domain, f, budget)
            if cert is not None:
                result.offer(f, cert, disk_value(f))
    if mode == "poletsky" and result.disk is not None:
        # slice and product-disk witnesses carry no polynomial hit; start from their value
        a = abs(result.disk.hits[0]) if result.disk.hits else min(math.exp(result.value), 1 - 1e-9)
        lo, hi = a, 1 - 1e-9
        seeded = truncated_mobius_disk(z, w, hi, budget.degree)
        if certify_containment(domain, seeded, budget) is not None:
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                f = truncated_mobius_disk(z, w, mid, budget.degree)
                if certify_containment(domain, f, budget) is not None:
                    hi, seeded = mid, f
                else:
                    lo = mid
                if hi - lo < 1e-6:
                    break
            _finish_disk(domain, seeded, budget, result)
    if result.value <= stop_at or not budget.disk_search:
        return result
    for i in range(budget.restarts):
        rng = _rng(seed, i)
        if mode == "poletsky":
            k = 1 + (i % budget.hits)
        else:
            k = 1
        problem = _Problem(domain, mode, z, w, v if mode != "royden" else v / np.linalg.norm(v), k, budget.degree)
        x0 = _start_point(problem, result, rng, i)
        if x0 is None:
            continue
        x = _simplex(problem, x0, budget, rng if i > 0 else None, 0.05 if i == 0 else 0.1)
        _finish(problem, x, budget, result)
        result.evaluations += problem.evals
        result.restarts_used = i + 1
        if result.value <= stop_at:
            break
    return result


def _finish_disk(domain, f, budget, result):
    g, cert = shrink_to_certified(domain, f, budget)
    if g is not None:
        result.offer(g, cert, disk_value(g))


def _start_point(problem: _Problem, result: DiskSearchResult, rng, i: int):
    best = result.disk
    z, w = problem.z, problem.w
    if problem.mode == "royden":
        if best is None:
            return None
        A = _rescale(best.coeffs, best.radius)
        lam = float(np.linalg.norm(A[1]))
        p = np.zeros((problem.np_, problem.n), complex)
        tail = A[2 : 2 + problem.np_]
        p[: tail.shape[0]] = tail
        x0 = problem.pack((math.log(lam),), p)
    elif problem.mode == "swapped":
        if best is None:
            return None
        if best.mode != "swapped":
            a = complex(min(0.99, math.exp(result.value)))
            x0 = problem.pack((a,), np.zeros((problem.np_, problem.n), complex))
            return x0 + (0.02 * rng.normal(size=x0.size) if i > 0 else 0)
        a = best.hits[0] / best.radius
        g = AnalyticDisk(_rescale(best.coeffs, best.radius), 1.0, (a,), best.target, "swapped")
        p = problem.project(g, (a,))
        x0 = problem.pack((a,), p)
    else:
        if best is None:
            return None
        if best.mode == "royden":
            base = truncated_mobius_disk(z, w, min(0.999, math.exp(result.value) * 1.02), problem.degree)
        else:
            base = _as_poletsky(best, z, w, problem.degree)
        hits = list(base.hits)
        if problem.k == 2 and len(hits) == 1:
            ang = rng.random() * 2 * np.pi
            hits.append(complex((0.6 + 0.35 * rng.random()) * np.exp(1j * ang)))
        hits = hits[: problem.k]
        p = problem.project(base, tuple(hits))
        x0 = problem.pack(tuple(hits), p)
    if i > 0:
        x0 = x0 + 0.02 * rng.normal(size=x0.size)
    return x0


def _rescale(coeffs: np.ndarray, r: float) -> np.ndarray:
    """Coefficients of zeta -> f(r zeta)."""
    return coeffs * (r ** np.arange(coeffs.shape[0]))[:, None]


def _as_poletsky(f: AnalyticDisk, z, w, degree: int) -> AnalyticDisk:
    """A poletsky-mode polynomial approximating the disk f, rescaled to the unit disk."""
    if f.mode == "poletsky":
        A = _rescale(f.coeffs, f.radius)
        return AnalyticDisk(A, 1.0, tuple(h / f.radius for h in f.hits), f.target, "poletsky")
    a = abs(f.hits[0] / f.radius)
    return truncated_mobius_disk(z, w, min(0.999, a * 1.02), degree)


# --------------------------------------------------------------------------
# public bounds
# --------------------------------------------------------------------------


def upper_bound_green(domain: Domain, z, w, budget: SearchBudget = SearchBudget(), seed: int = 0, stop_at: float = -math.inf) -> BoundInterval:
    """Certified upper bound for g(z, w) from analytic disks (+inf if none found)."""
    domain, (z, w) = _resolve(domain, z, w)
    if np.array_equal(z, w):
        return pole_interval()
    if domain.margin(z) <= 0 or domain.margin(w) <= 0:
        raise ValueError("z and w must lie in the domain")
    res = search_disks(domain, z, w, "poletsky", budget, seed, stop_at)
    if res.disk is None:
        return hi_only(math.inf, "no feasible disk", certified=False, tag="estimate")
    return hi_only(res.value, res.witness, certified=res.certified, tag="certified_hi" if res.certified else "estimate")


def kobayashi_bound(domain: Domain, z, w, budget: SearchBudget = SearchBudget(), seed: int = 0, stop_at: float = -math.inf) -> BoundInterval:
    """Certified upper bound for the Kobayashi function from single-hit disks."""
    domain, (z, w) = _resolve(domain, z, w)
    if np.array_equal(z, w):
        return pole_interval()
    if domain.margin(z) <= 0 or domain.margin(w) <= 0:
        raise ValueError("z and w must lie in the domain")
    res = search_disks(domain, z, w, "swapped", budget, seed, stop_at)
    if res.disk is None:
        return hi_only(math.inf, "no feasible disk", certified=False, tag="estimate")
    return hi_only(res.value, res.witness, certified=True)


def royden_bound(domain: Domain, w, v, budget: SearchBudget = SearchBudget(), seed: int = 0, stop_at: float = -math.inf) -> BoundInterval:
    """Certified upper bound -log(lam) for the Royden function R(w, v)."""
    vv = as_point(v, domain.dim)
    if not np.linalg.norm(vv) > 0:
        raise ValueError("direction must be non-zero")
    scale = float(np.linalg.norm(vv))
    if isinstance(domain, Pushforward):
        raise ValueError("Royden bounds on pushforward models are not supported")
    w = as_point(w, domain.dim)
    if domain.margin(w) <= 0:
        raise ValueError("w must lie in the domain")
    res = search_disks(domain, w, w, "royden", budget, seed, stop_at - math.log(scale), v=vv / scale)
    if res.disk is None:
        return hi_only(math.inf, "no feasible disk", certified=False, tag="estimate")
    # R(w, alpha v) = R(w, v) + log|alpha|
    return hi_only(res.value + math.log(scale), res.witness, certified=True)
