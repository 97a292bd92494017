"""Points, directions, model domains and holomorphic maps between them.

Points of C^n are numpy ``complex128`` arrays of shape ``(n,)``; batches of
points have shape ``(N, n)``. Domains are immutable dataclasses whose
parameters are stored as tuples so that they hash and can be shared
between workers.

Every domain exposes a *margin*: a real number that is positive exactly
on the domain, computed as the smallest signed slack over the defining
inequalities. ``margin_lower_bounds(P, h)`` returns a certified lower
bound for the margin over the closed Euclidean ball ``B(p, h)`` and is
what containment certificates are built from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .fields import ScalarField, max_field, safe_log

ComplexPoint = np.ndarray

_TINY = 1e-300


def as_point(p, dim: Optional[int] = None) -> np.ndarray:
    """Coerce ``p`` into a finite complex vector of dimension 1 or 2."""
    arr = np.atleast_1d(np.asarray(p, dtype=complex)).reshape(-1)
    if arr.size not in (1, 2):
        raise ValueError(f"points must live in C^1 or C^2, got {arr.size} coordinates")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    if dim is not None and arr.size != dim:
        raise ValueError(f"dimension mismatch: point has {arr.size} coordinates, domain has {dim}")
    return arr


def as_points(P, dim: int) -> np.ndarray:
    arr = np.asarray(P, dtype=complex)
    if arr.ndim == 1:
        arr = arr.reshape(-1, dim) if dim > 1 else arr.reshape(-1, 1)
    if arr.shape[-1] != dim:
        raise ValueError(f"dimension mismatch: expected {dim} coordinates, got {arr.shape[-1]}")
    return arr


def hermitian_dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """<a, b> = sum a_j conj(b_j) along the last axis."""
    return np.sum(a * np.conj(b), axis=-1)


@dataclass(frozen=True)
class Direction:
    """A tangent vector ``vector`` at ``base``."""

    base: tuple
    vector: tuple

    def __post_init__(self):
        b = as_point(self.base)
        v = as_point(self.vector, dim=b.size)
        if not np.linalg.norm(v) > 0:
            raise ValueError("direction vector must be non-zero")
        object.__setattr__(self, "base", tuple(complex(x) for x in b))
        object.__setattr__(self, "vector", tuple(complex(x) for x in v))

    @property
    def w(self) -> np.ndarray:
        return np.array(self.base, dtype=complex)

    @property
    def v(self) -> np.ndarray:
        return np.array(self.vector, dtype=complex)


def _tuple_c(x) -> tuple:
    return tuple(complex(v) for v in np.atleast_1d(np.asarray(x, dtype=complex)).reshape(-1))


def _tuple_f(x) -> tuple:
    return tuple(float(v) for v in np.atleast_1d(np.asarray(x, dtype=float)).reshape(-1))


def _random_unit_vectors(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    X = rng.normal(size=(count, dim)) + 1j * rng.normal(size=(count, dim))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def unit_ball_automorphism(a: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """The involutive automorphism of the unit ball exchanging ``a`` and 0."""
    a = np.asarray(a, dtype=complex)
    Z = np.atleast_2d(Z)
    aa = float(np.real(hermitian_dot(a, a)))
    if aa == 0.0:
        return -Z
    za = hermitian_dot(Z, a)  # <z, a>
    Pz = (za / aa)[:, None] * a[None, :]
    Qz = Z - Pz
    sa = math.sqrt(max(1.0 - aa, 0.0))
    return (a[None, :] - Pz - sa * Qz) / (1.0 - za)[:, None]


def disk_mobius(a: complex, z):
    """(z - a) / (1 - conj(a) z), the disk automorphism sending a to 0."""
    z = np.asarray(z, dtype=complex)
    return (z - a) / (1.0 - np.conj(a) * z)


class Domain:
    """Common interface of the shipped model domains."""

    dim: int
    kind: str = "domain"
    psh_defined: bool = True

    # -- membership -------------------------------------------------------
    def margins(self, P: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def margin_lower_bounds(self, P: np.ndarray, h) -> np.ndarray:
        raise NotImplementedError

    def margin(self, p) -> float:
        p = as_point(p, self.dim)
        return float(self.margins(p.reshape(1, -1))[0])

    def contains(self, p) -> float:
        return self.margin(p)

    # -- metric data ------------------------------------------------------
    def circumradius(self, w) -> float:
        """Radius R with the domain inside B(w, R)."""
        raise NotImplementedError

    def inradius(self, w, tol: float = 1e-6) -> float:
        """Certified radius rho with B(w, rho) inside the domain (0 if none found)."""
        w = as_point(w, self.dim).reshape(1, -1)
        if self.margins(w)[0] <= 0:
            return 0.0
        lo, hi = 0.0, self.circumradius(w[0])
        if self.margin_lower_bounds(w, lo)[0] <= 0:
            return 0.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if self.margin_lower_bounds(w, mid)[0] > 0:
                lo = mid
            else:
                hi = mid
            if hi - lo < tol * max(hi, 1e-12):
                break
        return lo

    def defining_psh(self) -> list[ScalarField]:
        return []

    def exact_slices(self, w) -> list["SliceMap"]:
        """Linear disks known to lie in the domain by an algebraic argument."""
        return []

    def explicit_disks(self, z, w) -> list[tuple[float, str]]:
        """Single-hit disks through w and z with analytically certified containment, as (log|a|, description)."""
        return []

    def exhaustion(self) -> Optional[ScalarField]:
        parts = self.defining_psh()
        if not parts:
            return None
        if len(parts) == 1:
            return parts[0]
        return max_field(f"{self.kind}-exhaustion", parts)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


def _enc(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


@dataclass(frozen=True)
class Ball(Domain):
    """Euclidean ball B(center, radius) in C^n."""

    center: tuple
    radius: float = 1.0
    kind: str = field(default="ball", init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "center", _tuple_c(as_point(self.center)))
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return len(self.center)

    @cached_property
    def c(self) -> np.ndarray:
        return np.array(self.center, dtype=complex)

    def margins(self, P):
        P = as_points(P, self.dim)
        return self.radius - np.linalg.norm(P - self.c, axis=-1)

    def margin_lower_bounds(self, P, h):
        return self.margins(P) - h

    def circumradius(self, w) -> float:
        return self.radius + float(np.linalg.norm(as_point(w, self.dim) - self.c))

    def inradius(self, w, tol: float = 1e-6) -> float:
        return max(0.0, self.radius - float(np.linalg.norm(as_point(w, self.dim) - self.c)))

    def normalize(self, P) -> np.ndarray:
        return (as_points(P, self.dim) - self.c) / self.radius

    def automorphism(self, a, P) -> np.ndarray:
        """Automorphism of this ball exchanging ``a`` and the center."""
        A = (as_point(a, self.dim) - self.c) / self.radius
        return self.c + self.radius * unit_ball_automorphism(A, self.normalize(P))

    def green(self, Z, w) -> np.ndarray:
        """Closed-form pluricomplex Green function, any pole (via automorphism)."""
        A = (as_point(w, self.dim) - self.c) / self.radius
        img = unit_ball_automorphism(A, self.normalize(Z))
        return safe_log(np.linalg.norm(img, axis=-1))

    def defining_psh(self) -> list[ScalarField]:
        c, r = self.c, self.radius
        return [
            ScalarField(
                name="ball-log-radius",
                func=lambda P: safe_log(np.linalg.norm(P - c, axis=-1) / r),
                pole=self.center,
            )
        ]

    def sample(self, rng, count):
        U = _random_unit_vectors(rng, count, self.dim)
        rad = self.radius * rng.random(count) ** (1.0 / (2 * self.dim))
        return self.c + U * rad[:, None] * (1 - 1e-12)

    def to_dict(self) -> dict:
        return {"type": "ball", "center": [_enc(z) for z in self.center], "radius": self.radius}


def unit_disk() -> Ball:
    return Ball(center=(0j,), radius=1.0)


@dataclass(frozen=True)
class Polydisk(Domain):
    """Product of disks D(center_j, radii_j)."""

    center: tuple
    radii: tuple
    kind: str = field(default="polydisk", init=False, repr=False)

    def __post_init__(self):
        c = _tuple_c(as_point(self.center))
        r = _tuple_f(self.radii)
        if len(r) == 1 and len(c) > 1:
            r = r * len(c)
        if len(r) != len(c) or min(r) <= 0:
            raise ValueError("polydisk radii must be positive, one per coordinate")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radii", r)

    @property
    def dim(self) -> int:
        return len(self.center)

    @cached_property
    def c(self) -> np.ndarray:
        return np.array(self.center, dtype=complex)

    @cached_property
    def r(self) -> np.ndarray:
        return np.array(self.radii, dtype=float)

    def margins(self, P):
        P = as_points(P, self.dim)
        return np.min(self.r - np.abs(P - self.c), axis=-1)

    def margin_lower_bounds(self, P, h):
        return self.margins(P) - h

    def circumradius(self, w) -> float:
        w = as_point(w, self.dim)
        return float(np.sqrt(np.sum((self.r + np.abs(w - self.c)) ** 2)))

    def inradius(self, w, tol: float = 1e-6) -> float:
        return max(0.0, float(np.min(self.r - np.abs(as_point(w, self.dim) - self.c))))

    def coordinate_mobius(self, Z, w) -> np.ndarray:
        """Per-coordinate disk automorphisms sending w_j to 0 (columns)."""
        Z = (as_points(Z, self.dim) - self.c) / self.r
        A = (as_point(w, self.dim) - self.c) / self.r
        return (Z - A) / (1.0 - np.conj(A) * Z)

    def green(self, Z, w) -> np.ndarray:
        return safe_log(np.max(np.abs(self.coordinate_mobius(Z, w)), axis=-1))

    def explicit_disks(self, z, w, shrink: float = 1e-12) -> list[tuple[float, str]]:
        """zeta -> (c_j + r_j M_j^{-1}(b_j zeta))_j with |b_j| <= 1 and the largest |b_j| equal to 1.

        M_j is the disk automorphism of coordinate j sending w_j to 0 and
        a = max_j |M_j(z_j)|; the disk sends 0 to w and a to z, and on
        |zeta| <= 1 - shrink its image is compactly inside the polydisk.
        """
        m = np.abs(self.coordinate_mobius(as_point(z, self.dim).reshape(1, -1), w)[0])
        a = float(np.max(m))
        if not 0 < a < 1 - shrink:
            return []
        return [(math.log(a) - math.log1p(-shrink), "product Moebius disk")]

    def defining_psh(self) -> list[ScalarField]:
        c, r = self.c, self.r
        return [
            ScalarField(
                name="polydisk-max-log",
                func=lambda P: safe_log(np.max(np.abs(P - c) / r, axis=-1)),
                pole=self.center,
            )
        ]

    def sample(self, rng, count):
        ang = rng.random((count, self.dim)) * 2 * np.pi
        rad = np.sqrt(rng.random((count, self.dim))) * self.r * (1 - 1e-12)
        return self.c + rad * np.exp(1j * ang)

    def to_dict(self) -> dict:
        return {"type": "polydisk", "center": [_enc(z) for z in self.center], "radii": list(self.radii)}


def unit_bidisk() -> Polydisk:
    return Polydisk(center=(0j, 0j), radii=(1.0, 1.0))


@dataclass(frozen=True)
class PlanarComplement(Domain):
    """A large disk with finitely many small closed disks removed.

    Stands in for the complement of a non-polar compact set of zero length;
    bounded holomorphic functions are *not* constant here, so the empty
    Carathéodory family attached to this model is a modelling choice.
    """

    removed: tuple
    outer_radius: float = 10.0
    kind: str = field(default="planar_complement", init=False, repr=False)
    psh_defined: bool = field(default=False, init=False, repr=False)

    def __post_init__(self):
        holes = tuple((complex(c), float(r)) for c, r in self.removed)
        for c, r in holes:
            if r <= 0 or abs(c) + r >= self.outer_radius:
                raise ValueError("removed disks must have positive radius and lie inside the outer disk")
        object.__setattr__(self, "removed", holes)
        object.__setattr__(self, "outer_radius", float(self.outer_radius))

    dim = 1

    def margins(self, P):
        z = as_points(P, 1)[:, 0]
        m = self.outer_radius - np.abs(z)
        for c, r in self.removed:
            m = np.minimum(m, np.abs(z - c) - r)
        return m

    def margin_lower_bounds(self, P, h):
        return self.margins(P) - h

    def circumradius(self, w) -> float:
        return self.outer_radius + abs(complex(as_point(w, 1)[0]))

    def defining_psh(self) -> list[ScalarField]:
        R = self.outer_radius
        return [ScalarField(name="outer-disk-log", func=lambda P: safe_log(np.abs(P[:, 0]) / R), pole=(0j,))]

    def sample(self, rng, count):
        out = []
        while len(out) < count:
            z = self.outer_radius * np.sqrt(rng.random(4 * count)) * np.exp(2j * np.pi * rng.random(4 * count))
            keep = z[self.margins(z.reshape(-1, 1)) > 0]
            out.extend(keep.tolist())
        return np.array(out[:count], dtype=complex).reshape(-1, 1)

    def to_dict(self) -> dict:
        return {
            "type": "planar_complement",
            "removed": [[_enc(c), r] for c, r in self.removed],
            "outer_radius": self.outer_radius,
        }


@dataclass(frozen=True)
class SublevelDcg(Domain):
    """{||z|| < R, u(z) < 0} with u = (log||z|| + sum_j k_j log|z2 - c_j z1|)/2.

    A finite instance of the pseudoconvex domain whose Green function with
    pole at the origin jumps along the points (1/2, c_j/2).
    """

    c: tuple
    k: tuple
    outer_radius: float = 8.0
    kind: str = field(default="sublevel_dcg", init=False, repr=False)

    def __post_init__(self):
        c = _tuple_f(self.c)
        k = _tuple_f(self.k)
        if len(c) != len(k) or min(c) <= 0 or min(k) <= 0:
            raise ValueError("c_j and k_j must be positive and of equal length")
        if abs(sum(k) - 1.0) > 1e-12:
            raise ValueError(f"sum k_j must equal 1 (got {sum(k)!r})")
        if abs(sum(kj * math.log(cj) for kj, cj in zip(k, c)) + math.log(2.0)) > 1e-12:
            raise ValueError("sum k_j log c_j must equal -log 2")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "k", k)

    dim = 2

    @classmethod
    def default(cls, J: int = 8, mass: float = 0.2) -> "SublevelDcg":
        """Reproducible instance: c_j = 2^-j, geometric tail weights, c_1 solved in closed form."""
        if not 0 < mass < 0.25:
            raise ValueError("tail mass must lie in (0, 1/4)")
        j = np.arange(2, J + 1)
        c_tail = 2.0 ** (-j)
        k_tail = mass * 2.0 ** (-(j - 1)) / (1.0 - 2.0 ** (-(J - 1)))
        log_c1 = (-math.log(2.0) - float(np.sum(k_tail * np.log(c_tail)))) / (1.0 - mass)
        c1 = math.exp(log_c1)
        if not 0.5 < c1 < 1.0:
            raise ValueError("no admissible c_1 for these parameters")
        k = np.concatenate([[1.0 - mass], k_tail])
        # absorb the rounding error of the weights into k_1
        k[0] = 1.0 - float(np.sum(k[1:]))
        c = np.concatenate([[c1], c_tail])
        # re-solve c_1 against the final k_1 so both constraints hold to rounding
        c[0] = math.exp((-math.log(2.0) - float(np.sum(k[1:] * np.log(c[1:])))) / k[0])
        return cls(c=tuple(c), k=tuple(k))

    @cached_property
    def carr(self) -> np.ndarray:
        return np.array(self.c)

    @cached_property
    def karr(self) -> np.ndarray:
        return np.array(self.k)

    def constraint_residuals(self) -> dict:
        return {
            "sum_k_minus_1": float(np.sum(self.karr) - 1.0),
            "sum_k_log_c_plus_log2": float(np.sum(self.karr * np.log(self.carr)) + math.log(2.0)),
            "tail_mass_truncated": 0.0,
        }

    def v(self, P) -> np.ndarray:
        P = as_points(P, 2)
        L = np.abs(P[:, 1:2] - self.carr[None, :] * P[:, 0:1])
        with np.errstate(divide="ignore"):
            return np.sum(self.karr[None, :] * np.log(L), axis=1)

    def u(self, P) -> np.ndarray:
        P = as_points(P, 2)
        with np.errstate(divide="ignore"):
            return 0.5 * (np.log(np.linalg.norm(P, axis=1)) + self.v(P))

    def u_upper(self, P, h) -> np.ndarray:
        """Upper bound of u over B(p, h), from monotonicity of log."""
        P = as_points(P, 2)
        h = np.broadcast_to(np.asarray(h, dtype=float), (P.shape[0],))
        lin = np.abs(P[:, 1:2] - self.carr[None, :] * P[:, 0:1]) + np.sqrt(1 + self.carr**2)[None, :] * h[:, None]
        with np.errstate(divide="ignore"):
            return 0.5 * (np.log(np.linalg.norm(P, axis=1) + h) + np.sum(self.karr * np.log(lin), axis=1))

    def margins(self, P):
        P = as_points(P, 2)
        return np.minimum(self.outer_radius - np.linalg.norm(P, axis=1), -self.u(P))

    def margin_lower_bounds(self, P, h):
        P = as_points(P, 2)
        return np.minimum(self.outer_radius - np.linalg.norm(P, axis=1) - h, -self.u_upper(P, h))

    def circumradius(self, w) -> float:
        return self.outer_radius + float(np.linalg.norm(as_point(w, 2)))

    def origin_inradius(self) -> float:
        """Radius of a ball about 0 inside the domain: u <= log t + (1/4) sum k_j log(1 + c_j^2)."""
        return min(self.outer_radius, math.exp(-0.25 * float(np.sum(self.karr * np.log1p(self.carr**2)))))

    def ray_radius(self, U) -> np.ndarray:
        """Exit radius along rays t*U (||U|| = 1, t > 0): the domain is a truncated cone."""
        U = as_points(U, 2)
        with np.errstate(over="ignore"):
            return np.minimum(self.outer_radius, np.exp(-self.u(U)))

    def defining_psh(self) -> list[ScalarField]:
        R = self.outer_radius
        return [
            ScalarField(name="dcg-u", func=self.u, pole=(0j, 0j)),
            ScalarField(name="dcg-outer-ball", func=lambda P: safe_log(np.linalg.norm(P, axis=1) / R), pole=(0j, 0j)),
        ]

    def slices(self) -> list["SliceMap"]:
        """The lines z2 = c_j z1 through 0, on which u = -inf: disks of radius R/sqrt(1+c_j^2)."""
        out = []
        for cj in self.c:
            e = np.array([1.0, cj]) / math.sqrt(1 + cj * cj)
            out.append(SliceMap(target=self, base=(0j, 0j), direction=_tuple_c(e), radius=self.outer_radius, check=False))
        return out

    def exact_slices(self, w) -> list["SliceMap"]:
        w = as_point(w, 2)
        out = []
        for s in self.slices():
            try:
                s.parameter(w)
            except ValueError:
                continue
            out.append(s)
        return out

    def discontinuity_points(self) -> np.ndarray:
        return np.array([[0.5, cj / 2] for cj in self.c], dtype=complex)

    def sample(self, rng, count):
        U = _random_unit_vectors(rng, count, 2)
        t = self.ray_radius(U) * rng.random(count) ** 0.25 * (1 - 1e-9)
        return U * t[:, None]

    def to_dict(self) -> dict:
        return {"type": "sublevel_dcg", "c": list(self.c), "k": list(self.k), "outer_radius": self.outer_radius}


@dataclass(frozen=True)
class HartogsPgvlu(Domain):
    """{|z1| < 1, log|z2| + v(z1) < 0, |z1 z2| < 1} with v a weighted sum of log|Moebius|.

    Pluri-Greenian but not locally uniformly so (for the infinite version).
    """

    c: tuple
    r: tuple
    k: tuple
    grid: int = 400
    kind: str = field(default="hartogs_pgvlu", init=False, repr=False)

    def __post_init__(self):
        c, r, k = _tuple_c(self.c), _tuple_f(self.r), _tuple_f(self.k)
        if not (len(c) == len(r) == len(k)):
            raise ValueError("c, r, k must have equal length")
        if any(not 0 < rj < abs(cj) for cj, rj in zip(c, r)):
            raise ValueError("need 0 < r_j < |c_j|")
        if any(kj <= 0 for kj in k):
            raise ValueError("k_j must be positive")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "k", k)
        for i in range(len(c)):
            for j in range(i + 1, len(c)):
                if abs(c[i] - c[j]) <= r[i] + r[j]:
                    raise ValueError("disks D_j must be mutually disjoint")
        s1 = self.constraint_one()
        if not s1 > -1.0:
            raise ValueError(f"constraint (1) fails: sum k_j log|c_j| = {s1}")
        bad = self.constraint_two_violations(self.grid)
        if bad:
            raise ValueError(f"constraint (2) fails at {bad} grid points")

    dim = 2

    @classmethod
    def default(cls, J: int = 6, slack: float = 0.1, grid: int = 400) -> "HartogsPgvlu":
        """c_j = 3^-j, r_j = c_j/4, weights spread geometrically to hit sum k_j log c_j = -1 + slack."""
        j = np.arange(1, J + 1)
        c = 3.0 ** (-j)
        r = c / 4
        share = 2.0 ** (-j) / np.sum(2.0 ** (-j))
        k = (1.0 - slack) * share / (-np.log(c))
        for _ in range(50):
            try:
                return cls(c=tuple(c), r=tuple(r), k=tuple(k), grid=grid)
            except ValueError as exc:
                if "constraint (2)" not in str(exc):
                    raise
                k = 0.8 * k
        raise ValueError("could not satisfy constraint (2)")

    @cached_property
    def carr(self) -> np.ndarray:
        return np.array(self.c)

    @cached_property
    def karr(self) -> np.ndarray:
        return np.array(self.k)

    @cached_property
    def rarr(self) -> np.ndarray:
        return np.array(self.r)

    def constraint_one(self) -> float:
        return float(np.sum(self.karr * np.log(np.abs(self.carr))))

    def constraint_two_violations(self, grid: int) -> int:
        x = np.linspace(-1, 1, grid)
        X, Y = np.meshgrid(x, x)
        Z = (X + 1j * Y).ravel()
        Z = Z[np.abs(Z) < 1]
        low = self.v(Z) < -2
        inside = np.zeros(Z.shape, dtype=bool)
        for cj, rj in zip(self.carr, self.rarr):
            inside |= np.abs(Z - cj) < rj
        return int(np.sum(low & ~inside))

    def v(self, zeta) -> np.ndarray:
        zeta = np.asarray(zeta, dtype=complex).reshape(-1)
        M = np.abs((zeta[:, None] - self.carr) / (1 - np.conj(self.carr) * zeta[:, None]))
        with np.errstate(divide="ignore"):
            return np.sum(self.karr * np.log(M), axis=1)

    def v_upper(self, zeta, h) -> np.ndarray:
        zeta = np.asarray(zeta, dtype=complex).reshape(-1)
        h = np.broadcast_to(np.asarray(h, dtype=float), zeta.shape)[:, None]
        num = np.abs(zeta[:, None] - self.carr) + h
        den = np.abs(1 - np.conj(self.carr) * zeta[:, None]) - np.abs(self.carr) * h
        ratio = np.where(den > 0, num / np.where(den > 0, den, 1.0), 1.0)
        ratio = np.minimum(ratio, 1.0)
        with np.errstate(divide="ignore"):
            return np.sum(self.karr * np.log(ratio), axis=1)

    def margins(self, P):
        P = as_points(P, 2)
        z1, z2 = P[:, 0], P[:, 1]
        inner = np.abs(z1) < 1
        with np.errstate(divide="ignore", invalid="ignore"):
            logpart = np.where(inner, -(safe_log(np.abs(z2)) + np.where(inner, self.v(np.where(inner, z1, 0)), 0)), -np.inf)
        return np.minimum(np.minimum(1 - np.abs(z1), 1 - np.abs(z1 * z2)), logpart)

    def margin_lower_bounds(self, P, h):
        P = as_points(P, 2)
        h = np.broadcast_to(np.asarray(h, dtype=float), (P.shape[0],))
        a1, a2 = np.abs(P[:, 0]) + h, np.abs(P[:, 1]) + h
        m = np.minimum(1 - a1, 1 - a1 * a2)
        ok = a1 < 1
        z1 = np.where(ok, P[:, 0], 0)
        logpart = np.where(ok, -(np.log(a2) + self.v_upper(z1, h)), -np.inf)
        return np.minimum(m, logpart)

    def z2_bound(self) -> float:
        """sup |z2| over the domain (outside the D_j, v >= -2; inside, |z1| >= |c_j| - r_j)."""
        inner = np.abs(self.carr) - self.rarr
        return float(max(math.e**2, np.max(1.0 / inner)))

    def circumradius(self, w) -> float:
        w = as_point(w, 2)
        return float(math.hypot(1 + abs(w[0]), self.z2_bound() + abs(w[1])))

    def F(self, P) -> np.ndarray:
        P = as_points(P, 2)
        return np.stack([P[:, 0], P[:, 0] * P[:, 1]], axis=1)

    def h_field(self, w) -> ScalarField:
        """max{log|z2 - w2| + v(z1) - log(2e), log|z1|}: negative PSH with a log pole at (0, w2)."""
        w = as_point(w, 2)
        if abs(w[0]) > 0:
            raise ValueError("h is the competitor for poles with w1 = 0")
        w2 = w[1]

        def func(P):
            a = safe_log(np.abs(P[:, 1] - w2)) + self.v(P[:, 0]) - math.log(2 * math.e)
            return np.maximum(a, safe_log(np.abs(P[:, 0])))

        return ScalarField(name="hartogs-h", func=func, pole=_tuple_c(w))

    def defining_psh(self) -> list[ScalarField]:
        def logpart(P):
            return safe_log(np.abs(P[:, 1])) + self.v(P[:, 0])

        return [
            ScalarField(name="hartogs-z1", func=lambda P: safe_log(np.abs(P[:, 0])), pole=None),
            ScalarField(name="hartogs-log", func=logpart, pole=None),
            ScalarField(name="hartogs-product", func=lambda P: safe_log(np.abs(P[:, 0] * P[:, 1])), pole=None),
        ]

    def sample(self, rng, count):
        z1 = np.sqrt(rng.random(count)) * np.exp(2j * np.pi * rng.random(count)) * (1 - 1e-9)
        with np.errstate(over="ignore", divide="ignore"):
            rad = np.minimum(np.exp(-self.v(z1)), 1.0 / np.maximum(np.abs(z1), _TINY))
        rad = np.minimum(rad, self.z2_bound())
        z2 = rad * np.sqrt(rng.random(count)) * np.exp(2j * np.pi * rng.random(count)) * (1 - 1e-9)
        return np.stack([z1, z2], axis=1)

    def to_dict(self) -> dict:
        return {"type": "hartogs_pgvlu", "c": [_enc(z) for z in self.c], "r": list(self.r), "k": list(self.k)}


@dataclass(frozen=True)
class Pushforward(Domain):
    """Image of ``source`` under an injective holomorphic map with known inverse."""

    source: Domain
    map: "HoloMap"
    kind: str = field(default="pushforward", init=False, repr=False)
    psh_defined: bool = field(default=False, init=False, repr=False)

    def __post_init__(self):
        if self.map.source != self.source:
            raise ValueError("map source must be the pushed-forward domain")
        if not self.map.invertible:
            raise ValueError("pushforward domains need an invertible map")

    @property
    def dim(self) -> int:
        return self.map.target.dim

    def margins(self, P):
        P = as_points(P, self.dim)
        tgt = self.map.target.margins(P)
        out = np.full(P.shape[0], -np.inf)
        ok = tgt > 0
        if np.any(ok):
            out[ok] = self.source.margins(self.map.inverse(P[ok]))
        return out

    def margin_lower_bounds(self, P, h):
        raise NotImplementedError("pushforward models are used only through their map")

    def inradius(self, w, tol: float = 1e-6) -> float:
        return 0.0

    def circumradius(self, w) -> float:
        return self.map.target.circumradius(w)

    def defining_psh(self) -> list[ScalarField]:
        out = []
        for f in self.source.defining_psh():
            out.append(ScalarField(name=f"pushed-{f.name}", func=lambda P, f=f: f.func(self.map.inverse(P)), psh=f.psh))
        return out

    def sample(self, rng, count):
        return self.map(self.source.sample(rng, count))

    def to_dict(self) -> dict:
        return {"type": "pushforward", "source": self.source.to_dict(), "map": self.map.to_dict()}


# --------------------------------------------------------------------------
# holomorphic maps
# --------------------------------------------------------------------------


class HoloMap:
    """Holomorphic map with declared source and target domains."""

    source: Domain
    target: Domain
    invertible: bool = False

    def __call__(self, P) -> np.ndarray:
        return self.forward(as_points(P, self.source.dim))

    def forward(self, P: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inverse(self, Q) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no inverse")

    def spot_check(self, count: int = 64, seed: int = 0) -> float:
        """Smallest target margin over sampled source points; raises if any is outside."""
        rng = np.random.default_rng(seed)
        pts = self.source.sample(rng, count)
        m = self.target.margins(self(pts))
        if not np.all(m > 0):
            raise ValueError(f"{type(self).__name__} sends sampled source points outside its target")
        return float(np.min(m))

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class IdentityMap(HoloMap):
    source: Domain
    invertible: bool = field(default=True, init=False, repr=False)

    @property
    def target(self) -> Domain:
        return self.source

    def forward(self, P):
        return P.copy()

    def inverse(self, Q):
        return as_points(Q, self.source.dim).copy()

    def to_dict(self) -> dict:
        return {"type": "identity"}


@dataclass(frozen=True)
class CoordinateProjection(HoloMap):
    """z -> z_index into a one-dimensional target domain."""

    source: Domain
    index: int
    target: Domain
    check: bool = True

    def __post_init__(self):
        if self.target.dim != 1:
            raise ValueError("projection target must be one-dimensional")
        if self.check:
            self.spot_check()

    def forward(self, P):
        return P[:, self.index : self.index + 1].copy()

    def to_dict(self) -> dict:
        return {"type": "projection", "index": self.index}


@dataclass(frozen=True)
class MobiusMap(HoloMap):
    """Disk automorphism (z_i - a)/(1 - conj(a) z_i) in one coordinate of the unit polydisk."""

    source: Domain
    index: int
    a: complex
    invertible: bool = field(default=True, init=False, repr=False)

    def __post_init__(self):
        if abs(self.a) >= 1:
            raise ValueError("Moebius parameter must lie in the unit disk")
        object.__setattr__(self, "a", complex(self.a))
        self.spot_check()

    @property
    def target(self) -> Domain:
        return self.source

    def forward(self, P):
        out = P.copy()
        out[:, self.index] = disk_mobius(self.a, P[:, self.index])
        return out

    def inverse(self, Q):
        Q = as_points(Q, self.source.dim)
        out = Q.copy()
        out[:, self.index] = disk_mobius(-self.a, Q[:, self.index])
        return out

    def to_dict(self) -> dict:
        return {"type": "mobius", "index": self.index, "a": _enc(self.a)}


@dataclass(frozen=True)
class ProductMap(HoloMap):
    """Coordinate-wise disk automorphisms of the unit polydisk, optionally permuting coordinates."""

    source: Domain
    points: tuple
    permutation: tuple = ()
    invertible: bool = field(default=True, init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "points", _tuple_c(self.points))
        perm = tuple(self.permutation) or tuple(range(self.source.dim))
        if sorted(perm) != list(range(self.source.dim)):
            raise ValueError("permutation must be a permutation of the coordinates")
        object.__setattr__(self, "permutation", perm)
        if any(abs(a) >= 1 for a in self.points):
            raise ValueError("Moebius parameters must lie in the unit disk")
        self.spot_check()

    @property
    def target(self) -> Domain:
        return self.source

    def forward(self, P):
        A = np.array(self.points)
        M = (P - A) / (1 - np.conj(A) * P)
        return M[:, list(self.permutation)]

    def inverse(self, Q):
        Q = as_points(Q, self.source.dim)
        inv = np.argsort(self.permutation)
        M = Q[:, inv]
        A = np.array(self.points)
        return (M + A) / (1 + np.conj(A) * M)

    def to_dict(self) -> dict:
        return {"type": "product", "points": [_enc(a) for a in self.points], "permutation": list(self.permutation)}


@dataclass(frozen=True)
class HartogsMap(HoloMap):
    """F(z) = (z1, z1 z2), mapping the Hartogs-type domain into the unit bidisk."""

    source: Domain
    check: bool = True
    invertible: bool = field(default=True, init=False, repr=False)

    def __post_init__(self):
        if self.check:
            self.spot_check()

    @property
    def target(self) -> Domain:
        return unit_bidisk()

    def forward(self, P):
        return np.stack([P[:, 0], P[:, 0] * P[:, 1]], axis=1)

    def inverse(self, Q):
        Q = as_points(Q, 2)
        if np.any(Q[:, 0] == 0):
            raise ValueError("F is invertible only off {z1 = 0}")
        return np.stack([Q[:, 0], Q[:, 1] / Q[:, 0]], axis=1)

    def to_dict(self) -> dict:
        return {"type": "hartogs_F"}


@dataclass(frozen=True)
class BallAutomorphism(HoloMap):
    """Automorphism of a ball exchanging ``point`` and the center."""

    source: Ball
    point: tuple
    invertible: bool = field(default=True, init=False, repr=False)

    def __post_init__(self):
        p = as_point(self.point, self.source.dim)
        if self.source.margin(p) <= 0:
            raise ValueError("automorphism point must lie inside the ball")
        object.__setattr__(self, "point", _tuple_c(p))
        self.spot_check()

    @property
    def target(self) -> Domain:
        return self.source

    def forward(self, P):
        return self.source.automorphism(self.point, P)

    def inverse(self, Q):
        return self.source.automorphism(self.point, as_points(Q, self.source.dim))

    def to_dict(self) -> dict:
        return {"type": "ball_automorphism", "point": [_enc(z) for z in self.point]}


@dataclass(frozen=True)
class Composition(HoloMap):
    maps: tuple

    def __post_init__(self):
        if not self.maps:
            raise ValueError("empty composition")
        for a, b in zip(self.maps, self.maps[1:]):
            if a.target != b.source:
                raise ValueError("composition chain does not match source/target domains")

    @property
    def source(self) -> Domain:
        return self.maps[0].source

    @property
    def target(self) -> Domain:
        return self.maps[-1].target

    @property
    def invertible(self) -> bool:
        return all(m.invertible for m in self.maps)

    def forward(self, P):
        for m in self.maps:
            P = m.forward(P)
        return P

    def inverse(self, Q):
        for m in reversed(self.maps):
            Q = m.inverse(Q)
        return Q

    def to_dict(self) -> dict:
        return {"type": "composition", "maps": [m.to_dict() for m in self.maps]}


@dataclass(frozen=True)
class SliceMap(HoloMap):
    """zeta -> base + zeta * direction from the disk D(0, radius) into ``target``."""

    target: Domain
    base: tuple
    direction: tuple
    radius: float
    check: bool = True

    def __post_init__(self):
        object.__setattr__(self, "base", _tuple_c(self.base))
        e = as_point(self.direction, len(self.base))
        object.__setattr__(self, "direction", _tuple_c(e))
        if self.check:
            self.spot_check()

    @property
    def source(self) -> Domain:
        return Ball(center=(0j,), radius=self.radius)

    def forward(self, P):
        return np.array(self.base)[None, :] + P[:, 0:1] * np.array(self.direction)[None, :]

    def parameter(self, p, tol: float = 1e-9) -> complex:
        """Slice coordinate of a point lying on the slice."""
        p = as_point(p, len(self.base))
        e = np.array(self.direction)
        d = p - np.array(self.base)
        zeta = complex(hermitian_dot(d, e) / hermitian_dot(e, e))
        if np.linalg.norm(d - zeta * e) > tol * max(1.0, np.linalg.norm(d)):
            raise ValueError("point does not lie on the slice")
        return zeta

    def to_dict(self) -> dict:
        return {
            "type": "slice",
            "base": [_enc(z) for z in self.base],
            "direction": [_enc(z) for z in self.direction],
            "radius": self.radius,
        }


def apply_map(m: HoloMap, p) -> np.ndarray:
    """Image of a single point, refusing points outside the source domain."""
    p = as_point(p, m.source.dim)
    if m.source.margin(p) <= 0:
        raise ValueError("point lies outside the map's source domain")
    return m(p.reshape(1, -1))[0]


def defining_psh(domain: Domain) -> list[ScalarField]:
    return domain.defining_psh()


def contains(domain: Domain, p) -> float:
    return domain.margin(p)


def sphere_points(center, radius: float, dim: int, count: int) -> np.ndarray:
    """Deterministic sample of the sphere ||z - center|| = radius.

    In C^2 the grid is (cos a e^{i t1}, sin a e^{i t2}) with a on
    [0, pi/2] including both endpoints.
    """
    center = np.asarray(center, dtype=complex)
    if dim == 1:
        ang = 2 * np.pi * np.arange(count) / count
        return center + radius * np.exp(1j * ang)[:, None]
    na = max(3, int(round(count ** (1 / 3))))
    nt = max(2, int(round(math.sqrt(count / na))))
    alphas = np.linspace(0, np.pi / 2, na)
    th = 2 * np.pi * np.arange(nt) / nt
    A, T1, T2 = np.meshgrid(alphas, th, th + np.pi / nt, indexing="ij")
    ca, sa = np.cos(A), np.sin(A)
    ca[-1], sa[0] = 0.0, 0.0  # exact coordinate axes at the endpoints
    pts = np.stack([ca * np.exp(1j * T1), sa * np.exp(1j * T2)], axis=-1).reshape(-1, 2)
    return center + radius * pts


def fibonacci_directions(count: int) -> np.ndarray:
    """Low-discrepancy directions in C^2 indexed by points of CP^1 = S^2.

    The lattice includes both poles, i.e. the coordinate axes.
    """
    k = np.arange(count)
    zc = 1 - 2 * k / max(count - 1, 1)
    theta = np.arccos(np.clip(zc, -1, 1))
    phi = k * math.pi * (3 - math.sqrt(5))
    return np.stack([np.cos(theta / 2) + 0j, np.sin(theta / 2) * np.exp(1j * phi)], axis=1)
