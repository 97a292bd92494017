"""Two-sided bounds with provenance."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

SOUNDNESS_TOL = 1e-9

PROVENANCE_TAGS = ("closed_form", "certified_lo", "certified_hi", "estimate")


class SoundnessError(RuntimeError):
    """A certified lower bound exceeded a certified upper bound."""


class InfeasibleError(RuntimeError):
    """No bound of the requested kind could be established."""


def encode_real(x: float):
    """JSON-safe extended real: infinities become strings."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def decode_real(x) -> float:
    if isinstance(x, str):
        return float(x)
    return float(x)


@dataclass(frozen=True)
class BoundInterval:
    """An enclosure [lo, hi] of an extended-real quantity.

    ``lo_witness``/``hi_witness`` name the object that proves each side
    (a map, a field or a disk); ``lo_tag``/``hi_tag`` are one of
    ``PROVENANCE_TAGS``.
    """

    lo: float = -math.inf
    hi: float = math.inf
    lo_witness: str = "none"
    hi_witness: str = "none"
    certified: bool = True
    lo_tag: str = "certified_lo"
    hi_tag: str = "certified_hi"

    @property
    def width(self) -> float:
        if self.lo == self.hi:
            return 0.0
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        if math.isinf(self.lo) or math.isinf(self.hi):
            return self.hi if math.isinf(self.lo) and not math.isinf(self.hi) else self.lo
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def merge(self, other: "BoundInterval") -> "BoundInterval":
        """Intersection: best lower and best upper bound of the two."""
        out = self
        if other.lo > out.lo:
            out = replace(out, lo=other.lo, lo_witness=other.lo_witness, lo_tag=other.lo_tag)
        if other.hi < out.hi:
            out = replace(out, hi=other.hi, hi_witness=other.hi_witness, hi_tag=other.hi_tag)
        return replace(out, certified=self.certified and other.certified)

    def checked(self) -> "BoundInterval":
        """Raise on lo > hi beyond rounding; snap tiny crossings."""
        if self.lo > self.hi:
            if self.lo - self.hi > SOUNDNESS_TOL:
                raise SoundnessError(
                    f"lower bound {self.lo!r} ({self.lo_witness}) exceeds upper bound {self.hi!r} ({self.hi_witness})"
                )
            return replace(self, lo=self.hi)
        return self

    def to_json(self) -> dict:
        return {
            "lo": encode_real(self.lo),
            "hi": encode_real(self.hi),
            "lo_witness": self.lo_witness,
            "hi_witness": self.hi_witness,
            "lo_provenance": self.lo_tag,
            "hi_provenance": self.hi_tag,
            "certified": bool(self.certified),
        }

    @classmethod
    def from_json(cls, d: dict) -> "BoundInterval":
        return cls(
            lo=decode_real(d["lo"]),
            hi=decode_real(d["hi"]),
            lo_witness=d.get("lo_witness", "none"),
            hi_witness=d.get("hi_witness", "none"),
            certified=bool(d.get("certified", True)),
            lo_tag=d.get("lo_provenance", "certified_lo"),
            hi_tag=d.get("hi_provenance", "certified_hi"),
        )


def pole_interval() -> BoundInterval:
    return BoundInterval(-math.inf, -math.inf, "pole", "pole", True, "closed_form", "closed_form")


def hi_only(value: float, witness: str, certified: bool = True, tag: str = "certified_hi") -> BoundInterval:
    return BoundInterval(lo=-math.inf, hi=value, lo_witness="none", hi_witness=witness, certified=certified, hi_tag=tag)


def lo_only(value: float, witness: str, certified: bool = True, tag: str = "certified_lo") -> BoundInterval:
    return BoundInterval(lo=value, hi=math.inf, lo_witness=witness, hi_witness="none", certified=certified, lo_tag=tag)
