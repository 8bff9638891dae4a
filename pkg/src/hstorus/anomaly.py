"""Existence certificates for the torus-bundle Hull-Strominger solutions.

A certificate bundles every arithmetic hypothesis of the existence
theorem into an ordered list of named pass/fail checks, so two runs over
the same parameters diff cleanly.  Nothing here throws on a failing
hypothesis: failures are data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .lattice import LatticeClass, asd_admissible, intersect
from .moduli import C2_K3, bundle_mukai, hym_exists, tangent_mukai
from .rationals import parse_rational, rational_to_json
from .topology import AbelianGroup, h2_rank, pi1

#: Fixed order of certificate checks (stable across versions for diffing).
CHECK_ORDER = ("asd1", "asd2", "integrality", "c2-integer", "rank-bound", "hym-V", "hym-W")


@dataclass(frozen=True)
class SolutionParams:
    """Input tuple (kappa1, kappa2, t, alpha, r) for the existence theorem."""

    kappa1: LatticeClass
    kappa2: LatticeClass
    t: Fraction
    alpha: Fraction
    r: int

    def __post_init__(self):
        object.__setattr__(self, "t", Fraction(self.t))
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.t <= 0:
            raise ValueError(f"fiber size t must be positive, got {self.t}")
        if self.alpha == 0:
            raise ValueError("alpha must be nonzero")
        if self.r < 1:
            raise ValueError(f"rank r must be >= 1, got {self.r}")

    def to_json(self) -> dict:
        return {
            "kappa1": self.kappa1.to_json(),
            "kappa2": self.kappa2.to_json(),
            "t": rational_to_json(self.t),
            "alpha": rational_to_json(self.alpha),
            "r": self.r,
        }

    @staticmethod
    def from_json(data: dict) -> "SolutionParams":
        return SolutionParams(
            kappa1=LatticeClass.from_json(data["kappa1"]),
            kappa2=LatticeClass.from_json(data["kappa2"]),
            t=parse_rational(data["t"]),
            alpha=parse_rational(data["alpha"]),
            r=int(data["r"]),
        )


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


@dataclass(frozen=True)
class SolutionCertificate:
    params: SolutionParams
    k1: int | None
    k2: int | None
    c2W: Fraction
    checks: tuple[Check, ...]
    pi1: AbelianGroup
    h2rank: int
    notes: tuple[str, ...] = field(default=())

    @property
    def valid(self) -> bool:
        return all(c.ok for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "k1": self.k1,
            "k2": self.k2,
            "c2W": rational_to_json(self.c2W),
            "checks": [c.to_json() for c in self.checks],
            "pi1": self.pi1.to_json(),
            "h2rank": self.h2rank,
            "valid": self.valid,
            "notes": list(self.notes),
            "version": __version__,
        }

    def dumps(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json(), indent=indent)


def q_sum(p: SolutionParams) -> int:
    return intersect(p.kappa1, p.kappa1) + intersect(p.kappa2, p.kappa2)


def integrality_check(p: SolutionParams) -> tuple[Fraction, bool]:
    """(t/alpha) * (Q(kappa1) + Q(kappa2)) and whether it is an integer."""
    value = p.t / p.alpha * q_sum(p)
    return value, value.denominator == 1


def c2_w(p: SolutionParams) -> Fraction:
    """Second Chern class of the gauge bundle: 24 + (t/alpha)(Q(k1) + Q(k2))."""
    return C2_K3 + p.t / p.alpha * q_sum(p)


def build_certificate(p: SolutionParams) -> SolutionCertificate:
    """Run all existence checks in the fixed order; never raises on failure."""
    checks = []

    k1 = asd_admissible(p.kappa1)
    checks.append(
        Check("asd1", k1 is not None,
              f"Q(kappa1) = {intersect(p.kappa1, p.kappa1)}"
              + (f" = -2*{k1}" if k1 is not None else " admits no anti-self-dual representative"))
    )
    k2 = asd_admissible(p.kappa2)
    checks.append(
        Check("asd2", k2 is not None,
              f"Q(kappa2) = {intersect(p.kappa2, p.kappa2)}"
              + (f" = -2*{k2}" if k2 is not None else " admits no anti-self-dual representative"))
    )

    ival, iok = integrality_check(p)
    checks.append(Check("integrality", iok, f"(t/alpha)(Q(kappa1)+Q(kappa2)) = {ival}"))

    c2 = c2_w(p)
    c2_int = c2.denominator == 1
    checks.append(Check("c2-integer", c2_int, f"c2(W) = {c2}"))

    rank_ok = c2_int and p.r <= c2
    checks.append(Check("rank-bound", rank_ok, f"r = {p.r} vs c2(W) = {c2}"))

    hv = hym_exists(tangent_mukai())
    checks.append(Check("hym-V", hv, "Mukai pairing of (3,0,-21) is 126 >= 0"))

    if c2_int:
        vw = bundle_mukai(p.r, int(c2))
        hw = hym_exists(vw)
        checks.append(Check("hym-W", hw, f"(v(W),v(W)) = {-2 * p.r * (p.r - int(c2))}"))
    else:
        checks.append(Check("hym-W", False, "c2(W) not an integer; no Mukai vector"))

    notes = [
        "asd checks certify only the lattice-level condition Q <= 0; "
        "orthogonality to the Kahler class and period plane depends on moduli of S",
        "hym checks encode the numerical moduli non-emptiness criterion only; "
        "the certified construction uses c1 = 0",
    ]
    if p.kappa1.is_zero() and p.kappa2.is_zero():
        notes.append("product case: total space is S x T^2 (both curvature classes vanish)")

    return SolutionCertificate(
        params=p,
        k1=k1,
        k2=k2,
        c2W=c2,
        checks=tuple(checks),
        pi1=pi1(p.kappa1, p.kappa2),
        h2rank=h2_rank(p.kappa1, p.kappa2),
        notes=tuple(notes),
    )
