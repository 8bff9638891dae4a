"""Mukai-vector arithmetic and sheaf-moduli non-emptiness certificates.

Existence of a unitary Hermite-Yang-Mills connection on a bundle over the
K3 surface is certified through non-emptiness of the moduli space of
slope-stable sheaves with the given Mukai vector, which holds whenever
the Mukai self-pairing is nonnegative.  Only the numerical criterion is
encoded here; stability subtleties on non-projective K3s are out of scope.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .lattice import LatticeClass, intersect

#: Second Chern number of the K3 surface (= c2 of the quotient tangent bundle).
C2_K3 = 24


@dataclass(frozen=True)
class MukaiVector:
    """Triple (v0, v1, v2): rank, first Chern class, and ch2-type integer."""

    v0: int
    v1: LatticeClass
    v2: int

    def to_json(self) -> dict:
        return {"v0": self.v0, "v1": self.v1.to_json(), "v2": self.v2}

    @staticmethod
    def from_json(data: dict) -> "MukaiVector":
        return MukaiVector(int(data["v0"]), LatticeClass.from_json(data["v1"]), int(data["v2"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def mukai_pairing(v: MukaiVector, w: MukaiVector) -> int:
    """Symmetric pairing; on the diagonal (v,v) = Q(v1) - 2*v0*v2."""
    return intersect(v.v1, w.v1) - v.v0 * w.v2 - v.v2 * w.v0


def tangent_mukai() -> MukaiVector:
    """Mukai vector (3, 0, -21) of the rank-3 quotient tangent bundle."""
    return MukaiVector(3, LatticeClass.zero(), -21)


def bundle_mukai(r: int, c2: int) -> MukaiVector:
    """Mukai vector (r, 0, r - c2) of a rank-r bundle with c1 = 0."""
    if r < 1:
        raise ValueError(f"rank must be >= 1, got {r}")
    return MukaiVector(r, LatticeClass.zero(), r - int(c2))


def hym_exists(v: MukaiVector) -> bool:
    """True iff the slope-stable moduli space with vector v is certified non-empty.

    The criterion is (v, v) >= 0; by Donaldson-Uhlenbeck-Yau this certifies
    a unitary Hermite-Yang-Mills connection on the corresponding bundle.
    """
    if v.v0 < 1:
        raise ValueError(f"rank must be >= 1, got {v.v0}")
    return mukai_pairing(v, v) >= 0
