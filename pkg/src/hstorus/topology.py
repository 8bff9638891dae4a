"""Topological invariants of the total space of the T^2-bundle X_kappa.

The fundamental group comes from the long homotopy sequence of the
fibration: pi2(S) -> pi1(T^2) -> pi1(X) -> 1, where pi2(S) = H2(S, Z) and
the first map pairs against (kappa1, kappa2) under Poincare duality.  So
pi1(X) = coker of the 2x22 integer matrix with rows (G.kappa1)^T and
(G.kappa2)^T, computed via Smith normal form.

Hand-worked toy example (rank-4 lattice U + U, kappa1 = e1 - f1,
kappa2 = e2 - f2): the pairing matrix is [[-1, 1, 0, 0], [0, 0, -1, 1]],
whose SNF is diag(1, 1), so pi1 is trivial.  Doubling both classes gives
[[-2, 2, 0, 0], [0, 0, -2, 2]] with SNF diag(2, 2) and pi1 = Z2 + Z2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .lattice import GRAM, RANK, LatticeClass, rank_of, smith_normal_form

if TYPE_CHECKING:
    from .anomaly import SolutionParams


@dataclass(frozen=True)
class AbelianGroup:
    """Finitely generated abelian group in invariant-factor form."""

    invariant_factors: tuple[int, ...]
    free_rank: int

    def __post_init__(self):
        for a, b in zip(self.invariant_factors, self.invariant_factors[1:]):
            if b % a != 0:
                raise ValueError(f"invariant factors must divide in order: {self.invariant_factors}")
        if any(f < 2 for f in self.invariant_factors):
            raise ValueError("invariant factors must be >= 2")

    def is_trivial(self) -> bool:
        return not self.invariant_factors and self.free_rank == 0

    def order(self) -> int | None:
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        n = 1
        for f in self.invariant_factors:
            n *= f
        return n

    def to_json(self) -> dict:
        return {"torsion": list(self.invariant_factors), "free_rank": self.free_rank}

    @staticmethod
    def from_json(data: dict) -> "AbelianGroup":
        return AbelianGroup(tuple(int(x) for x in data["torsion"]), int(data["free_rank"]))

    def __str__(self) -> str:
        parts = [f"Z{f}" for f in self.invariant_factors]
        parts += ["Z"] * self.free_rank
        return " + ".join(parts) if parts else "1"


def _pairing_matrix(kappa1: LatticeClass, kappa2: LatticeClass) -> list[list[int]]:
    rows = []
    for k in (kappa1, kappa2):
        rows.append([sum(GRAM[i][j] * k.coords[i] for i in range(RANK)) for j in range(RANK)])
    return rows


def pi1(kappa1: LatticeClass, kappa2: LatticeClass) -> AbelianGroup:
    """Fundamental group of X_kappa as the cokernel of the pairing map."""
    snf = smith_normal_form(_pairing_matrix(kappa1, kappa2))
    torsion = tuple(d for d in snf.factors if d > 1)
    return AbelianGroup(torsion, 2 - snf.rank)


def h2_rank(kappa1: LatticeClass, kappa2: LatticeClass) -> int:
    """Rank of H^2(X, R) = H^2(S, R) / <kappa1, kappa2>."""
    span = [list(kappa1.coords), list(kappa2.coords)]
    return RANK - rank_of(span)


@dataclass(frozen=True)
class TopologyComparison:
    pi1_a: AbelianGroup
    pi1_b: AbelianGroup
    h2rank_a: int
    h2rank_b: int

    @property
    def same_pi1(self) -> bool:
        return self.pi1_a == self.pi1_b

    @property
    def same_h2rank(self) -> bool:
        return self.h2rank_a == self.h2rank_b

    def to_json(self) -> dict:
        return {
            "pi1_a": self.pi1_a.to_json(),
            "pi1_b": self.pi1_b.to_json(),
            "h2rank_a": self.h2rank_a,
            "h2rank_b": self.h2rank_b,
            "same_pi1": self.same_pi1,
            "same_h2rank": self.same_h2rank,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def topology_report(p: "SolutionParams", q: "SolutionParams") -> TopologyComparison:
    """Compare pi1 and the H^2 rank of the total spaces of two parameter sets."""
    return TopologyComparison(
        pi1_a=pi1(p.kappa1, p.kappa2),
        pi1_b=pi1(q.kappa1, q.kappa2),
        h2rank_a=h2_rank(p.kappa1, p.kappa2),
        h2rank_b=h2_rank(q.kappa1, q.kappa2),
    )
