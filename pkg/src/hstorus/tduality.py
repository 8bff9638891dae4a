"""T-duality maps on solution parameters and their orbit graphs.

The basic transformation sends (kappa, t) to (-t*kappa, 1/t), leaving
alpha and c2(W) untouched.  Each circle of the T^2 fiber can also be
dualized on its own, which motivates per-circle fiber sizes (t1, t2);
the generalized second Chern value 24 + (1/alpha)(t1*Q(k1) + t2*Q(k2))
restricts to the single-t formula at t1 = t2 and is conserved per circle
because each step preserves t_j * Q(kappa_j).  Certificates built from
per-circle parameters are an extension of the single-t construction and
are labeled as such.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .anomaly import SolutionParams, c2_w
from .lattice import LatticeClass, intersect
from .moduli import C2_K3
from .rationals import parse_rational, rational_to_json
from .topology import AbelianGroup, pi1


@dataclass(frozen=True)
class ExtendedParams:
    """Solution parameters with independent sizes for the two fiber circles."""

    kappa1: LatticeClass
    kappa2: LatticeClass
    t1: Fraction
    t2: Fraction
    alpha: Fraction
    r: int

    def __post_init__(self):
        object.__setattr__(self, "t1", Fraction(self.t1))
        object.__setattr__(self, "t2", Fraction(self.t2))
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.t1 <= 0 or self.t2 <= 0:
            raise ValueError("fiber sizes must be positive")
        if self.alpha == 0:
            raise ValueError("alpha must be nonzero")
        if self.r < 1:
            raise ValueError("rank must be >= 1")

    @staticmethod
    def from_params(p: SolutionParams) -> "ExtendedParams":
        return ExtendedParams(p.kappa1, p.kappa2, p.t, p.t, p.alpha, p.r)

    def to_params(self) -> SolutionParams:
        if self.t1 != self.t2:
            raise ValueError(f"unequal circle sizes t1={self.t1}, t2={self.t2}")
        return SolutionParams(self.kappa1, self.kappa2, self.t1, self.alpha, self.r)

    def kappa(self, j: int) -> LatticeClass:
        return self.kappa1 if j == 1 else self.kappa2

    def t(self, j: int) -> Fraction:
        return self.t1 if j == 1 else self.t2

    def circle_invariant(self, j: int) -> Fraction:
        """t_j * Q(kappa_j), conserved by dualizing circle j."""
        k = self.kappa(j)
        return self.t(j) * intersect(k, k)

    def generalized_c2(self) -> Fraction:
        return C2_K3 + (self.circle_invariant(1) + self.circle_invariant(2)) / self.alpha

    def to_json(self) -> dict:
        return {
            "kappa1": self.kappa1.to_json(),
            "kappa2": self.kappa2.to_json(),
            "t1": rational_to_json(self.t1),
            "t2": rational_to_json(self.t2),
            "alpha": rational_to_json(self.alpha),
            "r": self.r,
        }

    @staticmethod
    def from_json(data: dict) -> "ExtendedParams":
        return ExtendedParams(
            kappa1=LatticeClass.from_json(data["kappa1"]),
            kappa2=LatticeClass.from_json(data["kappa2"]),
            t1=parse_rational(data["t1"]),
            t2=parse_rational(data["t2"]),
            alpha=parse_rational(data["alpha"]),
            r=int(data["r"]),
        )


def dualize(p: SolutionParams) -> SolutionParams:
    """Full T-dual: kappa -> -t*kappa, t -> 1/t; alpha, r, c2(W) unchanged."""
    k1 = p.kappa1.scale_rational(-p.t)
    k2 = p.kappa2.scale_rational(-p.t)
    return SolutionParams(k1, k2, 1 / p.t, p.alpha, p.r)


def dualize_circle(p: ExtendedParams, j: int) -> ExtendedParams:
    """Dualize one circle: (kappa_j, t_j) -> (-t_j*kappa_j, 1/t_j)."""
    if j not in (1, 2):
        raise ValueError(f"circle index must be 1 or 2, got {j}")
    new_k = p.kappa(j).scale_rational(-p.t(j))
    new_t = 1 / p.t(j)
    if j == 1:
        return ExtendedParams(new_k, p.kappa2, new_t, p.t2, p.alpha, p.r)
    return ExtendedParams(p.kappa1, new_k, p.t1, new_t, p.alpha, p.r)


def dualize_both(p: ExtendedParams) -> ExtendedParams:
    return dualize_circle(dualize_circle(p, 1), 2)


def _canonical_key(p: ExtendedParams) -> tuple:
    """Node identity for orbits: overall sign of (kappa1, kappa2) is quotiented out."""
    flat = p.kappa1.coords + p.kappa2.coords
    sign = 1
    for c in flat:
        if c != 0:
            sign = 1 if c > 0 else -1
            break
    flat = tuple(sign * c for c in flat)
    return (
        flat,
        (p.t1.numerator, p.t1.denominator),
        (p.t2.numerator, p.t2.denominator),
        (p.alpha.numerator, p.alpha.denominator),
        p.r,
    )


@dataclass(frozen=True)
class OrbitNode:
    params: ExtendedParams
    pi1: AbelianGroup
    c2: Fraction

    def label(self) -> str:
        return f"t=({self.params.t1},{self.params.t2}) c2={self.c2} pi1={self.pi1}"


@dataclass
class OrbitGraph:
    nodes: dict[tuple, OrbitNode] = field(default_factory=dict)
    edges: set[tuple[tuple, tuple, str]] = field(default_factory=set)
    truncated: bool = False

    def node_keys(self) -> list[tuple]:
        return sorted(self.nodes)

    def to_json(self) -> dict:
        keys = self.node_keys()
        index = {k: i for i, k in enumerate(keys)}
        return {
            "nodes": [
                {
                    "id": index[k],
                    "params": self.nodes[k].params.to_json(),
                    "pi1": self.nodes[k].pi1.to_json(),
                    "c2": rational_to_json(self.nodes[k].c2),
                }
                for k in keys
            ],
            "edges": [
                {"source": i, "target": j, "circle": lab}
                for i, j, lab in sorted(
                    {
                        (min(index[a], index[b]), max(index[a], index[b]), lab)
                        for a, b, lab in self.edges
                    }
                )
            ],
            "truncated": self.truncated,
        }

    def dumps(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json(), indent=indent, sort_keys=True)

    def to_dot(self) -> str:
        keys = self.node_keys()
        index = {k: i for i, k in enumerate(keys)}
        lines = ["graph orbit {"]
        if self.truncated:
            lines.append('  label="truncated";')
        for k in keys:
            lines.append(f'  n{index[k]} [label="{self.nodes[k].label()}"];')
        seen = set()
        for a, b, lab in sorted(self.edges, key=lambda e: (index[e[0]], index[e[1]], e[2])):
            i, j = sorted((index[a], index[b]))
            if (i, j, lab) in seen:
                continue
            seen.add((i, j, lab))
            lines.append(f'  n{i} -- n{j} [label="{lab}"];')
        lines.append("}")
        return "\n".join(lines)


def _steps(p: ExtendedParams, denominator_bound: int):
    """Legal duality steps from p: per-circle and combined, bound-respecting."""
    out = []
    ok = {}
    for j in (1, 2):
        try:
            q = dualize_circle(p, j)
        except ValueError:
            continue
        if q.t(j).denominator <= denominator_bound:
            ok[j] = q
            out.append((str(j), q))
    if 1 in ok and 2 in ok:
        out.append(("both", dualize_circle(ok[1], 2)))
    return out


def orbit(p: ExtendedParams, max_nodes: int, denominator_bound: int) -> OrbitGraph:
    """Breadth-first closure of p under the per-circle duality steps.

    Nodes are deduplicated up to an overall sign of (kappa1, kappa2); the
    expansion order is deterministic (canonical key sort per frontier).
    """
    if max_nodes < 1:
        raise ValueError("max_nodes must be >= 1")
    graph = OrbitGraph()

    def add(q: ExtendedParams) -> tuple:
        key = _canonical_key(q)
        if key not in graph.nodes:
            graph.nodes[key] = OrbitNode(q, pi1(q.kappa1, q.kappa2), q.generalized_c2())
        return key

    frontier = [add(p)]
    while frontier:
        next_frontier = []
        for key in sorted(frontier):
            src = graph.nodes[key].params
            for label, q in _steps(src, denominator_bound):
                qkey = _canonical_key(q)
                if qkey not in graph.nodes:
                    if len(graph.nodes) >= max_nodes:
                        graph.truncated = True
                        continue
                    add(q)
                    next_frontier.append(qkey)
                graph.edges.add((key, qkey, label))
                graph.edges.add((qkey, key, label))
        frontier = next_frontier
    return graph


@dataclass(frozen=True)
class InvarianceReport:
    alpha_equal: bool
    c2_equal: bool
    c2_values: tuple[Fraction, Fraction]
    circle_invariants_equal: tuple[bool, bool]
    q_scaling: tuple[bool, bool]

    @property
    def all_invariants_equal(self) -> bool:
        return self.alpha_equal and self.c2_equal and all(self.circle_invariants_equal)

    def to_json(self) -> dict:
        return {
            "alpha_equal": self.alpha_equal,
            "c2_equal": self.c2_equal,
            "c2_values": [rational_to_json(v) for v in self.c2_values],
            "circle_invariants_equal": list(self.circle_invariants_equal),
            "q_scaling": list(self.q_scaling),
            "all_invariants_equal": self.all_invariants_equal,
        }


def invariance_report(p: ExtendedParams, q: ExtendedParams) -> InvarianceReport:
    """Audit exact conservation of alpha, c2, and the per-circle invariants.

    q_scaling[j] records whether Q(kappa'_j) = t_j^2 * Q(kappa_j), which
    holds exactly when q is the image of p under dualizing circle j.
    """
    c2p, c2q = p.generalized_c2(), q.generalized_c2()
    scaling = []
    for j in (1, 2):
        kp, kq = p.kappa(j), q.kappa(j)
        scaling.append(Fraction(intersect(kq, kq)) == p.t(j) ** 2 * intersect(kp, kp))
    return InvarianceReport(
        alpha_equal=p.alpha == q.alpha,
        c2_equal=c2p == c2q,
        c2_values=(c2p, c2q),
        circle_invariants_equal=tuple(
            p.circle_invariant(j) == q.circle_invariant(j) for j in (1, 2)
        ),
        q_scaling=tuple(scaling),
    )


def dual_certificate_pair(p: SolutionParams):
    """(certificate of p, certificate of dualize(p)); c2 values must agree."""
    from .anomaly import build_certificate

    cert = build_certificate(p)
    dual = build_certificate(dualize(p))
    assert cert.c2W == dual.c2W
    return cert, dual
